#include <iostream>
#include <string>
#include <vector>

#include "d2dsim/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return d2dsim::run_cli(args, std::cout, std::cerr);
}
