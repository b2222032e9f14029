#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace d2dsim {

// Dispatches the generate-default / run / losmap subcommands. args excludes
// the program name. Returns 0 on success, 2 on usage or scenario validation
// errors, 1 on runtime failures; diagnostics go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace d2dsim
