#pragma once

#include <cstdint>
#include <random>

namespace d2dsim {

// Stateless mixer used to derive independent substream seeds (per cell, per
// object, per draw) from one base seed. splitmix64 finalizer.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform() { return dist_(eng_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * dist_(eng_); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> dist_{0.0, 1.0};
};

}  // namespace d2dsim
