#pragma once

#include <cstdint>
#include <random>

namespace nlg {

std::uint64_t splitmix64(std::uint64_t x);

// Seed for an independent substream; chunk-indexed so parallel Monte Carlo
// results do not depend on the worker count.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream + 0x9e3779b97f4a7c15ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n) by rejection, so no modulo bias.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller on two uniform01 draws; the spare value
  // is cached so each pair of calls consumes exactly two uniforms.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nlg
