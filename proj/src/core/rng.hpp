#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace soiltag {

// Deterministic counter-free PRNG (splitmix64 core). The standard
// distributions are implementation-defined, so all draws used in
// simulation outputs go through this generator to keep artifacts
// byte-identical across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller.
  double normal();

  // Circularly-symmetric complex normal with E|z|^2 = power.
  std::complex<double> complex_normal(double power);

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// Sub-seed derivation: every stochastic stage derives its own stream
// from (parent seed, stage name) or (parent seed, index) so results do
// not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace soiltag
