#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace lacunary {

// Counter-based generator: draw i of stream s under seed k is a pure function
// of (k, s, i), so ensembles give the same numbers regardless of scheduling.
// Gaussian draws use Box-Muller instead of std::normal_distribution, whose
// output is implementation-defined.
class CounterRng {
 public:
  static constexpr std::string_view kName = "splitmix64-counter/v1";

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  /// Standard complex Gaussian, E|z|^2 = 1.
  std::complex<double> complex_normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t x);

}  // namespace lacunary
