#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "lacunary/random.hpp"

namespace lacunary {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Tolerance on measure comparisons.
inline constexpr double kMeasureTol = 1e-12;

/// Finite union of disjoint closed intervals inside a working window. A
/// periodic set tiles the real line with period window.length().
class ThickSet {
 public:
  /// Sorts the intervals, merges touching ones and drops empty ones.
  /// Overlaps and intervals outside the window are errors.
  ThickSet(std::vector<Interval> intervals, Interval window, bool periodic);

  static ThickSet full(Interval window, bool periodic);
  /// Union over k of [w0 + k delta + phase, w0 + k delta + phase + gamma delta],
  /// clipped to the window. When the window length is a multiple of delta the
  /// result is periodic and (delta, gamma)-thick with equality; otherwise it
  /// is a non-periodic set.
  static ThickSet periodic_pattern(double gamma, double delta, Interval window,
                                   double phase = 0.0);

  std::span<const Interval> intervals() const { return intervals_; }
  const Interval& window() const { return window_; }
  bool periodic() const { return periodic_; }
  double period() const { return window_.length(); }

  double measure() const;
  /// |E n [a, b]|; for periodic sets every translate counts.
  double measure_in(double a, double b) const;
  /// The pieces of E n [a, b] as explicit intervals, unrolled over periods.
  std::vector<Interval> pieces_in(double a, double b) const;

  bool contains(const ThickSet& other) const;

 private:
  // |E n [w0, x]| for x in the window.
  double cumulative(double x) const;

  std::vector<Interval> intervals_;
  Interval window_;
  bool periodic_;
};

nlohmann::json to_json(const ThickSet& set);
ThickSet thick_set_from_json(const nlohmann::json& j);

/// Non-periodic union of `pieces` disjoint intervals with total measure
/// `measure`, lengths and gaps drawn uniformly then rescaled.
ThickSet random_union(CounterRng& rng, std::size_t pieces, double measure, Interval window);

/// inf over intervals I of length delta of |E n I| / delta. Non-periodic
/// sets only admit I inside the window. Exact: the infimum of a piecewise
/// linear function of the offset is taken over its breakpoints.
double thickness(const ThickSet& set, double delta);

struct PartitionBlock {
  std::size_t index = 0;
  Interval span;
  double measure = 0.0;
  /// 0-based subinterval indices.
  std::vector<std::size_t> good;
  std::vector<std::size_t> bad;
};

struct PartitionReport {
  double delta = 0.0;
  int L = 0;
  double gamma = 0.0;
  std::size_t subintervals_per_block = 0;
  /// (gamma/2) / (1 - gamma/2)
  double c_gamma = 0.0;
  /// c_gamma * L * delta
  double lower_bound = 0.0;
  std::vector<PartitionBlock> blocks;
  /// True iff every block has #good >= lower_bound.
  bool bound_holds = true;

  /// Union of the good subintervals, same window and periodicity as E.
  ThickSet good_set(const ThickSet& source) const;
};

nlohmann::json to_json(const PartitionReport& report);

/// Splits each block [w0 + k delta, w0 + (k+1) delta] into L delta pieces of
/// length 1/L; piece j is good iff |piece n E| > (gamma/2)/L (ties are bad).
PartitionReport partition_good_bad(const ThickSet& set, double delta, int L, double gamma);

}  // namespace lacunary
