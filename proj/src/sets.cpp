#include "lacunary/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "lacunary/errors.hpp"

namespace lacunary {

namespace {

// Sorted union; overlapping and touching intervals are merged.
std::vector<Interval> merge_union(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const Interval& iv : v) {
    if (!(iv.hi > iv.lo)) continue;
    if (!out.empty() && iv.lo <= out.back().hi + kMeasureTol) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

// Ratio a/b when it is an integer up to rounding, else nullopt.
std::optional<long long> integral_ratio(double a, double b) {
  const double r = a / b;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r))) return std::nullopt;
  return static_cast<long long>(k);
}

}  // namespace

ThickSet::ThickSet(std::vector<Interval> intervals, Interval window, bool periodic)
    : window_(window), periodic_(periodic) {
  if (!std::isfinite(window.lo) || !std::isfinite(window.hi) || !(window.hi > window.lo)) {
    throw DomainError("thick set: window must be a nondegenerate finite interval");
  }
  for (Interval& iv : intervals) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo) {
      throw DomainError("thick set: malformed interval");
    }
    if (iv.lo < window.lo - kMeasureTol || iv.hi > window.hi + kMeasureTol) {
      throw DomainError("thick set: interval [" + std::to_string(iv.lo) + ", " +
                        std::to_string(iv.hi) + "] leaves the window");
    }
    iv.lo = std::max(iv.lo, window.lo);
    iv.hi = std::min(iv.hi, window.hi);
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i].lo < intervals[i - 1].hi - kMeasureTol) {
      throw DomainError("thick set: intervals overlap");
    }
  }
  intervals_ = merge_union(std::move(intervals));
}

ThickSet ThickSet::full(Interval window, bool periodic) {
  return ThickSet({window}, window, periodic);
}

ThickSet ThickSet::periodic_pattern(double gamma, double delta, Interval window, double phase) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("periodic_pattern: gamma in [0, 1]");
  if (!(delta > 0.0)) throw DomainError("periodic_pattern: delta must be positive");
  const double len = window.length();
  std::vector<Interval> pieces;
  phase = phase - delta * std::floor(phase / delta);
  const auto tiles = integral_ratio(len, delta);
  const bool periodic = tiles.has_value();
  if (tiles) {
    for (long long k = 0; k < *tiles; ++k) {
      const double s = window.lo + static_cast<double>(k) * delta + phase;
      const double e = s + gamma * delta;
      if (e <= window.hi) {
        pieces.push_back({s, e});
      } else {
        // phase < delta keeps s inside the window. The overhang is the
        // wrapped piece (periodic) or the tail of the k = -1 copy.
        pieces.push_back({s, window.hi});
        pieces.push_back({window.lo, window.lo + (e - window.hi)});
      }
    }
  } else {
    const long long count = static_cast<long long>(std::ceil(len / delta)) + 1;
    for (long long k = -1; k <= count; ++k) {
      const double s = window.lo + static_cast<double>(k) * delta + phase;
      const double e = s + gamma * delta;
      const double lo = std::max(s, window.lo);
      const double hi = std::min(e, window.hi);
      if (hi > lo) pieces.push_back({lo, hi});
    }
  }
  return ThickSet(merge_union(std::move(pieces)), window, periodic);
}

double ThickSet::measure() const {
  double m = 0.0;
  for (const Interval& iv : intervals_) m += iv.length();
  return m;
}

double ThickSet::cumulative(double x) const {
  double m = 0.0;
  for (const Interval& iv : intervals_) {
    if (x <= iv.lo) break;
    m += std::min(iv.hi, x) - iv.lo;
  }
  return m;
}

double ThickSet::measure_in(double a, double b) const {
  if (!(b > a)) return 0.0;
  if (!periodic_) {
    const double lo = std::max(a, window_.lo);
    const double hi = std::min(b, window_.hi);
    if (!(hi > lo)) return 0.0;
    return cumulative(hi) - cumulative(lo);
  }
  const double p = period();
  const double total = measure();
  auto unrolled = [&](double x) {
    const double q = std::floor((x - window_.lo) / p);
    const double r = std::clamp(x - q * p, window_.lo, window_.hi);
    return q * total + cumulative(r);
  };
  return unrolled(b) - unrolled(a);
}

std::vector<Interval> ThickSet::pieces_in(double a, double b) const {
  std::vector<Interval> out;
  if (!(b > a)) return out;
  auto clip = [&](double shift) {
    for (const Interval& iv : intervals_) {
      const double lo = std::max(iv.lo + shift, a);
      const double hi = std::min(iv.hi + shift, b);
      if (hi > lo) out.push_back({lo, hi});
    }
  };
  if (!periodic_) {
    clip(0.0);
    return out;
  }
  const double p = period();
  const auto q0 = static_cast<long long>(std::floor((a - window_.lo) / p));
  const auto q1 = static_cast<long long>(std::floor((b - window_.lo) / p));
  for (long long q = q0; q <= q1; ++q) clip(static_cast<double>(q) * p);
  return merge_union(std::move(out));
}

bool ThickSet::contains(const ThickSet& other) const {
  for (const Interval& iv : other.intervals()) {
    if (measure_in(iv.lo, iv.hi) < iv.length() - kMeasureTol) return false;
  }
  return true;
}

nlohmann::json to_json(const ThickSet& set) {
  nlohmann::json ivs = nlohmann::json::array();
  for (const Interval& iv : set.intervals()) ivs.push_back({iv.lo, iv.hi});
  return {{"intervals", ivs},
          {"window", {set.window().lo, set.window().hi}},
          {"periodic", set.periodic()}};
}

ThickSet thick_set_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("thick set: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "intervals" && key != "window" && key != "periodic") {
      throw DomainError("thick set: unknown key '" + key + "'");
    }
  }
  if (!j.contains("intervals") || !j.contains("window")) {
    throw DomainError("thick set: 'intervals' and 'window' are required");
  }
  auto pair = [](const nlohmann::json& p) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw DomainError("thick set: expected [lo, hi] pair");
    }
    return Interval{p[0].get<double>(), p[1].get<double>()};
  };
  std::vector<Interval> ivs;
  for (const auto& p : j.at("intervals")) ivs.push_back(pair(p));
  const bool periodic = j.contains("periodic") ? j.at("periodic").get<bool>() : false;
  return ThickSet(std::move(ivs), pair(j.at("window")), periodic);
}

ThickSet random_union(CounterRng& rng, std::size_t pieces, double measure, Interval window) {
  if (pieces < 1) throw DomainError("random_union: need at least one piece");
  if (!(measure > 0.0 && measure <= window.length())) {
    throw DomainError("random_union: measure must lie in (0, window length]");
  }
  std::vector<double> lengths(pieces);
  std::vector<double> gaps(pieces + 1);
  for (double& x : lengths) x = rng.uniform(0.05, 1.0);
  for (double& x : gaps) x = rng.uniform(0.05, 1.0);
  double lsum = 0.0;
  double gsum = 0.0;
  for (double x : lengths) lsum += x;
  for (double x : gaps) gsum += x;
  const double free = window.length() - measure;
  std::vector<Interval> out;
  double at = window.lo;
  for (std::size_t i = 0; i < pieces; ++i) {
    at += gaps[i] / gsum * free;
    const double len = lengths[i] / lsum * measure;
    out.push_back({at, std::min(at + len, window.hi)});
    at += len;
  }
  return ThickSet(std::move(out), window, false);
}

double thickness(const ThickSet& set, double delta) {
  if (!(delta > 0.0)) throw DomainError("thickness: delta must be positive");
  const Interval w = set.window();
  const double len = w.length();
  if (delta > len * (1.0 + 1e-12)) {
    throw DomainError(set.periodic() ? "thickness: delta exceeds the period"
                                     : "thickness: delta exceeds the window length");
  }
  delta = std::min(delta, len);
  std::vector<double> offsets;
  for (const Interval& iv : set.intervals()) {
    for (double e : {iv.lo, iv.hi}) {
      offsets.push_back(e);
      offsets.push_back(e - delta);
    }
  }
  if (set.periodic()) {
    offsets.push_back(w.lo);
    for (double& t : offsets) t = w.lo + (t - w.lo) - len * std::floor((t - w.lo) / len);
  } else {
    offsets.push_back(w.lo);
    offsets.push_back(w.hi - delta);
    for (double& t : offsets) t = std::clamp(t, w.lo, w.hi - delta);
  }
  double best = std::numeric_limits<double>::infinity();
  for (double t : offsets) best = std::min(best, set.measure_in(t, t + delta));
  return std::max(0.0, best / delta);
}

ThickSet PartitionReport::good_set(const ThickSet& source) const {
  std::vector<Interval> pieces;
  const double step = 1.0 / static_cast<double>(L);
  for (const PartitionBlock& b : blocks) {
    for (std::size_t j : b.good) {
      const double lo = b.span.lo + static_cast<double>(j) * step;
      pieces.push_back({lo, std::min(lo + step, b.span.hi)});
    }
  }
  return ThickSet(merge_union(std::move(pieces)), source.window(), source.periodic());
}

nlohmann::json to_json(const PartitionReport& report) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const PartitionBlock& b : report.blocks) {
    blocks.push_back({{"index", b.index},
                      {"span", {b.span.lo, b.span.hi}},
                      {"measure", b.measure},
                      {"good", b.good},
                      {"bad", b.bad}});
  }
  return {{"delta", report.delta},
          {"L", report.L},
          {"gamma", report.gamma},
          {"subintervals_per_block", report.subintervals_per_block},
          {"c_gamma", report.c_gamma},
          {"lower_bound", report.lower_bound},
          {"bound_holds", report.bound_holds},
          {"blocks", blocks}};
}

PartitionReport partition_good_bad(const ThickSet& set, double delta, int L, double gamma) {
  if (!(delta > 0.0)) throw DomainError("partition_good_bad: delta must be positive");
  if (L < 1) throw DomainError("partition_good_bad: L must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("partition_good_bad: gamma in (0, 1]");
  const auto pieces = integral_ratio(static_cast<double>(L) * delta, 1.0);
  if (!pieces || *pieces < 1) {
    throw DomainError("partition_good_bad: L*delta must be a positive integer");
  }
  const auto nblocks = integral_ratio(set.window().length(), delta);
  if (!nblocks || *nblocks < 1) {
    throw DomainError("partition_good_bad: window length must be a multiple of delta");
  }

  PartitionReport report;
  report.delta = delta;
  report.L = L;
  report.gamma = gamma;
  report.subintervals_per_block = static_cast<std::size_t>(*pieces);
  report.c_gamma = (gamma / 2.0) / (1.0 - gamma / 2.0);
  report.lower_bound = report.c_gamma * static_cast<double>(*pieces);

  const double step = 1.0 / static_cast<double>(L);
  const double threshold = gamma / 2.0 * step;
  for (long long k = 0; k < *nblocks; ++k) {
    PartitionBlock block;
    block.index = static_cast<std::size_t>(k);
    block.span = {set.window().lo + static_cast<double>(k) * delta,
                  set.window().lo + static_cast<double>(k + 1) * delta};
    block.measure = set.measure_in(block.span.lo, block.span.hi);
    if (block.measure < gamma * delta - kMeasureTol) {
      throw DomainError("partition_good_bad: block " + std::to_string(k) + " has measure " +
                        std::to_string(block.measure) + " < gamma*delta; E is not (" +
                        std::to_string(delta) + ", " + std::to_string(gamma) + ")-thick");
    }
    for (std::size_t j = 0; j < report.subintervals_per_block; ++j) {
      const double lo = block.span.lo + static_cast<double>(j) * step;
      const double m = set.measure_in(lo, lo + step);
      (m - threshold > kMeasureTol ? block.good : block.bad).push_back(j);
    }
    if (static_cast<double>(block.good.size()) < report.lower_bound - 1e-9) {
      report.bound_holds = false;
    }
    report.blocks.push_back(std::move(block));
  }
  return report;
}

}  // namespace lacunary
