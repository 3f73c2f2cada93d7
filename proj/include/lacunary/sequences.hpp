#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

namespace lacunary {

/// Exact integer used for integer-valued sequences. Values are capped at
/// 2^250 in magnitude so that second differences never overflow.
using ExactInt = boost::multiprecision::checked_int256_t;

/// Strictly increasing finite list of frequencies. Integer-valued sequences
/// also carry an exact representation; counting operations use it so that
/// e.g. 4^64 + 64 is handled without rounding.
class Sequence {
 public:
  Sequence() = default;

  static Sequence from_reals(std::vector<double> values);
  static Sequence from_integers(std::vector<ExactInt> values);
  static Sequence from_integers(std::span<const long long> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  bool integer_valued() const { return integer_; }

  std::span<const double> values() const { return values_; }
  /// Empty unless integer_valued().
  std::span<const ExactInt> exact() const { return exact_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  /// Subsequence of terms with 1-based index k >= first.
  Sequence tail(std::size_t first) const;

  bool operator==(const Sequence&) const = default;

 private:
  std::vector<double> values_;
  std::vector<ExactInt> exact_;
  bool integer_ = false;
};

/// One value per line, exact decimal for integer-valued sequences.
std::string to_text(const Sequence& seq);
/// Parses the one-value-per-line format. Blank lines and lines starting with
/// '#' are skipped. All-integer input yields an integer-valued sequence.
Sequence parse_sequence_text(std::string_view text);

enum class LacunarityKind { hadamard, zygmund, strong_zygmund };
std::string_view to_string(LacunarityKind kind);

/// 1-based index pair (k, l) into the sequence the report refers to.
struct IndexPair {
  std::size_t k = 0;
  std::size_t l = 0;
  bool operator==(const IndexPair&) const = default;
};

struct LacunarityReport {
  LacunarityKind kind = LacunarityKind::hadamard;
  /// q for Hadamard, the threshold L for (strong) Zygmund.
  double parameter = 0.0;
  /// Minimum ratio (Hadamard) or the count N (Zygmund). +inf for degenerate
  /// Hadamard input.
  double constant = 0.0;
  /// Only meaningful for Hadamard reports.
  std::optional<bool> passes;
  /// Extremal pair: (i, i+1) for Hadamard, (k, l) for Zygmund.
  std::vector<IndexPair> witness;
  /// Zygmund only: all pairs (k', l') counted for the witness, self included.
  std::vector<IndexPair> matched;
  /// 1-based index of the first term the report covers.
  std::size_t tail_start = 1;
};

nlohmann::json to_json(const LacunarityReport& report);

/// Non-decreasing step function L -> M(L), defined for 1 <= L <= max_level.
/// Levels beyond max_level are treated as M(L) = infinity.
class TailSchedule {
 public:
  struct Breakpoint {
    int level;
    std::size_t start;
  };

  TailSchedule(std::vector<Breakpoint> breakpoints, int max_level);
  /// M(L) = start for every 1 <= L <= max_level.
  static TailSchedule constant(std::size_t start, int max_level);
  /// Parses "L:M,L:M,..." with an optional "@max_level" suffix.
  static TailSchedule parse(std::string_view text);

  int max_level() const { return max_level_; }
  std::span<const Breakpoint> breakpoints() const { return breakpoints_; }

  /// M(level), or nullopt above max_level.
  std::optional<std::size_t> start_for(int level) const;
  /// Largest L <= max_level with M(L) <= n, or 0 if there is none.
  int level_at(std::size_t n) const;

 private:
  std::vector<Breakpoint> breakpoints_;
  int max_level_;
};

nlohmann::json to_json(const TailSchedule& schedule);
TailSchedule tail_schedule_from_json(const nlohmann::json& j);

LacunarityReport check_hadamard(const Sequence& seq, double q);

/// N = max over ordered pairs k != l of #{(k', l'), k' != l' :
/// |(x_k - x_l) - (x_k' - x_l')| <= threshold}, self-pair included.
LacunarityReport zygmund_constant(const Sequence& seq, double threshold);

/// Zygmund constant of the tail (x_k)_{k >= M(L)} at threshold L for each L.
std::vector<LacunarityReport> strong_zygmund_profile(const Sequence& seq,
                                                     const TailSchedule& schedule,
                                                     std::span<const int> levels);

/// True iff every report's constant is at most bound.
bool certifies_strong(std::span<const LacunarityReport> profile, double bound);

struct GreedyStep {
  std::size_t n;      ///< number of terms before the step
  int level;          ///< L with M(L) <= n < M(L+1)
  long long value;    ///< the new term x_{n+1}
  long long bound;    ///< (2L+1) n^3 + 1
};

struct GreedyConstruction {
  Sequence sequence;
  std::vector<GreedyStep> steps;
  bool bound_holds = true;
};

/// Sidon-type greedy: x_1 = 1, and x_{n+1} is the least positive integer
/// outside {x_i + x_j - x_k + p : i, j, k <= n, |p| <= L(n)}.
GreedyConstruction build_greedy(std::size_t count, const TailSchedule& schedule);

/// Sorted {4^k + j k : 1 <= k <= K, j in {0, 1}}.
Sequence build_counterexample(int K);

/// Geometric sequence first * ratio^k, k = 0..count-1; integer-valued when
/// first and ratio are integers.
Sequence build_geometric(double first, double ratio, std::size_t count);

struct BlockRepresentations {
  int block;               ///< n with 4^n <= m < 4^(n+1)
  std::size_t max_count;   ///< max over m in the block of #{(a, b) : x_a - x_b = m}
  ExactInt argmax;
};

/// Representation counts of positive differences, grouped by base-4 block.
/// Requires an integer-valued sequence.
std::vector<BlockRepresentations> difference_representations(const Sequence& seq);

}  // namespace lacunary
