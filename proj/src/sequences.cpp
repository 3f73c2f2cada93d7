#include "lacunary/sequences.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "lacunary/errors.hpp"

namespace lacunary {

namespace {

const ExactInt& exact_limit() {
  static const ExactInt limit = ExactInt(1) << 250;
  return limit;
}

void require_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      throw DomainError("sequence: values must be strictly increasing (index " +
                        std::to_string(i + 1) + ")");
    }
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

// Counting core shared by the exact and floating paths. `values` is the tail
// under study; `offset` converts its 0-based indices into 1-based indices of
// the parent sequence.
template <class T>
void count_near_differences(const std::vector<T>& values, const T& threshold,
                            std::size_t offset, LacunarityReport& report) {
  const std::size_t n = values.size();
  struct Diff {
    T d;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Diff> diffs;
  diffs.reserve(n * (n > 0 ? n - 1 : 0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) diffs.push_back({values[a] - values[b], a, b});
    }
  }
  std::vector<Diff> sorted = diffs;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Diff& x, const Diff& y) { return x.d < y.d; });

  const auto below = [](const Diff& x, const T& v) { return x.d < v; };
  const auto above = [](const T& v, const Diff& x) { return v < x.d; };

  std::size_t best = 0;
  const Diff* best_diff = nullptr;
  for (const Diff& x : diffs) {
    const T lo = x.d - threshold;
    const T hi = x.d + threshold;
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), lo, below);
    const auto last = std::upper_bound(first, sorted.end(), hi, above);
    const auto count = static_cast<std::size_t>(last - first);
    if (count > best) {
      best = count;
      best_diff = &x;
    }
  }

  report.constant = static_cast<double>(best);
  report.witness.clear();
  report.matched.clear();
  if (best_diff == nullptr) return;
  report.witness.push_back({best_diff->a + offset + 1, best_diff->b + offset + 1});
  const T lo = best_diff->d - threshold;
  const T hi = best_diff->d + threshold;
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), lo, below);
  const auto last = std::upper_bound(first, sorted.end(), hi, above);
  for (auto it = first; it != last; ++it) {
    report.matched.push_back({it->a + offset + 1, it->b + offset + 1});
  }
}

LacunarityReport zygmund_on_tail(const Sequence& seq, std::size_t first, double threshold,
                                 LacunarityKind kind) {
  if (!(threshold >= 1.0) || !std::isfinite(threshold)) {
    throw DomainError("zygmund_constant: threshold must be a finite real >= 1");
  }
  LacunarityReport report;
  report.kind = kind;
  report.parameter = threshold;
  report.tail_start = first;
  const Sequence tail = seq.tail(first);
  if (tail.integer_valued()) {
    // For integer differences |x| <= L is |x| <= floor(L).
    const ExactInt thr(static_cast<long long>(std::floor(threshold)));
    std::vector<ExactInt> v(tail.exact().begin(), tail.exact().end());
    count_near_differences(v, thr, first - 1, report);
  } else {
    std::vector<double> v(tail.values().begin(), tail.values().end());
    count_near_differences(v, threshold, first - 1, report);
  }
  return report;
}

}  // namespace

Sequence Sequence::from_reals(std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("sequence: non-finite value");
  }
  require_increasing(values);
  Sequence s;
  s.values_ = std::move(values);
  return s;
}

Sequence Sequence::from_integers(std::vector<ExactInt> values) {
  Sequence s;
  s.values_.reserve(values.size());
  for (const ExactInt& v : values) {
    if (abs(v) >= exact_limit()) {
      throw DomainError("sequence: integer value exceeds 2^250 in magnitude");
    }
    s.values_.push_back(v.convert_to<double>());
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw DomainError("sequence: values must be strictly increasing (index " +
                        std::to_string(i + 1) + ")");
    }
  }
  s.exact_ = std::move(values);
  s.integer_ = true;
  return s;
}

Sequence Sequence::from_integers(std::span<const long long> values) {
  std::vector<ExactInt> exact(values.begin(), values.end());
  return from_integers(std::move(exact));
}

Sequence Sequence::tail(std::size_t first) const {
  if (first == 0) throw DomainError("sequence: tail index is 1-based");
  const std::size_t skip = std::min(first - 1, size());
  Sequence s;
  s.integer_ = integer_;
  s.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(skip), values_.end());
  if (integer_) {
    s.exact_.assign(exact_.begin() + static_cast<std::ptrdiff_t>(skip), exact_.end());
  }
  return s;
}

std::string to_text(const Sequence& seq) {
  std::ostringstream out;
  if (seq.integer_valued()) {
    for (const ExactInt& v : seq.exact()) out << v << '\n';
  } else {
    out.precision(17);
    for (double v : seq.values()) out << v << '\n';
  }
  return out.str();
}

Sequence parse_sequence_text(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    std::string t = trim(line);
    if (!t.empty() && t[0] != '#') tokens.push_back(std::move(t));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  const bool all_int = std::all_of(tokens.begin(), tokens.end(),
                                   [](const std::string& t) { return is_integer_literal(t); });
  if (all_int && !tokens.empty()) {
    std::vector<ExactInt> values;
    values.reserve(tokens.size());
    for (const auto& t : tokens) {
      try {
        values.emplace_back(t[0] == '+' ? t.substr(1) : t);
      } catch (const std::exception&) {
        throw DomainError("sequence: integer out of range: " + t);
      }
    }
    return Sequence::from_integers(std::move(values));
  }
  std::vector<double> values;
  values.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw DomainError("sequence: not a number: '" + t + "'");
    values.push_back(v);
  }
  return Sequence::from_reals(std::move(values));
}

std::string_view to_string(LacunarityKind kind) {
  switch (kind) {
    case LacunarityKind::hadamard: return "hadamard";
    case LacunarityKind::zygmund: return "zygmund";
    case LacunarityKind::strong_zygmund: return "strong_zygmund";
  }
  return "unknown";
}

nlohmann::json to_json(const LacunarityReport& report) {
  nlohmann::json j;
  j["kind"] = to_string(report.kind);
  j["parameter"] = report.parameter;
  if (std::isfinite(report.constant)) {
    j["constant"] = report.constant;
  } else {
    j["constant"] = "inf";
  }
  j["passes"] = report.passes ? nlohmann::json(*report.passes) : nlohmann::json(nullptr);
  j["tail_start"] = report.tail_start;
  auto pairs = [](const std::vector<IndexPair>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : v) arr.push_back({p.k, p.l});
    return arr;
  };
  j["witness"] = pairs(report.witness);
  j["matched"] = pairs(report.matched);
  return j;
}

TailSchedule::TailSchedule(std::vector<Breakpoint> breakpoints, int max_level)
    : breakpoints_(std::move(breakpoints)), max_level_(max_level) {
  if (breakpoints_.empty()) throw DomainError("tail schedule: no breakpoints");
  if (breakpoints_.front().level != 1) {
    throw DomainError("tail schedule: first breakpoint must be at level 1");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (breakpoints_[i].start < 1) throw DomainError("tail schedule: M(L) must be >= 1");
    if (i > 0) {
      if (breakpoints_[i].level <= breakpoints_[i - 1].level) {
        throw DomainError("tail schedule: levels must be strictly increasing");
      }
      if (breakpoints_[i].start < breakpoints_[i - 1].start) {
        throw DomainError("tail schedule: M must be non-decreasing");
      }
    }
  }
  if (max_level_ < breakpoints_.back().level) {
    throw DomainError("tail schedule: max_level below the last breakpoint");
  }
}

TailSchedule TailSchedule::constant(std::size_t start, int max_level) {
  return TailSchedule({{1, start}}, max_level);
}

TailSchedule TailSchedule::parse(std::string_view text) {
  std::string body(text);
  std::optional<int> max_level;
  if (const auto at = body.find('@'); at != std::string::npos) {
    try {
      max_level = std::stoi(body.substr(at + 1));
    } catch (const std::exception&) {
      throw DomainError("tail schedule: bad max level in '" + std::string(text) + "'");
    }
    body.resize(at);
  }
  std::vector<Breakpoint> bps;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw DomainError("tail schedule: expected L:M, got '" + item + "'");
    }
    try {
      const int level = std::stoi(item.substr(0, colon));
      const long long start = std::stoll(item.substr(colon + 1));
      if (start < 1) throw DomainError("tail schedule: M(L) must be >= 1");
      bps.push_back({level, static_cast<std::size_t>(start)});
    } catch (const DomainError&) {
      throw;
    } catch (const std::exception&) {
      throw DomainError("tail schedule: expected L:M, got '" + item + "'");
    }
  }
  if (bps.empty()) throw DomainError("tail schedule: no breakpoints");
  const int top = max_level.value_or(bps.back().level);
  return TailSchedule(std::move(bps), top);
}

std::optional<std::size_t> TailSchedule::start_for(int level) const {
  if (level < 1 || level > max_level_) return std::nullopt;
  std::size_t start = breakpoints_.front().start;
  for (const auto& bp : breakpoints_) {
    if (bp.level > level) break;
    start = bp.start;
  }
  return start;
}

int TailSchedule::level_at(std::size_t n) const {
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (breakpoints_[i].start <= n) last = i;
  }
  if (!last) return 0;
  if (*last + 1 < breakpoints_.size()) return breakpoints_[*last + 1].level - 1;
  return max_level_;
}

nlohmann::json to_json(const TailSchedule& schedule) {
  nlohmann::json bps = nlohmann::json::array();
  for (const auto& bp : schedule.breakpoints()) bps.push_back({bp.level, bp.start});
  return {{"breakpoints", bps}, {"max_level", schedule.max_level()}};
}

TailSchedule tail_schedule_from_json(const nlohmann::json& j) {
  if (j.is_string()) return TailSchedule::parse(j.get<std::string>());
  if (!j.is_object() || !j.contains("breakpoints")) {
    throw DomainError("tail schedule: expected {\"breakpoints\": [[L, M], ...]}");
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "breakpoints" && key != "max_level") {
      throw DomainError("tail schedule: unknown key '" + key + "'");
    }
  }
  std::vector<TailSchedule::Breakpoint> bps;
  for (const auto& item : j.at("breakpoints")) {
    if (!item.is_array() || item.size() != 2) {
      throw DomainError("tail schedule: breakpoint must be [L, M]");
    }
    const long long start = item[1].get<long long>();
    if (start < 1) throw DomainError("tail schedule: M(L) must be >= 1");
    bps.push_back({item[0].get<int>(), static_cast<std::size_t>(start)});
  }
  if (bps.empty()) throw DomainError("tail schedule: no breakpoints");
  const int top = j.contains("max_level") ? j.at("max_level").get<int>() : bps.back().level;
  return TailSchedule(std::move(bps), top);
}

LacunarityReport check_hadamard(const Sequence& seq, double q) {
  if (!(q > 1.0)) throw DomainError("check_hadamard: q must exceed 1");
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!(seq[i] > 0.0)) {
      throw DomainError("check_hadamard: nonpositive element at index " + std::to_string(i + 1));
    }
  }
  LacunarityReport report;
  report.kind = LacunarityKind::hadamard;
  report.parameter = q;
  report.constant = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const double ratio = seq[i + 1] / seq[i];
    if (ratio < report.constant) {
      report.constant = ratio;
      report.witness = {{i + 1, i + 2}};
    }
  }
  report.passes = report.constant >= q;
  return report;
}

LacunarityReport zygmund_constant(const Sequence& seq, double threshold) {
  return zygmund_on_tail(seq, 1, threshold, LacunarityKind::zygmund);
}

std::vector<LacunarityReport> strong_zygmund_profile(const Sequence& seq,
                                                     const TailSchedule& schedule,
                                                     std::span<const int> levels) {
  std::vector<LacunarityReport> out;
  out.reserve(levels.size());
  for (int level : levels) {
    const auto start = schedule.start_for(level);
    if (!start) {
      throw DomainError("strong_zygmund_profile: schedule undefined at L=" +
                        std::to_string(level));
    }
    if (*start > seq.size()) {
      throw DomainError("strong_zygmund_profile: M(L)=" + std::to_string(*start) +
                        " beyond truncation length " + std::to_string(seq.size()) +
                        " at L=" + std::to_string(level));
    }
    out.push_back(zygmund_on_tail(seq, *start, static_cast<double>(level),
                                  LacunarityKind::strong_zygmund));
  }
  return out;
}

bool certifies_strong(std::span<const LacunarityReport> profile, double bound) {
  return std::all_of(profile.begin(), profile.end(),
                     [bound](const LacunarityReport& r) { return r.constant <= bound; });
}

GreedyConstruction build_greedy(std::size_t count, const TailSchedule& schedule) {
  if (count < 1) throw DomainError("build_greedy: count must be >= 1");
  GreedyConstruction out;
  std::vector<long long> terms{1};
  terms.reserve(count);
  std::vector<bool> forbidden;
  while (terms.size() < count) {
    const std::size_t n = terms.size();
    const int level = schedule.level_at(n);
    const auto nn = static_cast<long long>(n);
    const long long bound = (2LL * level + 1) * nn * nn * nn + 1;
    if (bound > (1LL << 40)) {
      throw DomainError("build_greedy: search range too large at n=" + std::to_string(n));
    }
    // Only values in [1, bound] matter: the forbidden set has at most
    // (2L+1) n^3 elements, so some value in that range is free.
    forbidden.assign(static_cast<std::size_t>(bound) + 1, false);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const long long pair = terms[i] + terms[j];
        for (std::size_t k = 0; k < n; ++k) {
          const long long centre = pair - terms[k];
          const long long lo = std::max(centre - level, 1LL);
          const long long hi = std::min(centre + level, bound);
          for (long long v = lo; v <= hi; ++v) forbidden[static_cast<std::size_t>(v)] = true;
        }
      }
    }
    long long next = 1;
    while (next <= bound && forbidden[static_cast<std::size_t>(next)]) ++next;
    out.steps.push_back({n, level, next, bound});
    if (next > bound) {
      out.bound_holds = false;
      throw NumericalError("build_greedy: no free value within the growth bound at n=" +
                           std::to_string(n));
    }
    terms.push_back(next);
  }
  out.sequence = Sequence::from_integers(std::span<const long long>(terms));
  return out;
}

Sequence build_counterexample(int K) {
  if (K < 1) throw DomainError("build_counterexample: K must be >= 1");
  std::vector<ExactInt> values;
  values.reserve(2 * static_cast<std::size_t>(K));
  ExactInt power = 1;
  for (int k = 1; k <= K; ++k) {
    power *= 4;
    const ExactInt shifted = power + k;
    if (shifted >= exact_limit()) {
      throw DomainError("build_counterexample: K=" + std::to_string(K) +
                        " overflows the exact integer range");
    }
    // 4^k + k < 4^(k+1), so emitting per k keeps the list sorted.
    values.push_back(power);
    values.push_back(shifted);
  }
  return Sequence::from_integers(std::move(values));
}

Sequence build_geometric(double first, double ratio, std::size_t count) {
  if (!(first > 0.0) || !(ratio > 1.0)) {
    throw DomainError("build_geometric: need first > 0 and ratio > 1");
  }
  const bool integral = std::floor(first) == first && std::floor(ratio) == ratio &&
                        first < 9.0e15 && ratio < 9.0e15;
  if (integral) {
    std::vector<ExactInt> values;
    ExactInt v(static_cast<long long>(first));
    const ExactInt r(static_cast<long long>(ratio));
    for (std::size_t i = 0; i < count; ++i) {
      if (v >= exact_limit()) {
        throw DomainError("build_geometric: term " + std::to_string(i + 1) +
                          " overflows the exact integer range");
      }
      values.push_back(v);
      v *= r;
    }
    return Sequence::from_integers(std::move(values));
  }
  std::vector<double> values;
  double v = first;
  for (std::size_t i = 0; i < count; ++i) {
    values.push_back(v);
    v *= ratio;
  }
  return Sequence::from_reals(std::move(values));
}

std::vector<BlockRepresentations> difference_representations(const Sequence& seq) {
  if (!seq.integer_valued()) {
    throw DomainError("difference_representations: sequence must be integer-valued");
  }
  std::map<ExactInt, std::size_t> counts;
  const auto x = seq.exact();
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) ++counts[x[a] - x[b]];
  }
  std::map<int, BlockRepresentations> blocks;
  for (const auto& [m, c] : counts) {
    const int block = static_cast<int>(boost::multiprecision::msb(m) / 2);
    auto [it, inserted] = blocks.try_emplace(block, BlockRepresentations{block, c, m});
    if (!inserted && c > it->second.max_count) {
      it->second.max_count = c;
      it->second.argmax = m;
    }
  }
  std::vector<BlockRepresentations> out;
  out.reserve(blocks.size());
  for (auto& [_, b] : blocks) out.push_back(b);
  return out;
}

}  // namespace lacunary
