#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "lacunary/experiment.hpp"
#include "lacunary/random.hpp"

namespace lacunary {

namespace {

using nlohmann::json;

struct Issues {
  std::vector<std::string> list;
  void add(std::string s) { list.push_back(std::move(s)); }
};

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed, Issues& issues) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) issues.add(where + "." + key + ": unknown key");
  }
}

std::optional<double> get_number(const json& obj, const std::string& key, const std::string& where,
                                 Issues& issues, bool required) {
  if (!obj.contains(key)) {
    if (required) issues.add(where + "." + key + ": required");
    return std::nullopt;
  }
  const json& v = obj.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    issues.add(where + "." + key + ": expected a finite number");
    return std::nullopt;
  }
  return v.get<double>();
}

std::optional<long long> get_int(const json& obj, const std::string& key, const std::string& where,
                                 Issues& issues, bool required, long long min_value) {
  if (!obj.contains(key)) {
    if (required) issues.add(where + "." + key + ": required");
    return std::nullopt;
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    issues.add(where + "." + key + ": expected an integer");
    return std::nullopt;
  }
  const long long x = v.get<long long>();
  if (x < min_value) {
    issues.add(where + "." + key + ": must be >= " + std::to_string(min_value));
    return std::nullopt;
  }
  return x;
}

std::optional<std::vector<double>> get_numbers(const json& obj, const std::string& key,
                                               const std::string& where, Issues& issues,
                                               bool required) {
  if (!obj.contains(key)) {
    if (required) issues.add(where + "." + key + ": required");
    return std::nullopt;
  }
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) {
    issues.add(where + "." + key + ": expected a non-empty array of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) {
      issues.add(where + "." + key + ": expected a non-empty array of numbers");
      return std::nullopt;
    }
    out.push_back(x.get<double>());
  }
  return out;
}

// Helpers for the builders, which report the first problem as a DomainError.
double num(const json& p, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!p.contains(key)) {
    if (fallback) return *fallback;
    throw DomainError(std::string("missing '") + key + "'");
  }
  if (!p.at(key).is_number()) throw DomainError(std::string("'") + key + "' must be a number");
  return p.at(key).get<double>();
}

long long integer(const json& p, const char* key, std::optional<long long> fallback = std::nullopt) {
  if (!p.contains(key)) {
    if (fallback) return *fallback;
    throw DomainError(std::string("missing '") + key + "'");
  }
  if (!p.at(key).is_number_integer()) {
    throw DomainError(std::string("'") + key + "' must be an integer");
  }
  return p.at(key).get<long long>();
}

Interval window_of(const json& p, Interval fallback) {
  if (!p.contains("window")) return fallback;
  const json& w = p.at("window");
  if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
    throw DomainError("'window' must be [lo, hi]");
  }
  return {w[0].get<double>(), w[1].get<double>()};
}

void only_keys(const json& p, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : p.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) throw DomainError("unknown key '" + key + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TailSchedule schedule_param(const json& p, const char* key, const char* fallback) {
  if (!p.contains(key)) return TailSchedule::parse(fallback);
  return tail_schedule_from_json(p.at(key));
}

struct KindRules {
  bool sequence;  // required
  bool set;
  bool grid;
  bool sequence_allowed;
};

KindRules rules_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::nazarov_sweep: return {true, false, false, true};
    case ExperimentKind::ls_sweep: return {false, false, true, true};
    case ExperimentKind::greedy_growth: return {false, false, false, false};
    case ExperimentKind::zygmund_profile: return {true, false, false, true};
    case ExperimentKind::lemma_ensemble: return {true, true, true, true};
    case ExperimentKind::theorem_ensemble: return {true, true, true, true};
    case ExperimentKind::carleman_denjoy: return {false, false, false, false};
    case ExperimentKind::separation: return {true, false, false, true};
  }
  return {};
}

void validate_schedule(const json& p, const char* key, Issues& issues) {
  if (!p.contains(key)) return;
  try {
    tail_schedule_from_json(p.at(key));
  } catch (const DomainError& e) {
    issues.add(std::string("params.") + key + ": " + e.what());
  }
}

void validate_params(ExperimentKind kind, const json& p, Issues& issues) {
  const std::string w = "params";
  if (!p.is_object()) {
    issues.add("params: expected an object");
    return;
  }
  switch (kind) {
    case ExperimentKind::nazarov_sweep: {
      check_keys(p, w, {"measures", "pattern", "teeth"}, issues);
      if (auto m = get_numbers(p, "measures", w, issues, true)) {
        for (double x : *m) {
          if (!(x > 0.0 && x <= 1.0)) issues.add("params.measures: values must lie in (0, 1]");
        }
      }
      if (p.contains("pattern")) {
        const json& v = p.at("pattern");
        if (!v.is_string() || (v != "interval" && v != "comb" && v != "random")) {
          issues.add("params.pattern: expected 'interval', 'comb' or 'random'");
        }
      }
      get_int(p, "teeth", w, issues, false, 1);
      break;
    }
    case ExperimentKind::ls_sweep: {
      check_keys(p, w, {"gammas", "delta", "profile"}, issues);
      if (auto g = get_numbers(p, "gammas", w, issues, true)) {
        for (double x : *g) {
          if (!(x > 0.0 && x <= 1.0)) issues.add("params.gammas: values must lie in (0, 1]");
        }
      }
      if (auto d = get_number(p, "delta", w, issues, false); d && !(*d > 0.0)) {
        issues.add("params.delta: must be positive");
      }
      if (p.contains("profile")) {
        const json& pr = p.at("profile");
        bool ok = pr.is_array() && !pr.empty();
        if (ok) {
          for (const json& b : pr) {
            ok = ok && b.is_array() && b.size() == 2 && b[0].is_number() && b[1].is_number() &&
                 b[0].get<double>() <= b[1].get<double>();
          }
        }
        if (!ok) issues.add("params.profile: expected a non-empty array of [lo, hi] bands");
      }
      break;
    }
    case ExperimentKind::greedy_growth:
      check_keys(p, w, {"count", "schedule"}, issues);
      get_int(p, "count", w, issues, true, 1);
      validate_schedule(p, "schedule", issues);
      break;
    case ExperimentKind::zygmund_profile:
      check_keys(p, w, {"levels", "schedule"}, issues);
      if (auto l = get_numbers(p, "levels", w, issues, true)) {
        for (double x : *l) {
          if (!(x >= 1.0) || x != std::floor(x)) {
            issues.add("params.levels: values must be integers >= 1");
          }
        }
      }
      validate_schedule(p, "schedule", issues);
      break;
    case ExperimentKind::lemma_ensemble: {
      check_keys(p, w, {"L", "gamma", "interval_start", "c2"}, issues);
      get_int(p, "L", w, issues, true, 1);
      if (auto g = get_number(p, "gamma", w, issues, false); g && !(*g > 0.0 && *g <= 1.0)) {
        issues.add("params.gamma: must lie in (0, 1]");
      }
      get_number(p, "interval_start", w, issues, false);
      if (auto c = get_numbers(p, "c2", w, issues, false)) {
        for (double x : *c) {
          if (!(x >= 0.0)) issues.add("params.c2: values must be >= 0");
        }
      }
      break;
    }
    case ExperimentKind::theorem_ensemble:
      check_keys(p, w, {"L", "schedule"}, issues);
      get_int(p, "L", w, issues, false, 1);
      validate_schedule(p, "schedule", issues);
      break;
    case ExperimentKind::carleman_denjoy:
      check_keys(p, w, {"N", "T_max"}, issues);
      get_int(p, "N", w, issues, true, 1);
      if (auto t = get_number(p, "T_max", w, issues, false); t && !(*t >= 1.0)) {
        issues.add("params.T_max: must be >= 1");
      }
      break;
    case ExperimentKind::separation:
      check_keys(p, w, {"N", "T"}, issues);
      get_int(p, "N", w, issues, false, 1);
      if (auto t = get_number(p, "T", w, issues, false); t && !(*t > 1.0)) {
        issues.add("params.T: must exceed 1");
      }
      break;
  }
}

// Spectral extent checks that need the built objects.
void validate_spectra(const ExperimentConfig& c, const std::optional<Sequence>& seq,
                      Issues& issues) {
  if (!c.grid) return;
  const Grid& g = *c.grid;
  auto nyquist = [&](double reach, const std::string& what) {
    if (!(reach < g.nyquist())) {
      issues.add("grid: Nyquist violation, " + what + " reaches " + std::to_string(reach) +
                 " but samples / (2 period) = " + std::to_string(g.nyquist()));
    }
  };
  switch (c.kind) {
    case ExperimentKind::ls_sweep: {
      double reach = 1.0;
      if (seq) {
        reach = 0.0;
        for (double x : seq->values()) reach = std::max({reach, std::abs(x), std::abs(x + 1.0)});
      } else if (c.params.contains("profile")) {
        reach = 0.0;
        for (const json& b : c.params.at("profile")) {
          if (b.is_array() && b.size() == 2 && b[0].is_number() && b[1].is_number()) {
            reach = std::max({reach, std::abs(b[0].get<double>()), std::abs(b[1].get<double>())});
          }
        }
      }
      nyquist(reach, "the profile");
      break;
    }
    case ExperimentKind::lemma_ensemble:
      nyquist(1.0, "the band [0, 1]");
      break;
    case ExperimentKind::theorem_ensemble:
      if (seq && !seq->empty()) {
        nyquist(seq->back() + 1.0, "the spectrum");
        for (std::size_t i = 0; i < seq->size(); ++i) {
          if (!g.exact_bin((*seq)[i])) {
            issues.add("sequence: lambda_" + std::to_string(i + 1) + " is not on the grid (1/T)Z");
            break;
          }
        }
        if (!(seq->front() > 0.0)) issues.add("sequence: theorem_ensemble needs positive frequencies");
      }
      break;
    default:
      break;
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : DomainError([&] {
        std::string msg = "invalid config:";
        for (const std::string& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::nazarov_sweep: return "nazarov_sweep";
    case ExperimentKind::ls_sweep: return "ls_sweep";
    case ExperimentKind::greedy_growth: return "greedy_growth";
    case ExperimentKind::zygmund_profile: return "zygmund_profile";
    case ExperimentKind::lemma_ensemble: return "lemma_ensemble";
    case ExperimentKind::theorem_ensemble: return "theorem_ensemble";
    case ExperimentKind::carleman_denjoy: return "carleman_denjoy";
    case ExperimentKind::separation: return "separation";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (ExperimentKind k :
       {ExperimentKind::nazarov_sweep, ExperimentKind::ls_sweep, ExperimentKind::greedy_growth,
        ExperimentKind::zygmund_profile, ExperimentKind::lemma_ensemble,
        ExperimentKind::theorem_ensemble, ExperimentKind::carleman_denjoy,
        ExperimentKind::separation}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Sequence build_sequence(const SequenceSource& source, const std::filesystem::path& base_dir) {
  const json& p = source.params;
  const std::string& b = source.builder;
  if (b == "hadamard" || b == "geometric") {
    only_keys(p, {"builder", "first", "ratio", "count"});
    const double ratio = num(p, "ratio");
    if (b == "hadamard" && !(ratio > 1.0)) throw DomainError("hadamard: ratio must exceed 1");
    const long long count = integer(p, "count");
    if (count < 1) throw DomainError("'count' must be >= 1");
    return build_geometric(num(p, "first", 1.0), ratio, static_cast<std::size_t>(count));
  }
  if (b == "counterexample") {
    only_keys(p, {"builder", "K"});
    return build_counterexample(static_cast<int>(integer(p, "K")));
  }
  if (b == "greedy") {
    only_keys(p, {"builder", "count", "schedule"});
    const long long count = integer(p, "count");
    if (count < 1) throw DomainError("'count' must be >= 1");
    return build_greedy(static_cast<std::size_t>(count), schedule_param(p, "schedule", "1:1@1"))
        .sequence;
  }
  if (b == "values") {
    only_keys(p, {"builder", "values"});
    if (!p.contains("values") || !p.at("values").is_array()) {
      throw DomainError("'values' must be an array of numbers");
    }
    bool all_int = true;
    std::vector<double> reals;
    std::vector<long long> ints;
    for (const json& v : p.at("values")) {
      if (!v.is_number()) throw DomainError("'values' must be an array of numbers");
      all_int = all_int && v.is_number_integer();
      reals.push_back(v.get<double>());
      if (v.is_number_integer()) ints.push_back(v.get<long long>());
    }
    return all_int ? Sequence::from_integers(std::span<const long long>(ints))
                   : Sequence::from_reals(std::move(reals));
  }
  if (b == "file") {
    only_keys(p, {"builder", "path"});
    if (!p.contains("path") || !p.at("path").is_string()) throw DomainError("'path' must be a string");
    return parse_sequence_text(read_file(base_dir / p.at("path").get<std::string>()));
  }
  throw DomainError("unknown sequence builder '" + b + "'");
}

ThickSet build_set(const SetSource& source, const std::filesystem::path& base_dir) {
  const json& p = source.params;
  const std::string& pat = source.pattern;
  if (pat == "interval") {
    only_keys(p, {"pattern", "lo", "hi", "window", "periodic"});
    const Interval w = window_of(p, {0.0, 1.0});
    const bool periodic = p.contains("periodic") && p.at("periodic").get<bool>();
    return ThickSet({{num(p, "lo"), num(p, "hi")}}, w, periodic);
  }
  if (pat == "comb") {
    only_keys(p, {"pattern", "teeth", "measure", "window"});
    const Interval w = window_of(p, {0.0, 1.0});
    const long long teeth = integer(p, "teeth");
    if (teeth < 1) throw DomainError("'teeth' must be >= 1");
    return ThickSet::periodic_pattern(num(p, "measure") / w.length(),
                                      w.length() / static_cast<double>(teeth), w);
  }
  if (pat == "periodic") {
    only_keys(p, {"pattern", "gamma", "delta", "window", "phase"});
    const double delta = num(p, "delta", 1.0);
    return ThickSet::periodic_pattern(num(p, "gamma"), delta, window_of(p, {0.0, delta}),
                                      num(p, "phase", 0.0));
  }
  if (pat == "random") {
    only_keys(p, {"pattern", "pieces", "measure", "window", "seed"});
    const Interval w = window_of(p, {0.0, 1.0});
    const long long pieces = integer(p, "pieces");
    if (pieces < 1) throw DomainError("'pieces' must be >= 1");
    const double measure = num(p, "measure");
    if (!(measure > 0.0 && measure <= w.length())) {
      throw DomainError("'measure' must lie in (0, window length]");
    }
    CounterRng rng(static_cast<std::uint64_t>(integer(p, "seed", 0)), 0);
    return random_union(rng, static_cast<std::size_t>(pieces), measure, w);
  }
  if (pat == "full") {
    only_keys(p, {"pattern", "window", "periodic"});
    const bool periodic = !p.contains("periodic") || p.at("periodic").get<bool>();
    return ThickSet::full(window_of(p, {0.0, 1.0}), periodic);
  }
  if (pat == "file") {
    only_keys(p, {"pattern", "path"});
    if (!p.contains("path") || !p.at("path").is_string()) throw DomainError("'path' must be a string");
    const std::string text = read_file(base_dir / p.at("path").get<std::string>());
    try {
      return thick_set_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw DomainError(std::string("set file: ") + e.what());
    }
  }
  throw DomainError("unknown set pattern '" + pat + "'");
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError({std::string("config: not valid JSON: ") + e.what()});
  }
  Issues issues;
  if (!root.is_object()) throw ValidationError({"config: expected a JSON object"});
  check_keys(root, "config",
             {"version", "kind", "sequence", "set", "grid", "ensemble", "params", "output"}, issues);

  ExperimentConfig c;
  c.base_dir = base_dir;
  c.sha256 = sha256_hex(text);
  if (auto v = get_int(root, "version", "config", issues, true, 0); v && *v != kConfigVersion) {
    issues.add("config.version: unsupported version " + std::to_string(*v) + ", expected " +
               std::to_string(kConfigVersion));
  }
  bool kind_ok = false;
  if (!root.contains("kind") || !root.at("kind").is_string()) {
    issues.add("config.kind: required string");
  } else if (auto k = parse_kind(root.at("kind").get<std::string>())) {
    c.kind = *k;
    kind_ok = true;
  } else {
    issues.add("config.kind: unknown experiment kind '" + root.at("kind").get<std::string>() + "'");
  }
  if (!root.contains("output") || !root.at("output").is_string() ||
      root.at("output").get<std::string>().empty()) {
    issues.add("config.output: required non-empty string");
  } else {
    c.output = base_dir / root.at("output").get<std::string>();
  }

  if (root.contains("ensemble")) {
    const json& e = root.at("ensemble");
    if (!e.is_object()) {
      issues.add("ensemble: expected an object");
    } else {
      check_keys(e, "ensemble", {"trials", "seed"}, issues);
      if (auto t = get_int(e, "trials", "ensemble", issues, false, 1)) {
        c.ensemble.trials = static_cast<std::size_t>(*t);
      }
      if (auto s = get_int(e, "seed", "ensemble", issues, false, 0)) {
        c.ensemble.seed = static_cast<std::uint64_t>(*s);
      }
    }
  }

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    if (!g.is_object()) {
      issues.add("grid: expected an object");
    } else {
      check_keys(g, "grid", {"period", "samples"}, issues);
      const auto T = get_number(g, "period", "grid", issues, true);
      const auto S = get_int(g, "samples", "grid", issues, true, 2);
      if (T && !(*T > 0.0)) issues.add("grid.period: must be positive");
      if (T && S && *T > 0.0) c.grid = Grid::make(*T, static_cast<std::size_t>(*S));
    }
  }

  if (root.contains("params")) c.params = root.at("params");
  if (kind_ok) validate_params(c.kind, c.params, issues);

  std::optional<Sequence> seq;
  if (root.contains("sequence")) {
    const json& s = root.at("sequence");
    if (!s.is_object() || !s.contains("builder") || !s.at("builder").is_string()) {
      issues.add("sequence: expected an object with a 'builder' string");
    } else {
      c.sequence = SequenceSource{s.at("builder").get<std::string>(), s};
      try {
        seq = build_sequence(*c.sequence, base_dir);
      } catch (const std::exception& e) {
        issues.add(std::string("sequence: ") + e.what());
      }
    }
  }
  if (root.contains("set")) {
    const json& s = root.at("set");
    if (!s.is_object() || !s.contains("pattern") || !s.at("pattern").is_string()) {
      issues.add("set: expected an object with a 'pattern' string");
    } else {
      c.set = SetSource{s.at("pattern").get<std::string>(), s};
      try {
        build_set(*c.set, base_dir);
      } catch (const std::exception& e) {
        issues.add(std::string("set: ") + e.what());
      }
    }
  }

  if (kind_ok) {
    const KindRules r = rules_for(c.kind);
    const std::string kind(to_string(c.kind));
    if (r.sequence && !root.contains("sequence")) issues.add("sequence: required for " + kind);
    if (!r.sequence_allowed && root.contains("sequence")) {
      issues.add("sequence: not used by " + kind);
    }
    if (r.set && !root.contains("set")) issues.add("set: required for " + kind);
    if (!r.set && root.contains("set")) issues.add("set: not used by " + kind);
    if (r.grid && !root.contains("grid")) issues.add("grid: required for " + kind);
    if (!r.grid && root.contains("grid")) issues.add("grid: not used by " + kind);
    validate_spectra(c, seq, issues);
  }

  if (!issues.list.empty()) throw ValidationError(std::move(issues.list));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DomainError& e) {
    throw ValidationError({e.what()});
  }
  return parse_config(text, path.parent_path());
}

}  // namespace lacunary
