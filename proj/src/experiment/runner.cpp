#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "lacunary/concentration.hpp"
#include "lacunary/experiment.hpp"
#include "lacunary/random.hpp"
#include "lacunary/uniqueness.hpp"

namespace lacunary {

namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs body(i) for i in [0, n) on a small worker pool. Results go to
// caller-owned slots, so scheduling never affects the output. The exception
// of the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body body) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Single writer for one run's outputs.
class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::string& contents) {
    write_atomic(dir_ / name, contents);
    record(name, contents);
  }
  void table(const std::string& name, const ResultTable& t) { text(name, to_csv(t)); }
  void plot(const std::string& name, const ResultTable& t, PlotSpec spec) {
    emit_plot_data(t, spec, dir_ / name);
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    record(name, ss.str());
  }
  const std::vector<ManifestEntry>& entries() const { return entries_; }

 private:
  void record(const std::string& name, const std::string& contents) {
    entries_.push_back({name, sha256_hex(contents), contents.size()});
  }

  std::filesystem::path dir_;
  std::vector<ManifestEntry> entries_;
};

double param(const json& p, const char* key, double fallback) {
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

long long param_int(const json& p, const char* key, long long fallback) {
  return p.contains(key) ? p.at(key).get<long long>() : fallback;
}

std::vector<double> param_list(const json& p, const char* key, std::vector<double> fallback) {
  return p.contains(key) ? p.at(key).get<std::vector<double>>() : fallback;
}

TailSchedule param_schedule(const json& p) {
  return p.contains("schedule") ? tail_schedule_from_json(p.at("schedule"))
                                : TailSchedule::parse("1:1@1");
}

std::vector<cd> random_block(CounterRng& rng, std::size_t size) {
  std::vector<cd> block(size);
  for (cd& c : block) c = rng.complex_normal();
  return block;
}

Cell optional_cell(const std::optional<double>& v) {
  return v ? Cell(*v) : Cell(std::numeric_limits<double>::quiet_NaN());
}

void run_nazarov_sweep(const ExperimentConfig& c, Outputs& out, json& summary) {
  const Sequence seq = build_sequence(*c.sequence, c.base_dir);
  const std::vector<double> measures = c.params.at("measures").get<std::vector<double>>();
  const std::string pattern = c.params.value("pattern", std::string("interval"));
  const auto teeth = static_cast<std::size_t>(param_int(c.params, "teeth", 4));
  const std::size_t trials = pattern == "random" ? c.ensemble.trials : 1;

  std::vector<ConcentrationEstimate> results(measures.size() * trials);
  parallel_for(results.size(), [&](std::size_t i) {
    const double m = measures[i / trials];
    const Interval torus{0.0, 1.0};
    std::optional<ThickSet> E;
    if (pattern == "interval") {
      E.emplace(std::vector<Interval>{{0.0, m}}, torus, false);
    } else if (pattern == "comb") {
      E.emplace(ThickSet::periodic_pattern(m, 1.0 / static_cast<double>(teeth), torus));
    } else {
      CounterRng rng(c.ensemble.seed, i);
      E.emplace(random_union(rng, teeth, m, torus));
    }
    results[i] = nazarov_constant(*E, seq);
  });

  ResultTable t{{"measure [|E| on the unit torus]", "trial", "lambda_min [Nazarov Gram form]",
                 "C [1/lambda_min]", "residual [||Gv - lambda v||]", "dimension"},
                {}};
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const ConcentrationEstimate& e = results[i];
    t.add({measures[i / trials], static_cast<std::int64_t>(i % trials), e.lambda_min, e.constant,
           e.residual, static_cast<std::int64_t>(e.dimension)});
    worst = std::min(worst, e.lambda_min);
  }
  out.table("nazarov_sweep.csv", t);
  out.plot("nazarov_sweep.dat", t, {{t.columns[0], t.columns[2]}, std::nullopt});
  summary["pattern"] = pattern;
  summary["min_lambda_min"] = worst;
  summary["dimension"] = seq.size();
}

void run_ls_sweep(const ExperimentConfig& c, Outputs& out, json& summary) {
  const Grid& grid = *c.grid;
  const double delta = param(c.params, "delta", 1.0);
  FrequencySupport profile = FrequencySupport::unit_band();
  if (c.sequence) {
    profile = SpectralProfile(build_sequence(*c.sequence, c.base_dir)).support();
  } else if (c.params.contains("profile")) {
    profile.bands.clear();
    for (const json& b : c.params.at("profile")) {
      profile.bands.push_back({b[0].get<double>(), b[1].get<double>()});
    }
  }
  const std::vector<double> gammas = c.params.at("gammas").get<std::vector<double>>();
  const Interval window{0.0, delta};

  std::vector<ConcentrationEstimate> results(gammas.size());
  std::vector<double> thick(gammas.size());
  parallel_for(gammas.size(), [&](std::size_t i) {
    const ThickSet E = ThickSet::periodic_pattern(gammas[i], delta, window);
    thick[i] = thickness(E, delta);
    results[i] = ls_constant(E, profile, grid);
  });
  const ConcentrationEstimate control = ls_constant(ThickSet::full(window, true), profile, grid);

  ResultTable t{{"gamma [thickness parameter]", "delta [thickness scale]",
                 "measured_thickness [inf |E n I|/delta]", "lambda_min [Logvinenko-Sereda compression]",
                 "C [1/lambda_min]", "degenerate", "dimension"},
                {}};
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const ConcentrationEstimate& e = results[i];
    t.add({gammas[i], delta, thick[i], e.lambda_min, e.constant,
           static_cast<std::int64_t>(e.degenerate), static_cast<std::int64_t>(e.dimension)});
  }
  out.table("ls_sweep.csv", t);
  out.plot("ls_sweep.dat", t, {{t.columns[0], t.columns[4]}, std::nullopt});
  summary["full_window"] = to_json(control);
  summary["profile_bands"] = profile.bands.size();
}

void run_greedy_growth(const ExperimentConfig& c, Outputs& out, json& summary) {
  const auto count = static_cast<std::size_t>(c.params.at("count").get<long long>());
  const TailSchedule schedule = param_schedule(c.params);
  const GreedyConstruction g = build_greedy(count, schedule);
  ResultTable t{{"n [terms before the step]", "lambda_next [new term]", "L [level at n]",
                 "bound [(2L+1)n^3+1]", "within_bound"},
                {}};
  for (const GreedyStep& s : g.steps) {
    t.add({static_cast<std::int64_t>(s.n), static_cast<std::int64_t>(s.value),
           static_cast<std::int64_t>(s.level), static_cast<std::int64_t>(s.bound),
           static_cast<std::int64_t>(s.value <= s.bound)});
  }
  out.table("greedy_growth.csv", t);
  if (!t.rows.empty()) {
    out.plot("greedy_growth.dat", t, {{t.columns[0], t.columns[1], t.columns[3]}, std::nullopt});
  }
  summary["count"] = g.sequence.size();
  summary["bound_holds"] = g.bound_holds;
  summary["schedule"] = to_json(schedule);
}

void run_zygmund_profile(const ExperimentConfig& c, Outputs& out, json& summary) {
  const Sequence seq = build_sequence(*c.sequence, c.base_dir);
  std::vector<int> levels;
  for (double x : c.params.at("levels").get<std::vector<double>>()) {
    levels.push_back(static_cast<int>(x));
  }
  std::vector<LacunarityReport> full(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) {
    full[i] = zygmund_constant(seq, static_cast<double>(levels[i]));
  });
  std::vector<LacunarityReport> tail;
  std::optional<TailSchedule> schedule;
  if (c.params.contains("schedule")) {
    schedule = tail_schedule_from_json(c.params.at("schedule"));
    tail = strong_zygmund_profile(seq, *schedule, levels);
  }
  ResultTable t{{"L [difference threshold]", "N_full [Zygmund count]", "M [tail start; 1-based]",
                 "N_tail [strong Zygmund count]"},
                {}};
  for (std::size_t i = 0; i < levels.size(); ++i) {
    Cell start = std::string();
    Cell tail_count = std::string();
    if (schedule) {
      start = static_cast<std::int64_t>(tail[i].tail_start);
      tail_count = tail[i].constant;
    }
    t.add({static_cast<std::int64_t>(levels[i]), full[i].constant, start, tail_count});
  }
  out.table("zygmund_profile.csv", t);
  out.plot("zygmund_profile.dat", t, {{t.columns[0], t.columns[1]}, std::nullopt});
  summary["length"] = seq.size();
  json reports = json::array();
  for (const auto& r : full) reports.push_back(to_json(r));
  summary["full"] = reports;
  if (schedule) {
    json tails = json::array();
    for (const auto& r : tail) tails.push_back(to_json(r));
    summary["tail"] = tails;
  }
}

void run_lemma_ensemble(const ExperimentConfig& c, Outputs& out, json& summary) {
  const Sequence seq = build_sequence(*c.sequence, c.base_dir);
  const ThickSet E = build_set(*c.set, c.base_dir);
  const Grid& grid = *c.grid;
  const int L = static_cast<int>(c.params.at("L").get<long long>());
  const std::optional<double> gamma =
      c.params.contains("gamma") ? std::optional<double>(c.params.at("gamma").get<double>())
                                 : std::nullopt;
  const double start = param(c.params, "interval_start", 0.0);
  const Interval I{start, start + 1.0 / L};
  const std::vector<double> c2 = param_list(c.params, "c2", {0.0, 0.25, 0.5, 1.0, 2.0, 4.0});

  std::vector<LemmaReport> reports(c.ensemble.trials);
  parallel_for(reports.size(), [&](std::size_t trial) {
    CounterRng rng(c.ensemble.seed, trial);
    std::vector<BandFunction> fs;
    for (std::size_t n = 0; n < seq.size(); ++n) {
      std::vector<cd> coeffs(grid.samples, cd(0.0));
      for (std::size_t b = 0; b < grid.unit_band_size(); ++b) {
        coeffs[grid.slot(static_cast<std::int64_t>(b))] = rng.complex_normal();
      }
      fs.push_back(BandFunction::from_spectrum(grid, std::move(coeffs),
                                               FrequencySupport::unit_band()));
    }
    reports[trial] = lemma_main_report(fs, seq, E, I, L, gamma);
  });

  ResultTable t{{"trial", "lhs [int over I n E of |sum f_n e(lambda_n x)|^2]",
                 "term_density [int over I of sum |f_n|^2]",
                 "term_sobolev [int over I of sum |f_n|^2 + |f_n'|^2]", "lhs_over_density"},
                {}};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const LemmaReport& r = reports[i];
    t.add({static_cast<std::int64_t>(i), r.lhs, r.term_density, r.term_sobolev,
           r.term_density > 0 ? r.lhs / r.term_density : std::numeric_limits<double>::quiet_NaN()});
  }
  out.table("lemma_trials.csv", t);
  const std::vector<double> margins = lemma_margins(reports, L, c2);
  ResultTable m{{"C2 [candidate constant]", "margin [inf (lhs + C2 L^-1/2 sobolev) / density]"}, {}};
  for (std::size_t i = 0; i < c2.size(); ++i) m.add({c2[i], margins[i]});
  out.table("lemma_margins.csv", m);
  out.plot("lemma_margins.dat", m, {{m.columns[0], m.columns[1]}, std::nullopt});
  summary["L"] = L;
  summary["interval"] = {I.lo, I.hi};
  summary["intersection_measure"] = reports.empty() ? 0.0 : reports.front().intersection_measure;
}

void run_theorem_ensemble(const ExperimentConfig& c, Outputs& out, json& summary) {
  const Sequence seq = build_sequence(*c.sequence, c.base_dir);
  const ThickSet E = build_set(*c.set, c.base_dir);
  const Grid& grid = *c.grid;
  const int L = static_cast<int>(param_int(c.params, "L", 1));
  const TailSchedule schedule = param_schedule(c.params);
  const std::size_t band = grid.unit_band_size();

  std::vector<SplitReport> reports(c.ensemble.trials);
  parallel_for(reports.size(), [&](std::size_t trial) {
    CounterRng rng(c.ensemble.seed, trial);
    std::vector<std::vector<cd>> blocks;
    for (std::size_t n = 0; n < seq.size(); ++n) blocks.push_back(random_block(rng, band));
    reports[trial] = theorem_split_check(blocks, seq, schedule, L, E, grid);
  });
  std::vector<std::vector<cd>> pure(seq.size());
  pure[0] = {cd(1.0)};
  const SplitReport control = theorem_split_check(pure, seq, schedule, L, E, grid);

  ResultTable t{{"trial", "ratio [||F chi_E|| / ||F||]", "ratio_head [n < M(L)]",
                 "ratio_tail [n >= M(L)]", "norm [||F|| over one period]", "norm_head", "norm_tail"},
                {}};
  double min_ratio = std::numeric_limits<double>::infinity();
  std::int64_t argmin = -1;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const SplitReport& r = reports[i];
    t.add({static_cast<std::int64_t>(i), r.ratio, optional_cell(r.ratio_head),
           optional_cell(r.ratio_tail), r.norm, r.norm_head, r.norm_tail});
    if (r.ratio < min_ratio) {
      min_ratio = r.ratio;
      argmin = static_cast<std::int64_t>(i);
    }
  }
  out.table("theorem_trials.csv", t);
  ResultTable s{{"trials", "min_ratio [min over trials of ||F chi_E|| / ||F||]", "argmin_trial",
                 "control_ratio_squared [pure frequency]"},
                {}};
  s.add({static_cast<std::int64_t>(reports.size()), min_ratio, argmin,
         control.ratio * control.ratio});
  out.table("theorem_summary.csv", s);
  summary["min_ratio"] = min_ratio;
  summary["all_positive"] = min_ratio > 0.0;
  summary["control"] = to_json(control);
}

void run_carleman_denjoy(const ExperimentConfig& c, Outputs& out, json& summary) {
  const auto N = static_cast<std::size_t>(c.params.at("N").get<long long>());
  const double T_max = param(c.params, "T_max", 1e8);
  const QuasiAnalyticityReport r = carleman_denjoy_partial(N, T_max);
  ResultTable t{{"n", "log_M [log sup xi^n / W(xi)]", "mu [M_{n-1} / M_n]", "S [sum of mu up to n]"},
                {}};
  for (std::size_t n = 1; n <= N; ++n) {
    t.add({static_cast<std::int64_t>(n), r.log_M[n], r.mu[n - 1], r.partial_sums[n - 1]});
  }
  out.table("carleman_denjoy.csv", t);
  out.plot("carleman_denjoy.dat", t, {{t.columns[0], t.columns[3]}, std::nullopt});
  ResultTable p{{"T", "integral [int_1^T dxi / (xi log(e + xi))]"}, {}};
  for (const auto& [T, v] : r.integral_proxy) p.add({T, v});
  out.table("carleman_integral.csv", p);

  const DivergenceEvidence ev = divergence_evidence(r);
  json decades = json::array();
  for (const auto& [n, s] : ev.decade_sums) decades.push_back({n, s});
  summary["log_M0"] = r.log_M[0];
  summary["strictly_increasing"] = ev.strictly_increasing;
  summary["no_plateau"] = ev.no_plateau;
  summary["min_decade_increment"] = ev.min_decade_increment;
  summary["decade_sums"] = decades;
  summary["log_convex"] = log_convex(r);
  summary["mu_non_increasing"] = mu_non_increasing(r);
}

void run_separation(const ExperimentConfig& c, Outputs& out, json& summary) {
  const Sequence seq = build_sequence(*c.sequence, c.base_dir);
  const auto N = static_cast<std::size_t>(param_int(c.params, "N", static_cast<long long>(seq.size())));
  const SeparationReport r = separation_condition(seq, N);
  ResultTable t{{"n", "lambda_n", "holds [pair (n, n+1)]", "partial_sum [sum 1/log^2 lambda_k; k <= n]"},
                {}};
  double sum = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double l = std::log(seq[n - 1]);
    sum += 1.0 / (l * l);
    Cell holds = std::string();
    if (n < N) holds = static_cast<std::int64_t>(r.holds[n - 1]);
    t.add({static_cast<std::int64_t>(n), seq[n - 1], holds, sum});
  }
  out.table("separation.csv", t);
  summary["report"] = to_json(r);
  if (c.params.contains("T")) {
    if (r.all_hold() && N == seq.size()) {
      summary["omega"] = to_json(
          omega_diagnostics(seq, BumpFunction::smoothstep(), c.params.at("T").get<double>()));
    } else {
      summary["omega"] = "skipped: separation fails or N truncates the sequence";
    }
  }
}

}  // namespace

RunManifest run(const ExperimentConfig& config) {
  RunManifest manifest;
  manifest.config_sha256 = config.sha256;
  manifest.tool_version = std::string(kToolVersion);
  manifest.rng = std::string(CounterRng::kName);
  manifest.kind = std::string(to_string(config.kind));
  manifest.seed = config.ensemble.seed;
  manifest.started_at = utc_now();

  std::filesystem::create_directories(config.output);
  std::filesystem::remove(config.output / "manifest.json");

  Outputs out(config.output);
  json summary = {{"kind", manifest.kind}};
  switch (config.kind) {
    case ExperimentKind::nazarov_sweep: run_nazarov_sweep(config, out, summary); break;
    case ExperimentKind::ls_sweep: run_ls_sweep(config, out, summary); break;
    case ExperimentKind::greedy_growth: run_greedy_growth(config, out, summary); break;
    case ExperimentKind::zygmund_profile: run_zygmund_profile(config, out, summary); break;
    case ExperimentKind::lemma_ensemble: run_lemma_ensemble(config, out, summary); break;
    case ExperimentKind::theorem_ensemble: run_theorem_ensemble(config, out, summary); break;
    case ExperimentKind::carleman_denjoy: run_carleman_denjoy(config, out, summary); break;
    case ExperimentKind::separation: run_separation(config, out, summary); break;
  }
  out.text("summary.json", summary.dump(2) + "\n");

  manifest.files = out.entries();
  manifest.finished_at = utc_now();
  write_atomic(config.output / "manifest.json", to_json(manifest).dump(2) + "\n");
  return manifest;
}

}  // namespace lacunary
