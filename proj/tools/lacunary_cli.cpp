// Command-line front end. Exit codes: 0 success, 2 validation error,
// 3 numerical failure, 1 anything else (I/O).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lacunary/concentration.hpp"
#include "lacunary/experiment.hpp"
#include "lacunary/random.hpp"
#include "lacunary/sequences.hpp"
#include "lacunary/sets.hpp"
#include "lacunary/synthesis.hpp"
#include "lacunary/uniqueness.hpp"

using namespace lacunary;
using nlohmann::json;

namespace {

// Inline JSON source ({"builder": ...}) or a sequence text file.
Sequence load_sequence(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') {
    const json j = json::parse(arg);
    if (!j.contains("builder") || !j.at("builder").is_string()) {
      throw DomainError("sequence source needs a 'builder'");
    }
    return build_sequence({j.at("builder").get<std::string>(), j}, ".");
  }
  return build_sequence({"file", {{"builder", "file"}, {"path", arg}}}, ".");
}

// Inline JSON source ({"pattern": ...}) or a thick-set JSON file.
ThickSet load_set(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') {
    const json j = json::parse(arg);
    if (!j.contains("pattern") || !j.at("pattern").is_string()) {
      throw DomainError("set source needs a 'pattern'");
    }
    return build_set({j.at("pattern").get<std::string>(), j}, ".");
  }
  return build_set({"file", {{"pattern", "file"}, {"path", arg}}}, ".");
}

Grid parse_grid(const std::string& arg) {
  const auto comma = arg.find(',');
  if (comma == std::string::npos) throw DomainError("grid: expected 'T,S'");
  try {
    return Grid::make(std::stod(arg.substr(0, comma)),
                      static_cast<std::size_t>(std::stoull(arg.substr(comma + 1))));
  } catch (const std::logic_error&) {
    throw DomainError("grid: expected 'T,S'");
  }
}

FrequencySupport parse_profile(const std::string& arg) {
  FrequencySupport s;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DomainError("profile: expected lo:hi,...");
    try {
      s.bands.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::logic_error&) {
      throw DomainError("profile: expected lo:hi,...");
    }
  }
  return s;
}

std::vector<cd> random_block(CounterRng& rng, std::size_t n) {
  std::vector<cd> b(n);
  for (cd& c : b) c = rng.complex_normal();
  return b;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

void emit_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_atomic(path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lacunary spectra: sequences, thick sets and concentration constants"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string seq_arg;
  std::string set_arg;
  std::string grid_arg;
  std::string out_path;
  std::string schedule_arg = "1:1@1";
  std::string profile_arg;
  double q = 2.0;
  double level = 1.0;
  double delta = 1.0;
  double gamma = 0.5;
  double start = 0.0;
  double T = 0.0;
  double T_max = 1e8;
  int L = 1;
  std::size_t N = 0;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  std::vector<int> levels;
  bool has_gamma = false;

  // seq
  auto* seq = app.add_subcommand("seq", "Build and certify sequences");
  seq->require_subcommand(1);
  auto* seq_build = seq->add_subcommand("build", "Materialize a sequence as text");
  seq_build->add_option("--seq", seq_arg, "Source: inline JSON builder or text file")->required();
  seq_build->add_option("--out", out_path, "Output file (default stdout)");
  auto* seq_check = seq->add_subcommand("check", "Hadamard / Zygmund / strong Zygmund reports");
  seq_check->add_option("--seq", seq_arg)->required();
  auto* opt_q = seq_check->add_option("--hadamard", q, "Hadamard ratio q");
  auto* opt_z = seq_check->add_option("--zygmund", level, "Zygmund threshold L");
  auto* opt_s = seq_check->add_option("--strong", levels, "Levels for the strong profile");
  seq_check->add_option("--schedule", schedule_arg, "Tail schedule 'L:M,...@max'");

  // set
  auto* set = app.add_subcommand("set", "Thick sets");
  set->require_subcommand(1);
  auto* set_gamma = set->add_subcommand("gamma", "Thickness at scale delta");
  set_gamma->add_option("--set", set_arg)->required();
  set_gamma->add_option("--delta", delta)->required();
  auto* set_part = set->add_subcommand("partition", "Good/bad partition");
  set_part->add_option("--set", set_arg)->required();
  set_part->add_option("--delta", delta)->required();
  set_part->add_option("-L,--level", L)->required();
  set_part->add_option("--gamma", gamma)->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesis");
  synth->require_subcommand(1);
  auto* synth_check = synth->add_subcommand("check", "Synthesize a random F and report it");
  synth_check->add_option("--seq", seq_arg)->required();
  synth_check->add_option("--grid", grid_arg, "T,S")->required();
  synth_check->add_option("--seed", seed);

  // conc
  auto* conc = app.add_subcommand("conc", "Concentration constants");
  conc->require_subcommand(1);
  auto* conc_gram = conc->add_subcommand("gram", "Gram matrix over E in [0, 1]");
  conc_gram->add_option("--set", set_arg)->required();
  conc_gram->add_option("--seq", seq_arg)->required();
  conc_gram->add_option("--out", out_path);
  auto* conc_naz = conc->add_subcommand("nazarov", "Smallest Gram eigenvalue");
  conc_naz->add_option("--set", set_arg)->required();
  conc_naz->add_option("--seq", seq_arg)->required();
  auto* conc_ls = conc->add_subcommand("ls", "Logvinenko-Sereda compression");
  conc_ls->add_option("--set", set_arg)->required();
  conc_ls->add_option("--grid", grid_arg)->required();
  auto* opt_profile = conc_ls->add_option("--profile", profile_arg, "lo:hi,... (default 0:1)");
  auto* opt_ls_seq = conc_ls->add_option("--seq", seq_arg, "Profile as union of [x, x+1]");
  opt_profile->excludes(opt_ls_seq);
  auto* conc_lemma = conc->add_subcommand("lemma", "Random ensemble of lemma reports");
  conc_lemma->add_option("--set", set_arg)->required();
  conc_lemma->add_option("--seq", seq_arg)->required();
  conc_lemma->add_option("--grid", grid_arg)->required();
  conc_lemma->add_option("-L,--level", L)->required();
  conc_lemma->add_option("--gamma", gamma)->each([&](const std::string&) { has_gamma = true; });
  conc_lemma->add_option("--start", start);
  conc_lemma->add_option("--trials", trials);
  conc_lemma->add_option("--seed", seed);
  auto* conc_thm = conc->add_subcommand("theorem", "Random ensemble of split checks");
  conc_thm->add_option("--set", set_arg)->required();
  conc_thm->add_option("--seq", seq_arg)->required();
  conc_thm->add_option("--grid", grid_arg)->required();
  conc_thm->add_option("-L,--level", L);
  conc_thm->add_option("--schedule", schedule_arg);
  conc_thm->add_option("--trials", trials);
  conc_thm->add_option("--seed", seed);

  // uniq
  auto* uniq = app.add_subcommand("uniq", "Uniqueness diagnostics");
  uniq->require_subcommand(1);
  auto* uniq_cond = uniq->add_subcommand("condition", "Separation condition");
  uniq_cond->add_option("--seq", seq_arg)->required();
  uniq_cond->add_option("-N", N, "Terms to check (default all)");
  auto* uniq_omega = uniq->add_subcommand("omega", "Weight diagnostics on [1, T]");
  uniq_omega->add_option("--seq", seq_arg)->required();
  uniq_omega->add_option("-T", T)->required();
  auto* uniq_cd = uniq->add_subcommand("cd", "Carleman-Denjoy partial sums");
  uniq_cd->add_option("-N", N)->required();
  uniq_cd->add_option("--t-max", T_max);

  // run
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*seq_build) {
      emit_text(out_path, to_text(load_sequence(seq_arg)));
    } else if (*seq_check) {
      const Sequence s = load_sequence(seq_arg);
      json j = json::object();
      if (*opt_q) j["hadamard"] = to_json(check_hadamard(s, q));
      if (*opt_z) j["zygmund"] = to_json(zygmund_constant(s, level));
      if (*opt_s) {
        json arr = json::array();
        for (const auto& r : strong_zygmund_profile(s, TailSchedule::parse(schedule_arg), levels)) {
          arr.push_back(to_json(r));
        }
        j["strong"] = arr;
      }
      if (j.empty()) j["hadamard"] = to_json(check_hadamard(s, q));
      print(j);
    } else if (*set_gamma) {
      const ThickSet E = load_set(set_arg);
      print({{"delta", delta}, {"thickness", thickness(E, delta)}, {"measure", E.measure()}});
    } else if (*set_part) {
      print(to_json(partition_good_bad(load_set(set_arg), delta, L, gamma)));
    } else if (*synth_check) {
      const Sequence s = load_sequence(seq_arg);
      const Grid g = parse_grid(grid_arg);
      CounterRng rng(seed, 0);
      std::vector<std::vector<cd>> blocks;
      for (std::size_t n = 0; n < s.size(); ++n) blocks.push_back(random_block(rng, g.unit_band_size()));
      const BandFunction F = synthesize(blocks, s, g);
      print({{"norm_squared", F.norm_squared()},
             {"sample_norm_squared", F.sample_norm_squared()},
             {"leakage", F.leakage()},
             {"active_bins", F.active_bins().size()}});
    } else if (*conc_gram) {
      std::ostringstream ss;
      write_form(ss, gram_matrix(load_set(set_arg), load_sequence(seq_arg)));
      emit_text(out_path, ss.str());
    } else if (*conc_naz) {
      print(to_json(nazarov_constant(load_set(set_arg), load_sequence(seq_arg))));
    } else if (*conc_ls) {
      FrequencySupport profile = FrequencySupport::unit_band();
      if (!profile_arg.empty()) profile = parse_profile(profile_arg);
      if (!seq_arg.empty()) profile = SpectralProfile(load_sequence(seq_arg)).support();
      print(to_json(ls_constant(load_set(set_arg), profile, parse_grid(grid_arg))));
    } else if (*conc_lemma) {
      const ThickSet E = load_set(set_arg);
      const Sequence s = load_sequence(seq_arg);
      const Grid g = parse_grid(grid_arg);
      std::vector<LemmaReport> reports;
      json rows = json::array();
      for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, t);
        std::vector<BandFunction> fs;
        for (std::size_t n = 0; n < s.size(); ++n) {
          std::vector<cd> c(g.samples, cd(0.0));
          for (std::size_t b = 0; b < g.unit_band_size(); ++b) {
            c[g.slot(static_cast<std::int64_t>(b))] = rng.complex_normal();
          }
          fs.push_back(BandFunction::from_spectrum(g, std::move(c), FrequencySupport::unit_band()));
        }
        reports.push_back(lemma_main_report(fs, s, E, {start, start + 1.0 / L}, L,
                                            has_gamma ? std::optional<double>(gamma) : std::nullopt));
        rows.push_back(to_json(reports.back()));
      }
      const std::vector<double> c2{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
      const std::vector<double> margins = lemma_margins(reports, L, c2);
      json m = json::array();
      for (std::size_t i = 0; i < c2.size(); ++i) m.push_back({{"C2", c2[i]}, {"margin", margins[i]}});
      print({{"trials", rows}, {"margins", m}});
    } else if (*conc_thm) {
      const ThickSet E = load_set(set_arg);
      const Sequence s = load_sequence(seq_arg);
      const Grid g = parse_grid(grid_arg);
      const TailSchedule schedule = TailSchedule::parse(schedule_arg);
      json rows = json::array();
      double min_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, t);
        std::vector<std::vector<cd>> blocks;
        for (std::size_t n = 0; n < s.size(); ++n) blocks.push_back(random_block(rng, g.unit_band_size()));
        const SplitReport r = theorem_split_check(blocks, s, schedule, L, E, g);
        min_ratio = std::min(min_ratio, r.ratio);
        rows.push_back(to_json(r));
      }
      print({{"trials", rows}, {"min_ratio", min_ratio}});
    } else if (*uniq_cond) {
      const Sequence s = load_sequence(seq_arg);
      print(to_json(separation_condition(s, N == 0 ? s.size() : N)));
    } else if (*uniq_omega) {
      print(to_json(omega_diagnostics(load_sequence(seq_arg), BumpFunction::smoothstep(), T)));
    } else if (*uniq_cd) {
      const QuasiAnalyticityReport r = carleman_denjoy_partial(N, T_max);
      const DivergenceEvidence ev = divergence_evidence(r);
      json proxy = json::array();
      for (const auto& [t, v] : r.integral_proxy) proxy.push_back({t, v});
      print({{"N", N},
             {"log_M0", r.log_M.front()},
             {"log_MN", r.log_M.back()},
             {"partial_sum", r.partial_sums.back()},
             {"strictly_increasing", ev.strictly_increasing},
             {"no_plateau", ev.no_plateau},
             {"log_convex", log_convex(r)},
             {"mu_non_increasing", mu_non_increasing(r)},
             {"integral_proxy", proxy}});
    } else if (*run_cmd) {
      print(to_json(run(load_config(config_path))));
    }
  } catch (const ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
