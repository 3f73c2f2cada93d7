#include "lacunary/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "lacunary/errors.hpp"

namespace lacunary {

namespace {

constexpr double kPi = std::numbers::pi;

struct Term {
  double frequency;
  cd coefficient;
};

// a^H G a for G = exponential_gram(frequencies of a, pieces).
double quadratic_form(std::span<const Term> terms, std::span<const Interval> pieces) {
  cd sum = 0.0;
  for (std::size_t n = 0; n < terms.size(); ++n) {
    for (std::size_t m = 0; m < terms.size(); ++m) {
      const double d = terms[m].frequency - terms[n].frequency;
      cd g = 0.0;
      for (const Interval& p : pieces) g += exponential_integral(d, p.lo, p.hi);
      sum += std::conj(terms[n].coefficient) * terms[m].coefficient * g;
    }
  }
  return std::max(0.0, sum.real());
}

void check_dimension(std::size_t n, const char* who) {
  if (n > kMaxFormDimension) {
    throw DomainError(std::string(who) + ": dimension " + std::to_string(n) + " exceeds " +
                      std::to_string(kMaxFormDimension));
  }
}

// Pieces of E inside [0, T]; periodic sets are unrolled.
std::vector<Interval> pieces_on_window(const ThickSet& E, double T) {
  return E.pieces_in(0.0, T);
}

void finish(ConcentrationEstimate& est) {
  est.degenerate = est.lambda_min < kDegenerateLambda;
  est.constant = est.degenerate ? std::numeric_limits<double>::infinity() : 1.0 / est.lambda_min;
}

}  // namespace

double HermitianForm::hermiticity_defect() const {
  if (entries.rows() == 0) return 0.0;
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

nlohmann::json to_json(const ConcentrationEstimate& e) {
  nlohmann::json j = {{"lambda_min", e.lambda_min},
                      {"residual", e.residual},
                      {"degenerate", e.degenerate},
                      {"dimension", e.dimension},
                      {"discretization", e.discretization}};
  if (std::isfinite(e.constant)) {
    j["constant"] = e.constant;
  } else {
    j["constant"] = "inf";
  }
  return j;
}

cd exponential_integral(double d, double a, double b) {
  const double len = b - a;
  if (d == 0.0) return len;
  // Whole number of periods: the integral vanishes, avoid sin(pi k) ~ 1e-16.
  const double cycles = d * len;
  const double k = std::round(cycles);
  if (k != 0.0 && std::abs(cycles - k) <= 1e-14 * std::abs(k)) return 0.0;
  const double x = kPi * cycles;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return len * sinc * std::polar(1.0, kPi * d * (a + b));
}

Eigen::MatrixXcd exponential_gram(std::span<const double> frequencies,
                                  std::span<const Interval> pieces) {
  const auto n = static_cast<Eigen::Index>(frequencies.size());
  Eigen::MatrixXcd G(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = r; c < n; ++c) {
      const double d = frequencies[static_cast<std::size_t>(c)] -
                       frequencies[static_cast<std::size_t>(r)];
      cd g = 0.0;
      for (const Interval& p : pieces) g += exponential_integral(d, p.lo, p.hi);
      G(r, c) = g;
      G(c, r) = std::conj(g);
    }
    G(r, r) = G(r, r).real();
  }
  return G;
}

HermitianForm gram_matrix(const ThickSet& E, const Sequence& frequencies) {
  std::vector<Interval> pieces;
  if (E.periodic()) {
    if (std::abs(E.period() - 1.0) > 1e-12) {
      throw DomainError("gram_matrix: periodic E must have period 1 (the unit torus)");
    }
    pieces = E.pieces_in(0.0, 1.0);
  } else {
    if (E.window().lo < -kMeasureTol || E.window().hi > 1.0 + kMeasureTol) {
      throw DomainError("gram_matrix: E must lie in the unit torus [0, 1]");
    }
    pieces.assign(E.intervals().begin(), E.intervals().end());
  }
  double measure = 0.0;
  for (const Interval& p : pieces) measure += p.length();
  if (!(measure > 0.0)) throw DomainError("gram_matrix: E must be of positive measure");
  check_dimension(frequencies.size(), "gram_matrix");

  HermitianForm form;
  form.entries = exponential_gram(frequencies.values(), pieces);
  form.provenance = {{"operator", "gram"},
                     {"set", to_json(E)},
                     {"frequencies", std::vector<double>(frequencies.values().begin(),
                                                         frequencies.values().end())}};
  return form;
}

ConcentrationEstimate smallest_eigenpair(const HermitianForm& form) {
  const std::size_t n = form.dimension();
  if (n == 0) throw DomainError("eigensolver: empty form");
  check_dimension(n, "eigensolver");
  const double defect = form.hermiticity_defect();
  if (defect > 1e-12) {
    throw NumericalError("eigensolver: form is not Hermitian (defect " + std::to_string(defect) +
                         ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(form.entries);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigensolver: decomposition did not converge");
  }
  const double lambda = solver.eigenvalues()(0);
  const Eigen::VectorXcd v = solver.eigenvectors().col(0);
  const double residual = (form.entries * v - lambda * v).norm();
  const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
  if (residual > 1e-10 * scale) {
    throw NumericalError("eigensolver: residual " + std::to_string(residual) +
                         " exceeds 1e-10 * ||G|| = " + std::to_string(1e-10 * scale));
  }
  ConcentrationEstimate est;
  est.lambda_min = lambda;
  est.residual = residual;
  est.dimension = n;
  finish(est);
  return est;
}

ConcentrationEstimate nazarov_constant(const ThickSet& E, const Sequence& frequencies) {
  HermitianForm form = gram_matrix(E, frequencies);
  ConcentrationEstimate est = smallest_eigenpair(form);
  est.discretization = {{"model", "exponentials"}, {"measure", E.measure()}};
  return est;
}

ConcentrationEstimate ls_constant(const ThickSet& E, const FrequencySupport& profile,
                                  const Grid& grid) {
  const double T = grid.period;
  if (!E.periodic() && (E.window().lo > kMeasureTol || E.window().hi < T - kMeasureTol)) {
    throw DomainError("ls_constant: non-periodic E must cover the grid window [0, T]");
  }
  if (profile.bands.empty()) throw DomainError("ls_constant: empty profile");
  std::set<std::int64_t> bins;
  for (const Interval& band : profile.bands) {
    const auto lo = static_cast<std::int64_t>(std::ceil(band.lo * T - 1e-9));
    const auto hi = static_cast<std::int64_t>(std::floor(band.hi * T + 1e-9));
    for (std::int64_t b = lo; b <= hi; ++b) {
      grid.slot(b);
      bins.insert(b);
      check_dimension(bins.size(), "ls_constant");
    }
  }
  if (bins.empty()) throw DomainError("ls_constant: profile contains no grid frequencies");

  std::vector<double> freqs;
  for (std::int64_t b : bins) freqs.push_back(grid.frequency(b));
  const std::vector<Interval> pieces = pieces_on_window(E, T);

  HermitianForm form;
  form.entries = exponential_gram(freqs, pieces) / T;
  ConcentrationEstimate est = smallest_eigenpair(form);
  est.discretization = {{"period", T},
                        {"samples", grid.samples},
                        {"first_bin", *bins.begin()},
                        {"last_bin", *bins.rbegin()},
                        {"set_pieces", pieces.size()}};
  return est;
}

nlohmann::json to_json(const LemmaReport& r) {
  return {{"lhs", r.lhs},
          {"term_density", r.term_density},
          {"term_sobolev", r.term_sobolev},
          {"intersection_measure", r.intersection_measure}};
}

LemmaReport lemma_main_report(std::span<const BandFunction> f_list, const Sequence& tail,
                              const ThickSet& E, Interval I, int L,
                              std::optional<double> gamma) {
  if (L < 1) throw DomainError("lemma_main_report: L must be >= 1");
  if (std::abs(I.length() - 1.0 / L) > 1e-12) {
    throw DomainError("lemma_main_report: |I| = " + std::to_string(I.length()) +
                      " but must equal 1/L = " + std::to_string(1.0 / L));
  }
  if (f_list.size() != tail.size()) {
    throw DomainError("lemma_main_report: " + std::to_string(f_list.size()) + " functions for " +
                      std::to_string(tail.size()) + " frequencies");
  }
  const std::vector<Interval> on_e = E.pieces_in(I.lo, I.hi);
  LemmaReport report;
  for (const Interval& p : on_e) report.intersection_measure += p.length();
  if (gamma && report.intersection_measure < *gamma / L - kMeasureTol) {
    throw DomainError("lemma_main_report: |E n I| = " +
                      std::to_string(report.intersection_measure) + " < gamma / L");
  }

  const std::vector<Interval> whole{I};
  std::vector<Term> combined;
  for (std::size_t n = 0; n < f_list.size(); ++n) {
    const BandFunction& f = f_list[n];
    std::vector<Term> own;
    std::vector<Term> derivative;
    for (std::int64_t b : f.active_bins()) {
      const double xi = f.grid().frequency(b);
      if (xi < -1e-9 || xi > 1.0 + 1e-9) {
        throw DomainError("lemma_main_report: function " + std::to_string(n) +
                          " has spectrum outside [0, 1]");
      }
      const cd c = f.coefficient(b);
      own.push_back({xi, c});
      derivative.push_back({xi, cd(0.0, 2.0 * kPi * xi) * c});
      combined.push_back({tail[n] + xi, c});
    }
    const double density = quadratic_form(own, whole);
    report.term_density += density;
    report.term_sobolev += density + quadratic_form(derivative, whole);
  }
  report.lhs = quadratic_form(combined, on_e);
  return report;
}

std::vector<double> lemma_margins(std::span<const LemmaReport> reports, int L,
                                  std::span<const double> c2_values) {
  if (L < 1) throw DomainError("lemma_margins: L must be >= 1");
  std::vector<double> margins;
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));
  for (double c2 : c2_values) {
    double inf = std::numeric_limits<double>::infinity();
    for (const LemmaReport& r : reports) {
      if (r.term_density == 0.0) continue;
      inf = std::min(inf, (r.lhs + c2 * scale * r.term_sobolev) / r.term_density);
    }
    margins.push_back(inf);
  }
  return margins;
}

nlohmann::json to_json(const SplitReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  return {{"ratio", r.ratio},         {"ratio_head", opt(r.ratio_head)},
          {"ratio_tail", opt(r.ratio_tail)}, {"norm", r.norm},
          {"norm_head", r.norm_head}, {"norm_tail", r.norm_tail},
          {"split_index", r.split_index}};
}

SplitReport theorem_split_check(std::span<const std::vector<cd>> blocks,
                                const Sequence& frequencies, const TailSchedule& schedule,
                                int L, const ThickSet& E, const Grid& grid) {
  for (std::size_t n = 0; n < frequencies.size(); ++n) {
    if (!(frequencies[n] > 0.0)) {
      throw DomainError("theorem_split_check: frequencies must be positive, lambda_" +
                        std::to_string(n + 1) + " = " + std::to_string(frequencies[n]));
    }
  }
  if (L < 1) throw DomainError("theorem_split_check: L must be >= 1");
  const auto start = schedule.start_for(L);
  if (!start) {
    throw DomainError("theorem_split_check: M(" + std::to_string(L) + ") is undefined");
  }
  const double T = grid.period;
  if (!E.periodic() && (E.window().lo > kMeasureTol || E.window().hi < T - kMeasureTol)) {
    throw DomainError("theorem_split_check: non-periodic E must cover the grid window [0, T]");
  }
  // Validates grid placement, block sizes and the Nyquist bound.
  synthesize(blocks, frequencies, grid);

  SplitReport report;
  report.split_index = std::min(*start - 1, frequencies.size());
  std::vector<Term> all;
  std::vector<Term> head;
  std::vector<Term> tail;
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    for (std::size_t j = 0; j < blocks[n].size(); ++j) {
      if (blocks[n][j] == cd(0.0)) continue;
      const Term t{frequencies[n] + static_cast<double>(j) / T, blocks[n][j]};
      all.push_back(t);
      (n < report.split_index ? head : tail).push_back(t);
    }
  }
  check_dimension(all.size(), "theorem_split_check");
  const std::vector<Interval> window{{0.0, T}};
  const std::vector<Interval> on_e = pieces_on_window(E, T);

  auto ratio = [&](std::span<const Term> terms, double& norm) -> std::optional<double> {
    const double full = quadratic_form(terms, window);
    norm = std::sqrt(full);
    if (full == 0.0) return std::nullopt;
    return std::sqrt(quadratic_form(terms, on_e) / full);
  };
  const auto r = ratio(all, report.norm);
  if (!r) throw DomainError("theorem_split_check: F is identically zero");
  report.ratio = *r;
  report.ratio_head = ratio(head, report.norm_head);
  report.ratio_tail = ratio(tail, report.norm_tail);
  return report;
}

void write_form(std::ostream& out, const HermitianForm& form) {
  const auto n = form.entries.rows();
  out << "dimension " << n << '\n';
  out.precision(17);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (c > 0) out << ' ';
      out << form.entries(r, c).real() << ' ' << form.entries(r, c).imag();
    }
    out << '\n';
  }
}

HermitianForm read_form(std::istream& in) {
  std::string word;
  long long n = -1;
  if (!(in >> word >> n) || word != "dimension" || n < 0) {
    throw DomainError("matrix file: expected header 'dimension N'");
  }
  check_dimension(static_cast<std::size_t>(n), "matrix file");
  HermitianForm form;
  form.entries.resize(n, n);
  for (long long r = 0; r < n; ++r) {
    for (long long c = 0; c < n; ++c) {
      double re = 0.0;
      double im = 0.0;
      if (!(in >> re >> im)) {
        throw DomainError("matrix file: truncated at row " + std::to_string(r + 1));
      }
      form.entries(r, c) = cd(re, im);
    }
  }
  if (in >> word) throw DomainError("matrix file: trailing data");
  form.provenance = {{"operator", "file"}};
  return form;
}

}  // namespace lacunary
