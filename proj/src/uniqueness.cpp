#include "lacunary/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lacunary/errors.hpp"

namespace lacunary {

namespace {

constexpr double kE = std::numbers::e;

double poly(const std::array<double, 4>& c, double y) {
  return c[0] + y * (c[1] + y * (c[2] + y * c[3]));
}

double poly_derivative(const std::array<double, 4>& c, double y) {
  return c[1] + y * (2.0 * c[2] + y * 3.0 * c[3]);
}

void require_above_e(const Sequence& seq, std::size_t count, const char* who) {
  for (std::size_t i = 0; i < count; ++i) {
    if (!(seq[i] > kE)) {
      throw DomainError(std::string(who) + ": lambda_" + std::to_string(i + 1) + " = " +
                        std::to_string(seq[i]) + " must exceed e");
    }
  }
}

// int_{ya}^{yb} p(y) / (s + y)^2 dy in closed form, p expanded in u = s + y.
double bump_piece_integral(const std::array<double, 4>& c, double s, double ya, double yb) {
  const double r3 = c[3];
  const double r2 = c[2] - 3.0 * c[3] * s;
  const double r1 = c[1] - 2.0 * c[2] * s + 3.0 * c[3] * s * s;
  const double r0 = c[0] - c[1] * s + c[2] * s * s - c[3] * s * s * s;
  const double ua = s + ya;
  const double ub = s + yb;
  const double w = yb - ya;
  return r0 * w / (ua * ub) + r1 * std::log1p(w / ua) + r2 * w + r3 * w * (ua + ub) / 2.0;
}

// f(t) = n t - g(e^t); f'(t) = n - xi g'(xi).
double moment_slope(double n, double t) {
  const double xi = std::exp(t);
  const double l = std::log(kE + xi);
  const double gprime = 1.0 / l - xi / ((kE + xi) * l * l);
  return n - xi * gprime;
}

}  // namespace

nlohmann::json to_json(const SeparationReport& r) {
  nlohmann::json j = {{"pairs_checked", r.holds.size()},
                      {"all_hold", r.all_hold()},
                      {"partial_sum", r.partial_sum}};
  j["first_failure"] = r.first_failure ? nlohmann::json(*r.first_failure) : nlohmann::json();
  return j;
}

SeparationReport separation_condition(const Sequence& seq, std::size_t N) {
  if (N < 1) throw DomainError("separation_condition: N must be >= 1");
  if (N > seq.size()) {
    throw DomainError("separation_condition: N = " + std::to_string(N) + " exceeds the " +
                      std::to_string(seq.size()) + " available terms");
  }
  require_above_e(seq, N, "separation_condition");
  SeparationReport report;
  for (std::size_t i = 0; i < N; ++i) {
    const double l = std::log(seq[i]);
    report.partial_sum += 1.0 / (l * l);
  }
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double a = seq[i];
    const double b = seq[i + 1];
    const bool ok = a * (1.0 + 1.0 / std::log(a)) < b * (1.0 - 1.0 / std::log(b));
    report.holds.push_back(ok);
    if (!ok && !report.first_failure) report.first_failure = i + 1;
  }
  return report;
}

BumpFunction BumpFunction::smoothstep() {
  return BumpFunction({{-1.0, -0.5, {-4.0, -24.0, -36.0, -16.0}},
                       {-0.5, 0.5, {1.0, 0.0, 0.0, 0.0}},
                       {0.5, 1.0, {-4.0, 24.0, -36.0, 16.0}}});
}

BumpFunction::BumpFunction(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("bump: no pieces");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].hi > pieces_[i].lo)) throw DomainError("bump: empty piece");
    if (i > 0 && pieces_[i].lo != pieces_[i - 1].hi) throw DomainError("bump: pieces not contiguous");
  }
  if (pieces_.front().lo < -1.0 || pieces_.back().hi > 1.0) {
    throw DomainError("bump: support must lie in [-1, 1]");
  }
}

double BumpFunction::value(double y) const {
  for (const Piece& p : pieces_) {
    if (y >= p.lo && y <= p.hi) return poly(p.coeffs, y);
  }
  return 0.0;
}

double BumpFunction::derivative(double y) const {
  for (const Piece& p : pieces_) {
    if (y >= p.lo && y <= p.hi) return poly_derivative(p.coeffs, y);
  }
  return 0.0;
}

double BumpFunction::max_abs_derivative(double lo, double hi) const {
  double best = 0.0;
  for (const Piece& p : pieces_) {
    const double a = std::max(lo, p.lo);
    const double b = std::min(hi, p.hi);
    if (a > b) continue;
    best = std::max({best, std::abs(poly_derivative(p.coeffs, a)),
                     std::abs(poly_derivative(p.coeffs, b))});
    if (p.coeffs[3] != 0.0) {
      const double y = -p.coeffs[2] / (3.0 * p.coeffs[3]);
      if (y > a && y < b) best = std::max(best, std::abs(poly_derivative(p.coeffs, y)));
    }
  }
  return best;
}

OmegaWeight::OmegaWeight(Sequence seq, BumpFunction phi)
    : seq_(std::move(seq)), phi_(std::move(phi)) {
  require_above_e(seq_, seq_.size(), "omega");
  for (double x : seq_.values()) radii_.push_back(x / std::log(x));
  for (std::size_t i = 0; i + 1 < seq_.size(); ++i) {
    if (seq_[i] + radii_[i] > seq_[i + 1] - radii_[i + 1]) {
      throw DomainError("omega: supports of summands " + std::to_string(i + 1) + " and " +
                        std::to_string(i + 2) + " overlap");
    }
  }
}

std::optional<std::size_t> OmegaWeight::active(double x) const {
  const auto values = seq_.values();
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  const auto idx = static_cast<std::size_t>(it - values.begin());
  if (idx < values.size() && values[idx] - radii_[idx] <= x) return idx;
  if (idx > 0 && x <= values[idx - 1] + radii_[idx - 1]) return idx - 1;
  return std::nullopt;
}

double OmegaWeight::operator()(double x) const {
  const auto n = active(x);
  if (!n) return 0.0;
  const double a = radii_[*n];
  return a * phi_.value((x - seq_[*n]) / a);
}

double OmegaWeight::derivative(double x) const {
  const auto n = active(x);
  if (!n) return 0.0;
  const double a = radii_[*n];
  return phi_.derivative((x - seq_[*n]) / a);
}

double omega_weight(double x, const Sequence& seq, const BumpFunction& phi) {
  return OmegaWeight(seq, phi)(x);
}

nlohmann::json to_json(const OmegaDiagnostics& d) {
  return {{"lipschitz_bound", d.lipschitz_bound},
          {"tail_integral", d.tail_integral},
          {"domination_constant", d.domination_constant},
          {"reference_sum", d.reference_sum}};
}

OmegaDiagnostics omega_diagnostics(const Sequence& seq, const BumpFunction& phi, double T) {
  if (!(T > 1.0) || !std::isfinite(T)) throw DomainError("omega_diagnostics: T must exceed 1");
  const OmegaWeight omega(seq, phi);
  OmegaDiagnostics d;
  bool spectral_hit = false;
  double dom = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const double lambda = seq[n];
    const double a = omega.radius(n);
    if (lambda <= T) d.reference_sum += 1.0 / (std::log(lambda) * std::log(lambda));

    const double lo = std::max(1.0, lambda - a);
    const double hi = std::min(T, lambda + a);
    if (lo < hi) {
      const double ylo = (lo - lambda) / a;
      const double yhi = (hi - lambda) / a;
      d.lipschitz_bound = std::max(d.lipschitz_bound, phi.max_abs_derivative(ylo, yhi));
      const double s = std::log(lambda);
      for (const BumpFunction::Piece& p : phi.pieces()) {
        const double ya = std::max(ylo, p.lo);
        const double yb = std::min(yhi, p.hi);
        if (ya < yb) d.tail_integral += bump_piece_integral(p.coeffs, s, ya, yb);
      }
    }

    if (lambda <= T) {
      spectral_hit = true;
      const double end = std::min(lambda + 1.0, T);
      constexpr int kSamples = 257;
      for (int k = 0; k < kSamples; ++k) {
        const double x = lambda + (end - lambda) * k / (kSamples - 1);
        dom = std::max(dom, x / std::log(kE + x) - omega(x));
      }
    }
  }
  d.domination_constant = spectral_hit ? dom : T / std::log(kE + T);
  return d;
}

double log_majorant(double xi) { return xi / std::log(kE + xi); }

std::pair<double, double> moment_maximizer(std::size_t n) {
  if (n == 0) return {1.0, -log_majorant(1.0)};
  const double nn = static_cast<double>(n);
  double lo = 0.0;
  double hi = 1.0;
  // f'(0) > 0 for n >= 1; expand until the slope turns negative.
  while (moment_slope(nn, hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 700.0) {
      throw NumericalError("moment_maximizer: no sign change of the slope up to log xi = " +
                           std::to_string(hi) + " for n = " + std::to_string(n));
    }
  }
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (moment_slope(nn, mid) > 0.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  const double xi = std::exp(t);
  return {xi, nn * t - log_majorant(xi)};
}

double carleman_integral(double T) {
  if (!(T >= 1.0)) throw DomainError("carleman_integral: T must be >= 1");
  if (T == 1.0) return 0.0;
  // u = log xi turns the integrand into 1 / log(e + e^u).
  auto f = [](double u) { return 1.0 / std::log(kE + std::exp(u)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::log(T), 15,
                                                                       1e-13);
}

QuasiAnalyticityReport carleman_denjoy_partial(std::size_t N, double T_max) {
  if (N < 1) throw DomainError("carleman_denjoy_partial: N must be >= 1");
  if (!(T_max >= 1.0) || !std::isfinite(T_max)) {
    throw DomainError("carleman_denjoy_partial: T_max must be >= 1");
  }
  QuasiAnalyticityReport r;
  r.log_M.reserve(N + 1);
  for (std::size_t n = 0; n <= N; ++n) r.log_M.push_back(moment_maximizer(n).second);
  double sum = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double mu = std::exp(r.log_M[n - 1] - r.log_M[n]);
    r.mu.push_back(mu);
    sum += mu;
    r.partial_sums.push_back(sum);
  }
  for (double T = 10.0; T <= T_max * (1.0 + 1e-12); T *= 10.0) {
    r.integral_proxy.emplace_back(T, carleman_integral(T));
  }
  if (r.integral_proxy.empty() || r.integral_proxy.back().first < T_max * (1.0 - 1e-12)) {
    r.integral_proxy.emplace_back(T_max, carleman_integral(T_max));
  }
  return r;
}

DivergenceEvidence divergence_evidence(const QuasiAnalyticityReport& report, double tol) {
  DivergenceEvidence ev;
  const auto& s = report.partial_sums;
  ev.strictly_increasing = !s.empty() && s.front() > 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) ev.strictly_increasing = false;
  }
  for (std::size_t n = 10; n <= s.size(); n *= 10) ev.decade_sums.emplace_back(n, s[n - 1]);
  if (ev.decade_sums.size() >= 2) {
    ev.min_decade_increment = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < ev.decade_sums.size(); ++i) {
      ev.min_decade_increment =
          std::min(ev.min_decade_increment, ev.decade_sums[i].second - ev.decade_sums[i - 1].second);
    }
    ev.no_plateau = ev.min_decade_increment > tol;
  }
  return ev;
}

bool log_convex(const QuasiAnalyticityReport& report, double tol) {
  const auto& m = report.log_M;
  for (std::size_t n = 1; n + 1 < m.size(); ++n) {
    if (2.0 * m[n] > m[n - 1] + m[n + 1] + tol * (1.0 + std::abs(m[n]))) return false;
  }
  return true;
}

bool mu_non_increasing(const QuasiAnalyticityReport& report, double tol) {
  const auto& mu = report.mu;
  for (std::size_t n = 1; n < mu.size(); ++n) {
    if (mu[n] > mu[n - 1] * (1.0 + tol)) return false;
  }
  return true;
}

}  // namespace lacunary
