#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lacunary/sequences.hpp"

namespace lacunary {

struct SeparationReport {
  /// holds[n-1] for the pair (n, n+1), n = 1 .. N-1.
  std::vector<bool> holds;
  /// sum_{n <= N} 1 / log^2 lambda_n
  double partial_sum = 0.0;
  /// 1-based n of the first failing pair.
  std::optional<std::size_t> first_failure;

  bool all_hold() const { return !first_failure.has_value(); }
};

nlohmann::json to_json(const SeparationReport& report);

/// Checks lambda_n (1 + 1/log lambda_n) < lambda_{n+1} (1 - 1/log lambda_{n+1})
/// for n < N (natural logarithm). Every lambda_n with n <= N must exceed e.
SeparationReport separation_condition(const Sequence& seq, std::size_t N);

/// Piecewise cubic phi on [-1, 1]; zero outside.
class BumpFunction {
 public:
  struct Piece {
    double lo;
    double hi;
    /// c0 + c1 y + c2 y^2 + c3 y^3
    std::array<double, 4> coeffs;
  };

  /// 1 on [-1/2, 1/2], 1 - (3t^2 - 2t^3) with t = 2|y| - 1 on 1/2 <= |y| <= 1.
  /// C^1 with ||phi'||_inf = 3.
  static BumpFunction smoothstep();

  explicit BumpFunction(std::vector<Piece> pieces);

  std::span<const Piece> pieces() const { return pieces_; }
  double value(double y) const;
  double derivative(double y) const;
  /// max |phi'| over [lo, hi], exact from the pieces.
  double max_abs_derivative(double lo = -1.0, double hi = 1.0) const;

 private:
  std::vector<Piece> pieces_;
};

/// omega(x) = sum_n a_n phi((x - lambda_n) / a_n) with a_n = lambda_n / log lambda_n.
class OmegaWeight {
 public:
  /// Throws DomainError when lambda_n <= e or two summand supports overlap.
  OmegaWeight(Sequence seq, BumpFunction phi);

  double operator()(double x) const;
  double derivative(double x) const;
  /// Support radius a_n of summand n (0-based).
  double radius(std::size_t n) const { return radii_[n]; }
  const Sequence& sequence() const { return seq_; }
  const BumpFunction& phi() const { return phi_; }

 private:
  // Summand whose support contains x, if any.
  std::optional<std::size_t> active(double x) const;

  Sequence seq_;
  BumpFunction phi_;
  std::vector<double> radii_;
};

double omega_weight(double x, const Sequence& seq, const BumpFunction& phi);

struct OmegaDiagnostics {
  /// max |omega'| over [1, T].
  double lipschitz_bound = 0.0;
  /// int_1^T omega(x) / x^2 dx
  double tail_integral = 0.0;
  /// sup over the spectral set n [0, T] of x / log(e + x) - omega(x).
  double domination_constant = 0.0;
  /// sum over lambda_n <= T of 1 / log^2 lambda_n, for comparison.
  double reference_sum = 0.0;
};

nlohmann::json to_json(const OmegaDiagnostics& d);

/// The spectral set is the union of [lambda_n, lambda_n + 1], sampled at 257
/// points per interval. With no spectral set inside [0, T] the domination
/// constant is sup over [0, T] of x / log(e + x) = T / log(e + T).
OmegaDiagnostics omega_diagnostics(const Sequence& seq, const BumpFunction& phi, double T);

/// log W(xi) = xi / log(e + xi).
double log_majorant(double xi);

struct QuasiAnalyticityReport {
  /// log M_n for n = 0 .. N, M_n = sup_{xi >= 1} xi^n / W(xi).
  std::vector<double> log_M;
  /// mu_n = M_{n-1} / M_n for n = 1 .. N (index n-1).
  std::vector<double> mu;
  /// S(n) = mu_1 + ... + mu_n (index n-1).
  std::vector<double> partial_sums;
  /// (T, int_1^T dxi / (xi log(e + xi))) at decade-spaced T.
  std::vector<std::pair<double, double>> integral_proxy;
};

/// Maximizer location and value of n log xi - xi / log(e + xi) over xi >= 1.
std::pair<double, double> moment_maximizer(std::size_t n);

QuasiAnalyticityReport carleman_denjoy_partial(std::size_t N, double T_max);

/// int_1^T dxi / (xi log(e + xi)).
double carleman_integral(double T);

struct DivergenceEvidence {
  bool strictly_increasing = false;
  /// (N, S(N)) at N = 10, 100, ... up to the computed range.
  std::vector<std::pair<std::size_t, double>> decade_sums;
  /// Smallest increment between consecutive decade sums.
  double min_decade_increment = 0.0;
  bool no_plateau = false;
};

/// Monotone, non-stalling growth of the partial sums across decades; an
/// increment at or below `tol` counts as a plateau.
DivergenceEvidence divergence_evidence(const QuasiAnalyticityReport& report, double tol = 1e-9);

/// 2 log M_n <= log M_{n-1} + log M_{n+1} + tol (1 + |log M_n|).
bool log_convex(const QuasiAnalyticityReport& report, double tol = 1e-9);
/// mu_{n+1} <= mu_n (1 + tol).
bool mu_non_increasing(const QuasiAnalyticityReport& report, double tol = 1e-12);

}  // namespace lacunary
