#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "lacunary/sequences.hpp"
#include "lacunary/sets.hpp"
#include "lacunary/synthesis.hpp"

namespace lacunary {

/// Largest dimension handled by the dense eigensolver.
inline constexpr std::size_t kMaxFormDimension = 2000;
/// lambda_min below this is reported as degenerate.
inline constexpr double kDegenerateLambda = 1e-13;

/// Dense Hermitian matrix of a quadratic form a^H G a.
struct HermitianForm {
  Eigen::MatrixXcd entries;
  nlohmann::json provenance;

  std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }
  /// max |G - G^H| entrywise.
  double hermiticity_defect() const;
};

struct ConcentrationEstimate {
  double lambda_min = 0.0;
  /// 1 / lambda_min, +inf when degenerate.
  double constant = 0.0;
  /// ||G v - lambda v|| for the returned eigenvector.
  double residual = 0.0;
  bool degenerate = false;
  std::size_t dimension = 0;
  nlohmann::json discretization;
};

nlohmann::json to_json(const ConcentrationEstimate& estimate);

/// int_a^b exp(2 pi i d x) dx, stable for small d (b - a).
cd exponential_integral(double d, double a, double b);

/// G[n][m] = sum over pieces [a, b] of int_a^b exp(2 pi i (xi_m - xi_n) x) dx,
/// so that a^H G a = int_pieces |sum_m a_m exp(2 pi i xi_m x)|^2.
Eigen::MatrixXcd exponential_gram(std::span<const double> frequencies,
                                  std::span<const Interval> pieces);

/// Gram matrix of the exponentials exp(2 pi i lambda_n x) over E, E inside
/// the unit torus [0, 1].
HermitianForm gram_matrix(const ThickSet& E, const Sequence& frequencies);

/// Smallest eigenvalue of a Hermitian form with the residual contract
/// ||G v - lambda v|| <= 1e-10 ||G||.
ConcentrationEstimate smallest_eigenpair(const HermitianForm& form);

/// Best constant C(|E|, N) in C sum |a_n|^2 <= int_E |sum a_n e(lambda_n x)|^2
/// for the given finite truncation.
ConcentrationEstimate nazarov_constant(const ThickSet& E, const Sequence& frequencies);

/// Compression of multiplication by the indicator of E to the span of the
/// grid exponentials exp(2 pi i b x / T) / sqrt(T), b / T in the profile,
/// over the window [0, T]. Periodic E is unrolled over [0, T].
ConcentrationEstimate ls_constant(const ThickSet& E, const FrequencySupport& profile,
                                  const Grid& grid);

struct LemmaReport {
  double lhs = 0.0;
  double term_density = 0.0;
  double term_sobolev = 0.0;
  double intersection_measure = 0.0;
};

nlohmann::json to_json(const LemmaReport& report);

/// lhs = int_{I n E} |sum f_n(x) e(lambda_n x)|^2, term_density =
/// int_I sum |f_n|^2, term_sobolev = int_I sum (|f_n|^2 + |f_n'|^2). All three
/// are exact quadratic forms in the spectral coefficients of the f_n.
/// When gamma is given, |E n I| >= gamma / L is enforced.
LemmaReport lemma_main_report(std::span<const BandFunction> f_list, const Sequence& tail,
                              const ThickSet& E, Interval I, int L,
                              std::optional<double> gamma = std::nullopt);

/// For each c2: inf over reports of (lhs + c2 L^{-1/2} term_sobolev) / term_density.
/// Reports with zero density are skipped.
std::vector<double> lemma_margins(std::span<const LemmaReport> reports, int L,
                                  std::span<const double> c2_values);

struct SplitReport {
  double ratio = 0.0;
  std::optional<double> ratio_head;
  std::optional<double> ratio_tail;
  double norm = 0.0;
  double norm_head = 0.0;
  double norm_tail = 0.0;
  /// 0-based index of the first tail term, M(L) - 1.
  std::size_t split_index = 0;
};

nlohmann::json to_json(const SplitReport& report);

/// F = sum_n f_n e(lambda_n x) from coefficient blocks, split into the head
/// n < M(L) and the tail n >= M(L) (1-based n). Ratios are ||G chi_E|| / ||G||
/// over [0, T] for G = F, head, tail.
SplitReport theorem_split_check(std::span<const std::vector<cd>> blocks,
                                const Sequence& frequencies, const TailSchedule& schedule,
                                int L, const ThickSet& E, const Grid& grid);

/// Text format: "dimension N" then N rows of 2N numbers (re im ...).
void write_form(std::ostream& out, const HermitianForm& form);
HermitianForm read_form(std::istream& in);

}  // namespace lacunary
