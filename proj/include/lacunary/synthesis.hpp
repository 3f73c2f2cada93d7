#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lacunary/sequences.hpp"
#include "lacunary/sets.hpp"

namespace lacunary {

using cd = std::complex<double>;

/// Relative spectral mass allowed outside a declared support.
inline constexpr double kLeakageTol = 1e-8;

/// Uniform sampling of the periodic window [0, T): S samples, frequencies on
/// the lattice (1/T)Z. A bin b stands for the frequency b / T.
struct Grid {
  double period = 1.0;
  std::size_t samples = 2;

  static Grid make(double period, std::size_t samples);

  double spacing() const { return period / static_cast<double>(samples); }
  /// Frequencies must satisfy |xi| < nyquist().
  double nyquist() const { return static_cast<double>(samples) / (2.0 * period); }
  double frequency(std::int64_t bin) const { return static_cast<double>(bin) / period; }
  /// Bin of an on-lattice frequency, nullopt when xi * T is not an integer.
  std::optional<std::int64_t> exact_bin(double xi) const;
  /// Bins b with b / T in [0, 1].
  std::size_t unit_band_size() const;

  /// FFT slot of a bin; throws when the bin violates the Nyquist bound.
  std::size_t slot(std::int64_t bin) const;
  std::int64_t bin_at(std::size_t slot) const;
};

/// Union of closed frequency bands.
struct FrequencySupport {
  std::vector<Interval> bands;

  static FrequencySupport unit_band() { return {{{0.0, 1.0}}}; }
  bool contains(double xi, double tol = 1e-9) const;
  bool within(double lo, double hi, double tol = 1e-12) const;
  double max_abs() const;
};

/// Union of [x_n, x_n + interval_length] over a base sequence.
class SpectralProfile {
 public:
  explicit SpectralProfile(Sequence base, double interval_length = 1.0);

  const Sequence& base() const { return base_; }
  double interval_length() const { return interval_length_; }
  FrequencySupport support() const;

 private:
  Sequence base_;
  double interval_length_;
};

/// Samples of a trigonometric polynomial on a Grid together with its discrete
/// spectrum c_b, f(x) = sum_b c_b exp(2 pi i b x / T). Immutable.
class BandFunction {
 public:
  static BandFunction from_samples(const Grid& grid, std::vector<cd> values,
                                   std::optional<FrequencySupport> support = std::nullopt);
  /// `coefficients` are indexed by FFT slot (Grid::slot).
  static BandFunction from_spectrum(const Grid& grid, std::vector<cd> coefficients,
                                    std::optional<FrequencySupport> support = std::nullopt);

  const Grid& grid() const { return grid_; }
  std::span<const cd> values() const { return values_; }
  std::span<const cd> spectrum() const { return spectrum_; }
  const std::optional<FrequencySupport>& declared_support() const { return support_; }

  cd coefficient(std::int64_t bin) const;
  /// Nonzero bins in increasing order.
  std::vector<std::int64_t> active_bins() const;

  /// ||f||_2^2 over one period, T * sum |c_b|^2.
  double norm_squared() const;
  /// (T / S) * sum |f(x_s)|^2; equal to norm_squared() by Parseval.
  double sample_norm_squared() const;
  /// Spectral mass outside the declared support over total mass.
  double leakage() const;
  /// Exact trigonometric interpolation at an arbitrary point.
  cd evaluate(double x) const;

 private:
  BandFunction(Grid grid, std::vector<cd> values, std::vector<cd> spectrum,
               std::optional<FrequencySupport> support);
  void check_support() const;

  Grid grid_;
  std::vector<cd> values_;
  std::vector<cd> spectrum_;
  std::optional<FrequencySupport> support_;
};

/// F(x) = sum_n f_n(x) exp(2 pi i x_n x), where block n holds the coefficients
/// of f_n at frequencies 0, 1/T, 2/T, ... (all inside [0, 1]).
BandFunction synthesize(std::span<const std::vector<cd>> blocks, const Sequence& freqs,
                        const Grid& grid);

/// Bins holding more than `tol` of the total spectral mass.
std::vector<std::int64_t> spectral_support(const BandFunction& f, double tol);

/// Fourier multiplier exp(-|xi|).
BandFunction poisson_transform(const BandFunction& g);

/// ||f'||_2 / ||f||_2 for f with declared support inside [0, 1].
double bernstein_ratio(const BandFunction& f);

/// sum_{d in D} |h(d)|^2 / ||h||_2^2 with D a point set on the circle R/TZ
/// whose points are pairwise at least `separation` apart.
double plancherel_polya_ratio(const BandFunction& h, std::span<const double> points,
                              double separation);

/// Splits a finite point set into parts whose points are `separation` apart,
/// first-fit over the sorted points.
std::vector<std::vector<double>> split_uniformly_discrete(std::span<const double> points,
                                                          double separation);

}  // namespace lacunary
