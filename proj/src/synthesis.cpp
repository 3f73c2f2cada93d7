#include "lacunary/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "lacunary/errors.hpp"

namespace lacunary {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<cd> forward_dft(const std::vector<cd>& values) {
  Eigen::FFT<double> fft;
  std::vector<cd> out;
  fft.fwd(out, values);
  const double scale = 1.0 / static_cast<double>(values.size());
  for (cd& c : out) c *= scale;
  return out;
}

std::vector<cd> inverse_dft(const std::vector<cd>& coefficients) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cd> out;
  fft.inv(out, coefficients);
  return out;
}

// exp(2 pi i t) with t reduced modulo 1 first.
cd unit_phase(double t) {
  t -= std::round(t);
  return std::polar(1.0, kTwoPi * t);
}

double total_power(std::span<const cd> c) {
  double s = 0.0;
  for (const cd& z : c) s += std::norm(z);
  return s;
}

}  // namespace

Grid Grid::make(double period, std::size_t samples) {
  if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("grid: period must be positive");
  if (samples < 2) throw DomainError("grid: need at least two samples");
  return Grid{period, samples};
}

std::optional<std::int64_t> Grid::exact_bin(double xi) const {
  const double r = xi * period;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r))) return std::nullopt;
  return static_cast<std::int64_t>(k);
}

std::size_t Grid::unit_band_size() const {
  return static_cast<std::size_t>(std::floor(period + 1e-9)) + 1;
}

std::size_t Grid::slot(std::int64_t bin) const {
  const auto s = static_cast<std::int64_t>(samples);
  if (2 * std::abs(bin) >= s) {
    throw DomainError("grid: frequency " + std::to_string(frequency(bin)) +
                      " violates the Nyquist bound " + std::to_string(nyquist()));
  }
  return static_cast<std::size_t>(bin >= 0 ? bin : s + bin);
}

std::int64_t Grid::bin_at(std::size_t slot) const {
  const auto s = static_cast<std::int64_t>(samples);
  const auto i = static_cast<std::int64_t>(slot);
  return 2 * i < s ? i : i - s;
}

bool FrequencySupport::contains(double xi, double tol) const {
  return std::any_of(bands.begin(), bands.end(), [&](const Interval& b) {
    return xi >= b.lo - tol && xi <= b.hi + tol;
  });
}

bool FrequencySupport::within(double lo, double hi, double tol) const {
  return std::all_of(bands.begin(), bands.end(), [&](const Interval& b) {
    return b.lo >= lo - tol && b.hi <= hi + tol;
  });
}

double FrequencySupport::max_abs() const {
  double m = 0.0;
  for (const Interval& b : bands) m = std::max({m, std::abs(b.lo), std::abs(b.hi)});
  return m;
}

SpectralProfile::SpectralProfile(Sequence base, double interval_length)
    : base_(std::move(base)), interval_length_(interval_length) {
  if (!(interval_length_ > 0.0)) throw DomainError("spectral profile: interval length must be positive");
  for (std::size_t i = 1; i < base_.size(); ++i) {
    if (!(base_[i] - base_[i - 1] > interval_length_)) {
      throw DomainError("spectral profile: intervals " + std::to_string(i) + " and " +
                        std::to_string(i + 1) + " are not disjoint");
    }
  }
}

FrequencySupport SpectralProfile::support() const {
  FrequencySupport s;
  for (double x : base_.values()) s.bands.push_back({x, x + interval_length_});
  return s;
}

BandFunction::BandFunction(Grid grid, std::vector<cd> values, std::vector<cd> spectrum,
                           std::optional<FrequencySupport> support)
    : grid_(grid),
      values_(std::move(values)),
      spectrum_(std::move(spectrum)),
      support_(std::move(support)) {
  check_support();
}

BandFunction BandFunction::from_samples(const Grid& grid, std::vector<cd> values,
                                        std::optional<FrequencySupport> support) {
  if (values.size() != grid.samples) throw DomainError("band function: sample count mismatch");
  std::vector<cd> spectrum = forward_dft(values);
  return BandFunction(grid, std::move(values), std::move(spectrum), std::move(support));
}

BandFunction BandFunction::from_spectrum(const Grid& grid, std::vector<cd> coefficients,
                                         std::optional<FrequencySupport> support) {
  if (coefficients.size() != grid.samples) {
    throw DomainError("band function: coefficient count mismatch");
  }
  std::vector<cd> values = inverse_dft(coefficients);
  return BandFunction(grid, std::move(values), std::move(coefficients), std::move(support));
}

void BandFunction::check_support() const {
  if (!support_) return;
  if (!(support_->max_abs() < grid_.nyquist())) {
    throw DomainError("band function: declared support reaches " +
                      std::to_string(support_->max_abs()) + ", Nyquist bound is " +
                      std::to_string(grid_.nyquist()));
  }
  const double leak = leakage();
  if (leak > kLeakageTol) {
    throw DomainError("band function: spectral leakage " + std::to_string(leak) +
                      " outside the declared support");
  }
}

cd BandFunction::coefficient(std::int64_t bin) const { return spectrum_[grid_.slot(bin)]; }

std::vector<std::int64_t> BandFunction::active_bins() const {
  const double floor = 1e-26 * total_power(spectrum_);
  std::vector<std::int64_t> bins;
  for (std::size_t s = 0; s < spectrum_.size(); ++s) {
    if (std::norm(spectrum_[s]) > floor) bins.push_back(grid_.bin_at(s));
  }
  std::sort(bins.begin(), bins.end());
  return bins;
}

double BandFunction::norm_squared() const { return grid_.period * total_power(spectrum_); }

double BandFunction::sample_norm_squared() const { return grid_.spacing() * total_power(values_); }

double BandFunction::leakage() const {
  if (!support_) return 0.0;
  const double total = total_power(spectrum_);
  if (total == 0.0) return 0.0;
  double outside = 0.0;
  for (std::size_t s = 0; s < spectrum_.size(); ++s) {
    if (!support_->contains(grid_.frequency(grid_.bin_at(s)))) outside += std::norm(spectrum_[s]);
  }
  return outside / total;
}

cd BandFunction::evaluate(double x) const {
  const double u = x / grid_.period;
  cd sum = 0.0;
  for (std::size_t s = 0; s < spectrum_.size(); ++s) {
    if (spectrum_[s] == cd(0.0)) continue;
    sum += spectrum_[s] * unit_phase(static_cast<double>(grid_.bin_at(s)) * u);
  }
  return sum;
}

BandFunction synthesize(std::span<const std::vector<cd>> blocks, const Sequence& freqs,
                        const Grid& grid) {
  if (blocks.size() != freqs.size()) {
    throw DomainError("synthesize: " + std::to_string(blocks.size()) + " coefficient blocks for " +
                      std::to_string(freqs.size()) + " frequencies");
  }
  const std::size_t band = grid.unit_band_size();
  FrequencySupport support;
  for (double x : freqs.values()) support.bands.push_back({x, x + 1.0});
  if (!(support.max_abs() < grid.nyquist())) {
    throw DomainError("synthesize: Nyquist violation, spectrum reaches " +
                      std::to_string(support.max_abs()) + " but S/(2T) = " +
                      std::to_string(grid.nyquist()));
  }
  std::vector<cd> coefficients(grid.samples, cd(0.0));
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    const auto shift = grid.exact_bin(freqs[n]);
    if (!shift) {
      throw DomainError("synthesize: frequency " + std::to_string(freqs[n]) +
                        " is not on the grid (1/T)Z");
    }
    if (blocks[n].size() > band) {
      throw DomainError("synthesize: block " + std::to_string(n) + " addresses frequencies beyond 1");
    }
    for (std::size_t j = 0; j < blocks[n].size(); ++j) {
      coefficients[grid.slot(*shift + static_cast<std::int64_t>(j))] += blocks[n][j];
    }
  }
  return BandFunction::from_spectrum(grid, std::move(coefficients), std::move(support));
}

std::vector<std::int64_t> spectral_support(const BandFunction& f, double tol) {
  const auto spectrum = f.spectrum();
  const double total = total_power(spectrum);
  std::vector<std::int64_t> bins;
  if (total == 0.0) return bins;
  for (std::size_t s = 0; s < spectrum.size(); ++s) {
    if (std::norm(spectrum[s]) / total > tol) bins.push_back(f.grid().bin_at(s));
  }
  std::sort(bins.begin(), bins.end());
  return bins;
}

BandFunction poisson_transform(const BandFunction& g) {
  const Grid& grid = g.grid();
  std::vector<cd> c(g.spectrum().begin(), g.spectrum().end());
  for (std::size_t s = 0; s < c.size(); ++s) {
    c[s] *= std::exp(-std::abs(grid.frequency(grid.bin_at(s))));
  }
  return BandFunction::from_spectrum(grid, std::move(c), g.declared_support());
}

double bernstein_ratio(const BandFunction& f) {
  if (!f.declared_support() || !f.declared_support()->within(0.0, 1.0)) {
    throw DomainError("bernstein_ratio: declared support must lie in [0, 1]");
  }
  const Grid& grid = f.grid();
  double mass = 0.0;
  double derivative_mass = 0.0;
  const auto spectrum = f.spectrum();
  for (std::size_t s = 0; s < spectrum.size(); ++s) {
    const double w = kTwoPi * grid.frequency(grid.bin_at(s));
    mass += std::norm(spectrum[s]);
    derivative_mass += w * w * std::norm(spectrum[s]);
  }
  if (mass == 0.0) throw DomainError("bernstein_ratio: undefined for the zero function");
  return std::sqrt(derivative_mass / mass);
}

double plancherel_polya_ratio(const BandFunction& h, std::span<const double> points,
                              double separation) {
  if (!(separation > 0.0)) throw DomainError("plancherel_polya_ratio: separation must be positive");
  if (!h.declared_support() || !h.declared_support()->within(0.0, 1.0)) {
    throw DomainError("plancherel_polya_ratio: declared support must lie in [0, 1]");
  }
  const double norm2 = h.norm_squared();
  if (norm2 == 0.0) throw DomainError("plancherel_polya_ratio: undefined for the zero function");

  const double period = h.grid().period;
  std::vector<double> reduced;
  reduced.reserve(points.size());
  for (double x : points) reduced.push_back(x - period * std::floor(x / period));
  std::sort(reduced.begin(), reduced.end());
  const double min_gap = separation * (1.0 - 1e-12);
  for (std::size_t i = 1; i < reduced.size(); ++i) {
    if (reduced[i] - reduced[i - 1] < min_gap) {
      throw DomainError("plancherel_polya_ratio: points closer than the stated separation");
    }
  }
  if (reduced.size() >= 2 && period - reduced.back() + reduced.front() < min_gap) {
    throw DomainError("plancherel_polya_ratio: points closer than the stated separation");
  }

  double sum = 0.0;
  for (double d : points) sum += std::norm(h.evaluate(d));
  return sum / norm2;
}

std::vector<std::vector<double>> split_uniformly_discrete(std::span<const double> points,
                                                          double separation) {
  if (!(separation > 0.0)) throw DomainError("split_uniformly_discrete: separation must be positive");
  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<double>> parts;
  for (double p : sorted) {
    auto it = std::find_if(parts.begin(), parts.end(), [&](const std::vector<double>& part) {
      return p - part.back() >= separation;
    });
    if (it == parts.end()) {
      parts.push_back({p});
    } else {
      it->push_back(p);
    }
  }
  return parts;
}

}  // namespace lacunary
