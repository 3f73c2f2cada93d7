#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lacunary/concentration.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/random.hpp"

using namespace lacunary;

namespace {

constexpr double kPi = std::numbers::pi;

cd quad_exponential(double d, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  const double re = gauss_kronrod<double, 61>::integrate(
      [d](double x) { return std::cos(2 * kPi * d * x); }, a, b, 8, 1e-12);
  const double im = gauss_kronrod<double, 61>::integrate(
      [d](double x) { return std::sin(2 * kPi * d * x); }, a, b, 8, 1e-12);
  return {re, im};
}

// int over pieces of |g|^2 by adaptive quadrature.
template <class F>
double quad_abs2(F g, const std::vector<Interval>& pieces) {
  using boost::math::quadrature::gauss_kronrod;
  double s = 0;
  for (const Interval& p : pieces) {
    s += gauss_kronrod<double, 61>::integrate([&](double x) { return std::norm(g(x)); }, p.lo,
                                              p.hi, 10, 1e-12);
  }
  return s;
}

Sequence random_frequencies(CounterRng& rng, std::size_t n) {
  std::vector<double> v;
  double at = rng.uniform(-3, 0);
  for (std::size_t i = 0; i < n; ++i) v.push_back(at += rng.uniform(0.2, 4.0));
  return Sequence::from_reals(v);
}

// E' random, E obtained by shrinking each piece of E'.
std::pair<ThickSet, ThickSet> nested_pair(CounterRng& rng) {
  const ThickSet outer = random_union(rng, 1 + rng.next_u64() % 5, rng.uniform(0.1, 0.9), {0, 1});
  std::vector<Interval> inner;
  for (const Interval& iv : outer.intervals()) {
    const double a = rng.uniform(0, 0.4), b = rng.uniform(0, 0.4);
    inner.push_back({iv.lo + a * iv.length(), iv.hi - b * iv.length()});
  }
  return {ThickSet(inner, {0, 1}, false), outer};
}

}  // namespace

TEST(Gram, ClosedFormMatchesQuadrature) {
  CounterRng rng(1, 0);
  for (int t = 0; t < 10; ++t) {
    const ThickSet E = random_union(rng, 3, rng.uniform(0.2, 0.8), {0, 1});
    const Sequence lam = random_frequencies(rng, 5);
    const HermitianForm G = gram_matrix(E, lam);
    for (int n = 0; n < 5; ++n) {
      for (int m = 0; m < 5; ++m) {
        cd q = 0;
        for (const Interval& iv : E.intervals()) q += quad_exponential(lam[m] - lam[n], iv.lo, iv.hi);
        EXPECT_LT(std::abs(G.entries(n, m) - q), 1e-9);
      }
    }
  }
}

TEST(Gram, HalfIntervalExample) {
  const HermitianForm G =
      gram_matrix(ThickSet({{0, 0.5}}, {0, 1}, false), Sequence::from_reals({0, 1}));
  EXPECT_LT(std::abs(G.entries(0, 0) - 0.5), 1e-15);
  EXPECT_LT(std::abs(G.entries(0, 1) - cd(0, 1 / kPi)), 1e-15);
  EXPECT_LT(std::abs(G.entries(1, 0) - cd(0, -1 / kPi)), 1e-15);
  EXPECT_NEAR(nazarov_constant(ThickSet({{0, 0.5}}, {0, 1}, false), Sequence::from_reals({0, 1}))
                  .lambda_min,
              0.5 - 1 / kPi, 1e-12);
}

TEST(Gram, FullTorusIsIdentity) {
  CounterRng rng(2, 0);
  std::vector<long long> ints;
  long long at = -40;
  for (int i = 0; i < 40; ++i) ints.push_back(at += 1 + rng.next_u64() % 9);
  const Sequence lam = Sequence::from_integers(std::span<const long long>(ints));
  const ThickSet full = ThickSet::full({0, 1}, true);
  const HermitianForm G = gram_matrix(full, lam);
  EXPECT_LT((G.entries - Eigen::MatrixXcd::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(nazarov_constant(full, lam).lambda_min, 1.0, 1e-10);
}

TEST(Gram, PositiveSemidefiniteAndHermitian) {
  CounterRng rng(3, 0);
  for (int t = 0; t < 20; ++t) {
    const ThickSet E = random_union(rng, 4, rng.uniform(0.05, 0.6), {0, 1});
    const HermitianForm G = gram_matrix(E, random_frequencies(rng, 8));
    EXPECT_LT(G.hermiticity_defect(), 1e-15);
    EXPECT_GE(smallest_eigenpair(G).lambda_min, -1e-12);
  }
}

TEST(Gram, MonotoneUnderInclusion) {
  CounterRng rng(4, 0);
  for (int t = 0; t < 50; ++t) {
    const auto [E, Eprime] = nested_pair(rng);
    const Sequence lam = random_frequencies(rng, 1 + rng.next_u64() % 12);
    EXPECT_LE(nazarov_constant(E, lam).lambda_min, nazarov_constant(Eprime, lam).lambda_min + 1e-12);
  }
}

TEST(Gram, ScalingCovariance) {
  CounterRng rng(5, 0);
  const ThickSet E = random_union(rng, 3, 0.6, {0, 1});
  const Sequence lam = random_frequencies(rng, 6);
  std::vector<Interval> half;
  for (const Interval& iv : E.intervals()) half.push_back({iv.lo / 2, iv.hi / 2});
  std::vector<double> doubled;
  for (double x : lam.values()) doubled.push_back(2 * x);
  const HermitianForm G = gram_matrix(E, lam);
  const HermitianForm H =
      gram_matrix(ThickSet(half, {0, 1}, false), Sequence::from_reals(doubled));
  EXPECT_LT((2.0 * H.entries - G.entries).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Gram, Errors) {
  EXPECT_THROW(gram_matrix(ThickSet({}, {0, 1}, false), Sequence::from_reals({0, 1})), DomainError);
  EXPECT_THROW(gram_matrix(ThickSet({{0, 1}}, {0, 2}, false), Sequence::from_reals({0})),
               DomainError);
}

TEST(Eigensolver, RejectsNonHermitian) {
  HermitianForm f;
  f.entries = Eigen::MatrixXcd::Identity(2, 2);
  f.entries(0, 1) = 0.5;
  EXPECT_THROW(smallest_eigenpair(f), NumericalError);
}

TEST(Eigensolver, TwoByTwoOracle) {
  CounterRng rng(6, 0);
  for (int t = 0; t < 20; ++t) {
    const double a = rng.uniform(0, 2), d = rng.uniform(0, 2);
    const cd b = rng.complex_normal();
    HermitianForm f;
    f.entries.resize(2, 2);
    f.entries << a, b, std::conj(b), d;
    const double expect = (a + d) / 2 - std::sqrt((a - d) * (a - d) / 4 + std::norm(b));
    const ConcentrationEstimate e = smallest_eigenpair(f);
    EXPECT_NEAR(e.lambda_min, expect, 1e-13);
    EXPECT_LE(e.residual, 1e-12);
  }
}

TEST(FormFile, RoundTrip) {
  const HermitianForm G =
      gram_matrix(ThickSet({{0.1, 0.45}}, {0, 1}, false), Sequence::from_reals({0, 1.5, 3}));
  std::stringstream ss;
  write_form(ss, G);
  const HermitianForm back = read_form(ss);
  EXPECT_EQ(back.entries, G.entries);
  std::stringstream bad("dimension 2\n1 0 0 0\n");
  EXPECT_THROW(read_form(bad), DomainError);
}

TEST(LogvinenkoSereda, PeriodicClosedForm) {
  // Only bins 0 and T couple, so lambda_min = gamma - sin(pi gamma) / pi.
  for (double T : {1.0, 2.0, 4.0}) {
    for (double g : {0.2, 0.5, 0.8}) {
      const ThickSet E = ThickSet::periodic_pattern(g, 1.0, {0, 1});
      const ConcentrationEstimate e =
          ls_constant(E, FrequencySupport::unit_band(), Grid::make(T, 64));
      EXPECT_NEAR(e.lambda_min, g - std::sin(kPi * g) / kPi, 1e-13) << T << " " << g;
    }
  }
}

TEST(LogvinenkoSereda, FullWindowIsExactlyOne) {
  const ConcentrationEstimate e = ls_constant(ThickSet::full({0, 1}, true),
                                              FrequencySupport::unit_band(), Grid::make(4, 64));
  EXPECT_EQ(e.constant, 1.0);
}

TEST(LogvinenkoSereda, LargerProfileNeverLowersC) {
  const ThickSet E = ThickSet::periodic_pattern(0.5, 1.0, {0, 1}, 0.2);
  const Grid g = Grid::make(2, 2048);
  FrequencySupport profile = FrequencySupport::unit_band();
  double last = ls_constant(E, profile, g).constant;
  for (int k = 1; k <= 4; ++k) {
    profile.bands.push_back({std::pow(4.0, k), std::pow(4.0, k) + 1});
    const double c = ls_constant(E, profile, g).constant;
    EXPECT_GE(c, last * (1 - 1e-12));
    last = c;
  }
  EXPECT_TRUE(std::isfinite(last));
}

TEST(LogvinenkoSereda, DegenerateReported) {
  const ThickSet tiny({{0, 1e-9}}, {0, 1}, true);
  const ConcentrationEstimate e =
      ls_constant(tiny, FrequencySupport{{{0, 3}}}, Grid::make(1, 64));
  EXPECT_TRUE(e.degenerate);
  EXPECT_TRUE(std::isinf(e.constant));
}

TEST(Lemma, TrivialCases) {
  const Grid g = Grid::make(1, 16);
  const ThickSet E = ThickSet::full({0, 1}, true);
  const std::vector<BandFunction> zero{
      BandFunction::from_spectrum(g, std::vector<cd>(16, 0.0), FrequencySupport::unit_band())};
  const LemmaReport z = lemma_main_report(zero, Sequence::from_reals({4}), E, {0, 0.25}, 4);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_EQ(z.term_density, 0.0);
  EXPECT_EQ(z.term_sobolev, 0.0);

  std::vector<cd> c(16, 0.0);
  c[0] = 2.0;
  const std::vector<BandFunction> constant{
      BandFunction::from_spectrum(g, c, FrequencySupport::unit_band())};
  const LemmaReport r = lemma_main_report(constant, Sequence::from_reals({4}), E, {0, 0.25}, 4);
  EXPECT_NEAR(r.lhs, r.term_density, 1e-15);
  EXPECT_NEAR(r.term_density, 1.0, 1e-15);
  EXPECT_THROW(lemma_main_report(constant, Sequence::from_reals({4}), E, {0, 0.3}, 4), DomainError);
}

TEST(Lemma, MatchesQuadrature) {
  CounterRng rng(7, 0);
  const Grid g = Grid::make(2, 16);
  const Sequence tail = Sequence::from_reals({16, 64, 256});
  const ThickSet E = ThickSet::periodic_pattern(0.5, 1.0, {0, 1}, 0.1);
  std::vector<BandFunction> fs;
  for (int n = 0; n < 3; ++n) {
    std::vector<cd> c(16, 0.0);
    for (std::int64_t b = 0; b <= 2; ++b) c[g.slot(b)] = rng.complex_normal();
    fs.push_back(BandFunction::from_spectrum(g, c, FrequencySupport::unit_band()));
  }
  const Interval I{0.05, 0.05 + 1.0 / 8};
  const LemmaReport r = lemma_main_report(fs, tail, E, I, 8, 0.5);
  auto F = [&](double x) {
    cd s = 0;
    for (int n = 0; n < 3; ++n) s += fs[n].evaluate(x) * std::exp(cd(0, 2 * kPi * tail[n] * x));
    return s;
  };
  EXPECT_NEAR(r.lhs, quad_abs2(F, E.pieces_in(I.lo, I.hi)), 1e-9);
  double dens = 0;
  for (int n = 0; n < 3; ++n) dens += quad_abs2([&](double x) { return fs[n].evaluate(x); }, {I});
  EXPECT_NEAR(r.term_density, dens, 1e-10);
  EXPECT_THROW(lemma_main_report(fs, tail, E, I, 8, 0.9), DomainError);
}

TEST(Lemma, Margins) {
  const std::vector<LemmaReport> reports{{1.0, 2.0, 4.0, 0}, {0.5, 1.0, 3.0, 0}, {0, 0, 0, 0}};
  const std::vector<double> c2{0.0, 1.0};
  const auto m = lemma_margins(reports, 4, c2);
  EXPECT_DOUBLE_EQ(m[0], 0.5);
  EXPECT_DOUBLE_EQ(m[1], std::min((1.0 + 0.5 * 4) / 2, (0.5 + 0.5 * 3) / 1));
}

TEST(Split, FullWindowAndPureFrequency) {
  const Grid g = Grid::make(1, 1024);
  const Sequence lam = Sequence::from_reals({4, 16, 64, 256});
  const TailSchedule sched = TailSchedule::parse("1:3@1");
  CounterRng rng(8, 0);
  std::vector<std::vector<cd>> blocks;
  for (int n = 0; n < 4; ++n) blocks.push_back({rng.complex_normal(), rng.complex_normal()});
  const SplitReport full =
      theorem_split_check(blocks, lam, sched, 1, ThickSet::full({0, 1}, true), g);
  EXPECT_NEAR(full.ratio, 1.0, 1e-14);
  EXPECT_EQ(full.split_index, 2u);
  EXPECT_NEAR(full.norm_head * full.norm_head + full.norm_tail * full.norm_tail,
              full.norm * full.norm, 1e-12);

  const ThickSet half = ThickSet::periodic_pattern(0.5, 1.0, {0, 1});
  std::vector<std::vector<cd>> pure(4);
  pure[0] = {1.0};
  const SplitReport p = theorem_split_check(pure, lam, sched, 1, half, g);
  EXPECT_NEAR(p.ratio * p.ratio, 0.5, 1e-12);
  EXPECT_FALSE(p.ratio_tail);
}

TEST(Split, MatchesQuadratureAndChecksPositivity) {
  const Grid g = Grid::make(2, 2048);
  const Sequence lam = Sequence::from_reals({4, 16, 64});
  const ThickSet E = ThickSet::periodic_pattern(0.3, 1.0, {0, 1}, 0.25);
  CounterRng rng(9, 0);
  std::vector<std::vector<cd>> blocks;
  for (int n = 0; n < 3; ++n) blocks.push_back({rng.complex_normal(), rng.complex_normal(), rng.complex_normal()});
  const SplitReport r = theorem_split_check(blocks, lam, TailSchedule::parse("1:1@1"), 1, E, g);
  const BandFunction F = synthesize(blocks, lam, g);
  const double num = quad_abs2([&](double x) { return F.evaluate(x); }, E.pieces_in(0, 2));
  EXPECT_NEAR(r.ratio * r.ratio, num / F.norm_squared(), 1e-9);
  EXPECT_THROW(theorem_split_check(blocks, Sequence::from_reals({-4, 16, 64}),
                                   TailSchedule::parse("1:1@1"), 1, E, g),
               DomainError);
}
