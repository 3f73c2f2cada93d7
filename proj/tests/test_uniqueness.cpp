#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lacunary/errors.hpp"
#include "lacunary/uniqueness.hpp"

using namespace lacunary;

namespace {

constexpr double kE = std::numbers::e;

double gk(auto f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-13);
}

// First n where lambda_n (1 + 1/log lambda_n) >= lambda_{n+1} (1 - 1/log lambda_{n+1}).
std::optional<std::size_t> brute_first_failure(const std::vector<double>& x) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] * (1 + 1 / std::log(x[i])) >= x[i + 1] * (1 - 1 / std::log(x[i + 1]))) return i + 1;
  }
  return std::nullopt;
}

}  // namespace

TEST(Separation, PowersOfFourHold) {
  const Sequence s = build_geometric(4, 4, 50);
  const SeparationReport r = separation_condition(s, 50);
  EXPECT_TRUE(r.all_hold());
  EXPECT_EQ(r.holds.size(), 49u);
  double expect = 0;
  for (int n = 1; n <= 50; ++n) expect += 1 / std::pow(n * std::log(4.0), 2);
  EXPECT_NEAR(r.partial_sum, expect, 1e-12);
  EXPECT_LT(r.partial_sum, std::numbers::pi * std::numbers::pi / (6 * std::pow(std::log(4.0), 2)));
}

TEST(Separation, ArithmeticProgressionFails) {
  std::vector<double> x;
  for (int n = 1; n <= 40; ++n) x.push_back(n + 2);
  const SeparationReport r = separation_condition(Sequence::from_reals(x), 40);
  ASSERT_FALSE(r.all_hold());
  EXPECT_EQ(r.first_failure, brute_first_failure(x));
  EXPECT_TRUE(separation_condition(Sequence::from_reals({4, 1e6}), 2).all_hold());
}

TEST(Separation, Errors) {
  EXPECT_THROW(separation_condition(Sequence::from_reals({2, 100}), 2), DomainError);
  EXPECT_THROW(separation_condition(Sequence::from_reals({4, 100}), 3), DomainError);
  EXPECT_NO_THROW(separation_condition(Sequence::from_reals({4, 100, 1000}), 1));
}

TEST(Bump, SmoothstepShape) {
  const BumpFunction phi = BumpFunction::smoothstep();
  EXPECT_EQ(phi.value(0.0), 1.0);
  EXPECT_EQ(phi.value(0.5), 1.0);
  EXPECT_EQ(phi.value(1.0), 0.0);
  EXPECT_EQ(phi.value(1.5), 0.0);
  EXPECT_NEAR(phi.value(0.75), 0.5, 1e-15);
  EXPECT_NEAR(phi.max_abs_derivative(), 3.0, 1e-14);
  for (double y : {-1.0, -0.5, 0.5, 1.0}) {
    EXPECT_NEAR(phi.value(y - 1e-9), phi.value(y + 1e-9), 1e-8);
    EXPECT_NEAR(phi.derivative(y - 1e-9), phi.derivative(y + 1e-9), 1e-7);
  }
  // Derivative against central differences.
  for (double y = -0.99; y < 1; y += 0.0731) {
    const double h = 1e-6;
    EXPECT_NEAR(phi.derivative(y), (phi.value(y + h) - phi.value(y - h)) / (2 * h), 1e-6);
  }
}

TEST(Omega, PropertiesOnPowersOfFour) {
  const Sequence s = build_geometric(4, 4, 12);
  const OmegaWeight w(s, BumpFunction::smoothstep());
  for (std::size_t n = 0; n < s.size(); ++n) {
    EXPECT_DOUBLE_EQ(w(s[n]), w.radius(n));
    EXPECT_DOUBLE_EQ(w.radius(n), s[n] / std::log(s[n]));
  }
  // Lipschitz scan at 1e-4 resolution over the first few summands.
  double worst = 0;
  for (double x = 1; x < 300; x += 1e-4) worst = std::max(worst, std::abs(w.derivative(x)));
  EXPECT_LE(worst, 3 + 1e-6);
  EXPECT_GE(w(2.0), 0.0);
}

TEST(Omega, RejectsOverlapAndSmallTerms) {
  EXPECT_THROW(OmegaWeight(Sequence::from_reals({2, 100}), BumpFunction::smoothstep()),
               DomainError);
  EXPECT_THROW(OmegaWeight(Sequence::from_reals({10, 12}), BumpFunction::smoothstep()),
               DomainError);
}

TEST(Omega, DiagnosticsMatchQuadrature) {
  const Sequence s = build_geometric(4, 4, 8);
  const BumpFunction phi = BumpFunction::smoothstep();
  const OmegaWeight w(s, phi);
  const double T = 5000;
  const OmegaDiagnostics d = omega_diagnostics(s, phi, T);
  // Integrate piecewise between the kinks of omega.
  std::vector<double> knots{1, T};
  for (std::size_t n = 0; n < s.size(); ++n) {
    for (double off : {-1.0, -0.5, 0.5, 1.0}) {
      const double k = s[n] + off * w.radius(n);
      if (k > 1 && k < T) knots.push_back(k);
    }
  }
  std::sort(knots.begin(), knots.end());
  double q = 0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    q += gk([&](double x) { return w(x) / (x * x); }, knots[i], knots[i + 1]);
  }
  EXPECT_NEAR(d.tail_integral, q, 1e-10);
  EXPECT_LE(d.lipschitz_bound, 3 + 1e-12);
  double ref = 0;
  for (std::size_t n = 0; n < s.size(); ++n)
    if (s[n] <= T) ref += 1 / std::pow(std::log(s[n]), 2);
  EXPECT_NEAR(d.reference_sum, ref, 1e-14);
  // Tail integral is comparable to the reference sum up to a bounded factor.
  EXPECT_LT(d.tail_integral, 4 * d.reference_sum);
  EXPECT_GT(d.tail_integral, d.reference_sum / 4);
}

TEST(Omega, DominationIsBounded) {
  const Sequence s = build_geometric(4, 4, 12);
  const BumpFunction phi = BumpFunction::smoothstep();
  const double c1 = omega_diagnostics(s, phi, 1e4).domination_constant;
  const double c4 = omega_diagnostics(s, phi, 4e4).domination_constant;
  EXPECT_TRUE(std::isfinite(c1));
  EXPECT_LE(c4, c1 + 2.0);
  // On the spectral set omega is at least a_n/2 ~ x / log x.
  for (double x : {64.0, 1024.0}) EXPECT_GE(omega_weight(x, s, phi), x / std::log(x) / 2);
}

TEST(Omega, EmptySpectralSet) {
  const Sequence s = Sequence::from_reals({1e6});
  const OmegaDiagnostics d = omega_diagnostics(s, BumpFunction::smoothstep(), 10);
  EXPECT_NEAR(d.domination_constant, 10 / std::log(kE + 10), 1e-14);
  EXPECT_EQ(d.tail_integral, 0.0);
}

TEST(CarlemanDenjoy, MomentsAndMaximizer) {
  const auto [xi0, m0] = moment_maximizer(0);
  EXPECT_NEAR(m0, -log_majorant(1.0), 1e-15);
  EXPECT_NEAR(m0, -1 / std::log(kE + 1), 1e-15);
  EXPECT_EQ(xi0, 1.0);
  for (std::size_t n : {3u, 20u, 100u}) {
    const auto [xi, logM] = moment_maximizer(n);
    double best = -1e300;
    for (double t = 0; t < 60; t += 1e-4) {
      const double x = std::exp(t);
      best = std::max(best, n * t - x / std::log(kE + x));
    }
    EXPECT_GE(logM, best - 1e-9 * std::abs(best));
    EXPECT_NEAR(logM, best, 1e-6 * std::max(1.0, std::abs(best)));
    EXPECT_NEAR(n * std::log(xi) - xi / std::log(kE + xi), logM, 1e-9 * std::max(1.0, std::abs(logM)));
  }
}

TEST(CarlemanDenjoy, ConvexityAndDivergence) {
  const QuasiAnalyticityReport r = carleman_denjoy_partial(10000, 1e12);
  EXPECT_TRUE(log_convex(r));
  EXPECT_TRUE(mu_non_increasing(r));
  EXPECT_GT(r.partial_sums[9999], r.partial_sums[99]);
  const DivergenceEvidence ev = divergence_evidence(r);
  EXPECT_TRUE(ev.strictly_increasing);
  EXPECT_TRUE(ev.no_plateau);
  EXPECT_EQ(ev.decade_sums.size(), 4u);
}

TEST(CarlemanDenjoy, IntegralProxyMatchesQuadrature) {
  for (double T : {10.0, 1e3, 1e6}) {
    double q = 0;
    for (double a = 1; a < T; a *= 10) {
      q += gk([](double x) { return 1 / (x * std::log(kE + x)); }, a, std::min(10 * a, T));
    }
    EXPECT_NEAR(carleman_integral(T), q, 1e-10);
  }
  const QuasiAnalyticityReport r = carleman_denjoy_partial(10, 1e6);
  EXPECT_EQ(r.integral_proxy.back().first, 1e6);
  for (std::size_t i = 1; i < r.integral_proxy.size(); ++i)
    EXPECT_GT(r.integral_proxy[i].second, r.integral_proxy[i - 1].second);
}
