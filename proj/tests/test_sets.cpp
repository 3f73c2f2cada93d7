#include <gtest/gtest.h>

#include <cmath>

#include "lacunary/errors.hpp"
#include "lacunary/random.hpp"
#include "lacunary/sets.hpp"

using namespace lacunary;

namespace {

// |E n [a, b]| by fine midpoint sampling of the indicator.
double sampled_measure(const ThickSet& E, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double m = 0;
  for (int i = 0; i < n; ++i) {
    double x = a + (i + 0.5) * h;
    if (E.periodic()) {
      const double p = E.period();
      x = E.window().lo + std::fmod(std::fmod(x - E.window().lo, p) + p, p);
    }
    for (const Interval& iv : E.intervals()) {
      if (x >= iv.lo && x <= iv.hi) {
        m += h;
        break;
      }
    }
  }
  return m;
}

}  // namespace

TEST(ThickSet, MergesTouchingAndRejectsOverlap) {
  const ThickSet E({{0.0, 0.2}, {0.2, 0.3}}, {0.0, 1.0}, false);
  EXPECT_EQ(E.intervals().size(), 1u);
  EXPECT_THROW(ThickSet({{0.0, 0.3}, {0.2, 0.4}}, {0.0, 1.0}, false), DomainError);
  EXPECT_THROW(ThickSet({{0.5, 1.5}}, {0.0, 1.0}, false), DomainError);
}

TEST(ThickSet, PeriodicMeasureMatchesSampling) {
  const ThickSet E({{0.1, 0.35}, {0.6, 0.7}}, {0.0, 1.0}, true);
  for (auto [a, b] : {std::pair{-1.3, 0.4}, std::pair{0.05, 3.77}, std::pair{2.0, 2.5}}) {
    EXPECT_NEAR(E.measure_in(a, b), sampled_measure(E, a, b), 1e-3);
  }
  double total = 0;
  for (const Interval& p : E.pieces_in(-1.3, 2.2)) total += p.length();
  EXPECT_NEAR(total, E.measure_in(-1.3, 2.2), 1e-12);
}

TEST(ThickSet, JsonRoundTrip) {
  const ThickSet E({{0.1, 0.35}, {0.6, 0.7}}, {0.0, 1.0}, true);
  const ThickSet back = thick_set_from_json(to_json(E));
  EXPECT_EQ(back.measure(), E.measure());
  EXPECT_TRUE(back.periodic());
  nlohmann::json bad = to_json(E);
  bad["colour"] = "red";
  EXPECT_THROW(thick_set_from_json(bad), DomainError);
}

TEST(Thickness, PeriodicPatternIsExactlyGamma) {
  for (double g : {0.2, 0.5, 0.8}) {
    const ThickSet E = ThickSet::periodic_pattern(g, 1.0, {0.0, 4.0}, 0.3);
    EXPECT_NEAR(thickness(E, 1.0), g, 1e-12);
    EXPECT_NEAR(E.measure(), 4 * g, 1e-12);
  }
}

TEST(Thickness, NeverExceedsSampledScan) {
  CounterRng rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const ThickSet E = random_union(rng, 5, rng.uniform(0.5, 2.5), {0.0, 4.0});
    const double delta = rng.uniform(0.3, 2.0);
    const double exact = thickness(E, delta);
    double scan = 1e9;
    for (int i = 0; i <= 400; ++i) {
      const double t = (4.0 - delta) * i / 400.0;
      scan = std::min(scan, E.measure_in(t, t + delta) / delta);
    }
    EXPECT_LE(exact, scan + 1e-12);
    EXPECT_GE(exact, scan - 0.02);
  }
}

TEST(Thickness, Errors) {
  const ThickSet E = ThickSet::full({0.0, 1.0}, true);
  EXPECT_THROW(thickness(E, 0.0), DomainError);
  EXPECT_THROW(thickness(E, 2.0), DomainError);
  EXPECT_DOUBLE_EQ(thickness(E, 1.0), 1.0);
}

TEST(Partition, CountsAndBound) {
  CounterRng rng(5, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const double gamma = rng.uniform(0.1, 0.9);
    const ThickSet E = ThickSet::periodic_pattern(gamma, 1.0, {0.0, 3.0}, rng.uniform(0, 1));
    const int L = 2 + trial % 7;
    const PartitionReport r = partition_good_bad(E, 1.0, L, thickness(E, 1.0));
    EXPECT_EQ(r.blocks.size(), 3u);
    for (const PartitionBlock& b : r.blocks) {
      EXPECT_EQ(b.good.size() + b.bad.size(), static_cast<std::size_t>(L));
      EXPECT_GE(static_cast<double>(b.good.size()), r.lower_bound - 1e-9);
    }
    EXPECT_TRUE(r.bound_holds);
    EXPECT_NEAR(r.c_gamma, (r.gamma / 2) / (1 - r.gamma / 2), 1e-15);
  }
}

TEST(Partition, GoodSetIsInsideWindowAndThick) {
  const ThickSet E = ThickSet::periodic_pattern(0.5, 1.0, {0.0, 4.0});
  const PartitionReport r = partition_good_bad(E, 1.0, 8, 0.5);
  const ThickSet G = r.good_set(E);
  EXPECT_GT(thickness(G, 2.0), 0.0);
}

TEST(Partition, Errors) {
  const ThickSet E = ThickSet::periodic_pattern(0.5, 1.0, {0.0, 2.0});
  EXPECT_THROW(partition_good_bad(E, 1.0, 8, 0.9), DomainError);  // not 0.9-thick
  EXPECT_THROW(partition_good_bad(E, 0.75, 3, 0.5), DomainError);  // window not a multiple
  EXPECT_THROW(partition_good_bad(E, 1.0, 0, 0.5), DomainError);
}

TEST(RandomUnion, HasRequestedMeasure) {
  CounterRng rng(9, 1);
  const ThickSet E = random_union(rng, 7, 0.37, {0.0, 1.0});
  EXPECT_NEAR(E.measure(), 0.37, 1e-12);
  EXPECT_LE(E.intervals().size(), 7u);
}
