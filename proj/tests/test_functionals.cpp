#include <gtest/gtest.h>

#include <cmath>

#include "graphonlab.hpp"

using namespace graphonlab;

namespace {

const GraphonHandle kW = AnalyticGraphon::counterexample();

// Composite Simpson on each smooth piece of the row y ↦ W(x,y), using the
// piece's own formula up to its endpoints. Shares no code with the library.
double simpson_degree(double x) {
  auto simpson = [](auto f, double a, double b) {
    const int n = 2000;
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) s += f(a + i * h) * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    return s * h / 3;
  };
  const bool low = 0 < x && x < 0.5;
  const double kink = std::clamp(1.5 - x, 0.5, 1.0);
  return simpson([&](double y) { return low ? 4 * x * y : 0.0; }, 0, 0.5) +
         simpson([](double) { return 0.0; }, 0.5, kink) +
         simpson([&](double) { return x > 0.5 ? 0.5 : 0.0; }, kink, 1.0);
}

}  // namespace

TEST(Degree, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(kW.degree_at(0.3), 0.15);
  EXPECT_DOUBLE_EQ(kW.degree_at(0.8), 0.15);
  const auto p = degree(AnalyticGraphon::constant(0.3), 1000);
  for (double v : p.values) EXPECT_EQ(v, 0.3);
  EXPECT_TRUE(p.exact);
}

TEST(Degree, QuadratureMatchesSimpsonOracle) {
  for (double x : {0.05, 0.3, 0.49, 0.51, 0.8, 0.97}) {
    EXPECT_NEAR(kW.row_integral(x, 0.0, 1.0), simpson_degree(x), 1e-9) << x;
    EXPECT_NEAR(kW.degree_at(x), simpson_degree(x), 1e-9) << x;
  }
}

TEST(Degree, GridMeanEqualsEdgeDensity) {
  for (std::size_t n : {8u, 64u, 256u}) {
    const auto g = discretize(kW, n);
    const auto p = degree(g, n);
    EXPECT_NEAR(p.mean(), hom_density(SmallGraph::edge(), g).value, 1e-9);
  }
}

TEST(DegreeLaw, CounterexampleCdf) {
  const auto law = degree_law(degree(kW));
  EXPECT_NEAR(law.cdf(0.1), 0.4, 2.0 / 65536);
  EXPECT_EQ(law.cdf(0.25), 1.0);
  EXPECT_NEAR(law.cdf(0.0001), 0.0004, 2.0 / 65536);
  double worst = 0.0;
  for (int k = 1; k <= 4096; ++k) {
    const double r = 0.25 * k / 4096;
    worst = std::max(worst, std::fabs(law.cdf(r) - 4 * r));
  }
  EXPECT_LE(worst, 2.0 / 65536);
}

TEST(DegreeLaw, ConstantStep) {
  const auto law = degree_law(degree(AnalyticGraphon::constant(0.3), 100));
  EXPECT_EQ(law.cdf(0.2999), 0.0);
  EXPECT_EQ(law.cdf(0.3), 1.0);
  EXPECT_EQ(law.cdf(0.9), 1.0);
}

TEST(Level, CounterexampleValues) {
  EXPECT_EQ(kW.level_at(0.3, 0.0), 0.5);
  EXPECT_EQ(kW.level_at(0.8, 0.0), 0.0);
  const auto p = level_functional(kW, 4096, 0.0);
  for (double v : p.values) ASSERT_TRUE(v == 0.0 || v == 0.5);
  const auto c = level_functional(AnalyticGraphon::constant(0.25), 100, 0.0);
  for (double v : c.values) EXPECT_EQ(v, 1.0);
  EXPECT_THROW(level_functional(kW, 16, -1.0), DomainError);
}

TEST(Level, GridHalfMeasureWithinBoundaryCells) {
  const std::size_t n = 1024;
  const auto g = discretize(kW, n);
  const auto p = level_functional(g, n, 1e-6);
  std::size_t near_half = 0;
  for (double v : p.values) near_half += std::fabs(v - 0.5) <= 4.0 / n ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(near_half) / n, 0.5, 4.0 / n);
}

TEST(JointLaw, CounterexampleSegments) {
  const auto law = joint_law(kW, 4096);
  double on_half = 0.0, on_zero = 0.0;
  for (const auto& a : law.atoms()) {
    ASSERT_GT(a.value.degree, 0.0);
    ASSERT_LT(a.value.degree, 0.25);
    (a.value.level == 0.5 ? on_half : on_zero) += a.weight;
    ASSERT_TRUE(a.value.level == 0.5 || a.value.level == 0.0);
  }
  EXPECT_DOUBLE_EQ(on_half, 0.5);
  EXPECT_DOUBLE_EQ(on_zero, 0.5);
  const auto c = joint_law(AnalyticGraphon::constant(0.3), 64);
  ASSERT_EQ(c.atoms().size(), 1u);
  EXPECT_EQ(c.atoms()[0].value, (Point2{0.3, 1.0}));
}

TEST(JointLaw, InvariantUnderSwapHalves) {
  const auto pulled = pullback(kW, MeasurePreservingMap::swap_halves());
  EXPECT_LE(ks_distance(joint_law(kW, 4096), joint_law(pulled, 4096)), 1e-12);
}

TEST(Conditional, CounterexampleBinsAreQuarter) {
  const auto s = degree_level_samples(kW, 65536, 0.0);
  const auto bin = conditional_mean(s, 0.05, 0.15);
  EXPECT_NEAR(bin.mean_h, 0.25, 1e-12);
  const auto report = conditional_h_given_degree(s, 64);
  EXPECT_EQ(report.bins.size(), 62u);
  for (const auto& b : report.bins) EXPECT_NEAR(b.mean_h, 0.25, 0.01);
  // ∫_{0.2}^{0.6} h₁ with h₁ ≡ ¼, equivalently the h-mass over {0.05 < D < 0.15}.
  EXPECT_NEAR(conditional_mass(s, 0.2 / 4, 0.6 / 4), 0.1, 4.0 / 65536);
}

TEST(Conditional, ConstantQuarterGivesOne) {
  const auto s = degree_level_samples(AnalyticGraphon::constant(0.25), 256, 0.0);
  const auto bin = conditional_mean(s, 0.2, 0.3);
  EXPECT_EQ(bin.mean_h, 1.0);
  EXPECT_THROW(conditional_h_given_degree(s, 0), DomainError);
}

TEST(HomDensity, ConstantKernels) {
  const auto g = GridGraphon::constant(7, 0.3);
  EXPECT_NEAR(hom_density(SmallGraph::edge(), g).value, 0.3, 1e-15);
  EXPECT_NEAR(hom_density(SmallGraph::triangle(), g).value, 0.027, 1e-15);
  EXPECT_NEAR(hom_density(SmallGraph::k4(), g).value, std::pow(0.3, 6), 1e-15);
}

TEST(HomDensity, CounterexampleEdgeDensity) {
  const auto g = discretize(kW, 1024);
  EXPECT_NEAR(hom_density(SmallGraph::edge(), g).value, 0.125, 3.0 / 1024);
}

TEST(HomDensity, AgreesWithPatternDensitiesAndMonteCarlo) {
  const auto g = discretize(kW, 32);
  const auto p = pattern_densities(g);
  EXPECT_NEAR(hom_density(SmallGraph::edge(), g).value, p.edge, 1e-14);
  EXPECT_NEAR(hom_density(SmallGraph::path2(), g).value, p.path2, 1e-14);
  EXPECT_NEAR(hom_density(SmallGraph::triangle(), g).value, p.triangle, 1e-14);
  EXPECT_NEAR(hom_density(SmallGraph::cycle4(), g).value, p.cycle4, 1e-14);
  HomOptions mc{HomMode::monte_carlo, 200000, 9};
  const auto est = hom_density(SmallGraph::triangle(), g, mc);
  EXPECT_EQ(est.seed, 9u);
  EXPECT_GT(est.std_error, 0.0);
  EXPECT_NEAR(est.value, p.triangle, 5 * est.std_error);
}

TEST(HomDensity, BlockPermutationInvariantExactly) {
  const auto g = discretize(kW, 48);
  std::vector<std::size_t> order(48);
  CounterRng rng(3);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto h = g.permuted(order);
  for (const auto& f : {SmallGraph::edge(), SmallGraph::path2(), SmallGraph::triangle(), SmallGraph::cycle4()})
    EXPECT_EQ(hom_density(f, g).value, hom_density(f, h).value) << f.name;
}

TEST(HomDensity, CapacityLimits) {
  const auto g = GridGraphon::constant(2048, 0.5);
  EXPECT_THROW(hom_density(SmallGraph::triangle(), g), CapacityError);
  SmallGraph big{"six", 6, {{0, 1}}};
  EXPECT_THROW(hom_density(big, GridGraphon::constant(2, 0.5)), CapacityError);
}

TEST(Distribution, AtomValidationAndMerging) {
  EXPECT_THROW(EmpiricalDistribution::from_atoms({{0.1, 0.5}, {0.2, 0.4}}), ValidationError);
  EXPECT_THROW(EmpiricalDistribution::from_atoms({{0.1, 1.5}, {0.2, -0.5}}), ValidationError);
  EXPECT_THROW(EmpiricalDistribution::from_samples({}), ValidationError);
  const auto law = EmpiricalDistribution::from_atoms({{0.3, 0.25}, {0.1, 0.5}, {0.3, 0.25}});
  ASSERT_EQ(law.atoms().size(), 2u);
  EXPECT_EQ(law.atoms()[1].weight, 0.5);
  EXPECT_EQ(law.cdf(0.1), 0.5);
  EXPECT_EQ(law.cdf_left(0.1), 0.0);
  EXPECT_EQ(law.cdf(1.0), 1.0);
}

TEST(Distribution, KsAgainstHandComputedValues) {
  const auto a = EmpiricalDistribution::from_samples({0.1, 0.2, 0.3, 0.4});
  const auto b = EmpiricalDistribution::from_samples({0.25, 0.35});
  // F_a − F_b peaks at r ∈ [0.2, 0.25): 0.5 − 0.
  EXPECT_DOUBLE_EQ(ks_distance(a, b).distance, 0.5);
  EXPECT_DOUBLE_EQ(ks_distance(a, a).distance, 0.0);
  // Against uniform(0,1): sup is attained just below or at an atom.
  const auto u = ExactLaw::uniform(0.0, 1.0);
  EXPECT_NEAR(ks_distance(a, u).distance, 0.6, 1e-15);
  const auto pm = ExactLaw({{0.2, 0.5}}, {{0.5, 1.0, 0.5}});
  EXPECT_NEAR(ks_distance(EmpiricalDistribution::from_atoms({{0.2, 0.5}, {0.75, 0.5}}), pm).distance, 0.25, 1e-15);
}

TEST(Distribution, JointKs) {
  using J = JointDistribution;
  const auto a = J::from_samples({{0.1, 0.0}, {0.2, 0.5}});
  const auto b = J::from_samples({{0.1, 0.5}, {0.2, 0.0}});
  EXPECT_DOUBLE_EQ(ks_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(ks_distance(a, b), 0.5);
}

TEST(Distribution, TotalVariation) {
  const auto h = EmpiricalDistribution::from_atoms({{0.0, 0.5}, {0.5, 0.5}});
  const auto q = EmpiricalDistribution::from_atoms({{0.25, 1.0}});
  EXPECT_EQ(tv_distance(h, q), 1.0);
  EXPECT_EQ(tv_distance(h, h), 0.0);
  const auto near = EmpiricalDistribution::from_atoms({{0.001, 0.5}, {0.5, 0.5}});
  EXPECT_EQ(tv_distance(h, near), 0.5);
  EXPECT_EQ(tv_distance(h, near, 0.01), 0.0);
  EXPECT_EQ(tv_distance(h, near, 0.0), 0.5);
  EXPECT_EQ(tv_distance(h, q, 0.01), 1.0);
}
