#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "graphonlab.hpp"

using namespace graphonlab;

namespace {

const GraphonHandle kW = AnalyticGraphon::counterexample();

std::vector<double> histogram(const MeasurePreservingMap& phi, std::size_t points, std::size_t bins) {
  std::vector<double> mass(bins, 0.0);
  for (std::size_t i = 0; i < points; ++i) {
    const double y = phi.apply((static_cast<double>(i) + 0.5) / static_cast<double>(points));
    mass[std::min(bins - 1, static_cast<std::size_t>(y * static_cast<double>(bins)))] += 1.0;
  }
  for (auto& m : mass) m /= static_cast<double>(points);
  return mass;
}

}  // namespace

TEST(Map, PrimitiveValues) {
  const MeasurePreservingMap swap = MeasurePreservingMap::swap_halves();
  EXPECT_DOUBLE_EQ(swap.apply(0.1), 0.6);
  EXPECT_DOUBLE_EQ(swap.apply(0.7), 0.2);
  const MeasurePreservingMap ex({Exchange{4, {2, 0, 3, 1}}});  // 1-based [3,1,4,2]
  EXPECT_DOUBLE_EQ(ex.apply(0.1), 0.6);
  EXPECT_DOUBLE_EQ(ex.apply(0.3), 0.05);
  EXPECT_DOUBLE_EQ(ex.apply(0.6), 0.85);
  EXPECT_DOUBLE_EQ(ex.apply(0.9), 0.4);
  const MeasurePreservingMap expand({Expand{3}});
  EXPECT_DOUBLE_EQ(expand.apply(0.5), 0.5);
  EXPECT_EQ(expand.apply(Rational(5, 6)), Rational(1, 2));
  EXPECT_EQ(expand.apply(Rational(1)), Rational(0));
}

TEST(Map, CompositionAppliesInListOrder) {
  const MeasurePreservingMap phi({Expand{2}, Exchange{2, {1, 0}}});
  EXPECT_EQ(phi.apply(Rational(1, 8)), Rational(3, 4));  // 1/8 → 1/4 → 3/4
  const auto both = MeasurePreservingMap({Expand{2}}).then(MeasurePreservingMap::swap_halves());
  EXPECT_EQ(both.apply(Rational(1, 8)), Rational(3, 4));
}

TEST(Map, ValidationAndDomain) {
  EXPECT_THROW(MeasurePreservingMap({Exchange{3, {0, 0, 1}}}), ValidationError);
  EXPECT_THROW(MeasurePreservingMap({Exchange{3, {0, 1}}}), ValidationError);
  EXPECT_THROW(MeasurePreservingMap({Expand{1}}), ValidationError);
  EXPECT_THROW(static_cast<void>(MeasurePreservingMap::swap_halves().apply(1.5)), DomainError);
}

TEST(Map, ExchangeHistogramExact) {
  CounterRng rng(4);
  for (int k : {2, 4, 8, 16, 1024}) {
    const MeasurePreservingMap phi({random_exchange(k, rng)});
    const auto h = histogram(phi, 1 << 20, 1024);
    for (double m : h) ASSERT_EQ(m, 1.0 / 1024) << "k=" << k;
  }
}

TEST(Map, RandomCompositionsPreserveMeasure) {
  CounterRng rng(5);
  RandomMapSpec spec;
  spec.exchange_blocks = {2, 3, 4, 7, 8};
  spec.expand_factors = {2, 3, 5};
  spec.max_length = 5;
  for (int trial = 0; trial < 12; ++trial) {
    const auto phi = random_map(rng, spec);
    EXPECT_TRUE(phi.preserves_measure());
    const auto h = histogram(phi, 1'000'000, 1024);
    for (double m : h) ASSERT_NEAR(m, 1.0 / 1024, 3e-4) << "trial " << trial;
  }
}

TEST(Map, PiecesReproduceApply) {
  const MeasurePreservingMap phi({Exchange{4, {2, 0, 3, 1}}, Expand{3}, Exchange{2, {1, 0}}});
  for (const auto& p : phi.pieces()) {
    const Rational mid = (p.lo + p.hi) / Rational(2);
    EXPECT_EQ(phi.apply(mid), p.slope * mid + p.offset);
  }
  const auto d = phi.pushforward_density();
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].density, Rational(1));
}

TEST(Pullback, IdentityReturnsSameGraphon) {
  const auto g = discretize(kW, 16);
  const auto same = pullback(GraphonHandle(g), MeasurePreservingMap::identity());
  ASSERT_NE(same.grid(), nullptr);
  EXPECT_EQ(*same.grid(), g);
  const auto a = pullback(kW, MeasurePreservingMap::identity());
  EXPECT_EQ(a(0.3, 0.2), kW(0.3, 0.2));
}

TEST(Pullback, SwapHalvesEvaluation) {
  const auto p = pullback(kW, MeasurePreservingMap::swap_halves());
  EXPECT_EQ(p(0.1, 0.2), 0.0);  // W(0.6, 0.7)
  EXPECT_DOUBLE_EQ(p(0.6, 0.7), kW(0.1, 0.2));
  EXPECT_DOUBLE_EQ(p(0.45, 0.4), kW(0.95, 0.9));
}

TEST(Pullback, GridExchangeIsBlockPermutation) {
  const auto g = discretize(kW, 8);
  const auto p = pullback(GraphonHandle(g), MeasurePreservingMap::swap_halves());
  ASSERT_NE(p.grid(), nullptr);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(p.grid()->at(i, j), g.at((i + 4) % 8, (j + 4) % 8));
}

TEST(Pullback, GridExpandTilesBlocks) {
  const auto g = discretize(kW, 4);
  const auto p = pullback(GraphonHandle(g), MeasurePreservingMap({Expand{3}}));
  ASSERT_NE(p.grid(), nullptr);
  EXPECT_EQ(p.grid()->n(), 12u);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) EXPECT_EQ(p.grid()->at(i, j), g.at(i % 4, j % 4));
}

TEST(Pullback, EdgeDensityInvariantForRandomExchanges) {
  const auto g = discretize(kW, 64);
  const double base = hom_density(SmallGraph::edge(), g).value;
  CounterRng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = std::array<int, 4>{2, 4, 8, 16}[rng.below(4)];
    const auto p = pullback(GraphonHandle(g), MeasurePreservingMap({random_exchange(k, rng)}));
    ASSERT_NE(p.grid(), nullptr);
    EXPECT_EQ(hom_density(SmallGraph::edge(), *p.grid()).value, base);
  }
}

TEST(Pullback, DegreeLawInvariance) {
  const std::size_t m = 1 << 14;
  const auto base = degree_law(degree(kW, m));
  CounterRng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto phi = random_map(rng);
    EXPECT_EQ(ks_distance(base, degree_law(degree(pullback(kW, phi), m))).distance, 0.0);
  }
  const MeasurePreservingMap even({Expand{2}, Exchange{4, {1, 2, 3, 0}}});
  EXPECT_LE(ks_distance(degree_law(degree(kW, 100000)), degree_law(degree(pullback(kW, even), 100000))).distance,
            0.02);
}

TEST(Pullback, GridDegreesMatchBase) {
  const auto g = discretize(kW, 64);
  const auto p = pullback(GraphonHandle(g), MeasurePreservingMap({Exchange{4, {3, 1, 0, 2}}}));
  EXPECT_EQ(ks_distance(degree_law(degree(g, 64)), degree_law(degree(p, 64))).distance, 0.0);
}

TEST(Rearrangement, UniformQuarterIsXOverFour) {
  const auto q = monotone_rearrangement(ExactLaw::uniform(0.0, 0.25));
  for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) EXPECT_NEAR(q(x), x / 4, 1e-12);
  const auto id = monotone_rearrangement(ExactLaw::uniform(0.0, 1.0));
  EXPECT_NEAR(id(0.37), 0.37, 1e-12);
}

TEST(Rearrangement, TwoAtomQuantile) {
  const auto law = EmpiricalDistribution::from_atoms({{0.3, 0.5}, {0.1, 0.5}});
  const auto q = monotone_rearrangement(law);
  EXPECT_EQ(q(0.0), 0.1);
  EXPECT_EQ(q(0.49), 0.1);
  EXPECT_EQ(q(0.5), 0.3);
  EXPECT_EQ(q(1.0), 0.3);
}

TEST(Rearrangement, EmpiricalDegreeLawGivesXOverFour) {
  const std::size_t m = 65536;
  const auto q = monotone_rearrangement(degree_law(degree(kW, m)));
  const auto gap = q.sup_distance([](double x) { return x / 4; });
  EXPECT_LE(gap.distance, 2.0 / m);
  const auto steps = q.sampled(1024);
  EXPECT_TRUE(std::is_sorted(steps.begin(), steps.end()));
  // Pushes uniform to the input law.
  const auto pushed = EmpiricalDistribution::from_samples(q.sampled(m));
  EXPECT_LE(ks_distance(pushed, ExactLaw::uniform(0.0, 0.25)).distance, 1.0 / m + 1e-15);
}

TEST(DegreeSort, SmallExample) {
  // Block degrees 0.3, 0.1, 0.2.
  const GridGraphon g(3, {0.3, 0.3, 0.3, 0.3, 0.0, 0.0, 0.3, 0.0, 0.3});
  ASSERT_DOUBLE_EQ(g.row_mean(0), 0.3);
  ASSERT_DOUBLE_EQ(g.row_mean(1), 0.1);
  ASSERT_DOUBLE_EQ(g.row_mean(2), 0.2);
  const auto s = degree_sort(g);
  EXPECT_EQ(s.order, (std::vector<std::size_t>{1, 2, 0}));  // (2,3,1) 1-based
  EXPECT_DOUBLE_EQ(s.sorted.row_mean(0), 0.1);
  EXPECT_DOUBLE_EQ(s.sorted.row_mean(1), 0.2);
  EXPECT_DOUBLE_EQ(s.sorted.row_mean(2), 0.3);
}

TEST(DegreeSort, SortedGridUnchangedAndStable) {
  const auto g = discretize(AnalyticGraphon::product(), 32);
  const auto s = degree_sort(g);
  std::vector<std::size_t> id(32);
  std::iota(id.begin(), id.end(), std::size_t{0});
  EXPECT_EQ(s.order, id);
  const auto c = degree_sort(GridGraphon::constant(5, 0.4));
  EXPECT_EQ(c.order, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(DegreeSort, PreservesValuesAndTriangleDensity) {
  const auto g = discretize(kW, 256);
  const auto s = degree_sort(g);
  EXPECT_TRUE(std::is_sorted(s.sorted.row_means().begin(), s.sorted.row_means().end()));
  auto a = g.values(), b = s.sorted.values();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  EXPECT_EQ(pattern_densities(g).triangle, pattern_densities(s.sorted).triangle);
  const auto small = discretize(kW, 40);
  EXPECT_EQ(hom_density(SmallGraph::triangle(), small).value,
            hom_density(SmallGraph::triangle(), degree_sort(small).sorted).value);
}
