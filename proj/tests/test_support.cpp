#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "graphonlab.hpp"

using namespace graphonlab;

TEST(ExactSum, CancelsCatastrophically) {
  const std::vector<double> xs{1e100, 1.0, -1e100};
  EXPECT_EQ(exact_sum(xs), 1.0);
}

TEST(ExactSum, TenthsSumToOne) {
  const std::vector<double> xs(10, 0.1);
  EXPECT_EQ(exact_sum(xs), 1.0);  // correctly rounded, unlike naive summation
}

TEST(ExactSum, MatchesIntegerOracleOnDyadics) {
  CounterRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs;
    __int128 exact = 0;
    for (int i = 0; i < 500; ++i) {
      const auto k = static_cast<std::int64_t>(rng.below(1ULL << 40)) - (std::int64_t{1} << 39);
      exact += k;
      xs.push_back(std::ldexp(static_cast<double>(k), -30));
    }
    const double oracle = std::ldexp(static_cast<double>(exact), -30);
    EXPECT_EQ(exact_sum(xs), oracle);
  }
}

TEST(ExactSum, OrderIndependentAndMergeable) {
  CounterRng rng(11);
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back((rng.uniform() - 0.5) * std::ldexp(1.0, static_cast<int>(rng.below(80)) - 40));
  const double forward = exact_sum(xs);
  std::reverse(xs.begin(), xs.end());
  EXPECT_EQ(exact_sum(xs), forward);
  ExactSum a, b;
  for (std::size_t i = 0; i < xs.size(); ++i) (i % 3 == 0 ? a : b).add(xs[i]);
  a.merge(b);
  EXPECT_EQ(a.value(), forward);
}

TEST(Rational, ArithmeticAndNormalization) {
  const Rational a(2, 4), b(-3, 9);
  EXPECT_EQ(a.num(), 1);
  EXPECT_EQ(a.den(), 2);
  EXPECT_EQ(b.num(), -1);
  EXPECT_EQ(b.den(), 3);
  EXPECT_EQ(a + b, Rational(1, 6));
  EXPECT_EQ(a - b, Rational(5, 6));
  EXPECT_EQ(a * b, Rational(-1, 6));
  EXPECT_EQ(a / b, Rational(-3, 2));
  EXPECT_LT(b, a);
  EXPECT_EQ(Rational(7, 2).floor(), 3);
  EXPECT_EQ(Rational(-7, 2).floor(), -4);
  EXPECT_DOUBLE_EQ(Rational(1, 3).to_double(), 1.0 / 3.0);
}

TEST(Rational, Errors) {
  EXPECT_THROW(Rational(1, 2) / Rational(0), DomainError);
  EXPECT_THROW(Rational(1, 0), DomainError);
  const Rational big(std::int64_t{1} << 62, 1);
  EXPECT_THROW(big * big, CapacityError);
}

TEST(CounterRng, DeterministicAndCounterAddressable) {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto v = a.next();
    EXPECT_EQ(v, b.at(i));
    EXPECT_NE(v, c.at(i));
  }
}

TEST(CounterRng, UniformAndBelowRanges) {
  CounterRng rng(5);
  std::vector<int> counts(10, 0);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u;
    ++counts[rng.below(10)];
  }
  EXPECT_NEAR(mean / 100000.0, 0.5, 0.005);
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Parallel, CoversEveryIndexOnceForAnyThreadCount) {
  for (const char* threads : {"1", "3", "8"}) {
    ::setenv("GRAPHONLAB_THREADS", threads, 1);
    EXPECT_EQ(thread_count(), static_cast<unsigned>(std::atoi(threads)));
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
    EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  ::unsetenv("GRAPHONLAB_THREADS");
  EXPECT_GE(thread_count(), 1u);
}
