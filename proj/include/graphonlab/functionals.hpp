#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "distribution.hpp"
#include "error.hpp"
#include "exact_sum.hpp"
#include "graphon.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace graphonlab {

/// Default sampling resolution for degree and level profiles.
inline constexpr std::size_t kDefaultResolution = std::size_t{1} << 16;

/// D_W sampled at the midpoints (k+½)/m of a uniform m-grid.
struct DegreeProfile {
  std::string source;
  std::size_t m = 0;
  std::vector<double> values;
  bool exact = false;  // closed form or exact block means, no quadrature

  [[nodiscard]] double x(std::size_t k) const {
    return (static_cast<double>(k) + 0.5) / static_cast<double>(m);
  }
  [[nodiscard]] double mean() const { return exact_sum(values) / static_cast<double>(m); }
};

/// h_W(x) = measure{y : dist(W(x,y), {0,½}) > eta} at the same midpoints.
struct LevelProfile {
  std::string source;
  std::size_t m = 0;
  double eta = 0.0;
  std::vector<double> values;

  [[nodiscard]] double x(std::size_t k) const {
    return (static_cast<double>(k) + 0.5) / static_cast<double>(m);
  }
};

namespace detail {

inline Rational midpoint(std::size_t k, std::size_t m) {
  return Rational(static_cast<std::int64_t>(2 * k + 1), static_cast<std::int64_t>(2 * m));
}

template <typename F>
std::vector<double> sample_midpoints(const GraphonHandle& w, std::size_t m, F&& f) {
  if (m == 0) throw DomainError("resolution m must be >= 1");
  std::vector<double> out(m);
  const bool lazy = w.pullback() != nullptr;
  parallel_for(m, [&](std::size_t k) {
    if (lazy)
      out[k] = f(midpoint(k, m));
    else
      out[k] = f((static_cast<double>(k) + 0.5) / static_cast<double>(m));
  });
  return out;
}

}  // namespace detail

inline DegreeProfile degree(const GraphonHandle& w, std::size_t m = kDefaultResolution) {
  DegreeProfile p;
  p.source = w.describe();
  p.m = m;
  p.values = detail::sample_midpoints(w, m, [&w](auto x) { return w.degree_at(x); });
  p.exact = w.pullback() == nullptr;
  return p;
}

inline EmpiricalDistribution degree_law(const DegreeProfile& p) {
  return EmpiricalDistribution::from_samples(p.values);
}

inline LevelProfile level_functional(const GraphonHandle& w, std::size_t m, double eta) {
  if (!(eta >= 0.0)) throw DomainError("level tolerance eta must be >= 0");
  LevelProfile p;
  p.source = w.describe();
  p.m = m;
  p.eta = eta;
  p.values = detail::sample_midpoints(w, m, [&w, eta](auto x) { return w.level_at(x, eta); });
  return p;
}

inline LevelProfile level_functional(const GraphonHandle& w, std::size_t m = kDefaultResolution) {
  return level_functional(w, m, w.default_eta());
}

inline EmpiricalDistribution level_law(const LevelProfile& p) {
  return EmpiricalDistribution::from_samples(p.values);
}

/// Paired (D(x_k), h(x_k)) samples; the raw material of the joint law.
struct DegreeLevelSamples {
  DegreeProfile degree;
  LevelProfile level;

  [[nodiscard]] std::size_t size() const { return degree.m; }
};

inline DegreeLevelSamples degree_level_samples(const GraphonHandle& w, std::size_t m, double eta) {
  return {degree(w, m), level_functional(w, m, eta)};
}

inline DegreeLevelSamples degree_level_samples(const GraphonHandle& w,
                                               std::size_t m = kDefaultResolution) {
  return degree_level_samples(w, m, w.default_eta());
}

inline JointDistribution joint_law(const DegreeLevelSamples& s) {
  std::vector<Point2> pts(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) pts[k] = {s.degree.values[k], s.level.values[k]};
  return JointDistribution::from_samples(std::move(pts));
}

/// Pushforward of the uniform law under x ↦ (D(x), h(x)).
inline JointDistribution joint_law(const GraphonHandle& w, std::size_t m = kDefaultResolution) {
  return joint_law(degree_level_samples(w, m));
}

/// ∫ h·1{lo < D < hi} over the sample (each point carries mass 1/m).
inline double conditional_mass(const DegreeLevelSamples& s, double lo, double hi) {
  ExactSum acc;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double d = s.degree.values[k];
    if (d > lo && d < hi) acc.add(s.level.values[k]);
  }
  return acc.value() / static_cast<double>(s.size());
}

/// Mean of h over sample points with lo < D < hi.
struct ConditionalBin {
  double lo = 0.0, hi = 0.0;
  double mass = 0.0;    // fraction of sample points in the bin
  double mean_h = 0.0;  // undefined when empty
  bool empty = true;
};

inline ConditionalBin conditional_mean(const DegreeLevelSamples& s, double lo, double hi) {
  ExactSum acc;
  std::size_t count = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double d = s.degree.values[k];
    if (d > lo && d < hi) {
      acc.add(s.level.values[k]);
      ++count;
    }
  }
  ConditionalBin b{lo, hi, static_cast<double>(count) / static_cast<double>(s.size()), 0.0, count == 0};
  if (count > 0) b.mean_h = acc.value() / static_cast<double>(count);
  return b;
}

struct ConditionalReport {
  std::vector<ConditionalBin> bins;  // non-empty interior bins
  std::vector<ConditionalBin> empty_bins;
};

/// E[h | D in bin] over equal-width bins of [min D, max D]. Bins are
/// half-open [lo,hi) except the last; the first and last bin are dropped.
inline ConditionalReport conditional_h_given_degree(const DegreeLevelSamples& s, std::size_t bins) {
  if (bins == 0) throw DomainError("bins must be >= 1");
  const auto [mn, mx] = std::minmax_element(s.degree.values.begin(), s.degree.values.end());
  const double lo = *mn, hi = *mx;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<ExactSum> sums(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((s.degree.values[k] - lo) / width) : 0;
    b = std::min(b, bins - 1);
    sums[b].add(s.level.values[k]);
    ++counts[b];
  }
  ConditionalReport r;
  for (std::size_t b = 1; b + 1 < bins; ++b) {
    ConditionalBin cb;
    cb.lo = lo + width * static_cast<double>(b);
    cb.hi = lo + width * static_cast<double>(b + 1);
    cb.mass = static_cast<double>(counts[b]) / static_cast<double>(s.size());
    cb.empty = counts[b] == 0;
    if (cb.empty) {
      r.empty_bins.push_back(cb);
    } else {
      cb.mean_h = sums[b].value() / static_cast<double>(counts[b]);
      r.bins.push_back(cb);
    }
  }
  return r;
}

inline ConditionalReport conditional_h_given_degree(const GraphonHandle& w, std::size_t bins,
                                                    std::size_t m = kDefaultResolution) {
  return conditional_h_given_degree(degree_level_samples(w, m), bins);
}

// ---------------------------------------------------------------------------
// Homomorphism densities

/// Simple graph on at most five vertices.
struct SmallGraph {
  std::string name;
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;

  static SmallGraph edge() { return {"edge", 2, {{0, 1}}}; }
  static SmallGraph path2() { return {"path2", 3, {{0, 1}, {1, 2}}}; }
  static SmallGraph triangle() { return {"triangle", 3, {{0, 1}, {1, 2}, {0, 2}}}; }
  static SmallGraph cycle4() { return {"cycle4", 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}}; }
  static SmallGraph path3() { return {"path3", 4, {{0, 1}, {1, 2}, {2, 3}}}; }
  static SmallGraph star3() { return {"star3", 4, {{0, 1}, {0, 2}, {0, 3}}}; }
  static SmallGraph k4() { return {"k4", 4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}}; }

  [[nodiscard]] std::size_t edge_count() const { return edges.size(); }

  void validate(int max_vertices) const {
    if (vertices < 1 || vertices > max_vertices)
      throw CapacityError("pattern graph " + name + " exceeds " + std::to_string(max_vertices) +
                          " vertices");
    for (const auto& [u, v] : edges)
      if (u < 0 || v < 0 || u >= vertices || v >= vertices || u == v)
        throw ValidationError("pattern graph " + name + " has an invalid edge");
  }
};

enum class HomMode { exact, monte_carlo };

struct HomOptions {
  HomMode mode = HomMode::exact;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 20240001;
};

struct HomDensity {
  double value = 0.0;
  double std_error = 0.0;  // zero in exact mode
  HomMode mode = HomMode::exact;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

inline constexpr double kExactHomBudget = 1e9;
inline constexpr std::size_t kMaxHomGrid = 4096;

/// t(F, G) for a step graphon. Exact mode sums every block assignment with a
/// correctly rounded accumulator, so the result is invariant under block
/// permutations bit for bit.
inline HomDensity hom_density(const SmallGraph& f, const GridGraphon& g, const HomOptions& opt = {}) {
  f.validate(5);
  const std::size_t n = g.n();
  if (n > kMaxHomGrid) throw CapacityError("hom density supports grids up to 4096 blocks");
  const int v = f.vertices;
  // Edges sorted by their later endpoint: vertex k closes edges back to < k.
  std::vector<std::vector<int>> back(static_cast<std::size_t>(v));
  for (auto [a, b] : f.edges) {
    if (a > b) std::swap(a, b);
    back[static_cast<std::size_t>(b)].push_back(a);
  }

  if (opt.mode == HomMode::monte_carlo) {
    CounterRng rng(opt.seed);
    ExactSum sum, sq;
    std::vector<std::size_t> assign(static_cast<std::size_t>(v));
    for (std::uint64_t s = 0; s < opt.samples; ++s) {
      for (auto& a : assign) a = static_cast<std::size_t>(rng.below(n));
      double term = 1.0;
      for (int k = 0; k < v; ++k)
        for (int u : back[static_cast<std::size_t>(k)])
          term *= g.at(assign[static_cast<std::size_t>(u)], assign[static_cast<std::size_t>(k)]);
      sum.add(term);
      sq.add(term * term);
    }
    const double N = static_cast<double>(opt.samples);
    const double mean = sum.value() / N;
    const double var = std::max(0.0, sq.value() / N - mean * mean);
    return {mean, std::sqrt(var / std::max(1.0, N - 1.0)), HomMode::monte_carlo, opt.samples, opt.seed};
  }

  if (std::pow(static_cast<double>(n), v) > kExactHomBudget)
    throw CapacityError("exact hom density needs n^|V(F)| <= 1e9 (n=" + std::to_string(n) +
                        ", |V(F)|=" + std::to_string(v) + "); use Monte Carlo mode");

  // Depth-first over assignments; partial products carried per level.
  std::vector<ExactSum> partial(n);
  parallel_for(n, [&](std::size_t first) {
    std::vector<std::size_t> assign(static_cast<std::size_t>(v), 0);
    std::vector<double> prefix(static_cast<std::size_t>(v) + 1, 1.0);
    assign[0] = first;
    prefix[1] = 1.0;
    ExactSum& acc = partial[first];
    if (v == 1) {
      acc.add(1.0);
      return;
    }
    int k = 1;
    assign[1] = 0;
    while (k >= 1) {
      const auto ku = static_cast<std::size_t>(k);
      if (assign[ku] == n) {
        --k;
        if (k >= 1) ++assign[static_cast<std::size_t>(k)];
        continue;
      }
      double term = prefix[ku];
      for (int u : back[ku]) term *= g.at(assign[static_cast<std::size_t>(u)], assign[ku]);
      if (k == v - 1) {
        acc.add(term);
        ++assign[ku];
      } else {
        prefix[ku + 1] = term;
        ++k;
        assign[static_cast<std::size_t>(k)] = 0;
      }
    }
  });
  ExactSum total;
  for (const auto& p : partial) total.merge(p);
  const double scale = std::pow(static_cast<double>(n), v);
  return {total.value() / scale, 0.0, HomMode::exact, 0, 0};
}

/// Densities of the four patterns used by the counting-lemma bound, computed
/// through row sums and A² instead of vertex enumeration.
struct PatternDensities {
  double edge = 0.0, path2 = 0.0, triangle = 0.0, cycle4 = 0.0;
};

inline PatternDensities pattern_densities(const GridGraphon& g) {
  const std::size_t n = g.n();
  const double nd = static_cast<double>(n);
  std::vector<double> sq(n * n, 0.0);  // A²
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      ExactSum acc;
      for (std::size_t k = 0; k < n; ++k) acc.add(g.at(i, k) * g.at(k, j));
      sq[i * n + j] = acc.value();
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) sq[i * n + j] = sq[j * n + i];
  ExactSum e, p, t, c;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = g.row_mean(i) * nd;
    p.add(d * d);
    for (std::size_t j = 0; j < n; ++j) {
      e.add(g.at(i, j));
      t.add(g.at(i, j) * sq[i * n + j]);
      c.add(sq[i * n + j] * sq[i * n + j]);
    }
  }
  return {e.value() / (nd * nd), p.value() / (nd * nd * nd), t.value() / (nd * nd * nd),
          c.value() / (nd * nd * nd * nd)};
}

}  // namespace graphonlab
