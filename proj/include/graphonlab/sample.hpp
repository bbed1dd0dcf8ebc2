#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "error.hpp"
#include "exact_sum.hpp"
#include "functionals.hpp"
#include "graphon.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace graphonlab {

/// W-random graph: sorted latent positions and a symmetric adjacency bit
/// matrix with zero diagonal.
class SampledGraph {
 public:
  SampledGraph(std::size_t n, std::vector<double> positions, std::uint64_t seed)
      : n_(n), words_((n + 63) / 64), positions_(std::move(positions)), bits_(n * words_, 0), seed_(seed) {}

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] const std::vector<double>& positions() const { return positions_; }

  [[nodiscard]] bool has_edge(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U;
  }

  [[nodiscard]] std::size_t degree(std::size_t i) const {
    std::size_t d = 0;
    for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(std::popcount(bits_[i * words_ + w]));
    return d;
  }

  [[nodiscard]] std::size_t edge_count() const {
    std::size_t total = 0;
    for (std::size_t i = 0; i < n_; ++i) total += degree(i);
    return total / 2;
  }

  [[nodiscard]] const std::uint64_t* row_bits(std::size_t i) const { return bits_.data() + i * words_; }
  [[nodiscard]] std::size_t words() const { return words_; }

  /// Edges as (i, j) pairs with i < j, 0-based, lexicographic.
  [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
  }

  void set_edge(std::size_t i, std::size_t j) {
    bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
    bits_[j * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<double> positions_;
  std::vector<std::uint64_t> bits_;
  std::uint64_t seed_;
};

/// G(n, W): positions i.i.d. uniform (stream 0), then sorted; the pair
/// (i, j), i < j, is an edge when the draw of row stream i+1 at counter j
/// falls below W(x_i, x_j).
inline SampledGraph sample_graph(const GraphonHandle& w, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("sample_graph needs n >= 1");
  std::vector<double> pos(n);
  const CounterRng positions(seed, 0);
  for (std::size_t i = 0; i < n; ++i) pos[i] = positions.uniform_at(i);
  std::sort(pos.begin(), pos.end());
  SampledGraph g(n, pos, seed);
  std::vector<std::vector<std::size_t>> hits(n);
  parallel_for(n, [&](std::size_t i) {
    const CounterRng row(seed, i + 1);
    for (std::size_t j = i + 1; j < n; ++j)
      if (row.uniform_at(j) < w.value(pos[i], pos[j])) hits[i].push_back(j);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : hits[i]) g.set_edge(i, j);
  return g;
}

/// Normalized degrees deg(i)/(n−1).
inline std::vector<double> normalized_degrees(const SampledGraph& g) {
  std::vector<double> out(g.n());
  const double denom = g.n() > 1 ? static_cast<double>(g.n() - 1) : 1.0;
  for (std::size_t i = 0; i < g.n(); ++i) out[i] = static_cast<double>(g.degree(i)) / denom;
  return out;
}

inline constexpr std::size_t kMaxExactCountVertices = 3000;

struct EmpiricalHomOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 20240001;
};

/// Injective homomorphism density of F (≤ 4 vertices) in a sampled graph.
/// Exact count for n ≤ 3000 by backtracking over bitset candidate sets;
/// above that, seeded sampling of injective tuples.
inline HomDensity empirical_hom_density(const SmallGraph& f, const SampledGraph& g,
                                        const EmpiricalHomOptions& opt = {}) {
  f.validate(4);
  const std::size_t n = g.n();
  const auto v = static_cast<std::size_t>(f.vertices);
  if (n < v) return {0.0, 0.0, HomMode::exact, 0, 0};
  std::vector<std::vector<int>> back(v);
  for (auto [a, b] : f.edges) {
    if (a > b) std::swap(a, b);
    back[static_cast<std::size_t>(b)].push_back(a);
  }
  double falling = 1.0;
  for (std::size_t k = 0; k < v; ++k) falling *= static_cast<double>(n - k);

  if (n > kMaxExactCountVertices) {
    CounterRng rng(opt.seed);
    std::uint64_t hits = 0;
    std::vector<std::size_t> t(v);
    for (std::uint64_t s = 0; s < opt.samples; ++s) {
      for (std::size_t k = 0; k < v; ++k) {
        bool fresh;
        do {
          t[k] = static_cast<std::size_t>(rng.below(n));
          fresh = std::find(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k), t[k]) ==
                  t.begin() + static_cast<std::ptrdiff_t>(k);
        } while (!fresh);
      }
      bool ok = true;
      for (std::size_t k = 0; k < v && ok; ++k)
        for (int u : back[k]) ok = ok && g.has_edge(t[static_cast<std::size_t>(u)], t[k]);
      hits += ok ? 1 : 0;
    }
    const double N = static_cast<double>(opt.samples);
    const double p = static_cast<double>(hits) / N;
    return {p, std::sqrt(p * (1.0 - p) / N), HomMode::monte_carlo, opt.samples, opt.seed};
  }

  const std::size_t words = g.words();
  std::vector<std::uint64_t> partial(n, 0);
  parallel_for(n, [&](std::size_t first) {
    std::vector<std::size_t> t(v);
    std::vector<std::uint64_t> cand(words);
    std::uint64_t count = 0;
    t[0] = first;
    // Recursive lambda over depth.
    auto rec = [&](auto&& self, std::size_t k) -> void {
      std::fill(cand.begin(), cand.end(), ~std::uint64_t{0});
      if (n % 64 != 0) cand[words - 1] = (std::uint64_t{1} << (n % 64)) - 1;
      for (int u : back[k]) {
        const auto* row = g.row_bits(t[static_cast<std::size_t>(u)]);
        for (std::size_t w = 0; w < words; ++w) cand[w] &= row[w];
      }
      for (std::size_t j = 0; j < k; ++j) cand[t[j] / 64] &= ~(std::uint64_t{1} << (t[j] % 64));
      if (k + 1 == v) {
        for (std::size_t w = 0; w < words; ++w) count += static_cast<std::uint64_t>(std::popcount(cand[w]));
        return;
      }
      const std::vector<std::uint64_t> mine = cand;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bitsw = mine[w];
        while (bitsw) {
          const auto b = static_cast<std::size_t>(std::countr_zero(bitsw));
          bitsw &= bitsw - 1;
          t[k] = w * 64 + b;
          self(self, k + 1);
        }
      }
    };
    if (v == 1)
      count = 1;
    else
      rec(rec, 1);
    partial[first] = count;
  });
  std::uint64_t total = 0;
  for (auto c : partial) total += c;
  return {static_cast<double>(total) / falling, 0.0, HomMode::exact, 0, 0};
}

}  // namespace graphonlab
