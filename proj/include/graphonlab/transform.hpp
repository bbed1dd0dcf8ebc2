#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "discretize.hpp"
#include "distribution.hpp"
#include "error.hpp"
#include "graphon.hpp"
#include "measure_map.hpp"
#include "rng.hpp"

namespace graphonlab {

namespace detail {

// Exact pull-back of a step graphon along one primitive, if the result stays
// within the grid size limit.
inline std::optional<GridGraphon> pull_grid(const GridGraphon& g, const MapOp& op) {
  if (const auto* ex = std::get_if<Exchange>(&op)) {
    const auto k = static_cast<std::size_t>(ex->k);
    const std::size_t size = std::lcm(g.n(), k);
    if (size > kMaxGridSize) return std::nullopt;
    const GridGraphon base = g.refined(size / g.n());
    const std::size_t width = size / k;
    // Cell a of block i moves to slot perm[i]: W^φ(a) = W(σ(a)).
    std::vector<std::size_t> sigma(size);
    for (std::size_t a = 0; a < size; ++a) {
      const std::size_t block = a / width;
      sigma[a] = a - block * width + static_cast<std::size_t>(ex->perm[block]) * width;
    }
    return base.permuted(sigma);
  }
  const auto m = static_cast<std::size_t>(std::get<Expand>(op).m);
  const std::size_t size = g.n() * m;
  if (size > kMaxGridSize) return std::nullopt;
  // x ↦ m·x mod 1 maps fine cell a onto coarse cell a mod n.
  std::vector<double> values(size * size);
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = 0; b < size; ++b) values[a * size + b] = g.at(a % g.n(), b % g.n());
  return GridGraphon(size, std::move(values));
}

}  // namespace detail

/// The graphon (x,y) ↦ W(φ(x), φ(y)).
///
/// Step graphons pulled back along exchanges and expansions are again step
/// graphons and are returned as exact grids while they fit in 4096 blocks.
/// Everything else becomes a lazy pull-back.
inline GraphonHandle pullback(const GraphonHandle& w, const MeasurePreservingMap& phi) {
  if (phi.is_identity()) return w;
  if (const auto* g = w.grid()) {
    std::optional<GridGraphon> cur = *g;
    // W^(f∘g) = (W^f)^g: pull back along the last op first.
    for (auto it = phi.ops().rbegin(); it != phi.ops().rend() && cur; ++it)
      cur = detail::pull_grid(*cur, *it);
    if (cur) return GraphonHandle(std::move(*cur));
  }
  return GraphonHandle::pulled_back(w, phi);
}

/// Nondecreasing function on [0,1], the right-continuous quantile of a law.
class QuantileFunction {
 public:
  explicit QuantileFunction(EmpiricalDistribution law) : law_(std::move(law)) {}
  explicit QuantileFunction(ExactLaw law) : exact_(std::move(law)) {}

  double operator()(double x) const {
    check_unit(x, "x");
    return law_ ? law_->quantile(x) : exact_->quantile(x);
  }

  /// Step values on [k/m, (k+1)/m): the sorted value sequence at resolution m.
  [[nodiscard]] std::vector<double> sampled(std::size_t m) const {
    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k)
      out[k] = (*this)(static_cast<double>(k) / static_cast<double>(m));
    return out;
  }

  /// sup over x ∈ [0,1) of |Q(x) − f(x)| for a continuous nondecreasing f,
  /// exact for empirical laws: each step of Q is compared with f at both ends.
  template <typename F>
  [[nodiscard]] KsResult sup_distance(F&& f) const {
    KsResult best;
    auto consider = [&best](double x, double q, double ref) {
      if (std::fabs(q - ref) > best.distance) best = {std::fabs(q - ref), x, q, ref};
    };
    if (!law_) {
      for (std::size_t k = 0; k <= 4096; ++k) {
        const double x = static_cast<double>(k) / 4096.0;
        consider(x, (*this)(x), f(x));
      }
      return best;
    }
    const auto& atoms = law_->atoms();
    const auto& cum = law_->cumulative();
    double start = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double end = std::min(1.0, cum[i]);
      if (end > start) {
        consider(start, atoms[i].value, f(start));
        consider(end, atoms[i].value, f(end));
      }
      start = end;
    }
    return best;
  }

  [[nodiscard]] bool is_empirical() const { return law_.has_value(); }

 private:
  std::optional<EmpiricalDistribution> law_;
  std::optional<ExactLaw> exact_;
};

/// The a.e.-unique nondecreasing function on [0,1] pushing the uniform law
/// onto the given law.
inline QuantileFunction monotone_rearrangement(const EmpiricalDistribution& law) {
  return QuantileFunction(law);
}

inline QuantileFunction monotone_rearrangement(const ExactLaw& law) { return QuantileFunction(law); }

struct DegreeSort {
  GridGraphon sorted;
  std::vector<std::size_t> order;  // sorted block a is original block order[a]
};

/// Relabels blocks by nondecreasing degree; ties keep their original order.
inline DegreeSort degree_sort(const GridGraphon& g) {
  std::vector<std::size_t> order(g.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& deg = g.row_means();
  std::stable_sort(order.begin(), order.end(),
                   [&deg](std::size_t a, std::size_t b) { return deg[a] < deg[b]; });
  return {g.permuted(order), std::move(order)};
}

/// Choices for random_map: primitive parameters are drawn uniformly from
/// these lists, composition length from [1, max_length].
struct RandomMapSpec {
  std::vector<int> exchange_blocks{2, 4, 8};
  std::vector<int> expand_factors{3, 5, 7};
  std::size_t max_length = 3;
  double expand_probability = 0.5;
};

inline Exchange random_exchange(int k, CounterRng& rng) {
  Exchange ex{k, std::vector<int>(static_cast<std::size_t>(k))};
  std::iota(ex.perm.begin(), ex.perm.end(), 0);
  for (std::size_t i = ex.perm.size(); i > 1; --i)
    std::swap(ex.perm[i - 1], ex.perm[static_cast<std::size_t>(rng.below(i))]);
  return ex;
}

/// Seeded random composition of exchanges and expanding maps.
inline MeasurePreservingMap random_map(CounterRng& rng, const RandomMapSpec& spec = {}) {
  std::vector<MapOp> ops;
  const auto len = 1 + static_cast<std::size_t>(rng.below(spec.max_length));
  for (std::size_t i = 0; i < len; ++i) {
    const bool expand = !spec.expand_factors.empty() &&
                        (spec.exchange_blocks.empty() || rng.uniform() < spec.expand_probability);
    if (expand) {
      ops.emplace_back(Expand{spec.expand_factors[rng.below(spec.expand_factors.size())]});
    } else {
      ops.emplace_back(random_exchange(spec.exchange_blocks[rng.below(spec.exchange_blocks.size())], rng));
    }
  }
  return MeasurePreservingMap(std::move(ops));
}

}  // namespace graphonlab
