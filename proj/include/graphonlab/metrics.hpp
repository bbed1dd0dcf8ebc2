#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "error.hpp"
#include "exact_sum.hpp"
#include "functionals.hpp"
#include "graphon.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "transform.hpp"

namespace graphonlab {

/// Symmetric step kernel with entries in [−1,1]; differences of graphons.
class StepKernel {
 public:
  StepKernel(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    if (n_ == 0) throw DomainError("kernel needs at least one block");
    if (values_.size() != n_ * n_) throw ValidationError("kernel value count differs from n*n");
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = at(i, j);
        if (!(v >= -1.0 && v <= 1.0)) {
          std::ostringstream os;
          os << "kernel entry [" << i << "][" << j << "]=" << v << " outside [-1,1]";
          throw ValidationError(os.str());
        }
        if (v != at(j, i)) throw ValidationError("kernel is not symmetric");
      }
  }

  /// A − B on a common block count.
  static StepKernel difference(const GridGraphon& a, const GridGraphon& b) {
    if (a.n() != b.n()) throw DomainError("kernel difference needs equal block counts");
    std::vector<double> v(a.values().size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.values()[k] - b.values()[k];
    return StepKernel(a.n(), std::move(v));
  }

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// L¹

inline constexpr std::size_t kMaxCommonIntervals = 8192;

/// ∫∫|A − B| over [0,1]², computed on the common refinement of both grids.
inline double l1_distance(const GridGraphon& a, const GridGraphon& b) {
  const std::size_t na = a.n(), nb = b.n();
  const std::size_t common = std::lcm(na, nb);
  // Merge breakpoints i/na and j/nb in units of 1/common.
  struct Interval {
    std::size_t ia, ib;
    double len;
  };
  std::vector<Interval> cells;
  std::size_t ia = 0, ib = 0, pos = 0;
  const std::size_t sa = common / na, sb = common / nb;
  while (pos < common) {
    const std::size_t next = std::min((ia + 1) * sa, (ib + 1) * sb);
    cells.push_back({ia, ib, static_cast<double>(next - pos) / static_cast<double>(common)});
    if (cells.size() > kMaxCommonIntervals)
      throw CapacityError("grids too far apart to resample onto a common grid");
    pos = next;
    if (pos == (ia + 1) * sa) ++ia;
    if (pos == (ib + 1) * sb) ++ib;
  }
  std::vector<ExactSum> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t r) {
    const auto& I = cells[r];
    for (const auto& J : cells)
      rows[r].add(std::fabs(a.at(I.ia, J.ia) - b.at(I.ib, J.ib)) * (I.len * J.len));
  });
  ExactSum total;
  for (const auto& r : rows) total.merge(r);
  return total.value();
}

// ---------------------------------------------------------------------------
// Cut norm

enum class CutMethod { exhaustive, local_search };

inline std::string to_string(CutMethod m) {
  return m == CutMethod::exhaustive ? "exhaustive" : "local-search";
}

struct CutNormOptions {
  std::size_t restarts = 32;
  std::uint64_t seed = 20240001;
};

struct CutNormResult {
  double value = 0.0;
  std::vector<std::size_t> rows;     // S, sorted
  std::vector<std::size_t> columns;  // T, sorted
  CutMethod method = CutMethod::exhaustive;
  std::uint64_t iterations = 0;
};

inline constexpr std::size_t kMaxExhaustiveCut = 24;

/// |Σ_{i∈S, j∈T} K(i,j)| / n², correctly rounded.
inline double cut_value(const StepKernel& k, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) {
  ExactSum acc;
  for (std::size_t i : rows)
    for (std::size_t j : cols) acc.add(k.at(i, j));
  const double n = static_cast<double>(k.n());
  return std::fabs(acc.value()) / (n * n);
}

namespace detail {

inline std::vector<std::size_t> bits_to_set(std::uint64_t mask, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (mask >> i & 1U) out.push_back(i);
  return out;
}

// Best response: columns whose sum over S has the sign being maximized.
inline std::vector<std::size_t> best_columns(const std::vector<double>& colsum, double sign) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < colsum.size(); ++j)
    if (sign * colsum[j] > 0.0) out.push_back(j);
  return out;
}

struct CutCandidate {
  double score = -1.0;
  std::vector<std::size_t> rows, cols;
};

inline bool better(const CutCandidate& a, const CutCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.rows < b.rows;  // lexicographically smallest S wins ties
}

}  // namespace detail

/// Exhaustive: enumerate S in Gray-code order and pick T per column sign, 2ⁿ·n
/// work. Local search: alternate best responses S → T → S from seeded random
/// starts; a lower bound on the exhaustive value.
inline CutNormResult cut_norm(const StepKernel& k, CutMethod method, const CutNormOptions& opt = {}) {
  const std::size_t n = k.n();
  CutNormResult res;
  res.method = method;
  detail::CutCandidate best{0.0, {}, {}};

  if (method == CutMethod::exhaustive) {
    if (n > kMaxExhaustiveCut)
      throw CapacityError("exhaustive cut norm supports n <= 24 (n=" + std::to_string(n) + ")");
    // Split on the top bits; each chunk runs its own Gray code over the rest.
    const std::size_t high = n > 12 ? 4 : 0;
    const std::size_t low = n - high;
    const std::size_t chunks = std::size_t{1} << high;
    std::vector<detail::CutCandidate> found(chunks);
    parallel_for(chunks, [&](std::size_t c) {
      std::vector<double> colsum(n, 0.0);
      const std::uint64_t base = static_cast<std::uint64_t>(c) << low;
      for (std::size_t i = low; i < n; ++i)
        if (base >> i & 1U)
          for (std::size_t j = 0; j < n; ++j) colsum[j] += k.at(i, j);
      std::uint64_t gray = 0;
      detail::CutCandidate local{-1.0, {}, {}};
      const std::uint64_t steps = std::uint64_t{1} << low;
      for (std::uint64_t s = 0; s < steps; ++s) {
        if (s > 0) {
          const auto flip = static_cast<std::size_t>(__builtin_ctzll(s));
          const double sign = (gray >> flip & 1U) ? -1.0 : 1.0;
          gray ^= std::uint64_t{1} << flip;
          for (std::size_t j = 0; j < n; ++j) colsum[j] += sign * k.at(flip, j);
        }
        double pos = 0.0, neg = 0.0;
        for (double v : colsum) (v > 0.0 ? pos : neg) += v;
        const double score = std::max(pos, -neg);
        if (score >= local.score) {
          const auto rows = detail::bits_to_set(base | gray, n);
          detail::CutCandidate cand{score, rows, detail::best_columns(colsum, pos >= -neg ? 1.0 : -1.0)};
          if (detail::better(cand, local)) local = std::move(cand);
        }
      }
      found[c] = std::move(local);
    });
    for (auto& f : found)
      if (detail::better(f, best)) best = std::move(f);
    res.iterations = std::uint64_t{1} << n;
  } else {
    std::vector<detail::CutCandidate> found(opt.restarts);
    std::vector<std::uint64_t> iters(opt.restarts, 0);
    parallel_for(opt.restarts, [&](std::size_t r) {
      CounterRng rng(opt.seed, r);
      detail::CutCandidate local{-1.0, {}, {}};
      for (double sign : {1.0, -1.0}) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < n; ++i)
          if (rng.next() & 1U) rows.push_back(i);
        double score = -1.0;
        std::vector<std::size_t> cols;
        for (;;) {
          ++iters[r];
          std::vector<double> colsum(n, 0.0);
          for (std::size_t i : rows)
            for (std::size_t j = 0; j < n; ++j) colsum[j] += k.at(i, j);
          auto new_cols = detail::best_columns(colsum, sign);
          std::vector<double> rowsum(n, 0.0);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j : new_cols) rowsum[i] += k.at(i, j);
          auto new_rows = detail::best_columns(rowsum, sign);
          double s = 0.0;
          for (std::size_t i : new_rows) s += sign * rowsum[i];
          if (s <= score) break;
          score = s;
          rows = std::move(new_rows);
          cols = std::move(new_cols);
        }
        detail::CutCandidate cand{std::max(score, 0.0), rows, cols};
        if (score <= 0.0) cand = {0.0, {}, {}};
        if (detail::better(cand, local)) local = std::move(cand);
      }
      found[r] = std::move(local);
    });
    for (auto& f : found)
      if (detail::better(f, best)) best = std::move(f);
    res.iterations = std::accumulate(iters.begin(), iters.end(), std::uint64_t{0});
  }

  res.rows = std::move(best.rows);
  res.columns = std::move(best.cols);
  res.value = cut_value(k, res.rows, res.columns);
  return res;
}

// ---------------------------------------------------------------------------
// Cut distance over block relabelings

struct CutDistanceOptions {
  std::size_t anneal_steps = 10'000;
  double start_temperature = 0.05;
  double cooling = 0.9995;  // geometric, per step
  std::uint64_t seed = 20240001;
  CutNormOptions cut;
};

struct CutDistanceResult {
  double value = 0.0;                     // upper bound on δ□
  std::vector<std::size_t> permutation;   // B is compared as B(π(a), π(b))
  std::string search;                     // exhaustive-permutations | annealing
  std::string bound;                      // cut-norm | l1
  std::uint64_t evaluated = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMaxExhaustivePermutation = 8;

namespace detail {

inline double permuted_l1(const GridGraphon& a, const GridGraphon& b, const std::vector<std::size_t>& p) {
  double s = 0.0;
  const std::size_t n = a.n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += std::fabs(a.at(i, j) - b.at(p[i], p[j]));
  return s;
}

// Change of permuted_l1 when p[x] and p[y] are swapped.
inline double swap_delta(const GridGraphon& a, const GridGraphon& b, const std::vector<std::size_t>& p,
                         std::size_t x, std::size_t y) {
  const std::size_t n = a.n();
  double before = 0.0, after = 0.0;
  auto q = [&](std::size_t i) { return i == x ? p[y] : i == y ? p[x] : p[i]; };
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i : {x, y}) {
      before += std::fabs(a.at(i, j) - b.at(p[i], p[j]));
      after += std::fabs(a.at(i, j) - b.at(q(i), q(j)));
      if (j != x && j != y) {
        before += std::fabs(a.at(j, i) - b.at(p[j], p[i]));
        after += std::fabs(a.at(j, i) - b.at(q(j), q(i)));
      }
    }
  }
  return after - before;
}

}  // namespace detail

/// min over searched relabelings π of ‖A − B^π‖□; every value reported is an
/// upper bound on δ□(A, B). All permutations for n ≤ 8. Above that, seeded
/// annealing on the L¹ objective from the degree-order alignment, then the
/// exact cut norm (n ≤ 24) or the L¹ bound of the winner.
inline CutDistanceResult cut_distance_upper(const GridGraphon& a, const GridGraphon& b,
                                            const CutDistanceOptions& opt = {}) {
  if (a.n() != b.n()) throw DomainError("cut distance needs equal block counts");
  const std::size_t n = a.n();
  CutDistanceResult res;
  res.seed = opt.seed;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});

  auto exact_for = [&](const std::vector<std::size_t>& perm) {
    return cut_norm(StepKernel::difference(a, b.permuted(perm)), CutMethod::exhaustive).value;
  };

  if (n <= kMaxExhaustivePermutation) {
    res.search = "exhaustive-permutations";
    res.bound = "cut-norm";
    res.value = 2.0;
    do {
      ++res.evaluated;
      const double v = exact_for(p);
      if (v < res.value) {
        res.value = v;
        res.permutation = p;
        if (v == 0.0) break;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    return res;
  }

  // Align degree orders: π(orderA[r]) = orderB[r].
  const auto oa = degree_sort(a).order;
  const auto ob = degree_sort(b).order;
  for (std::size_t r = 0; r < n; ++r) p[oa[r]] = ob[r];

  CounterRng rng(opt.seed);
  double cur = detail::permuted_l1(a, b, p);
  double best_val = cur;
  std::vector<std::size_t> best = p;
  double temp = opt.start_temperature * static_cast<double>(n * n);
  for (std::size_t step = 0; step < opt.anneal_steps && best_val > 0.0; ++step) {
    const auto x = static_cast<std::size_t>(rng.below(n));
    auto y = static_cast<std::size_t>(rng.below(n - 1));
    if (y >= x) ++y;
    const double delta = detail::swap_delta(a, b, p, x, y);
    if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temp)) {
      std::swap(p[x], p[y]);
      cur += delta;
      if (cur < best_val - 1e-12) {
        best_val = detail::permuted_l1(a, b, p);
        cur = best_val;
        best = p;
      }
    }
    temp *= opt.cooling;
    ++res.evaluated;
  }
  res.search = "annealing";
  res.permutation = best;
  if (n <= kMaxExhaustiveCut) {
    res.bound = "cut-norm";
    res.value = exact_for(best);
  } else {
    res.bound = "l1";
    res.value = l1_distance(a, b.permuted(best));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Invariant-based lower bound

struct InvariantBound {
  double value = 0.0;  // max_F |t(F,A) − t(F,B)| / e(F) ≤ δ□(A,B)
  std::string witness;
  PatternDensities a, b;
  double degree_law_ks = 0.0;
  bool inequivalent = false;  // degree laws differ, so A and B are not equivalent
};

inline InvariantBound invariant_lower_bound(const GridGraphon& a, const GridGraphon& b) {
  InvariantBound r;
  r.a = pattern_densities(a);
  r.b = pattern_densities(b);
  const std::array<std::tuple<const char*, double, double, double>, 4> terms{{
      {"edge", r.a.edge, r.b.edge, 1.0},
      {"path2", r.a.path2, r.b.path2, 2.0},
      {"triangle", r.a.triangle, r.b.triangle, 3.0},
      {"cycle4", r.a.cycle4, r.b.cycle4, 4.0},
  }};
  for (const auto& [name, ta, tb, e] : terms) {
    const double v = std::fabs(ta - tb) / e;
    if (v > r.value) {
      r.value = v;
      r.witness = name;
    }
  }
  const auto la = EmpiricalDistribution::from_samples(a.row_means());
  const auto lb = EmpiricalDistribution::from_samples(b.row_means());
  r.degree_law_ks = ks_distance(la, lb).distance;
  r.inequivalent = r.degree_law_ks > 0.0;
  return r;
}

}  // namespace graphonlab
