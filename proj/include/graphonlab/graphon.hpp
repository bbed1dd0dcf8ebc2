#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "exact_sum.hpp"
#include "measure_map.hpp"
#include "rational.hpp"

namespace graphonlab {

enum class Family { counterexample, constant, product, threshold };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::counterexample: return "counterexample";
    case Family::constant: return "constant";
    case Family::product: return "product";
    case Family::threshold: return "threshold";
  }
  return "?";
}

inline void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << x << " outside [0,1]";
    throw DomainError(os.str());
  }
}

namespace detail {

// 4-point Gauss-Legendre rule on [-1,1]; exact for cubics.
inline constexpr std::array<double, 4> gauss_nodes{
    -0.8611363115940525752, -0.3399810435848562648, 0.3399810435848562648,
    0.8611363115940525752};
inline constexpr std::array<double, 4> gauss_weights{
    0.3478548451374538574, 0.6521451548625461426, 0.6521451548625461426,
    0.3478548451374538574};

inline double dist_to_levels(double v) {
  return std::min(std::fabs(v), std::fabs(v - 0.5));
}

}  // namespace detail

/// A row y ↦ W(x, y) of an analytic family splits into segments on which the
/// kernel is either constant or linear in y.
struct RowSegment {
  double lo, hi;
  bool linear;  // value = coef·y when true, coef otherwise
  double coef;
};

/// Closed-form graphon families on [0,1].
///
/// counterexample: 4xy on (0,½)², ½ where x+y > 3/2, 0 elsewhere. Boundaries
/// resolve by first match in that order, so x+y = 3/2 evaluates to 0.
/// constant(p): p. product: xy. threshold(t): 1 where x+y > 2t, else 0.
class AnalyticGraphon {
 public:
  static AnalyticGraphon counterexample() { return {Family::counterexample, 0.0}; }
  static AnalyticGraphon constant(double p) {
    check_unit(p, "constant parameter p");
    return {Family::constant, p};
  }
  static AnalyticGraphon product() { return {Family::product, 0.0}; }
  static AnalyticGraphon threshold(double t) {
    check_unit(t, "threshold parameter t");
    return {Family::threshold, t};
  }

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] double parameter() const { return param_; }

  double operator()(double x, double y) const {
    check_unit(x, "x");
    check_unit(y, "y");
    return value(x, y);
  }

  /// Unchecked evaluation.
  [[nodiscard]] double value(double x, double y) const noexcept {
    switch (family_) {
      case Family::counterexample:
        if (x > 0.0 && x < 0.5 && y > 0.0 && y < 0.5) return 4.0 * x * y;
        if (x + y > 1.5) return 0.5;
        return 0.0;
      case Family::constant: return param_;
      case Family::product: return x * y;
      case Family::threshold: return x + y > 2.0 * param_ ? 1.0 : 0.0;
    }
    return 0.0;
  }

  /// Piecewise description of y ↦ W(x,y) on [0,1].
  [[nodiscard]] std::vector<RowSegment> row_segments(double x) const {
    switch (family_) {
      case Family::counterexample: {
        if (x > 0.0 && x < 0.5) return {{0.0, 0.5, true, 4.0 * x}, {0.5, 1.0, false, 0.0}};
        const double edge = 1.5 - x;
        if (edge < 1.0) return {{0.0, edge, false, 0.0}, {edge, 1.0, false, 0.5}};
        return {{0.0, 1.0, false, 0.0}};
      }
      case Family::constant: return {{0.0, 1.0, false, param_}};
      case Family::product: return {{0.0, 1.0, true, x}};
      case Family::threshold: {
        const double edge = 2.0 * param_ - x;
        if (edge <= 0.0) return {{0.0, 1.0, false, 1.0}};
        if (edge >= 1.0) return {{0.0, 1.0, false, 0.0}};
        return {{0.0, edge, false, 0.0}, {edge, 1.0, false, 1.0}};
      }
    }
    return {};
  }

  /// ∫_lo^hi W(x,y) dy by Gauss-Legendre on each smooth segment of the row,
  /// evaluating the kernel pointwise.
  [[nodiscard]] double row_integral(double x, double lo, double hi) const {
    ExactSum acc;
    for (const auto& s : row_segments(x)) {
      const double a = std::max(lo, s.lo);
      const double b = std::min(hi, s.hi);
      if (!(a < b)) continue;
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      for (std::size_t q = 0; q < 4; ++q)
        acc.add(half * detail::gauss_weights[q] * value(x, mid + half * detail::gauss_nodes[q]));
    }
    return acc.value();
  }

  /// Exact measure of {y ∈ [lo,hi] : dist(W(x,y), {0,½}) > eta}.
  [[nodiscard]] double row_level_measure(double x, double lo, double hi, double eta) const {
    double total = 0.0;
    for (const auto& s : row_segments(x)) {
      const double a = std::max(lo, s.lo);
      const double b = std::min(hi, s.hi);
      if (!(a < b)) continue;
      if (!s.linear || s.coef == 0.0) {
        const double v = s.linear ? 0.0 : s.coef;
        if (detail::dist_to_levels(v) > eta) total += b - a;
        continue;
      }
      // Linear piece: subtract the preimage of the bad value set
      // [0,eta] ∪ [½-eta, ½+eta].
      const double c = s.coef;
      auto bad = [&](double v0, double v1) {
        const double y0 = std::max(a, v0 / c);
        const double y1 = std::min(b, v1 / c);
        return y1 > y0 ? y1 - y0 : 0.0;
      };
      double removed = 0.0;
      if (eta >= 0.25) {
        removed = bad(0.0, 0.5 + eta);
      } else {
        removed = bad(0.0, eta) + bad(0.5 - eta, 0.5 + eta);
      }
      total += (b - a) - removed;
    }
    return total;
  }

  /// Closed-form degree function ∫₀¹ W(x,y) dy.
  [[nodiscard]] double degree_closed_form(double x) const {
    switch (family_) {
      case Family::counterexample:
        if (x > 0.0 && x < 0.5) return 0.5 * x;
        if (x > 0.5) return 0.5 * (x - 0.5);
        return 0.0;
      case Family::constant: return param_;
      case Family::product: return 0.5 * x;
      case Family::threshold: return std::clamp(x + 1.0 - 2.0 * param_, 0.0, 1.0);
    }
    return 0.0;
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os << to_string(family_);
    if (family_ == Family::constant) os << "(p=" << param_ << ")";
    if (family_ == Family::threshold) os << "(t=" << param_ << ")";
    return os.str();
  }

  friend bool operator==(const AnalyticGraphon&, const AnalyticGraphon&) = default;

 private:
  AnalyticGraphon(Family f, double p) : family_(f), param_(p) {}

  Family family_;
  double param_;
};

/// Step graphon on a uniform n×n grid; entry (i,j) is the value on the cell
/// [i/n,(i+1)/n) × [j/n,(j+1)/n). Symmetry and range are validated on
/// construction.
class GridGraphon {
 public:
  GridGraphon(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    if (n_ == 0) throw DomainError("grid needs at least one block");
    if (values_.size() != n_ * n_) {
      std::ostringstream os;
      os << "grid of n=" << n_ << " needs " << n_ * n_ << " values, got " << values_.size();
      throw ValidationError(os.str());
    }
    validate();
    row_means_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      row_means_[i] = exact_sum(row(i)) / static_cast<double>(n_);
  }

  static GridGraphon constant(std::size_t n, double p) {
    return GridGraphon(n, std::vector<double>(n * n, p));
  }

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_, n_};
  }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

  [[nodiscard]] std::size_t cell(double x) const {
    const auto c = static_cast<std::size_t>(x * static_cast<double>(n_));
    return std::min(c, n_ - 1);
  }

  double operator()(double x, double y) const {
    check_unit(x, "x");
    check_unit(y, "y");
    return at(cell(x), cell(y));
  }

  /// Block degree: mean of row i, correctly rounded.
  [[nodiscard]] double row_mean(std::size_t i) const { return row_means_[i]; }
  [[nodiscard]] const std::vector<double>& row_means() const { return row_means_; }

  /// Fraction of row i whose values are farther than eta from {0,½}.
  [[nodiscard]] double row_level(std::size_t i, double eta) const {
    std::size_t count = 0;
    for (double v : row(i)) count += detail::dist_to_levels(v) > eta ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(n_);
  }

  /// ∫_lo^hi of row i, cells weighted by overlap length.
  [[nodiscard]] double row_integral(std::size_t i, double lo, double hi) const {
    if (lo <= 0.0 && hi >= 1.0) return row_mean(i);
    ExactSum acc;
    for_overlaps(lo, hi, [&](std::size_t j, double len) { acc.add(at(i, j) * len); });
    return acc.value();
  }

  [[nodiscard]] double row_level_measure(std::size_t i, double lo, double hi, double eta) const {
    if (lo <= 0.0 && hi >= 1.0) return row_level(i, eta);
    ExactSum acc;
    for_overlaps(lo, hi, [&](std::size_t j, double len) {
      if (detail::dist_to_levels(at(i, j)) > eta) acc.add(len);
    });
    return acc.value();
  }

  /// Simultaneous row/column relabeling: result(a,b) = this(order[a], order[b]).
  [[nodiscard]] GridGraphon permuted(std::span<const std::size_t> order) const {
    if (order.size() != n_) throw ValidationError("permutation length differs from n");
    std::vector<double> out(n_ * n_);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) out[a * n_ + b] = at(order[a], order[b]);
    return GridGraphon(n_, std::move(out));
  }

  /// Same step function on a grid refined by the given factor.
  [[nodiscard]] GridGraphon refined(std::size_t factor) const {
    if (factor == 1) return *this;
    const std::size_t m = n_ * factor;
    std::vector<double> out(m * m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) out[a * m + b] = at(a / factor, b / factor);
    return GridGraphon(m, std::move(out));
  }

  friend bool operator==(const GridGraphon& a, const GridGraphon& b) {
    return a.n_ == b.n_ && a.values_ == b.values_;
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = at(i, j);
        if (!(v >= 0.0 && v <= 1.0)) {
          std::ostringstream os;
          os.precision(17);
          os << "range error: values[" << i << "][" << j << "]=" << v << " outside [0,1]";
          throw ValidationError(os.str());
        }
        if (v != at(j, i)) {
          std::ostringstream os;
          os.precision(17);
          os << "symmetry error: values[" << i << "][" << j << "]=" << v << " differs from values["
             << j << "][" << i << "]=" << at(j, i);
          throw ValidationError(os.str());
        }
      }
    }
  }

  template <typename F>
  void for_overlaps(double lo, double hi, F&& f) const {
    const double n = static_cast<double>(n_);
    for (std::size_t j = cell(std::max(lo, 0.0)); j < n_; ++j) {
      const double a = std::max(lo, static_cast<double>(j) / n);
      const double b = std::min(hi, static_cast<double>(j + 1) / n);
      if (a >= hi) break;
      if (b > a) f(j, b - a);
    }
  }

  std::size_t n_;
  std::vector<double> values_;
  std::vector<double> row_means_;
};

enum class EvalMode { exact, cell_average };

class GraphonHandle;

/// Kernel (x,y) ↦ W(φ(x), φ(y)) for a base graphon that cannot be pulled
/// back onto a grid exactly.
struct PulledBack {
  std::shared_ptr<const GraphonHandle> base;
  MeasurePreservingMap map;
  std::vector<DensityPiece> density;  // pushforward of Lebesgue measure under map

  [[nodiscard]] bool uniform_density() const {
    return density.size() == 1 && density[0].lo == Rational(0) && density[0].hi == Rational(1) &&
           density[0].density == Rational(1);
  }
  // Base functionals at u = φ(x); defined after GraphonHandle.
  [[nodiscard]] double degree_through(double u) const;
  [[nodiscard]] double level_through(double u, double eta) const;
};

/// A graphon in one of its representations: closed form, step function, or
/// lazy pull-back of either along a measure-preserving map.
class GraphonHandle {
 public:
  GraphonHandle(AnalyticGraphon g, EvalMode mode = EvalMode::exact)  // NOLINT
      : rep_(g), mode_(mode) {}
  GraphonHandle(GridGraphon g)  // NOLINT
      : rep_(std::make_shared<const GridGraphon>(std::move(g))), mode_(EvalMode::exact) {}

  /// Lazy pull-back. Nested pull-backs collapse into one composed map.
  static GraphonHandle pulled_back(const GraphonHandle& base, const MeasurePreservingMap& map) {
    if (const auto* pb = base.pullback()) {
      return pulled_back(*pb->base, map.then(pb->map));
    }
    GraphonHandle h(base);
    h.rep_ = PulledBack{std::make_shared<const GraphonHandle>(base), map, map.pushforward_density()};
    return h;
  }

  [[nodiscard]] const AnalyticGraphon* analytic() const { return std::get_if<AnalyticGraphon>(&rep_); }
  [[nodiscard]] const GridGraphon* grid() const {
    const auto* p = std::get_if<std::shared_ptr<const GridGraphon>>(&rep_);
    return p ? p->get() : nullptr;
  }
  [[nodiscard]] const PulledBack* pullback() const { return std::get_if<PulledBack>(&rep_); }
  [[nodiscard]] EvalMode mode() const { return mode_; }

  double operator()(double x, double y) const {
    check_unit(x, "x");
    check_unit(y, "y");
    return value(x, y);
  }

  [[nodiscard]] double value(double x, double y) const {
    if (const auto* a = analytic()) return a->value(x, y);
    if (const auto* g = grid()) return g->at(g->cell(x), g->cell(y));
    const auto& pb = *pullback();
    return pb.base->value(pb.map.apply(x), pb.map.apply(y));
  }

  /// Degree D(x) = ∫₀¹ W(x,y) dy. Closed form for analytic families, block
  /// mean for grids, and for pull-backs the base row integrated against the
  /// map's pushforward density.
  /// D(x). A pull-back along a measure-preserving map satisfies
  /// D_{W∘φ}(x) = D_W(φ(x)); the base is evaluated at φ(x) whenever the stored
  /// pushforward density is uniform, and integrated against it otherwise.
  [[nodiscard]] double degree_at(double x) const {
    check_unit(x, "x");
    if (const auto* a = analytic()) return a->degree_closed_form(x);
    if (const auto* g = grid()) return g->row_mean(g->cell(x));
    const auto& pb = *pullback();
    return pb.degree_through(pb.map.apply(x));
  }

  [[nodiscard]] double degree_at(Rational x) const {
    if (const auto* pb = pullback()) return pb->degree_through(pb->map.apply(x).to_double());
    return degree_at(x.to_double());
  }

  /// D(x) by quadrature of the row, never through a closed form. For a
  /// pull-back the base row at φ(x) is integrated against the pushforward
  /// density of φ.
  [[nodiscard]] double degree_by_quadrature(Rational x) const {
    if (const auto* pb = pullback()) {
      return pb->base->against_density(pb->map.apply(x).to_double(), pb->density,
                                       [](const GraphonHandle& b, double u, double lo, double hi) {
                                         return b.row_integral(u, lo, hi);
                                       });
    }
    return row_integral(x.to_double(), 0.0, 1.0);
  }

  /// h(x) = measure{y : dist(W(x,y), {0,½}) > eta}.
  [[nodiscard]] double level_at(double x, double eta) const {
    check_unit(x, "x");
    if (const auto* a = analytic()) return a->row_level_measure(x, 0.0, 1.0, eta);
    if (const auto* g = grid()) return g->row_level(g->cell(x), eta);
    const auto& pb = *pullback();
    return pb.level_through(pb.map.apply(x), eta);
  }

  [[nodiscard]] double level_at(Rational x, double eta) const {
    if (const auto* pb = pullback()) return pb->level_through(pb->map.apply(x).to_double(), eta);
    return level_at(x.to_double(), eta);
  }

  /// ∫_lo^hi W(x,y) dy for analytic or grid representations.
  [[nodiscard]] double row_integral(double x, double lo, double hi) const {
    if (const auto* a = analytic()) return a->row_integral(x, lo, hi);
    if (const auto* g = grid()) return g->row_integral(g->cell(x), lo, hi);
    throw DomainError("row integral of a lazy pull-back is computed through its base");
  }

  [[nodiscard]] double row_level_measure(double x, double lo, double hi, double eta) const {
    if (const auto* a = analytic()) return a->row_level_measure(x, lo, hi, eta);
    if (const auto* g = grid()) return g->row_level_measure(g->cell(x), lo, hi, eta);
    throw DomainError("level measure of a lazy pull-back is computed through its base");
  }

  /// Tolerance separating {0,½} from other values: 0 for closed forms,
  /// 1e-6 when a step function is involved.
  [[nodiscard]] double default_eta() const {
    if (analytic()) return 0.0;
    if (const auto* pb = pullback()) return pb->base->default_eta();
    return 1e-6;
  }

  [[nodiscard]] std::string describe() const {
    if (const auto* a = analytic()) return a->describe();
    if (const auto* g = grid()) return "grid(n=" + std::to_string(g->n()) + ")";
    const auto& pb = *pullback();
    return "pullback(" + pb.base->describe() + ", " + std::to_string(pb.map.ops().size()) + " ops)";
  }

 private:
  friend struct PulledBack;

  template <typename RowFn>
  double against_density(double u, const std::vector<DensityPiece>& density, RowFn&& fn) const {
    ExactSum acc;
    for (const auto& d : density)
      acc.add(d.density.to_double() * fn(*this, u, d.lo.to_double(), d.hi.to_double()));
    return acc.value();
  }

  std::variant<AnalyticGraphon, std::shared_ptr<const GridGraphon>, PulledBack> rep_;
  EvalMode mode_;
};

inline double PulledBack::degree_through(double u) const {
  if (uniform_density()) return base->degree_at(u);
  return base->against_density(u, density, [](const GraphonHandle& b, double v, double lo, double hi) {
    return b.row_integral(v, lo, hi);
  });
}

inline double PulledBack::level_through(double u, double eta) const {
  if (uniform_density()) return base->level_at(u, eta);
  return base->against_density(u, density, [eta](const GraphonHandle& b, double v, double lo, double hi) {
    return b.row_level_measure(v, lo, hi, eta);
  });
}

}  // namespace graphonlab
