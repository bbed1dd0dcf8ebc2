#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "exact_sum.hpp"

namespace graphonlab {

/// Point of the joint (degree, level) law.
struct Point2 {
  double degree = 0.0;
  double level = 0.0;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

/// Discrete law: atoms sorted ascending, equal values merged, weights summing
/// to one. T needs a total order (double, Point2).
template <typename T>
class EmpiricalLaw {
 public:
  struct Atom {
    T value;
    double weight;
  };

  EmpiricalLaw() = default;

  /// Equal-weight law of a sample; weights are count/N.
  static EmpiricalLaw from_samples(std::vector<T> samples) {
    if (samples.empty()) throw ValidationError("empirical law of an empty sample");
    std::sort(samples.begin(), samples.end());
    EmpiricalLaw law;
    const double total = static_cast<double>(samples.size());
    std::size_t seen = 0;
    for (std::size_t i = 0; i < samples.size();) {
      std::size_t j = i;
      while (j < samples.size() && samples[j] == samples[i]) ++j;
      seen += j - i;
      law.atoms_.push_back({samples[i], static_cast<double>(j - i) / total});
      law.cum_.push_back(static_cast<double>(seen) / total);
      i = j;
    }
    return law;
  }

  /// Weighted atoms in any order; validated and normalized to a sorted,
  /// merged representation.
  static EmpiricalLaw from_atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ValidationError("law with no atoms");
    ExactSum total;
    for (const auto& a : atoms) {
      if (!(a.weight >= 0.0)) throw ValidationError("negative atom weight");
      total.add(a.weight);
    }
    if (std::fabs(total.value() - 1.0) > 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "atom weights sum to " << total.value() << ", expected 1";
      throw ValidationError(os.str());
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.value < b.value; });
    EmpiricalLaw law;
    ExactSum running;
    for (std::size_t i = 0; i < atoms.size();) {
      ExactSum w;
      std::size_t j = i;
      while (j < atoms.size() && atoms[j].value == atoms[i].value) w.add(atoms[j++].weight);
      if (w.value() > 0.0) {
        running.merge(w);
        law.atoms_.push_back({atoms[i].value, w.value()});
        law.cum_.push_back(running.value());
      }
      i = j;
    }
    law.cum_.back() = 1.0;
    return law;
  }

  [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
  /// cumulative()[i] = total weight of atoms 0..i.
  [[nodiscard]] const std::vector<double>& cumulative() const { return cum_; }
  [[nodiscard]] std::size_t size() const { return atoms_.size(); }

  /// Weight of values ≤ r.
  [[nodiscard]] double cdf(const T& r) const {
    const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), r,
                                     [](const T& v, const Atom& a) { return v < a.value; });
    const auto idx = static_cast<std::size_t>(it - atoms_.begin());
    return idx == 0 ? 0.0 : cum_[idx - 1];
  }

  /// Weight of values < r.
  [[nodiscard]] double cdf_left(const T& r) const {
    const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), r,
                                     [](const Atom& a, const T& v) { return a.value < v; });
    const auto idx = static_cast<std::size_t>(it - atoms_.begin());
    return idx == 0 ? 0.0 : cum_[idx - 1];
  }

  /// Right-continuous quantile inf{v : F(v) > x}; the last atom for x ≥ 1.
  [[nodiscard]] T quantile(double x) const {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), x);
    if (it == cum_.end()) return atoms_.back().value;
    return atoms_[static_cast<std::size_t>(it - cum_.begin())].value;
  }

  friend bool operator==(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    if (a.atoms_.size() != b.atoms_.size()) return false;
    for (std::size_t i = 0; i < a.atoms_.size(); ++i)
      if (!(a.atoms_[i].value == b.atoms_[i].value) || a.atoms_[i].weight != b.atoms_[i].weight)
        return false;
    return true;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cum_;
};

using EmpiricalDistribution = EmpiricalLaw<double>;
using JointDistribution = EmpiricalLaw<Point2>;

/// Closed-form law on the line: point masses plus uniformly spread masses on
/// intervals. Used for the laws the proof asserts (uniform(0,¼), ½δ₀+½δ_½,
/// ...), against which computed empirical laws are compared.
class ExactLaw {
 public:
  struct PointMass {
    double at, mass;
  };
  struct UniformPiece {
    double lo, hi, mass;
  };

  ExactLaw(std::vector<PointMass> points, std::vector<UniformPiece> pieces)
      : points_(std::move(points)), pieces_(std::move(pieces)) {
    ExactSum total;
    for (const auto& p : points_) total.add(p.mass);
    for (const auto& u : pieces_) {
      if (!(u.lo < u.hi)) throw ValidationError("uniform piece needs lo < hi");
      total.add(u.mass);
    }
    if (std::fabs(total.value() - 1.0) > 1e-12) throw ValidationError("exact law mass differs from 1");
    std::sort(points_.begin(), points_.end(),
              [](const PointMass& a, const PointMass& b) { return a.at < b.at; });
    std::sort(pieces_.begin(), pieces_.end(),
              [](const UniformPiece& a, const UniformPiece& b) { return a.lo < b.lo; });
  }

  static ExactLaw uniform(double lo, double hi) { return ExactLaw({}, {{lo, hi, 1.0}}); }
  static ExactLaw point(double at) { return ExactLaw({{at, 1.0}}, {}); }

  [[nodiscard]] const std::vector<PointMass>& points() const { return points_; }
  [[nodiscard]] const std::vector<UniformPiece>& pieces() const { return pieces_; }
  [[nodiscard]] bool is_atomic() const { return pieces_.empty(); }

  [[nodiscard]] double cdf(double r) const { return mass_below(r, true); }
  [[nodiscard]] double cdf_left(double r) const { return mass_below(r, false); }

  /// Mass of the open interval (lo, hi).
  [[nodiscard]] double mass_in(double lo, double hi) const {
    if (!(lo < hi)) return 0.0;
    return std::max(0.0, cdf_left(hi) - cdf(lo));
  }

  /// ∫ v·1{lo < v < hi} dLaw(v).
  [[nodiscard]] double moment_in(double lo, double hi) const {
    if (!(lo < hi)) return 0.0;
    double total = 0.0;
    for (const auto& p : points_)
      if (p.at > lo && p.at < hi) total += p.at * p.mass;
    for (const auto& u : pieces_) {
      const double a = std::max(lo, u.lo);
      const double b = std::min(hi, u.hi);
      if (b > a) total += u.mass / (u.hi - u.lo) * 0.5 * (b * b - a * a);
    }
    return total;
  }

  /// Right-continuous quantile inf{v : F(v) > x}.
  [[nodiscard]] double quantile(double x) const {
    // Candidate breakpoints: every atom and piece end. Bisection on the
    // monotone CDF inside the bracketing piece.
    double lo = lowest();
    double hi = highest();
    if (x < cdf_left(lo)) return lo;
    if (x >= 1.0) return hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (cdf(mid) > x)
        hi = mid;
      else
        lo = mid;
    }
    return cdf(lo) > x ? lo : hi;
  }

  [[nodiscard]] double lowest() const {
    double v = points_.empty() ? pieces_.front().lo : points_.front().at;
    if (!pieces_.empty()) v = std::min(v, pieces_.front().lo);
    return v;
  }
  [[nodiscard]] double highest() const {
    double v = -1e300;
    for (const auto& p : points_) v = std::max(v, p.at);
    for (const auto& u : pieces_) v = std::max(v, u.hi);
    return v;
  }

 private:
  double mass_below(double r, bool inclusive) const {
    double total = 0.0;
    for (const auto& p : points_)
      if (p.at < r || (inclusive && p.at == r)) total += p.mass;
    for (const auto& u : pieces_) {
      if (r >= u.hi)
        total += u.mass;
      else if (r > u.lo)
        total += u.mass * (r - u.lo) / (u.hi - u.lo);
    }
    return std::min(total, 1.0);
  }

  std::vector<PointMass> points_;
  std::vector<UniformPiece> pieces_;
};

/// Location and size of the largest CDF gap found by a KS computation.
struct KsResult {
  double distance = 0.0;
  double at = 0.0;         // argument r where the gap occurs
  double empirical = 0.0;  // F(r) or F(r-)
  double reference = 0.0;  // G(r) or G(r-)
};

/// sup_r |F(r) − G(r)| between two discrete laws, exact.
inline KsResult ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  KsResult best;
  std::size_t i = 0, j = 0;
  const auto& A = a.atoms();
  const auto& B = b.atoms();
  while (i < A.size() || j < B.size()) {
    double r;
    if (j == B.size() || (i < A.size() && A[i].value <= B[j].value))
      r = A[i].value;
    else
      r = B[j].value;
    while (i < A.size() && A[i].value == r) ++i;
    while (j < B.size() && B[j].value == r) ++j;
    const double fa = i == 0 ? 0.0 : a.cumulative()[i - 1];
    const double fb = j == 0 ? 0.0 : b.cumulative()[j - 1];
    if (std::fabs(fa - fb) > best.distance) best = {std::fabs(fa - fb), r, fa, fb};
  }
  return best;
}

/// sup_r |F(r) − G(r)| between a discrete law and a closed-form law, exact.
inline KsResult ks_distance(const EmpiricalDistribution& a, const ExactLaw& g) {
  KsResult best;
  auto consider = [&best](double r, double f, double ref) {
    const double d = std::fabs(f - ref);
    if (d > best.distance) best = {d, r, f, ref};
  };
  const auto& A = a.atoms();
  const auto& cum = a.cumulative();
  consider(A.front().value, 0.0, g.cdf_left(A.front().value));
  for (std::size_t i = 0; i < A.size(); ++i) {
    consider(A[i].value, cum[i], g.cdf(A[i].value));
    if (i + 1 < A.size()) consider(A[i + 1].value, cum[i], g.cdf_left(A[i + 1].value));
  }
  return best;
}

/// sup_{r,s} |F(r,s) − G(r,s)| between two joint laws, where
/// F(r,s) = P(degree ≤ r, level ≤ s). Exact, O(N log N): sweep the degree
/// axis and keep signed level masses in a segment tree of prefix extrema.
inline double ks_distance(const JointDistribution& a, const JointDistribution& b) {
  struct Item {
    double d, s, w;
  };
  std::vector<Item> items;
  std::vector<double> levels;
  for (const auto& at : a.atoms()) items.push_back({at.value.degree, at.value.level, at.weight});
  for (const auto& at : b.atoms()) items.push_back({at.value.degree, at.value.level, -at.weight});
  for (const auto& it : items) levels.push_back(it.s);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.d < y.d; });

  std::size_t size = 1;
  while (size < levels.size()) size <<= 1;
  struct Node {
    double sum = 0.0, hi = 0.0, lo = 0.0;
  };
  std::vector<Node> tree(2 * size);
  auto update = [&](std::size_t pos, double w) {
    std::size_t v = pos + size;
    tree[v].sum += w;
    tree[v].hi = tree[v].sum;
    tree[v].lo = tree[v].sum;
    for (v >>= 1; v >= 1; v >>= 1) {
      const Node& l = tree[2 * v];
      const Node& r = tree[2 * v + 1];
      tree[v].sum = l.sum + r.sum;
      tree[v].hi = std::max(l.hi, l.sum + r.hi);
      tree[v].lo = std::min(l.lo, l.sum + r.lo);
    }
  };
  double best = 0.0;
  for (std::size_t i = 0; i < items.size();) {
    const double d = items[i].d;
    while (i < items.size() && items[i].d == d) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(levels.begin(), levels.end(), items[i].s) - levels.begin());
      update(pos, items[i].w);
      ++i;
    }
    best = std::max({best, tree[1].hi, -tree[1].lo});
  }
  return best;
}

/// Total variation ½ Σ |p(v) − q(v)| between two discrete laws.
inline double tv_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  ExactSum acc;
  std::size_t i = 0, j = 0;
  const auto& A = a.atoms();
  const auto& B = b.atoms();
  while (i < A.size() || j < B.size()) {
    if (j == B.size() || (i < A.size() && A[i].value < B[j].value)) {
      acc.add(A[i++].weight);
    } else if (i == A.size() || B[j].value < A[i].value) {
      acc.add(B[j++].weight);
    } else {
      acc.add(std::fabs(A[i++].weight - B[j++].weight));
    }
  }
  return 0.5 * acc.value();
}

/// TV distance up to a resolution tau: the smallest P(|X − Y| > tau) over all
/// couplings of X ~ a, Y ~ b. Equals tv_distance when tau = 0. On the line
/// the optimal coupling is the greedy left-to-right matching.
inline double tv_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                          double tau) {
  if (tau <= 0.0) return tv_distance(a, b);
  const auto& A = a.atoms();
  const auto& B = b.atoms();
  std::vector<double> left(B.size());
  for (std::size_t j = 0; j < B.size(); ++j) left[j] = B[j].weight;
  ExactSum matched;
  std::size_t start = 0;
  for (const auto& atom : A) {
    double need = atom.weight;
    while (start < B.size() && (B[start].value < atom.value - tau || left[start] <= 0.0)) ++start;
    for (std::size_t j = start; j < B.size() && need > 0.0; ++j) {
      if (B[j].value > atom.value + tau) break;
      const double take = std::min(need, left[j]);
      if (take <= 0.0) continue;
      left[j] -= take;
      need -= take;
      matched.add(take);
    }
  }
  return std::max(0.0, 1.0 - matched.value());
}

}  // namespace graphonlab
