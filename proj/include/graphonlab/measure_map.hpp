#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "rational.hpp"

namespace graphonlab {

/// Interval exchange on k equal blocks: block i is translated onto slot
/// perm[i]. Permutations are 0-based here and 1-based in the file format.
struct Exchange {
  int k = 1;
  std::vector<int> perm{0};
};

/// Expanding map x ↦ m·x mod 1.
struct Expand {
  int m = 2;
};

using MapOp = std::variant<Exchange, Expand>;

/// Affine piece of a composed map: y ∈ [lo, hi) ↦ slope·y + offset.
struct AffinePiece {
  Rational lo, hi;
  Rational slope, offset;
};

/// Constant-density piece of a pushforward measure on [0,1].
struct DensityPiece {
  Rational lo, hi;
  Rational density;
};

/// Composition of interval exchanges and expanding maps, applied in list
/// order: apply(x) = ops.back()(... ops.front()(x)).
class MeasurePreservingMap {
 public:
  MeasurePreservingMap() = default;
  explicit MeasurePreservingMap(std::vector<MapOp> ops) : ops_(std::move(ops)) {
    for (const auto& op : ops_) validate(op);
  }

  static MeasurePreservingMap identity() { return {}; }

  /// Exchange that swaps the two halves: x ↦ x + ½ mod 1.
  static MeasurePreservingMap swap_halves() {
    return MeasurePreservingMap({Exchange{2, {1, 0}}});
  }

  [[nodiscard]] const std::vector<MapOp>& ops() const { return ops_; }
  [[nodiscard]] bool is_identity() const { return ops_.empty(); }

  /// True when every primitive is an interval exchange.
  [[nodiscard]] bool is_exchange_only() const {
    return std::all_of(ops_.begin(), ops_.end(), [](const MapOp& op) {
      return std::holds_alternative<Exchange>(op);
    });
  }

  /// this followed by next.
  [[nodiscard]] MeasurePreservingMap then(const MeasurePreservingMap& next) const {
    std::vector<MapOp> ops = ops_;
    ops.insert(ops.end(), next.ops_.begin(), next.ops_.end());
    return MeasurePreservingMap(std::move(ops));
  }

  [[nodiscard]] double apply(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
      throw DomainError("map argument " + std::to_string(x) + " outside [0,1]");
    for (const auto& op : ops_) x = apply_op(op, x);
    return x;
  }

  [[nodiscard]] Rational apply(Rational x) const {
    if (x < Rational(0) || x > Rational(1))
      throw DomainError("map argument outside [0,1]");
    for (const auto& op : ops_) x = apply_op(op, x);
    return x;
  }

  /// Exact affine decomposition of the composed map on [0,1).
  [[nodiscard]] std::vector<AffinePiece> pieces() const {
    std::vector<AffinePiece> cur{{Rational(0), Rational(1), Rational(1), Rational(0)}};
    for (const auto& op : ops_) {
      std::vector<AffinePiece> next;
      const int blocks = block_count(op);
      for (const auto& p : cur) {
        const Rational img_lo = p.slope * p.lo + p.offset;
        const Rational img_hi = p.slope * p.hi + p.offset;
        // Split the image at the op's block boundaries j/blocks.
        const Rational scaled = img_lo * Rational(blocks);
        std::int64_t j = scaled.floor();
        Rational u0 = img_lo;
        while (u0 < img_hi) {
          Rational u1 = std::min(img_hi, Rational(j + 1, blocks));
          if (u0 < u1) {
            const Rational y0 = (u0 - p.offset) / p.slope;
            const Rational y1 = (u1 - p.offset) / p.slope;
            // On block j the op is affine: u ↦ a·u + b.
            Rational a, b;
            if (const auto* ex = std::get_if<Exchange>(&op)) {
              a = Rational(1);
              b = Rational(ex->perm[static_cast<std::size_t>(j)] - j, ex->k);
            } else {
              a = Rational(std::get<Expand>(op).m);
              b = Rational(-j);
            }
            next.push_back({y0, y1, a * p.slope, a * p.offset + b});
          }
          u0 = u1;
          ++j;
        }
      }
      cur = std::move(next);
    }
    return cur;
  }

  /// Density of the pushforward of Lebesgue measure under the map, as a
  /// merged step function. A measure-preserving map yields the single piece
  /// [0,1) with density 1.
  [[nodiscard]] std::vector<DensityPiece> pushforward_density() const {
    struct Event {
      Rational at;
      Rational delta;
    };
    std::vector<Event> events;
    for (const auto& p : pieces()) {
      const Rational lo = p.slope * p.lo + p.offset;
      const Rational hi = p.slope * p.hi + p.offset;
      const Rational w = Rational(1) / p.slope;
      events.push_back({lo, w});
      events.push_back({hi, Rational(0) - w});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.at < b.at; });
    std::vector<DensityPiece> out;
    Rational level(0);
    for (std::size_t i = 0; i < events.size();) {
      const Rational at = events[i].at;
      while (i < events.size() && events[i].at == at) level = level + events[i++].delta;
      if (i == events.size()) break;
      const Rational next = events[i].at;
      if (level == Rational(0)) continue;
      if (!out.empty() && out.back().hi == at && out.back().density == level)
        out.back().hi = next;
      else
        out.push_back({at, next, level});
    }
    return out;
  }

  /// Exact measure-preservation check via the pushforward density.
  [[nodiscard]] bool preserves_measure() const {
    const auto d = pushforward_density();
    return d.size() == 1 && d[0].lo == Rational(0) && d[0].hi == Rational(1) &&
           d[0].density == Rational(1);
  }

 private:
  static int block_count(const MapOp& op) {
    if (const auto* ex = std::get_if<Exchange>(&op)) return ex->k;
    return std::get<Expand>(op).m;
  }

  static void validate(const MapOp& op) {
    if (const auto* ex = std::get_if<Exchange>(&op)) {
      if (ex->k < 1) throw ValidationError("exchange needs k >= 1");
      if (ex->perm.size() != static_cast<std::size_t>(ex->k))
        throw ValidationError("exchange permutation length differs from k");
      std::vector<bool> seen(static_cast<std::size_t>(ex->k), false);
      for (int v : ex->perm) {
        if (v < 0 || v >= ex->k || seen[static_cast<std::size_t>(v)])
          throw ValidationError("exchange perm is not a permutation of 1..k");
        seen[static_cast<std::size_t>(v)] = true;
      }
    } else if (std::get<Expand>(op).m < 2) {
      throw ValidationError("expanding map needs integer m >= 2");
    }
  }

  static double apply_op(const MapOp& op, double x) {
    if (const auto* ex = std::get_if<Exchange>(&op)) {
      const int k = ex->k;
      const int block = std::min(k - 1, static_cast<int>(std::floor(x * k)));
      return x + static_cast<double>(ex->perm[static_cast<std::size_t>(block)] - block) / k;
    }
    const double y = std::get<Expand>(op).m * x;
    return y - std::floor(y);
  }

  static Rational apply_op(const MapOp& op, Rational x) {
    if (const auto* ex = std::get_if<Exchange>(&op)) {
      const int k = ex->k;
      const auto block = std::min<std::int64_t>(k - 1, (x * Rational(k)).floor());
      return x + Rational(ex->perm[static_cast<std::size_t>(block)] - block, k);
    }
    const Rational y = x * Rational(std::get<Expand>(op).m);
    return y - Rational(y.floor());
  }

  std::vector<MapOp> ops_;
};

}  // namespace graphonlab
