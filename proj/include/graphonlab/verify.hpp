#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "discretize.hpp"
#include "distribution.hpp"
#include "functionals.hpp"
#include "graphon.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "transform.hpp"

namespace graphonlab {

enum class Verdict { contradiction, no_contradiction };

inline std::string to_string(Verdict v) {
  return v == Verdict::contradiction ? "CONTRADICTION" : "NO-CONTRADICTION";
}

/// What the argument asserts about a family, in closed form: its degree
/// function and law, the increasing rearrangement that law forces, the
/// level functional h and its law, and the h-mass over degree windows.
class FamilyClaims {
 public:
  explicit FamilyClaims(const AnalyticGraphon& g)
      : family_(g), degree_law_(ExactLaw::point(0.0)), level_law_(ExactLaw::point(0.0)) {
    switch (g.family()) {
      case Family::counterexample:
        degree_law_ = ExactLaw::uniform(0.0, 0.25);
        level_law_ = ExactLaw({{0.0, 0.5}, {0.5, 0.5}}, {});
        expected_ = Verdict::contradiction;
        break;
      case Family::constant: {
        const double p = g.parameter();
        level_const_ = detail::dist_to_levels(p) > 0.0 ? 1.0 : 0.0;
        degree_law_ = ExactLaw::point(p);
        level_law_ = ExactLaw::point(level_const_);
        break;
      }
      case Family::product:
        degree_law_ = ExactLaw::uniform(0.0, 0.5);
        level_law_ = ExactLaw::point(1.0);
        break;
      case Family::threshold: {
        // D(x) = clamp(x + s, 0, 1) with s = 1 − 2t.
        const double s = 1.0 - 2.0 * g.parameter();
        std::vector<ExactLaw::PointMass> pts;
        std::vector<ExactLaw::UniformPiece> pieces;
        if (s <= -1.0) {
          pts.push_back({0.0, 1.0});
        } else if (s >= 1.0) {
          pts.push_back({1.0, 1.0});
        } else {
          if (s < 0.0) pts.push_back({0.0, -s});
          if (s > 0.0) pts.push_back({1.0, s});
          pieces.push_back({std::max(0.0, s), std::min(1.0, 1.0 + s), 1.0 - std::fabs(s)});
        }
        degree_law_ = ExactLaw(pts, pieces);
        level_law_ = degree_law_;
        break;
      }
    }
  }

  [[nodiscard]] const AnalyticGraphon& family() const { return family_; }
  [[nodiscard]] const ExactLaw& degree_law() const { return degree_law_; }
  [[nodiscard]] const ExactLaw& level_law() const { return level_law_; }
  [[nodiscard]] Verdict expected_verdict() const { return expected_; }

  [[nodiscard]] double degree(double x) const { return family_.degree_closed_form(x); }

  [[nodiscard]] double level(double x) const {
    switch (family_.family()) {
      case Family::counterexample: return x > 0.0 && x < 0.5 ? 0.5 : 0.0;
      case Family::constant: return level_const_;
      case Family::product: return x > 0.0 ? 1.0 : 0.0;
      case Family::threshold: return degree(x);
    }
    return 0.0;
  }

  /// The increasing degree function with the same law: x/4 for the
  /// counterexample, the degree function itself for the monotone controls.
  [[nodiscard]] double forced_degree(double x) const {
    if (family_.family() == Family::counterexample) return 0.25 * x;
    return degree(x);
  }

  /// Leb{x : lo < D(x) < hi}.
  [[nodiscard]] double degree_mass(double lo, double hi) const { return degree_law_.mass_in(lo, hi); }

  /// ∫ h(x)·1{lo < D(x) < hi} dx.
  [[nodiscard]] double level_mass(double lo, double hi) const {
    switch (family_.family()) {
      case Family::counterexample: {
        // Only the first branch carries h = ½, and there D = x/2.
        const double a = std::max(lo, 0.0), b = std::min(hi, 0.25);
        return b > a ? b - a : 0.0;
      }
      case Family::constant: return level_const_ * degree_mass(lo, hi);
      case Family::product: return degree_mass(lo, hi);
      case Family::threshold: return degree_law_.moment_in(lo, hi);
    }
    return 0.0;
  }

  /// Points where the closed forms switch branch; excluded from pointwise
  /// comparisons as a null set.
  [[nodiscard]] bool is_breakpoint(double x) const {
    if (x == 0.0 || x == 1.0) return true;
    return family_.family() == Family::counterexample && x == 0.5;
  }

 private:
  AnalyticGraphon family_;
  ExactLaw degree_law_;
  ExactLaw level_law_;
  double level_const_ = 0.0;
  Verdict expected_ = Verdict::no_contradiction;
};

struct ProofStepReport {
  std::string id;
  std::string claim;
  double claimed = 0.0;   // reference value at the worst point
  double computed = 0.0;  // computed value at the worst point
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ContradictionCertificate {
  EmpiricalDistribution law_h;
  EmpiricalDistribution law_h1;
  std::optional<double> forced_h1;  // set when the forced h₁ is a.e. constant
  double tv_distance = 0.0;
  double tv_resolution = 0.0;
  Verdict verdict = Verdict::no_contradiction;
  std::string statement;
};

struct VerifyConfig {
  std::size_t m = kDefaultResolution;
  std::size_t degree_points = 10'000;
  std::size_t mass_pairs = 200;
  std::uint64_t seed = 20240001;
  int eps_min_exp = 4;
  int eps_max_exp = 10;
  int eps_check_exp = 6;
  double eps_check_tolerance = 0.01;
  double degree_tolerance = 1e-10;
  double level_tolerance = 1e-12;
  std::size_t degree_bins = 64;
  double tv_resolution = 0.01;
  int certificate_eps_exp = 6;
  /// a.e. knob: sets of measure ≤ exceptional/m are ignored, and degree
  /// values heavier than that are treated as atoms of the degree law.
  double exceptional = 8.0;
};

struct VerifyReport {
  std::string graphon;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::vector<ProofStepReport> steps;
  ContradictionCertificate certificate;
  Verdict expected = Verdict::no_contradiction;

  [[nodiscard]] bool all_steps_pass() const {
    return std::all_of(steps.begin(), steps.end(), [](const ProofStepReport& s) { return s.pass; });
  }
  [[nodiscard]] bool verdict_matches() const { return certificate.verdict == expected; }
  [[nodiscard]] bool ok() const { return all_steps_pass() && verdict_matches(); }
};

namespace detail {

inline ProofStepReport make_step(std::string id, std::string claim, double claimed, double computed,
                                 double tol, std::string detail = {}) {
  ProofStepReport r{std::move(id), std::move(claim), claimed, computed, tol, false, std::move(detail)};
  r.pass = std::fabs(claimed - computed) <= tol;
  return r;
}

}  // namespace detail

/// Forced h₁ from data: sort sample points by degree, cut the ranks into
/// chunks of mass ε (the x-intervals of an increasing rearrangement) and
/// average h on each. Points on heavy degree atoms are left unforced and keep
/// their own h.
inline ContradictionCertificate emit_contradiction(const DegreeLevelSamples& s, const VerifyConfig& cfg = {}) {
  const std::size_t m = s.size();
  const auto& deg = s.degree.values;
  const auto& lev = s.level.values;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deg[a] < deg[b]; });

  std::vector<bool> atom(m, false);
  const double heavy = cfg.exceptional / static_cast<double>(m);
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j < m && deg[order[j]] == deg[order[i]]) ++j;
    if (static_cast<double>(j - i) / static_cast<double>(m) > heavy)
      for (std::size_t r = i; r < j; ++r) atom[order[r]] = true;
    i = j;
  }

  const std::size_t chunk = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ldexp(static_cast<double>(m), -cfg.certificate_eps_exp)));
  std::vector<double> h1(lev);
  std::vector<double> forced_values;
  for (std::size_t start = 0; start < m; start += chunk) {
    const std::size_t end = std::min(m, start + chunk);
    ExactSum acc;
    std::size_t count = 0;
    for (std::size_t r = start; r < end; ++r)
      if (!atom[order[r]]) {
        acc.add(lev[order[r]]);
        ++count;
      }
    if (count == 0) continue;
    const double mean = acc.value() / static_cast<double>(count);
    for (std::size_t r = start; r < end; ++r)
      if (!atom[order[r]]) {
        h1[order[r]] = mean;
        forced_values.push_back(mean);
      }
  }

  ContradictionCertificate c;
  c.law_h = EmpiricalDistribution::from_samples(lev);
  c.law_h1 = EmpiricalDistribution::from_samples(h1);
  c.tv_resolution = cfg.tv_resolution;
  c.tv_distance = tv_distance(c.law_h, c.law_h1, cfg.tv_resolution);
  if (!forced_values.empty()) {
    const double mean = exact_sum(forced_values) / static_cast<double>(forced_values.size());
    const bool flat = std::all_of(forced_values.begin(), forced_values.end(),
                                  [&](double v) { return std::fabs(v - mean) <= cfg.tv_resolution; });
    if (flat) c.forced_h1 = mean;
  }
  c.verdict = c.tv_distance > 0.5 ? Verdict::contradiction : Verdict::no_contradiction;
  if (c.verdict == Verdict::contradiction) {
    c.statement =
        "The level functional h and the value forced on h1 by any increasing degree function have "
        "disjoint laws (TV > 1/2). No graphon equivalent to this one has a weakly increasing "
        "degree function.";
  } else {
    c.statement =
        "The law of h is compatible with the h1 forced by the increasing rearrangement of the "
        "degree law; this check finds no obstruction to an increasing degree function.";
  }
  return c;
}

/// Runs every step of the no-increasing-degree argument numerically for the
/// graphon family pulled back along phi (identity by default).
class ProofPipeline {
 public:
  ProofPipeline(AnalyticGraphon family, MeasurePreservingMap phi = {}, VerifyConfig cfg = {})
      : claims_(family), phi_(std::move(phi)), cfg_(cfg),
        subject_(pullback(GraphonHandle(family), phi_)) {}

  [[nodiscard]] const GraphonHandle& subject() const { return subject_; }
  [[nodiscard]] const FamilyClaims& claims() const { return claims_; }

  /// Sample points of the pipeline, computed once.
  const DegreeLevelSamples& samples() {
    if (!samples_) samples_ = degree_level_samples(subject_, cfg_.m, 0.0);
    return *samples_;
  }

  [[nodiscard]] double tol_law() const { return 2.0 / static_cast<double>(cfg_.m); }

  ProofStepReport check_degree_formula() {
    const std::size_t N = cfg_.degree_points;
    double worst = -1.0, at = 0.0, claimed = 0.0, computed = 0.0;
    std::size_t excluded = 0;
    for (std::size_t k = 0; k < N; ++k) {
      const Rational x = detail::midpoint(k, N);
      const double u = phi_.apply(x).to_double();
      if (claims_.is_breakpoint(u)) {
        ++excluded;
        continue;
      }
      const double ref = claims_.degree(u);
      const double got = subject_.degree_by_quadrature(x);
      const double err = std::fabs(ref - got);
      if (err > worst) {
        worst = err;
        at = x.to_double();
        claimed = ref;
        computed = got;
      }
    }
    return detail::make_step("degree_formula", "quadrature degree equals the closed-form degree function",
                             claimed, computed, cfg_.degree_tolerance,
                             "worst x=" + fmt(at) + ", points=" + std::to_string(N) +
                                 ", excluded=" + std::to_string(excluded));
  }

  ProofStepReport check_degree_law() {
    const auto law = degree_law(samples().degree);
    const auto ks = ks_distance(law, claims_.degree_law());
    return detail::make_step("degree_law", "Leb{D <= r} matches the asserted degree law",
                             ks.reference, ks.empirical, tol_law(),
                             "sup gap at r=" + fmt(ks.at) + ", m=" + std::to_string(cfg_.m));
  }

  ProofStepReport check_forced_degree() {
    const auto q = monotone_rearrangement(degree_law(samples().degree));
    const auto gap = q.sup_distance([this](double x) { return claims_.forced_degree(x); });
    return detail::make_step("forced_degree", "increasing rearrangement of the degree law",
                             gap.reference, gap.empirical, tol_law(),
                             "sup gap at x=" + fmt(gap.at));
  }

  ProofStepReport check_h_functional() {
    const auto& s = samples();
    double worst = -1.0, claimed = 0.0, computed = 0.0, at = 0.0;
    std::size_t outside = 0;
    const bool atomic = claims_.level_law().is_atomic();
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double u = phi_.apply(detail::midpoint(k, s.size())).to_double();
      const double got = s.level.values[k];
      if (atomic) {
        const auto& pts = claims_.level_law().points();
        const bool member = std::any_of(pts.begin(), pts.end(), [got](const auto& p) { return p.at == got; });
        outside += member ? 0 : 1;
      }
      if (claims_.is_breakpoint(u)) continue;
      const double ref = claims_.level(u);
      if (std::fabs(ref - got) > worst) {
        worst = std::fabs(ref - got);
        claimed = ref;
        computed = got;
        at = s.level.x(k);
      }
    }
    auto r = detail::make_step("h_functional", "h matches its closed form pointwise", claimed, computed,
                               cfg_.level_tolerance,
                               "worst x=" + fmt(at) + ", values outside asserted support=" +
                                   std::to_string(outside));
    r.pass = r.pass && outside == 0;
    return r;
  }

  ProofStepReport check_h_law() {
    const auto ks = ks_distance(level_law(samples().level), claims_.level_law());
    return detail::make_step("h_law", "law of h (e.g. measure{h = 1/2})", ks.reference, ks.empirical,
                             1.0 / static_cast<double>(cfg_.m), "sup gap at s=" + fmt(ks.at));
  }

  ProofStepReport check_conditional_mass() {
    CounterRng rng(cfg_.seed, 0xc0ffee);
    double worst = -1.0, claimed = 0.0, computed = 0.0, wa = 0.0, wb = 0.0;
    for (std::size_t p = 0; p < cfg_.mass_pairs; ++p) {
      double a = rng.uniform(), b = rng.uniform();
      if (a > b) std::swap(a, b);
      const double lo = claims_.forced_degree(a), hi = claims_.forced_degree(b);
      const double got = conditional_mass(samples(), lo, hi);
      const double ref = claims_.level_mass(lo, hi);
      if (std::fabs(got - ref) > worst) {
        worst = std::fabs(got - ref);
        claimed = ref;
        computed = got;
        wa = a;
        wb = b;
      }
    }
    return detail::make_step("conditional_mass", "integral of h over {D1(a) < D < D1(b)}", claimed, computed,
                             4.0 / static_cast<double>(cfg_.m),
                             std::to_string(cfg_.mass_pairs) + " pairs, worst (a,b)=(" + fmt(wa) + "," +
                                 fmt(wb) + ")");
  }

  /// Binned conditional means of h over x-bins (a, a+ε) of the forced
  /// increasing degree function, interior bins only.
  struct BinCheck {
    double worst_ratio = 0.0;
    double claimed = 0.0, computed = 0.0, tolerance = 0.0, eps = 0.0, a = 0.0;
    std::size_t bins = 0, empty = 0;
  };

  BinCheck shrinking_bins(int exp, double tolerance) {
    const double eps = std::ldexp(1.0, -exp);
    const auto count = static_cast<std::size_t>(std::llround(1.0 / eps));
    BinCheck out;
    out.eps = eps;
    out.tolerance = tolerance;
    for (std::size_t j = 1; j + 1 < count; ++j) {
      const double a = static_cast<double>(j) * eps;
      const double lo = claims_.forced_degree(a), hi = claims_.forced_degree(a + eps);
      const auto bin = conditional_mean(samples(), lo, hi);
      const double mass = claims_.degree_mass(lo, hi);
      if (bin.empty || mass <= 0.0) {
        ++out.empty;
        continue;
      }
      ++out.bins;
      const double ref = claims_.level_mass(lo, hi) / mass;
      const double ratio = std::fabs(bin.mean_h - ref) / tolerance;
      if (ratio >= out.worst_ratio) {
        out.worst_ratio = ratio;
        out.claimed = ref;
        out.computed = bin.mean_h;
        out.a = a;
      }
    }
    return out;
  }

  ProofStepReport check_forced_h1() {
    const auto b = shrinking_bins(cfg_.eps_check_exp, cfg_.eps_check_tolerance);
    return detail::make_step("forced_h1", "shrinking-bin means of h equal the forced h1", b.claimed, b.computed,
                             b.tolerance,
                             "eps=2^-" + std::to_string(cfg_.eps_check_exp) + ", bins=" + std::to_string(b.bins) +
                                 ", empty=" + std::to_string(b.empty) + ", worst a=" + fmt(b.a));
  }

  /// Convergence table over ε = 2^-4 … 2^-10 with per-bin tolerance 4/(ε·m).
  std::vector<BinCheck> convergence_table() {
    std::vector<BinCheck> table;
    for (int e = cfg_.eps_min_exp; e <= cfg_.eps_max_exp; ++e)
      table.push_back(shrinking_bins(e, 4.0 / (std::ldexp(1.0, -e) * static_cast<double>(cfg_.m))));
    return table;
  }

  ProofStepReport check_differentiation() {
    const auto table = convergence_table();
    const auto worst = std::max_element(table.begin(), table.end(), [](const BinCheck& x, const BinCheck& y) {
      return x.worst_ratio < y.worst_ratio;
    });
    std::string detail = "worst ratio " + fmt(worst->worst_ratio) + " at eps=" + fmt(worst->eps);
    return detail::make_step("lebesgue_differentiation", "bin means converge as eps shrinks", worst->claimed,
                             worst->computed, worst->tolerance, detail);
  }

  ProofStepReport check_conditional_given_degree() {
    const auto rep = conditional_h_given_degree(samples(), cfg_.degree_bins);
    double worst = -1.0, claimed = 0.0, computed = 0.0;
    for (const auto& b : rep.bins) {
      const double mass = claims_.degree_mass(b.lo, b.hi);
      if (mass <= 0.0) continue;
      const double ref = claims_.level_mass(b.lo, b.hi) / mass;
      if (std::fabs(ref - b.mean_h) > worst) {
        worst = std::fabs(ref - b.mean_h);
        claimed = ref;
        computed = b.mean_h;
      }
    }
    return detail::make_step("conditional_h_given_degree", "E[h | D in bin] over equal-width degree bins",
                             claimed, computed, cfg_.eps_check_tolerance,
                             "interior bins=" + std::to_string(rep.bins.size()) +
                                 ", empty=" + std::to_string(rep.empty_bins.size()));
  }

  ContradictionCertificate certificate() { return emit_contradiction(samples(), cfg_); }

  VerifyReport run() {
    VerifyReport r;
    r.graphon = subject_.describe();
    r.m = cfg_.m;
    r.seed = cfg_.seed;
    r.expected = claims_.expected_verdict();
    r.steps = {check_degree_formula(), check_degree_law(),       check_forced_degree(),
               check_h_functional(),   check_h_law(),            check_conditional_mass(),
               check_forced_h1(),      check_differentiation(),  check_conditional_given_degree()};
    r.certificate = certificate();
    return r;
  }

 private:
  static std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  }

  FamilyClaims claims_;
  MeasurePreservingMap phi_;
  VerifyConfig cfg_;
  GraphonHandle subject_;
  std::optional<DegreeLevelSamples> samples_;
};

// ---------------------------------------------------------------------------
// Divergence of degree-sorted discretizations

struct DivergenceRow {
  std::size_t coarse = 0, fine = 0;
  double l1 = 0.0;
};

/// L¹ distance between degree_sort(discretize(W, n_i)) and the same at
/// n_{i+1}, for consecutive entries of an increasing list.
inline std::vector<DivergenceRow> sorted_discretization_divergence(
    const GraphonHandle& w, const std::vector<std::size_t>& n_list,
    DiscretizeMode mode = DiscretizeMode::cell_average) {
  if (n_list.size() < 2) throw DomainError("divergence needs at least two grid sizes");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0 || n_list[i] > kMaxGridSize) throw CapacityError("grid sizes must lie in [1, 4096]");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw DomainError("grid sizes must be strictly increasing");
  }
  std::vector<DivergenceRow> rows;
  GridGraphon prev = degree_sort(discretize(w, n_list[0], mode)).sorted;
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    GridGraphon cur = degree_sort(discretize(w, n_list[i], mode)).sorted;
    rows.push_back({n_list[i - 1], n_list[i], l1_distance(prev, cur)});
    prev = std::move(cur);
  }
  return rows;
}

}  // namespace graphonlab
