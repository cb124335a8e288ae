#pragma once

// Hidden-variable model of wave/particle character.
//
// Each photon carries lambda in {p, w} (particle or wave), fixed at the
// source. The model has five free probabilities:
//
//   a = P(lambda = p)
//   b = P(A = 0 | p),           c = P(A = 0 | w)
//   d = P(S = 0 | A = 0, w),    e = P(S = 0 | A = 1, p)
//
// while a particle in the open interferometer gives S uniformly and a wave in
// the closed interferometer gives S = 0 with probability beta (the observed
// conditional fringe). The model reproduces the observed statistics iff
//
//   c(1-a)(d - 1/2) = 0,   a(1-b)(e - beta) = 0,   ab + c(1-a) - p0 = 0.
//
// This header builds the model, enumerates every exact solution manifold of
// that system, labels why each one is physically inconsistent, and searches
// numerically for a single parameter vector that works across several
// settings at once.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qdc/circuit.h"
#include "qdc/errors.h"
#include "qdc/noise.h"

namespace qdc {

struct HvParameters {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;

  std::array<double, 5> as_array() const { return {a, b, c, d, e}; }

  static HvParameters from_array(const std::array<double, 5>& x) { return {x[0], x[1], x[2], x[3], x[4]}; }

  void validate() const {
    for (double x : as_array()) {
      if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("hidden-variable parameters must lie in [0, 1]");
    }
  }

  friend auto operator<=>(const HvParameters&, const HvParameters&) = default;
};

inline std::string to_string(const HvParameters& p) {
  return "(" + std::to_string(p.a) + ", " + std::to_string(p.b) + ", " + std::to_string(p.c) + ", " +
         std::to_string(p.d) + ", " + std::to_string(p.e) + ")";
}

class DerivedQuantities {
 public:
  double eta;
  double p0;  // P(A = 0)
  double p1;  // P(A = 1)

  bool has_beta() const { return beta_.has_value(); }

  // P(S = 0 | A = 1) of the observed statistics.
  double beta() const {
    if (!beta_) throw DegenerateSetting("beta undefined: P(A = 1) vanishes (epsilon = 1, alpha = 0)");
    return *beta_;
  }

  DerivedQuantities(double eta_, double p0_, double p1_, std::optional<double> beta_value)
      : eta(eta_), p0(p0_), p1(p1_), beta_(beta_value) {}

 private:
  std::optional<double> beta_;
};

inline DerivedQuantities derived_quantities(const ExperimentSetting& setting) {
  const double eta = setting.eta();
  const double eps = setting.epsilon();
  const double c2 = std::pow(std::cos(setting.alpha()), 2);
  const double s2 = std::pow(std::sin(setting.alpha()), 2);
  const double p0 = 2 * eta + eps * c2;
  const double p1 = 2 * eta + eps * s2;
  std::optional<double> beta;
  if (p1 > 1e-12) {
    beta = std::clamp((eta + eps * std::pow(std::cos(setting.phi() / 2), 2) * s2) / (1.0 - p0), 0.0, 1.0);
  }
  return {eta, p0, p1, beta};
}

// max_phi beta - min_phi beta = epsilon sin^2(alpha) / p1. Zero means wave and
// particle statistics cannot be told apart at this (alpha, epsilon).
inline double beta_fringe_amplitude(const ExperimentSetting& setting) {
  const auto q = derived_quantities(setting);
  if (q.p1 <= 1e-12) throw DegenerateSetting("P(A = 1) vanishes");
  return setting.epsilon() * std::pow(std::sin(setting.alpha()), 2) / q.p1;
}

namespace detail {

// Observed statistics and beta for one setting, precomputed.
struct Target {
  std::array<double, 4> p{};
  double p0 = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;

  explicit Target(const ExperimentSetting& setting) {
    const auto q = derived_quantities(setting);
    if (!q.has_beta()) throw DegenerateSetting("P(A = 1) vanishes; the model's wave conditional is undefined");
    p = noisy_joint_distribution(setting).values();
    p0 = q.p0;
    beta = q.beta();
    epsilon = setting.epsilon();
  }
};

// Sum over lambda of P(S|A,lambda) P(A|lambda) P(lambda), outcome order 00,01,10,11.
inline std::array<double, 4> model_probabilities(double a, double b, double c, double d, double e, double beta) {
  const double particle_open = a * b;
  const double wave_open = c * (1.0 - a);
  const double particle_closed = a * (1.0 - b);
  const double wave_closed = (1.0 - a) * (1.0 - c);
  return {0.5 * particle_open + wave_open * d, particle_closed * e + wave_closed * beta,
          0.5 * particle_open + wave_open * (1.0 - d), particle_closed * (1.0 - e) + wave_closed * (1.0 - beta)};
}

inline double residual(const HvParameters& x, const Target& t) {
  const auto m = model_probabilities(x.a, x.b, x.c, x.d, x.e, t.beta);
  double r = 0.0;
  for (int i = 0; i < 4; ++i) r = std::max(r, std::abs(m[i] - t.p[i]));
  return r;
}

}  // namespace detail

inline JointDistribution model_distribution(const HvParameters& params, const ExperimentSetting& setting) {
  params.validate();
  const detail::Target t(setting);
  return JointDistribution(detail::model_probabilities(params.a, params.b, params.c, params.d, params.e, t.beta));
}

// max over outcomes of |P_model - P_observed|.
inline double residual(const HvParameters& params, const ExperimentSetting& setting) {
  params.validate();
  return detail::residual(params, detail::Target(setting));
}

inline std::array<double, 3> constraint_triple(const HvParameters& x, const ExperimentSetting& setting) {
  x.validate();
  const detail::Target t(setting);
  return {x.c * (1.0 - x.a) * (x.d - 0.5), x.a * (1.0 - x.b) * (x.e - t.beta), x.a * x.b + x.c * (1.0 - x.a) - t.p0};
}

enum class RejectionLabel : std::uint8_t {
  trivial_degenerate,
  wave_acts_as_particle,
  particle_acts_as_wave,
  perfect_correlation,
};

inline constexpr std::array<RejectionLabel, 4> kAllLabels{
    RejectionLabel::trivial_degenerate, RejectionLabel::wave_acts_as_particle,
    RejectionLabel::particle_acts_as_wave, RejectionLabel::perfect_correlation};

inline const char* label_name(RejectionLabel l) {
  switch (l) {
    case RejectionLabel::trivial_degenerate: return "TRIVIAL_DEGENERATE";
    case RejectionLabel::wave_acts_as_particle: return "WAVE_ACTS_AS_PARTICLE";
    case RejectionLabel::particle_acts_as_wave: return "PARTICLE_ACTS_AS_WAVE";
    case RejectionLabel::perfect_correlation: return "PERFECT_CORRELATION";
  }
  return "?";
}

class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<RejectionLabel> labels) {
    for (auto l : labels) insert(l);
  }

  void insert(RejectionLabel l) { bits_ |= bit(l); }
  bool contains(RejectionLabel l) const { return (bits_ & bit(l)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (auto l : kAllLabels)
      if (contains(l)) out.emplace_back(label_name(l));
    return out;
  }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  static std::uint8_t bit(RejectionLabel l) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(l)); }
  std::uint8_t bits_ = 0;
};

// Labels a near-solution (residual < tol) of the constraint system.
//
// The masses c(1-a) (wave photons in the open interferometer) and a(1-b)
// (particle photons in the closed one) decide which factor of each product
// constraint carries the solution:
//   WAVE_ACTS_AS_PARTICLE  c(1-a) > tol and c(1-a)|d - 1/2| < tol
//   PARTICLE_ACTS_AS_WAVE  a(1-b) > tol and a(1-b)|e - beta| < tol
//   PERFECT_CORRELATION    c(1-a) <= tol and a(1-b) <= tol, i.e. lambda fixes A
//   TRIVIAL_DEGENERATE     model ancilla marginal within tol of 0 or 1
// The first two only apply when beta actually varies with phi (wave and
// particle statistics distinguishable), the third only when epsilon > tol
// (the ancilla marginal then depends on alpha). Behaviour tolerances are in
// probability mass so the rules partition every near-solution.
inline LabelSet classify(const HvParameters& x, const ExperimentSetting& setting, double tol = 1e-6) {
  x.validate();
  const detail::Target t(setting);
  const double r = detail::residual(x, t);
  if (!(r < tol)) throw NotASolution("residual " + std::to_string(r) + " is not below " + std::to_string(tol));

  const bool distinguishable = beta_fringe_amplitude(setting) > tol;
  const double wave_open = x.c * (1.0 - x.a);
  const double particle_closed = x.a * (1.0 - x.b);
  const double marginal = x.a * x.b + wave_open;

  LabelSet out;
  if (distinguishable && wave_open > tol && wave_open * std::abs(x.d - 0.5) < tol) {
    out.insert(RejectionLabel::wave_acts_as_particle);
  }
  if (distinguishable && particle_closed > tol && particle_closed * std::abs(x.e - t.beta) < tol) {
    out.insert(RejectionLabel::particle_acts_as_wave);
  }
  if (t.epsilon > tol && wave_open <= tol && particle_closed <= tol) {
    out.insert(RejectionLabel::perfect_correlation);
  }
  if (marginal < tol || marginal > 1.0 - tol) out.insert(RejectionLabel::trivial_degenerate);
  return out;
}

enum class BranchKind : std::uint8_t {
  no_particle_no_open_wave,    // a = 0, c = 0
  all_particle_all_open,       // a = 1, b = 1
  perfect_correlation,         // c = 0, b = 1, a = p0
  all_wave_open_particle,      // a = 0, c = p0, d = 1/2
  mixed_open_particle,         // b = 1, c > 0, a + c(1-a) = p0, d = 1/2
  particle_closed_wave,        // c = 0, e = beta, ab = p0, a > p0
  all_particle_closed_wave,    // a = 1, b = p0, e = beta
  both_mimic,                  // d = 1/2, e = beta, ab + c(1-a) = p0
};

// One exact solution manifold of the constraint system at a fixed setting.
struct SolutionBranch {
  BranchKind kind;
  std::string name;
  std::vector<std::string> constraints;
  std::array<std::string, 5> family;  // how each of a..e is fixed, or "free"
  LabelSet labels;
  bool admissible = true;  // false: the constraints force p0 or p1 to vanish
  double p0 = 0.0;
  double beta = 0.0;

  // Maps u in [0,1]^5 onto a member of the family; nullopt for inadmissible branches.
  std::optional<HvParameters> member(const std::array<double, 5>& u) const {
    switch (kind) {
      case BranchKind::no_particle_no_open_wave:
      case BranchKind::all_particle_all_open:
        return std::nullopt;
      case BranchKind::perfect_correlation:
        return HvParameters{p0, 1.0, 0.0, u[3], u[4]};
      case BranchKind::all_wave_open_particle:
        return HvParameters{0.0, u[1], p0, 0.5, u[4]};
      case BranchKind::mixed_open_particle: {
        const double c = p0 * u[2];
        return HvParameters{std::clamp((p0 - c) / (1.0 - c), 0.0, 1.0), 1.0, c, 0.5, u[4]};
      }
      case BranchKind::particle_closed_wave: {
        const double a = p0 + (1.0 - p0) * u[0];
        return HvParameters{a, std::clamp(p0 / a, 0.0, 1.0), 0.0, u[3], beta};
      }
      case BranchKind::all_particle_closed_wave:
        return HvParameters{1.0, p0, u[2], u[3], beta};
      case BranchKind::both_mimic: {
        const double a = std::min(u[0], 1.0 - 1e-9);
        if (a == 0.0) return HvParameters{0.0, u[1], p0, 0.5, beta};
        const double lo = std::max(0.0, (p0 - 1.0 + a) / a);
        const double hi = std::min(1.0, p0 / a);
        const double b = lo + (hi - lo) * u[1];
        const double c = std::clamp((p0 - a * b) / (1.0 - a), 0.0, 1.0);
        return HvParameters{a, b, c, 0.5, beta};
      }
    }
    return std::nullopt;
  }
};

// All exact solution manifolds at a setting with epsilon > 0 and
// 0 < alpha < pi/2. The first product constraint vanishes through c = 0,
// a = 1 or d = 1/2, the second through a = 0, b = 1 or e = beta; every
// consistent pairing appears below exactly once (boundary overlaps aside).
inline std::vector<SolutionBranch> enumerate_branches(const ExperimentSetting& setting) {
  if (!(setting.epsilon() > 0.0)) throw InvalidArgument("enumerate_branches requires epsilon > 0");
  if (!(setting.alpha() > 0.0 && setting.alpha() < kPi / 2)) {
    throw InvalidArgument("enumerate_branches requires 0 < alpha < pi/2");
  }
  const auto q = derived_quantities(setting);
  const double p0 = q.p0;
  const double beta = q.beta();
  using L = RejectionLabel;

  std::vector<SolutionBranch> out;
  auto add = [&](BranchKind kind, std::string name, std::vector<std::string> constraints,
                 std::array<std::string, 5> family, LabelSet labels, bool admissible) {
    out.push_back({kind, std::move(name), std::move(constraints), std::move(family), labels, admissible, p0, beta});
  };

  add(BranchKind::no_particle_no_open_wave, "no particles, no open-arm waves", {"a = 0", "c = 0"},
      {"0", "free", "0", "free", "free"}, {L::trivial_degenerate}, false);
  add(BranchKind::all_particle_all_open, "all particles, always open", {"a = 1", "b = 1"},
      {"1", "1", "free", "free", "free"}, {L::trivial_degenerate}, false);
  add(BranchKind::perfect_correlation, "lambda determines the ancilla", {"c = 0", "b = 1", "a = p0"},
      {"p0", "1", "0", "free", "free"}, {L::perfect_correlation}, true);
  add(BranchKind::all_wave_open_particle, "all waves, open arm shows particle statistics",
      {"a = 0", "c = p0", "d = 1/2"}, {"0", "free", "p0", "1/2", "free"}, {L::wave_acts_as_particle}, true);
  add(BranchKind::mixed_open_particle, "mixed source, open-arm waves show particle statistics",
      {"b = 1", "c > 0", "a + c(1-a) = p0", "d = 1/2"}, {"(p0-c)/(1-c)", "1", "(0, p0]", "1/2", "free"},
      {L::wave_acts_as_particle}, true);
  add(BranchKind::particle_closed_wave, "closed-arm particles show the wave fringe",
      {"c = 0", "a > 0", "b < 1", "ab = p0", "e = beta"}, {"(p0, 1]", "p0/a", "0", "free", "beta"},
      {L::particle_acts_as_wave}, true);
  add(BranchKind::all_particle_closed_wave, "all particles, closed-arm particles show the wave fringe",
      {"a = 1", "b = p0", "e = beta"}, {"1", "p0", "free", "free", "beta"}, {L::particle_acts_as_wave}, true);
  add(BranchKind::both_mimic, "both behaviours mimic each other",
      {"a > 0", "b < 1", "c > 0", "ab + c(1-a) = p0", "d = 1/2", "e = beta"},
      {"(0, 1)", "free within marginal", "(p0-ab)/(1-a)", "1/2", "beta"},
      {L::wave_acts_as_particle, L::particle_acts_as_wave}, true);
  return out;
}

struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<HvParameters> witness;          // when feasible
  std::optional<double> min_max_residual;       // when infeasible
  HvParameters best;                            // minimizer found either way
  double best_residual = 0.0;
  // Residual every single parameter vector must incur from the ancilla
  // marginal alone: epsilon * (max cos^2 alpha - min cos^2 alpha) / 4.
  double marginal_lower_bound = 0.0;
  std::vector<ExperimentSetting> settings_used;
  int grid_density = 0;
  int refine_steps = 0;
  double tol = 0.0;
};

namespace detail {

inline double max_residual(const HvParameters& x, const std::vector<Target>& targets) {
  double r = 0.0;
  for (const auto& t : targets) r = std::max(r, residual(x, t));
  return r;
}

struct GridBest {
  double value = std::numeric_limits<double>::infinity();
  HvParameters params;
};

// Exhaustive scan of the grid points with first coordinate index in
// [a_begin, a_end), in lexicographic order; strict improvement only, so the
// lexicographically smallest minimizer wins ties. The A = 0 outcomes depend
// on (a, b, c, d) and the A = 1 outcomes on (a, b, c, e), so per (a, b, c)
// the two halves are tabulated once and every (d, e) pair combined.
inline GridBest scan_grid(const std::vector<Target>& targets, const std::vector<double>& axis, std::size_t a_begin,
                          std::size_t a_end) {
  const std::size_t n = axis.size();
  GridBest best;
  std::vector<double> open_dev(n), closed_dev(n);
  for (std::size_t ia = a_begin; ia < a_end; ++ia) {
    const double a = axis[ia];
    for (std::size_t ib = 0; ib < n; ++ib) {
      const double b = axis[ib];
      for (std::size_t ic = 0; ic < n; ++ic) {
        const double c = axis[ic];
        for (std::size_t k = 0; k < n; ++k) {
          double open = 0.0, closed = 0.0;
          for (const auto& t : targets) {
            const auto m = model_probabilities(a, b, c, axis[k], axis[k], t.beta);
            open = std::max({open, std::abs(m[0] - t.p[0]), std::abs(m[2] - t.p[2])});
            closed = std::max({closed, std::abs(m[1] - t.p[1]), std::abs(m[3] - t.p[3])});
          }
          open_dev[k] = open;
          closed_dev[k] = closed;
        }
        for (std::size_t id = 0; id < n; ++id) {
          if (open_dev[id] >= best.value) continue;
          for (std::size_t ie = 0; ie < n; ++ie) {
            const double v = std::max(open_dev[id], closed_dev[ie]);
            if (v < best.value) {
              best.value = v;
              best.params = {a, b, c, axis[id], axis[ie]};
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace detail

// Searches for one hidden-variable parameter vector reproducing the observed
// statistics at every setting simultaneously (the source cannot know alpha
// or phi in advance). Grid of grid_density points per axis, then
// refine_steps rounds of coordinate descent from the best grid point.
// Feasible iff the final min-max residual is below tol.
inline FeasibilityVerdict feasibility_scan(const std::vector<ExperimentSetting>& settings, int grid_density = 21,
                                           int refine_steps = 30, double tol = 1e-9, unsigned workers = 0) {
  if (settings.empty()) throw InvalidArgument("feasibility_scan needs at least one setting");
  if (grid_density < 2) throw InvalidArgument("grid_density must be at least 2");
  if (refine_steps < 0) throw InvalidArgument("refine_steps must be non-negative");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  const double eps = settings.front().epsilon();
  for (const auto& s : settings) {
    if (s.epsilon() != eps) throw InvalidArgument("all settings must share one epsilon");
  }
  if (eps > 0.0) {
    auto distinct = [&](auto field) {
      std::vector<double> v;
      for (const auto& s : settings) v.push_back(field(s));
      std::sort(v.begin(), v.end());
      return static_cast<int>(std::unique(v.begin(), v.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }) -
                              v.begin());
    };
    if (distinct([](const ExperimentSetting& s) { return s.alpha(); }) < 2 ||
        distinct([](const ExperimentSetting& s) { return s.phi(); }) < 3) {
      throw InvalidArgument("feasibility_scan needs at least 2 distinct alpha and 3 distinct phi values when epsilon > 0");
    }
  }

  std::vector<detail::Target> targets;
  targets.reserve(settings.size());
  for (const auto& s : settings) targets.emplace_back(s);

  std::vector<double> axis(grid_density);
  for (int i = 0; i < grid_density; ++i) axis[i] = static_cast<double>(i) / (grid_density - 1);

  const unsigned hw = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t chunks = std::min<std::size_t>(hw, axis.size());
  std::vector<detail::GridBest> partial(chunks);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < chunks; ++w) {
      const std::size_t begin = axis.size() * w / chunks;
      const std::size_t end = axis.size() * (w + 1) / chunks;
      pool.emplace_back([&, w, begin, end] { partial[w] = detail::scan_grid(targets, axis, begin, end); });
    }
  }
  // Chunks are in increasing a order, so the first strict minimum is the
  // lexicographically smallest.
  detail::GridBest best;
  for (const auto& p : partial)
    if (p.value < best.value) best = p;

  std::array<double, 5> x = best.params.as_array();
  double value = best.value;
  double step = 1.0 / (grid_density - 1);
  for (int it = 0; it < refine_steps; ++it) {
    bool improved = false;
    for (int k = 0; k < 5; ++k) {
      for (double dir : {-1.0, 1.0}) {
        auto y = x;
        y[k] = std::clamp(y[k] + dir * step, 0.0, 1.0);
        const double v = detail::max_residual(HvParameters::from_array(y), targets);
        if (v < value) {
          value = v;
          x = y;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  FeasibilityVerdict verdict;
  verdict.best = HvParameters::from_array(x);
  verdict.best_residual = value;
  verdict.feasible = value < tol;
  if (verdict.feasible) verdict.witness = verdict.best;
  else verdict.min_max_residual = value;
  double cmin = 1.0, cmax = 0.0;
  for (const auto& s : settings) {
    const double c2 = std::pow(std::cos(s.alpha()), 2);
    cmin = std::min(cmin, c2);
    cmax = std::max(cmax, c2);
  }
  verdict.marginal_lower_bound = eps * (cmax - cmin) / 4.0;
  verdict.settings_used = settings;
  verdict.grid_density = grid_density;
  verdict.refine_steps = refine_steps;
  verdict.tol = tol;
  return verdict;
}

}  // namespace qdc
