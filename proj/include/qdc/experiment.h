#pragma once

// Finite-statistics emulation: seeded multinomial shots, empirical
// frequencies and fringe visibility of the A = 1 (closed) branch.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Uniform doubles are built from the top 53 bits and
// binomials by counting Bernoulli trials, so counts are identical on every
// conforming platform (std::*_distribution is not used for that reason).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qdc/circuit.h"
#include "qdc/errors.h"
#include "qdc/noise.h"

namespace qdc {

struct ShotRecord {
  std::array<std::uint64_t, 4> counts{};  // outcomes 00, 01, 10, 11
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::optional<ExperimentSetting> setting;
};

namespace detail {

// splitmix64 finalizer; derives independent per-point seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

inline std::uint64_t binomial(std::mt19937_64& gen, std::uint64_t n, double q) {
  if (q <= 0.0) return 0;
  if (q >= 1.0) return n;
  std::uint64_t k = 0;
  for (std::uint64_t i = 0; i < n; ++i) k += uniform01(gen) < q ? 1 : 0;
  return k;
}

}  // namespace detail

// Multinomial draw by sequential binomial splitting: outcome i takes
// Binomial(remaining shots, p_i / (p_i + ... + p_3)).
inline ShotRecord sample_shots(const JointDistribution& j, std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw InvalidArgument("shots must be at least 1");
  std::mt19937_64 gen(seed);
  ShotRecord rec;
  rec.shots = static_cast<std::uint64_t>(shots);
  rec.seed = seed;
  std::uint64_t remaining = rec.shots;
  for (int i = 0; i < 3; ++i) {
    double tail = 0.0;
    for (int k = i; k < 4; ++k) tail += j[k];
    const double q = tail > 0.0 ? j[i] / tail : 0.0;
    rec.counts[i] = detail::binomial(gen, remaining, q);
    remaining -= rec.counts[i];
  }
  rec.counts[3] = remaining;
  return rec;
}

// Shots from the noisy statistics of a setting.
inline ShotRecord sample_shots(const ExperimentSetting& setting, std::int64_t shots, std::uint64_t seed) {
  auto rec = sample_shots(noisy_joint_distribution(setting), shots, seed);
  rec.setting = setting;
  return rec;
}

inline JointDistribution empirical_distribution(const ShotRecord& rec) {
  if (rec.shots < 1) throw InvalidArgument("record has no shots");
  std::array<double, 4> p{};
  for (int i = 0; i < 4; ++i) p[i] = static_cast<double>(rec.counts[i]) / static_cast<double>(rec.shots);
  return JointDistribution(p);
}

// Visibility of P(S=0 | A=1) over phi: epsilon sin^2 alpha / (2 eta + epsilon sin^2 alpha).
inline double analytic_visibility(double alpha, double epsilon) {
  const auto s = ExperimentSetting::create(alpha, 0.0, epsilon);
  const double wave = epsilon * std::pow(std::sin(s.alpha()), 2);
  const double p1 = 2 * s.eta() + wave;
  if (p1 <= 1e-12) throw DegenerateSetting("P(A = 1) vanishes; no closed-branch fringe");
  return wave / p1;
}

struct FringePoint {
  double phi = 0.0;
  std::uint64_t closed_events = 0;  // A = 1
  double p_s0_given_closed = 0.0;
  std::uint64_t open_events = 0;    // A = 0
  double p_s0_given_open = 0.0;
};

struct VisibilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int conditioned_on = 1;
  std::vector<FringePoint> points;
};

// Samples every phase point with seed mix64(seed ^ mix64(index)), conditions
// on A = 1 and forms (max - min)/(max + min) from the phi = 0 and phi = pi
// frequencies, with first-order binomial error propagation.
inline VisibilityEstimate estimate_visibility(double alpha, double epsilon, std::span<const double> phi_grid,
                                              std::int64_t shots_per_point, std::uint64_t seed) {
  if (phi_grid.size() < 5) throw InvalidArgument("phi grid needs at least 5 points");
  if (shots_per_point < 100) throw InvalidArgument("shots_per_point must be at least 100");
  constexpr double kMatch = 1e-9;
  std::optional<std::size_t> at_zero, at_pi;
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    const double phi = phi_grid[i];
    if (!(phi >= -kMatch && phi <= kPi + kMatch)) throw InvalidArgument("phi grid must lie within [0, pi]");
    if (std::abs(phi) <= kMatch && !at_zero) at_zero = i;
    if (std::abs(phi - kPi) <= kMatch && !at_pi) at_pi = i;
  }
  if (!at_zero || !at_pi) throw InvalidArgument("phi grid must include 0 and pi");

  VisibilityEstimate out;
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    const auto setting = ExperimentSetting::create(alpha, phi_grid[i], epsilon);
    const auto rec = sample_shots(setting, shots_per_point, detail::mix64(seed ^ detail::mix64(i)));
    FringePoint pt;
    pt.phi = phi_grid[i];
    pt.closed_events = rec.counts[outcome_index(0, 1)] + rec.counts[outcome_index(1, 1)];
    pt.open_events = rec.counts[outcome_index(0, 0)] + rec.counts[outcome_index(1, 0)];
    if (pt.closed_events == 0) throw InsufficientStatistics("no A = 1 events at phi = " + std::to_string(pt.phi));
    pt.p_s0_given_closed = static_cast<double>(rec.counts[outcome_index(0, 1)]) / pt.closed_events;
    if (pt.open_events > 0) pt.p_s0_given_open = static_cast<double>(rec.counts[outcome_index(0, 0)]) / pt.open_events;
    out.points.push_back(pt);
  }

  const auto& p0 = out.points[*at_zero];
  const auto& pp = out.points[*at_pi];
  const double x = p0.p_s0_given_closed, y = pp.p_s0_given_closed;
  const double sum = x + y;
  if (sum <= 0.0) throw InsufficientStatistics("no S = 0 events in the closed branch at phi = 0 or pi");
  const double hi = std::max(x, y), lo = std::min(x, y);
  out.value = std::clamp((hi - lo) / sum, 0.0, 1.0);
  const double var_x = x * (1 - x) / p0.closed_events;
  const double var_y = y * (1 - y) / pp.closed_events;
  const double dx = 2 * y / (sum * sum), dy = 2 * x / (sum * sum);
  out.std_error = std::sqrt(dx * dx * var_x + dy * dy * var_y);
  return out;
}

// n points evenly spaced on [0, pi], endpoints included.
inline std::vector<double> phase_grid(int n) {
  if (n < 2) throw InvalidArgument("phase grid needs at least 2 points");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = i == n - 1 ? kPi : kPi * i / (n - 1);
  return g;
}

}  // namespace qdc
