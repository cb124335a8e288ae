#pragma once

// The delayed-choice interferometer: system qubit S (the photon's path) and
// ancilla A (the quantum control of the second beam splitter; |0> open,
// |1> closed).

#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "qdc/errors.h"
#include "qdc/qcore.h"

namespace qdc {

// The experimenter's knobs. alpha in [0, pi/2], epsilon in [0, 1], phi is
// stored canonicalized to [0, 2 pi).
class ExperimentSetting {
 public:
  static ExperimentSetting create(double alpha, double phi, double epsilon = 1.0) {
    if (!std::isfinite(alpha) || alpha < -1e-12 || alpha > kPi / 2 + 1e-12) {
      throw InvalidArgument("alpha must lie in [0, pi/2], got " + std::to_string(alpha));
    }
    if (!std::isfinite(phi)) throw InvalidArgument("phi must be finite");
    if (!std::isfinite(epsilon) || epsilon < 0.0 || epsilon > 1.0) {
      throw InvalidArgument("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
    }
    double p = std::fmod(phi, 2 * kPi);
    if (p < 0) p += 2 * kPi;
    if (p >= 2 * kPi) p = 0.0;
    return ExperimentSetting(std::clamp(alpha, 0.0, kPi / 2), p, epsilon);
  }

  double alpha() const { return alpha_; }
  double phi() const { return phi_; }
  double epsilon() const { return epsilon_; }

  // eta = (1 - epsilon) / 4, the white-noise weight per outcome.
  double eta() const { return (1.0 - epsilon_) / 4.0; }

  ExperimentSetting with_epsilon(double epsilon) const { return create(alpha_, phi_, epsilon); }

  friend bool operator==(const ExperimentSetting&, const ExperimentSetting&) = default;

 private:
  ExperimentSetting(double alpha, double phi, double epsilon) : alpha_(alpha), phi_(phi), epsilon_(epsilon) {}

  double alpha_;
  double phi_;
  double epsilon_;
};

// Outcome index for (S, A) in the order 00, 01, 10, 11.
constexpr int outcome_index(int s, int a) { return 2 * s + a; }

// Probabilities over (S, A) in {00, 01, 10, 11}. Entries down to -1e-12 are
// clamped to zero; the sum must be 1 within 1e-10.
class JointDistribution {
 public:
  explicit JointDistribution(std::array<double, 4> p) : p_(p) {
    for (double& x : p_) {
      if (!(x >= -1e-12)) throw InvalidArgument("negative probability " + std::to_string(x));
      x = std::max(x, 0.0);
    }
    const double total = std::accumulate(p_.begin(), p_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-10) {
      throw InvalidArgument("probabilities sum to " + std::to_string(total));
    }
  }

  double operator[](int i) const { return p_[i]; }
  double at(int s, int a) const { return p_[outcome_index(s, a)]; }
  const std::array<double, 4>& values() const { return p_; }

  double ancilla_marginal(int a) const { return at(0, a) + at(1, a); }

 private:
  std::array<double, 4> p_;
};

inline double max_abs_diff(const JointDistribution& x, const JointDistribution& y) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

// |0>_S (x) (cos alpha |0>_A + sin alpha |1>_A).
inline PureState initial_state(double alpha) {
  const auto setting = ExperimentSetting::create(alpha, 0.0);
  const double c = std::cos(setting.alpha());
  const double s = std::sin(setting.alpha());
  return PureState(4, {c, s, 0.0, 0.0});
}

// First beam splitter (H on S), phase on path a = |1>_S, then the
// ancilla-controlled second beam splitter.
inline Operator interferometer_unitary(double phi) {
  const Operator id2 = identity(2);
  return controlled_hadamard() * tensor_product(phase_gate(phi), id2) * tensor_product(hadamard(), id2);
}

// (|0> + e^{i phi}|1>)/sqrt 2: particle statistics on S.
inline PureState particle_state(double phi) {
  const double h = 1.0 / std::sqrt(2.0);
  return PureState(2, {h, h * std::polar(1.0, phi)});
}

// e^{i phi/2}(cos(phi/2)|0> - i sin(phi/2)|1>): wave statistics on S.
inline PureState wave_state(double phi) {
  const Complex g = std::polar(1.0, phi / 2);
  return PureState(2, {g * std::cos(phi / 2), g * Complex(0.0, -std::sin(phi / 2))});
}

// Closed form cos alpha |p>|0> + sin alpha |w>|1>.
inline PureState final_state(const ExperimentSetting& setting) {
  const double c = std::cos(setting.alpha());
  const double s = std::sin(setting.alpha());
  const auto p = particle_state(setting.phi());
  const auto w = wave_state(setting.phi());
  return PureState(4, {c * p[0], s * w[0], c * p[1], s * w[1]});
}

// Pure-state statistics; epsilon is ignored.
inline JointDistribution joint_distribution(const ExperimentSetting& setting) {
  const double c2 = std::pow(std::cos(setting.alpha()), 2);
  const double s2 = std::pow(std::sin(setting.alpha()), 2);
  const double half = setting.phi() / 2;
  return JointDistribution({0.5 * c2, s2 * std::pow(std::cos(half), 2), 0.5 * c2, s2 * std::pow(std::sin(half), 2)});
}

// Born rule in the computational basis: p_i = Tr(rho |i><i|).
inline JointDistribution measure_joint(const Operator& rho) {
  if (rho.dim() != 4) throw InvalidArgument("measure_joint expects a 4x4 density matrix");
  if (!is_density_matrix(rho, 1e-10)) throw InvalidArgument("measure_joint: not a valid density matrix");
  return JointDistribution({rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real()});
}

// [P(S=0 | A), P(S=1 | A)].
inline std::array<double, 2> conditional_system_distribution(const JointDistribution& j, int a_outcome) {
  if (a_outcome != 0 && a_outcome != 1) throw InvalidArgument("ancilla outcome must be 0 or 1");
  const double marginal = j.ancilla_marginal(a_outcome);
  if (marginal <= 1e-12) {
    throw DegenerateSetting("P(A = " + std::to_string(a_outcome) + ") vanishes; cannot condition");
  }
  return {j.at(0, a_outcome) / marginal, j.at(1, a_outcome) / marginal};
}

}  // namespace qdc
