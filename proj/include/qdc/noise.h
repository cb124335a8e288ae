#pragma once

// White noise on the interferometer input and the entanglement-side checks
// (PPT separability, maximal CHSH value) on the resulting two-qubit state.

#include <array>
#include <cmath>
#include <utility>

#include "qdc/circuit.h"
#include "qdc/qcore.h"

namespace qdc {

// rho = eta * 1 + epsilon * sigma, eta = (1 - epsilon)/4, sigma the pure
// input state |0>_S (x) (cos alpha|0> + sin alpha|1>).
struct WernerState {
  double epsilon;
  double eta;
  Operator sigma;
  Operator rho;
};

inline WernerState werner_state(double alpha, double epsilon) {
  const auto setting = ExperimentSetting::create(alpha, 0.0, epsilon);
  const double eta = setting.eta();
  Operator sigma = density(initial_state(setting.alpha()));
  Operator rho = Operator::generate(4, [&](int r, int c) {
    return (r == c ? Complex(eta) : Complex(0.0)) + epsilon * sigma(r, c);
  });
  return {epsilon, eta, std::move(sigma), std::move(rho)};
}

// U_I rho U_I^dagger for the setting's noisy input.
inline Operator evolved_state(const ExperimentSetting& setting) {
  return evolve_density(interferometer_unitary(setting.phi()), werner_state(setting.alpha(), setting.epsilon()).rho);
}

// eta + epsilon * P(S, A).
inline JointDistribution noisy_joint_distribution(const ExperimentSetting& setting) {
  const auto pure = joint_distribution(setting);
  const double eta = setting.eta();
  std::array<double, 4> p{};
  for (int i = 0; i < 4; ++i) p[i] = eta + setting.epsilon() * pure[i];
  return JointDistribution(p);
}

// Smallest eigenvalue of the ancilla partial transpose of the evolved state.
// Non-negative means separable for two qubits.
inline double ppt_min_eigenvalue(const ExperimentSetting& setting) {
  return min_eigenvalue(partial_transpose(evolved_state(setting), Subsystem::ancilla));
}

struct SeparabilityThreshold {
  double epsilon = 1.0;          // smallest epsilon with a negative partial transpose
  bool never_entangled = false;  // PPT on all of [0, 1]; epsilon is then 1
};

// Bisection on epsilon in [0, 1] to 1e-9 for the onset of entanglement at
// fixed (alpha, phi). The PPT minimum eigenvalue is eta - epsilon*C/2 with C
// the concurrence of the pure final state, so it is monotone in epsilon.
inline SeparabilityThreshold separability_threshold(double alpha, double phi) {
  constexpr double kEntangledBelow = -1e-12;
  const auto at = [&](double eps) { return ppt_min_eigenvalue(ExperimentSetting::create(alpha, phi, eps)); };
  if (at(1.0) >= kEntangledBelow) return {1.0, true};
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60 && hi - lo > 1e-9; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (at(mid) < 0.0) hi = mid;
    else lo = mid;
  }
  return {0.5 * (lo + hi), false};
}

namespace detail {

inline const std::array<Operator, 3>& pauli_matrices() {
  static const std::array<Operator, 3> paulis{
      Operator(2, {0.0, 1.0, 1.0, 0.0}),
      Operator(2, {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0}),
      Operator(2, {1.0, 0.0, 0.0, -1.0}),
  };
  return paulis;
}

}  // namespace detail

// Correlation matrix T_ij = Tr(rho sigma_i (x) sigma_j).
inline std::array<double, 9> correlation_matrix(const Operator& rho) {
  const auto& s = detail::pauli_matrices();
  std::array<double, 9> t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[3 * i + j] = (rho * tensor_product(s[i], s[j])).trace().real();
  return t;
}

// Maximal CHSH value 2 sqrt(m1 + m2), m1, m2 the two largest eigenvalues of
// T^T T for the evolved state.
inline double chsh_max(const ExperimentSetting& setting) {
  const auto t = correlation_matrix(evolved_state(setting));
  std::array<Complex, 9> tt{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += t[3 * k + i] * t[3 * k + j];
      tt[3 * i + j] = s;
    }
  const auto eig = detail::jacobi_eigenvalues<3>(tt);
  return 2.0 * std::sqrt(std::max(0.0, eig[1] + eig[2]));
}

}  // namespace qdc
