#pragma once

// Test-only oracles, independent of the library's own numerics.

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "qdc/qcore.h"

namespace qdc::testing {

inline Eigen::MatrixXcd to_eigen(const Operator& m) {
  Eigen::MatrixXcd out(m.dim(), m.dim());
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.dim(); ++c) out(r, c) = m(r, c);
  return out;
}

inline Operator from_eigen(const Eigen::MatrixXcd& m) {
  return Operator::generate(static_cast<int>(m.rows()), [&](int r, int c) { return m(r, c); });
}

// Ascending spectrum from Eigen's self-adjoint solver.
inline std::vector<double> oracle_eigenvalues(const Operator& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m));
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline Operator random_hermitian(std::mt19937_64& gen, int dim, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXcd a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = {n(gen), n(gen)};
  Eigen::MatrixXcd h = (a + a.adjoint()) / 2.0;
  return from_eigen(h);
}

// Haar-ish random density matrix: G G^dagger / Tr.
inline Operator random_density(std::mt19937_64& gen, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = {n(gen), n(gen)};
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;
  return from_eigen(rho);
}

inline Operator random_unitary(std::mt19937_64& gen, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = {n(gen), n(gen)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  return from_eigen(qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim));
}

}  // namespace qdc::testing
