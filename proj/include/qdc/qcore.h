#pragma once

// Dense complex linear algebra for one- and two-qubit spaces.
//
// Two-qubit operators use the S (x) A ordering: S is the left (slow) tensor
// factor and A the right (fast) one, so the basis is |00>, |01>, |10>, |11>
// read as |S A>.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qdc/errors.h"

namespace qdc {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

namespace detail {

inline void require_dim(int dim) {
  if (dim != 2 && dim != 4) {
    throw InvalidArgument("operator dimension must be 2 or 4, got " + std::to_string(dim));
  }
}

// Cyclic Jacobi diagonalization of an N x N hermitian matrix (row-major).
// Each rotation first removes the phase of the pivot, then applies the real
// symmetric 2x2 rotation that annihilates it.
template <std::size_t N>
std::array<double, N> jacobi_eigenvalues(std::array<Complex, N * N> a, double threshold = 1e-13,
                                         int max_sweeps = 200) {
  auto at = [&a](std::size_t r, std::size_t c) -> Complex& { return a[r * N + c]; };
  double scale = 0.0;
  for (const auto& x : a) scale += std::norm(x);
  scale = std::max(1.0, std::sqrt(scale));

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c)
        if (r != c) s += std::norm(at(r, c));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() > threshold * scale; ++sweep) {
    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const Complex apq = at(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const Complex phase = apq / r;  // e^{i theta}
        const double app = at(p, p).real();
        const double aqq = at(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // V acts on columns p, q:  V_pp = c, V_pq = s e^{i theta}, V_qp = -s e^{-i theta}, V_qq = c.
        const Complex vpq = s * phase;
        const Complex vqp = -s * std::conj(phase);
        // A <- A V
        for (std::size_t k = 0; k < N; ++k) {
          const Complex akp = at(k, p);
          const Complex akq = at(k, q);
          at(k, p) = akp * c + akq * vqp;
          at(k, q) = akp * vpq + akq * c;
        }
        // A <- V^dagger A
        for (std::size_t k = 0; k < N; ++k) {
          const Complex apk = at(p, k);
          const Complex aqk = at(q, k);
          at(p, k) = c * apk + std::conj(vqp) * aqk;
          at(q, k) = std::conj(vpq) * apk + c * aqk;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        at(p, p) = at(p, p).real();
        at(q, q) = at(q, q).real();
      }
    }
  }

  std::array<double, N> eig{};
  for (std::size_t i = 0; i < N; ++i) eig[i] = at(i, i).real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace detail

// Dense complex matrix of dimension 2 or 4, row-major. Immutable once built.
class Operator {
 public:
  Operator() : Operator(2) {}

  explicit Operator(int dim) : dim_(dim), entries_{} { detail::require_dim(dim); }

  Operator(int dim, std::initializer_list<Complex> row_major) : Operator(dim) {
    if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
      throw InvalidArgument("expected " + std::to_string(dim * dim) + " entries");
    }
    std::copy(row_major.begin(), row_major.end(), entries_.begin());
  }

  static Operator identity(int dim) {
    Operator out(dim);
    for (int i = 0; i < dim; ++i) out.entries_[i * dim + i] = 1.0;
    return out;
  }

  static Operator diagonal(std::span<const Complex> diag) {
    Operator out(static_cast<int>(diag.size()));
    for (int i = 0; i < out.dim_; ++i) out.entries_[i * out.dim_ + i] = diag[i];
    return out;
  }

  template <typename F>
  static Operator generate(int dim, F&& f) {
    Operator out(dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) out.entries_[r * dim + c] = f(r, c);
    return out;
  }

  int dim() const { return dim_; }
  Complex operator()(int r, int c) const { return entries_[r * dim_ + c]; }

  Complex trace() const {
    Complex t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  Operator adjoint() const {
    return generate(dim_, [this](int r, int c) { return std::conj((*this)(c, r)); });
  }

  Operator transpose() const {
    return generate(dim_, [this](int r, int c) { return (*this)(c, r); });
  }

  friend Operator operator*(const Operator& x, const Operator& y) {
    if (x.dim_ != y.dim_) throw InvalidArgument("dimension mismatch in operator product");
    return generate(x.dim_, [&](int r, int c) {
      Complex s = 0.0;
      for (int k = 0; k < x.dim_; ++k) s += x(r, k) * y(k, c);
      return s;
    });
  }

  friend Operator operator+(const Operator& x, const Operator& y) {
    if (x.dim_ != y.dim_) throw InvalidArgument("dimension mismatch in operator sum");
    return generate(x.dim_, [&](int r, int c) { return x(r, c) + y(r, c); });
  }

  friend Operator operator-(const Operator& x, const Operator& y) {
    if (x.dim_ != y.dim_) throw InvalidArgument("dimension mismatch in operator difference");
    return generate(x.dim_, [&](int r, int c) { return x(r, c) - y(r, c); });
  }

  friend Operator operator*(Complex s, const Operator& x) {
    return generate(x.dim_, [&](int r, int c) { return s * x(r, c); });
  }

 private:
  int dim_;
  std::array<Complex, 16> entries_;
};

// Largest entrywise |x - y|.
inline double max_abs_diff(const Operator& x, const Operator& y) {
  if (x.dim() != y.dim()) throw InvalidArgument("dimension mismatch");
  double m = 0.0;
  for (int r = 0; r < x.dim(); ++r)
    for (int c = 0; c < x.dim(); ++c) m = std::max(m, std::abs(x(r, c) - y(r, c)));
  return m;
}

inline bool is_hermitian(const Operator& m, double tol = 1e-12) {
  return max_abs_diff(m, m.adjoint()) <= tol;
}

inline bool is_unitary(const Operator& u, double tol = 1e-12) {
  return max_abs_diff(u.adjoint() * u, Operator::identity(u.dim())) < tol;
}

// Normalized state vector of dimension 2 or 4.
class PureState {
 public:
  PureState(int dim, std::initializer_list<Complex> amplitudes) : dim_(dim), amp_{} {
    detail::require_dim(dim);
    if (amplitudes.size() != static_cast<std::size_t>(dim)) {
      throw InvalidArgument("expected " + std::to_string(dim) + " amplitudes");
    }
    std::copy(amplitudes.begin(), amplitudes.end(), amp_.begin());
    check_norm();
  }

  PureState(int dim, std::span<const Complex> amplitudes) : dim_(dim), amp_{} {
    detail::require_dim(dim);
    if (amplitudes.size() != static_cast<std::size_t>(dim)) {
      throw InvalidArgument("expected " + std::to_string(dim) + " amplitudes");
    }
    std::copy(amplitudes.begin(), amplitudes.end(), amp_.begin());
    check_norm();
  }

  // Computational basis vector |index>.
  static PureState basis(int dim, int index) {
    std::array<Complex, 4> a{};
    a[index] = 1.0;
    return PureState(dim, std::span<const Complex>(a.data(), dim));
  }

  int dim() const { return dim_; }
  Complex operator[](int i) const { return amp_[i]; }
  std::span<const Complex> amplitudes() const { return {amp_.data(), static_cast<std::size_t>(dim_)}; }

 private:
  void check_norm() const {
    double n = 0.0;
    for (int i = 0; i < dim_; ++i) n += std::norm(amp_[i]);
    if (std::abs(n - 1.0) > 1e-12) throw InvalidArgument("state is not normalized");
  }

  int dim_;
  std::array<Complex, 4> amp_;
};

inline Complex inner(const PureState& x, const PureState& y) {
  if (x.dim() != y.dim()) throw InvalidArgument("dimension mismatch in inner product");
  Complex s = 0.0;
  for (int i = 0; i < x.dim(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

// |<x|y>|^2; insensitive to global phase.
inline double fidelity(const PureState& x, const PureState& y) { return std::norm(inner(x, y)); }

inline PureState apply(const Operator& op, const PureState& psi) {
  if (op.dim() != psi.dim()) throw InvalidArgument("dimension mismatch applying operator");
  std::array<Complex, 4> out{};
  for (int r = 0; r < op.dim(); ++r)
    for (int c = 0; c < op.dim(); ++c) out[r] += op(r, c) * psi[c];
  return PureState(psi.dim(), std::span<const Complex>(out.data(), psi.dim()));
}

inline Operator density(const PureState& psi) {
  return Operator::generate(psi.dim(), [&](int r, int c) { return psi[r] * std::conj(psi[c]); });
}

inline Operator tensor_product(const Operator& left, const Operator& right) {
  if (left.dim() != 2 || right.dim() != 2) {
    throw InvalidArgument("tensor_product expects two 2x2 operators");
  }
  return Operator::generate(4, [&](int r, int c) { return left(r / 2, c / 2) * right(r % 2, c % 2); });
}

inline PureState tensor_product(const PureState& left, const PureState& right) {
  if (left.dim() != 2 || right.dim() != 2) {
    throw InvalidArgument("tensor_product expects two qubit states");
  }
  std::array<Complex, 4> a{};
  for (int i = 0; i < 4; ++i) a[i] = left[i / 2] * right[i % 2];
  return PureState(4, std::span<const Complex>(a));
}

enum class GateKind { hadamard, phase, controlled_hadamard, identity };

struct GateSpec {
  GateKind kind = GateKind::identity;
  double phi = 0.0;  // radians, phase gate only
  int dim = 2;       // identity only
};

// Hadamard, diag(1, e^{i phi}) on the system qubit, the ancilla-controlled
// Hadamard (acts on S when A = 1), or the identity.
inline Operator make_gate(const GateSpec& spec) {
  switch (spec.kind) {
    case GateKind::hadamard: {
      const double h = 1.0 / std::sqrt(2.0);
      return Operator(2, {h, h, h, -h});
    }
    case GateKind::phase: {
      if (!std::isfinite(spec.phi)) throw InvalidArgument("phase angle must be finite");
      return Operator(2, {1.0, 0.0, 0.0, std::polar(1.0, spec.phi)});
    }
    case GateKind::controlled_hadamard: {
      const double h = 1.0 / std::sqrt(2.0);
      // Rows/cols |00>,|01>,|10>,|11>; H mixes |01> and |11>.
      return Operator(4, {1.0, 0.0, 0.0, 0.0,
                          0.0, h, 0.0, h,
                          0.0, 0.0, 1.0, 0.0,
                          0.0, h, 0.0, -h});
    }
    case GateKind::identity:
      return Operator::identity(spec.dim);
  }
  throw InvalidArgument("unknown gate kind");
}

inline Operator hadamard() { return make_gate({GateKind::hadamard}); }
inline Operator phase_gate(double phi) { return make_gate({GateKind::phase, phi}); }
inline Operator controlled_hadamard() { return make_gate({GateKind::controlled_hadamard}); }
inline Operator identity(int dim) { return Operator::identity(dim); }

// Real eigenvalues in ascending order; size equals m.dim().
inline std::vector<double> eigenvalues_hermitian(const Operator& m) {
  if (!is_hermitian(m, 1e-10)) throw InvalidArgument("eigenvalues_hermitian: matrix is not hermitian");
  if (m.dim() == 2) {
    auto e = detail::jacobi_eigenvalues<2>({m(0, 0), m(0, 1), m(1, 0), m(1, 1)});
    return {e.begin(), e.end()};
  }
  std::array<Complex, 16> a{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a[r * 4 + c] = m(r, c);
  auto e = detail::jacobi_eigenvalues<4>(a);
  return {e.begin(), e.end()};
}

inline double min_eigenvalue(const Operator& m) { return eigenvalues_hermitian(m).front(); }

// Unit trace, hermitian, and positive semidefinite within tol.
inline bool is_density_matrix(const Operator& rho, double tol = 1e-10) {
  if (!is_hermitian(rho, tol)) return false;
  if (std::abs(rho.trace() - 1.0) > tol) return false;
  return min_eigenvalue(rho) >= -tol;
}

// U rho U^dagger.
inline Operator evolve_density(const Operator& u, const Operator& rho) {
  if (u.dim() != rho.dim()) throw InvalidArgument("evolve_density: dimension mismatch");
  return u * rho * u.adjoint();
}

enum class Subsystem { system, ancilla };

// Transpose on one tensor factor of a two-qubit operator.
inline Operator partial_transpose(const Operator& rho, Subsystem which) {
  if (rho.dim() != 4) throw InvalidArgument("partial_transpose expects a 4x4 operator");
  return Operator::generate(4, [&](int r, int c) {
    int s = r / 2, a = r % 2, s2 = c / 2, a2 = c % 2;
    if (which == Subsystem::ancilla) std::swap(a, a2);
    else std::swap(s, s2);
    return rho(2 * s + a, 2 * s2 + a2);
  });
}

}  // namespace qdc
