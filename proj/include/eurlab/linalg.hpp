#pragma once

// Dense complex linear algebra for one- and two-qubit operators.
//
// Matrices are fixed-size and row-major. Two-qubit operators use the |AB>
// ordering with qubit A as the most significant index: basis index = 2*a + b.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>

#include "eurlab/error.hpp"

namespace eurlab {

using cplx = std::complex<double>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kClipTol = 1e-10;
inline constexpr double kNotPsdTol = 1e-8;
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiOffTol = 1e-14;

template <std::size_t N>
using Vector = std::array<cplx, N>;

template <std::size_t N>
class Matrix {
  static_assert(N == 2 || N == 4, "operators are one- or two-qubit");

 public:
  static constexpr std::size_t dim = N;

  constexpr Matrix() = default;

  constexpr Matrix(std::initializer_list<cplx> row_major) {
    std::size_t k = 0;
    for (const cplx& z : row_major) {
      if (k < N * N) data_[k++] = z;
    }
  }

  static Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const std::array<double, N>& d) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * N + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * N + j]; }

  const std::array<cplx, N * N>& data() const { return data_; }

  Matrix adjoint() const {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
  }

  Matrix conj() const {
    Matrix r;
    for (std::size_t k = 0; k < N * N; ++k) r.data_[k] = std::conj(data_[k]);
    return r;
  }

  Matrix transpose() const {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, double s) { return a *= cplx(s); }
  friend Matrix operator*(double s, Matrix a) { return a *= cplx(s); }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx(0.0)) continue;
        for (std::size_t j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend Vector<N> operator*(const Matrix& a, const Vector<N>& v) {
    Vector<N> r{};
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r[i] += a(i, j) * v[j];
    return r;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::array<cplx, N * N> data_{};
};

using Mat2 = Matrix<2>;
using Mat4 = Matrix<4>;
using Vec2 = Vector<2>;
using Vec4 = Vector<4>;

namespace pauli {
inline Mat2 I() { return Mat2::identity(); }
inline Mat2 X() { return Mat2{0.0, 1.0, 1.0, 0.0}; }
inline Mat2 Y() { return Mat2{0.0, cplx(0, -1), cplx(0, 1), 0.0}; }
inline Mat2 Z() { return Mat2{1.0, 0.0, 0.0, -1.0}; }
/// {I, X, Y, Z} in that order.
inline std::array<Mat2, 4> basis() { return {I(), X(), Y(), Z()}; }
}  // namespace pauli

/// <u|v>
template <std::size_t N>
cplx inner(const Vector<N>& u, const Vector<N>& v) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(u[i]) * v[i];
  return s;
}

template <std::size_t N>
double norm(const Vector<N>& v) {
  return std::sqrt(std::real(inner(v, v)));
}

/// |u><v|
template <std::size_t N>
Matrix<N> outer(const Vector<N>& u, const Vector<N>& v) {
  Matrix<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

/// <v|M|v>, real part only (M assumed Hermitian).
template <std::size_t N>
double expectation(const Matrix<N>& m, const Vector<N>& v) {
  return std::real(inner(v, m * v));
}

/// Kronecker product; A indexes the most significant qubit.
inline Mat4 tensor_product(const Mat2& a, const Mat2& b) {
  Mat4 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return r;
}

inline Vec4 tensor_product(const Vec2& a, const Vec2& b) {
  return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

template <std::size_t N>
double max_abs_diff(const Matrix<N>& a, const Matrix<N>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < N * N; ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

template <std::size_t N>
double frobenius_norm(const Matrix<N>& a) {
  double s = 0.0;
  for (const cplx& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

template <std::size_t N>
double hermiticity_residual(const Matrix<N>& a) {
  return max_abs_diff(a, a.adjoint());
}

template <std::size_t N>
Matrix<N> hermitian_part(const Matrix<N>& a) {
  return 0.5 * (a + a.adjoint());
}

template <std::size_t N>
struct EigenSystem {
  /// Descending.
  std::array<double, N> values{};
  /// Column k is the eigenvector for values[k].
  Matrix<N> vectors;

  Vector<N> vector(std::size_t k) const {
    Vector<N> v;
    for (std::size_t i = 0; i < N; ++i) v[i] = vectors(i, k);
    return v;
  }

  Matrix<N> reconstruct() const {
    Matrix<N> lam = Matrix<N>::diagonal(values);
    return vectors * lam * vectors.adjoint();
  }
};

namespace detail {

template <std::size_t N>
double off_diagonal_norm(const Matrix<N>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Applies the plane unitary U (acting on indices p, q) as A <- U^dag A U and V <- V U.
template <std::size_t N>
void apply_plane_rotation(Matrix<N>& a, Matrix<N>& v, std::size_t p, std::size_t q, cplx upp,
                          cplx upq, cplx uqp, cplx uqq) {
  for (std::size_t k = 0; k < N; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = akp * upp + akq * uqp;
    a(k, q) = akp * upq + akq * uqq;
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = vkp * upp + vkq * uqp;
    v(k, q) = vkp * upq + vkq * uqq;
  }
  for (std::size_t k = 0; k < N; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
  }
}

}  // namespace detail

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot a_pq with a diagonal
/// unitary, then applies the classical real Jacobi rotation. Eigenvalues are
/// returned in descending order.
template <std::size_t N>
EigenSystem<N> hermitian_eig(const Matrix<N>& m) {
  if (const double r = hermiticity_residual(m); !(r <= kHermitianTol)) {
    throw Error(ErrorCode::NotHermitian, "symmetry residual " + std::to_string(r));
  }
  Matrix<N> a = hermitian_part(m);
  Matrix<N> v = Matrix<N>::identity();
  const double scale = std::max(1.0, frobenius_norm(a));

  bool converged = false;
  for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= kJacobiOffTol * scale) {
      converged = true;
      break;
    }
    if (sweep == kJacobiMaxSweeps) break;
    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cplx phase_conj = std::conj(apq) / mag;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        detail::apply_plane_rotation(a, v, p, q, c, s, -s * phase_conj, c * phase_conj);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NoConvergence, "Jacobi sweeps exceeded " + std::to_string(kJacobiMaxSweeps));
  }

  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
  EigenSystem<N> es;
  for (std::size_t k = 0; k < N; ++k) {
    es.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < N; ++i) es.vectors(i, k) = v(i, order[k]);
  }
  return es;
}

template <std::size_t N>
std::array<double, N> eigenvalues(const Matrix<N>& m) {
  return hermitian_eig(m).values;
}

/// V f(Lambda) V^dag for a Hermitian matrix.
template <std::size_t N, class F>
Matrix<N> spectral_apply(const EigenSystem<N>& es, F&& f) {
  std::array<double, N> d;
  for (std::size_t k = 0; k < N; ++k) d[k] = f(es.values[k]);
  return es.vectors * Matrix<N>::diagonal(d) * es.vectors.adjoint();
}

template <std::size_t N>
Matrix<N> matrix_sqrt(const Matrix<N>& m) {
  const EigenSystem<N> es = hermitian_eig(m);
  if (es.values[N - 1] < -kNotPsdTol) {
    throw Error(ErrorCode::NotPSD, "eigenvalue " + std::to_string(es.values[N - 1]));
  }
  return spectral_apply(es, [](double x) { return x > kClipTol ? std::sqrt(x) : 0.0; });
}

enum class Subsystem { A, B };

/// Linear partial trace over `traced`; no state validation.
inline Mat2 partial_trace_operator(const Mat4& m, Subsystem traced) {
  Mat2 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        if (traced == Subsystem::A) {
          r(i, j) += m(2 * k + i, 2 * k + j);
        } else {
          r(i, j) += m(2 * i + k, 2 * j + k);
        }
      }
  return r;
}

/// Reduced state of a two-qubit density matrix after tracing out `traced`.
inline Mat2 partial_trace(const Mat4& rho, Subsystem traced) {
  const cplx tr = rho.trace();
  if (std::abs(tr - 1.0) > kNotPsdTol) {
    throw Error(ErrorCode::InvalidState, "trace " + std::to_string(tr.real()) + " is not 1");
  }
  return partial_trace_operator(rho, traced);
}

}  // namespace eurlab
