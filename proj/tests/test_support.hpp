#pragma once

// Random operators for property tests. Test-only; uses the standard
// library generator since cross-platform streams do not matter here.

#include <random>

#include "eurlab/quantify.hpp"
#include "eurlab/states.hpp"

namespace eurlab::test {

class RandomOps {
 public:
  explicit RandomOps(std::uint64_t seed) : gen_(seed) {}

  cplx gaussian() { return {normal_(gen_), normal_(gen_)}; }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

  template <std::size_t N>
  Matrix<N> ginibre() {
    Matrix<N> g;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) g(i, j) = gaussian();
    return g;
  }

  template <std::size_t N>
  Matrix<N> hermitian() {
    return hermitian_part(ginibre<N>());
  }

  /// Full-rank state G G^dag / Tr; rank-deficient when `rank` < N.
  template <std::size_t N>
  DensityMatrix<N> density(std::size_t rank = N) {
    Matrix<N> g = ginibre<N>();
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = rank; j < N; ++j) g(i, j) = 0.0;
    Matrix<N> m = g * g.adjoint();
    return DensityMatrix<N>(hermitian_part(m) * (1.0 / m.trace().real()));
  }

  template <std::size_t N>
  PureState<N> pure() {
    Vector<N> v;
    for (auto& z : v) z = gaussian();
    return PureState<N>::normalized(v);
  }

  /// Haar-distributed unitary from Gram-Schmidt on a Ginibre matrix.
  template <std::size_t N>
  Matrix<N> unitary() {
    Matrix<N> g = ginibre<N>();
    for (std::size_t c = 0; c < N; ++c) {
      for (std::size_t p = 0; p < c; ++p) {
        cplx d = 0.0;
        for (std::size_t i = 0; i < N; ++i) d += std::conj(g(i, p)) * g(i, c);
        for (std::size_t i = 0; i < N; ++i) g(i, c) -= d * g(i, p);
      }
      double n = 0.0;
      for (std::size_t i = 0; i < N; ++i) n += std::norm(g(i, c));
      n = std::sqrt(n);
      for (std::size_t i = 0; i < N; ++i) g(i, c) /= n;
    }
    return g;
  }

  Observable observable() {
    const Mat2 u = unitary<2>();
    return {QubitState::normalized({u(0, 0), u(1, 0)}), QubitState::normalized({u(0, 1), u(1, 1)}), "U",
            {"P1", "P2"}};
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace eurlab::test
