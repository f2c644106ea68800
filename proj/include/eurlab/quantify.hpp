#pragma once

// Entropies, concurrence and observable complementarity. All entropies are
// in bits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "eurlab/error.hpp"
#include "eurlab/linalg.hpp"
#include "eurlab/states.hpp"

namespace eurlab {

/// Two-outcome qubit observable with an explicit orthonormal eigenbasis.
/// Outcome 0 has eigenvalue +1, outcome 1 has eigenvalue -1.
class Observable {
 public:
  /// `code` names the basis in setting labels ("X", "Y", "Z", "T<deg>");
  /// `tokens` name the two outcomes in count files.
  Observable(const QubitState& first, const QubitState& second, std::string code,
             std::array<std::string, 2> tokens)
      : basis_{first, second}, code_(std::move(code)), tokens_(std::move(tokens)) {
    if (std::abs(overlap(first, second)) > 1e-12) {
      throw Error(ErrorCode::DomainError, "observable eigenbasis is not orthogonal");
    }
    matrix_ = first.projector() - second.projector();
  }

  const Mat2& matrix() const { return matrix_; }
  const QubitState& eigenvector(std::size_t i) const { return basis_[i]; }
  Mat2 projector(std::size_t i) const { return basis_[i].projector(); }
  const std::string& code() const { return code_; }
  const std::string& token(std::size_t i) const { return tokens_[i]; }

 private:
  std::array<QubitState, 2> basis_;
  Mat2 matrix_;
  std::string code_;
  std::array<std::string, 2> tokens_;
};

inline Observable sigma_x() { return {ket::D(), ket::J(), "X", {"D", "J"}}; }
inline Observable sigma_y() { return {ket::R(), ket::L(), "Y", {"R", "L"}}; }
inline Observable sigma_z() { return {ket::H(), ket::V(), "Z", {"H", "V"}}; }

namespace detail {
inline std::string format_angle(double deg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", deg);
  return buf;
}
}  // namespace detail

/// Observable in the X-Z plane with eigenvectors cos t|H> + sin t|V> and
/// sin t|H> - cos t|V>.
inline Observable rotated_observable(double theta_deg) {
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  return {QubitState::normalized({c, s}), QubitState::normalized({s, -c}),
          "T" + detail::format_angle(theta_deg), {"P1", "P2"}};
}

/// h(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0.
inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::DomainError, "probability outside [0,1]");
  auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
  return term(p) + term(1.0 - p);
}

/// Shannon entropy of nonnegative weights normalized by their sum.
template <class Range>
double shannon_entropy(const Range& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyCounts, "zero total weight");
  double h = 0.0;
  for (double w : weights) {
    const double p = w / total;
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

namespace detail {
template <std::size_t N>
double entropy_of_spectrum(const std::array<double, N>& values) {
  double s = 0.0;
  for (double l : values) {
    if (l > kClipTol) s -= l * std::log2(l);
  }
  return s;
}
}  // namespace detail

/// -sum lambda log2 lambda, eigenvalues below 1e-10 dropped.
template <std::size_t N>
double von_neumann_entropy(const DensityMatrix<N>& rho) {
  return detail::entropy_of_spectrum(eigenvalues(rho.matrix()));
}

/// H(A|B) = S(rho_AB) - S(rho_B).
inline double conditional_entropy(const TwoQubitDensity& rho_ab) {
  return von_neumann_entropy(rho_ab) - von_neumann_entropy(reduced_state(rho_ab, Subsystem::A));
}

/// H(R|B): entropy of the classical-quantum state obtained by measuring
/// `obs` on A, conditioned on the untouched qubit B.
inline double measured_conditional_entropy(const TwoQubitDensity& rho_ab, const Observable& obs) {
  Mat4 cq;
  for (std::size_t r = 0; r < 2; ++r) {
    const Mat4 proj = tensor_product(obs.projector(r), Mat2::identity());
    const Mat2 block = partial_trace_operator(proj * rho_ab.matrix() * proj, Subsystem::A);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) cq(2 * r + i, 2 * r + j) = block(i, j);
  }
  const double s_rb = detail::entropy_of_spectrum(eigenvalues(cq));
  return s_rb - von_neumann_entropy(reduced_state(rho_ab, Subsystem::A));
}

/// Wootters concurrence via the Hermitian form sqrt(sqrt(rho) rho~ sqrt(rho)),
/// rho~ = (Y (x) Y) rho* (Y (x) Y) with conjugation in the computational basis.
inline double concurrence(const TwoQubitDensity& rho) {
  const Mat4 yy = tensor_product(pauli::Y(), pauli::Y());
  const Mat4 flipped = yy * rho.matrix().conj() * yy;
  const Mat4 root = matrix_sqrt(rho.matrix());
  const auto lam = eigenvalues(hermitian_part(root * flipped * root));
  // Roundoff in the null space would otherwise enter as sqrt(1e-16) ~ 1e-8.
  std::array<double, 4> s;
  for (std::size_t k = 0; k < 4; ++k) s[k] = lam[k] > 1e-14 ? std::sqrt(lam[k]) : 0.0;
  std::sort(s.begin(), s.end(), std::greater<>());
  return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

struct Complementarity {
  /// c = max_ij |<a_i|b_j>|^2
  double overlap;
  /// log2(1/c), the state-independent part of the bounds.
  double bound_bits;
};

inline Complementarity complementarity(const Observable& r, const Observable& s) {
  double c = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) c = std::max(c, std::norm(overlap(r.eigenvector(i), s.eigenvector(j))));
  return {c, -std::log2(c)};
}

}  // namespace eurlab
