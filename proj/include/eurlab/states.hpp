#pragma once

// States, wave plates and channels of the two-photon polarization setup.
// Polarization encoding: |H> = |0>, |V> = |1>.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "eurlab/error.hpp"
#include "eurlab/linalg.hpp"

namespace eurlab {

inline constexpr double kStateTraceTol = 1e-8;

/// Normalized state vector.
template <std::size_t N>
class PureState {
 public:
  /// Throws DomainError unless the amplitudes have unit norm within 1e-12.
  explicit PureState(const Vector<N>& amplitudes) : amp_(amplitudes) {
    const double n = norm(amp_);
    if (std::abs(n * n - 1.0) > 1e-12) {
      throw Error(ErrorCode::DomainError, "state vector is not normalized");
    }
  }

  /// Scales any nonzero vector to unit norm.
  static PureState normalized(const Vector<N>& v) {
    const double n = norm(v);
    if (n == 0.0) throw Error(ErrorCode::DomainError, "zero vector");
    Vector<N> u = v;
    for (auto& z : u) z /= n;
    return PureState(u, 0);
  }

  const Vector<N>& amplitudes() const { return amp_; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }
  Matrix<N> projector() const { return outer(amp_, amp_); }

 private:
  PureState(const Vector<N>& v, int) : amp_(v) {}
  Vector<N> amp_;
};

using QubitState = PureState<2>;
using TwoQubitPureState = PureState<4>;

template <std::size_t N>
cplx overlap(const PureState<N>& a, const PureState<N>& b) {
  return inner(a.amplitudes(), b.amplitudes());
}

inline TwoQubitPureState product_state(const QubitState& a, const QubitState& b) {
  return TwoQubitPureState::normalized(tensor_product(a.amplitudes(), b.amplitudes()));
}

/// Hermitian, positive semidefinite, unit-trace operator.
template <std::size_t N>
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-10), trace (1e-8) and positivity (-1e-8).
  explicit DensityMatrix(const Matrix<N>& m) : m_(hermitian_part(m)) {
    if (hermiticity_residual(m) > kHermitianTol) {
      throw Error(ErrorCode::InvalidState, "density matrix is not Hermitian");
    }
    const cplx tr = m.trace();
    if (std::abs(tr - 1.0) > kStateTraceTol) {
      throw Error(ErrorCode::InvalidState, "trace " + std::to_string(tr.real()) + " is not 1");
    }
    if (eigenvalues(m_)[N - 1] < -kNotPsdTol) {
      throw Error(ErrorCode::InvalidState, "density matrix has a negative eigenvalue");
    }
  }

  DensityMatrix(const PureState<N>& psi) : m_(psi.projector()) {}  // NOLINT(implicit)

  static DensityMatrix maximally_mixed() { return DensityMatrix(Matrix<N>::identity() * (1.0 / N), 0); }

  const Matrix<N>& matrix() const { return m_; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  /// Convex mixture w*a + (1-w)*b.
  friend DensityMatrix mix(double w, const DensityMatrix& a, const DensityMatrix& b) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::DomainError, "mixture weight outside [0,1]");
    return DensityMatrix(w * a.m_ + (1.0 - w) * b.m_, 0);
  }

  /// U rho U^dag for unitary U (not checked).
  DensityMatrix conjugated(const Matrix<N>& u) const { return DensityMatrix(u * m_ * u.adjoint(), 0); }

 private:
  DensityMatrix(const Matrix<N>& m, int) : m_(m) {}
  template <std::size_t>
  friend class DensityMatrix;
  friend struct Channel;
  friend DensityMatrix<2> reduced_state(const DensityMatrix<4>&, Subsystem);
  Matrix<N> m_;
};

using QubitDensity = DensityMatrix<2>;
using TwoQubitDensity = DensityMatrix<4>;

inline QubitDensity reduced_state(const TwoQubitDensity& rho, Subsystem traced) {
  return QubitDensity(partial_trace_operator(rho.matrix(), traced), 0);
}

inline TwoQubitDensity tensor_product(const QubitDensity& a, const QubitDensity& b) {
  return TwoQubitDensity(tensor_product(a.matrix(), b.matrix()));
}

template <std::size_t N>
double trace_distance(const Matrix<N>& a, const Matrix<N>& b) {
  double s = 0.0;
  for (double l : eigenvalues(hermitian_part(a - b))) s += std::abs(l);
  return 0.5 * s;
}

/// Uhlmann fidelity [Tr sqrt(sqrt(a) b sqrt(a))]^2.
template <std::size_t N>
double state_fidelity(const Matrix<N>& a, const Matrix<N>& b) {
  const Matrix<N> sa = matrix_sqrt(a);
  double t = 0.0;
  for (double l : eigenvalues(hermitian_part(sa * b * sa))) t += l > 0.0 ? std::sqrt(l) : 0.0;
  return t * t;
}

// Single-photon polarization states.
namespace ket {
inline QubitState H() { return QubitState({1.0, 0.0}); }
inline QubitState V() { return QubitState({0.0, 1.0}); }
inline QubitState D() { return QubitState::normalized({1.0, 1.0}); }
inline QubitState J() { return QubitState::normalized({1.0, -1.0}); }
/// Right circular, (|H> + i|V>)/sqrt2.
inline QubitState R() { return QubitState::normalized({1.0, cplx(0, 1)}); }
inline QubitState L() { return QubitState::normalized({1.0, cplx(0, -1)}); }
}  // namespace ket

enum class Bell { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline TwoQubitPureState bell_state(Bell label) {
  switch (label) {
    case Bell::PhiPlus: return TwoQubitPureState::normalized({1.0, 0.0, 0.0, 1.0});
    case Bell::PhiMinus: return TwoQubitPureState::normalized({1.0, 0.0, 0.0, -1.0});
    case Bell::PsiPlus: return TwoQubitPureState::normalized({0.0, 1.0, 1.0, 0.0});
    case Bell::PsiMinus: return TwoQubitPureState::normalized({0.0, 1.0, -1.0, 0.0});
  }
  throw Error(ErrorCode::DomainError, "unknown Bell label");
}

namespace detail {
inline TwoQubitDensity bell_mixture(Bell first, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::DomainError, "mixing ratio x=" + std::to_string(x) + " outside [0,1]");
  }
  return mix(x, TwoQubitDensity(bell_state(first)), TwoQubitDensity(bell_state(Bell::PsiMinus)));
}
}  // namespace detail

/// x |Phi+><Phi+| + (1-x) |Psi-><Psi-|
inline TwoQubitDensity bds_rho1(double x) { return detail::bell_mixture(Bell::PhiPlus, x); }

/// x |Phi-><Phi-| + (1-x) |Psi-><Psi-|
inline TwoQubitDensity bds_rho2(double x) { return detail::bell_mixture(Bell::PhiMinus, x); }

/// v |bell><bell| + (1-v) I/4
inline TwoQubitDensity werner_state(Bell label, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::DomainError, "Werner weight outside [0,1]");
  return mix(v, TwoQubitDensity(bell_state(label)), TwoQubitDensity::maximally_mixed());
}

/// Werner weight giving concurrence c: c = (3v - 1)/2.
inline double werner_weight_for_concurrence(double c) { return (2.0 * c + 1.0) / 3.0; }

/// Stand-in for the quasi-maximally entangled |Phi-> source used with the
/// memory: a Werner mixture whose concurrence equals `target_concurrence`.
inline TwoQubitDensity memory_experiment_state(double target_concurrence) {
  if (!(target_concurrence > 0.0 && target_concurrence <= 1.0)) {
    throw Error(ErrorCode::DomainError, "target concurrence outside (0,1]");
  }
  return werner_state(Bell::PhiMinus, werner_weight_for_concurrence(target_concurrence));
}

enum class Waveplate { HWP, QWP };

/// Jones matrix of a retarder with its fast axis at `axis_deg` from H.
/// Retardance pi (HWP) or pi/2 (QWP), symmetric phase convention
/// R(-a) diag(e^{-i g/2}, e^{i g/2}) R(a); the global phase is kept.
inline Mat2 waveplate_unitary(Waveplate kind, double axis_deg) {
  const double a = axis_deg * std::numbers::pi / 180.0;
  const double g = kind == Waveplate::HWP ? std::numbers::pi : std::numbers::pi / 2.0;
  const double c = std::cos(a), s = std::sin(a);
  const Mat2 rot{c, s, -s, c};
  const Mat2 ret{std::polar(1.0, -g / 2.0), 0.0, 0.0, std::polar(1.0, g / 2.0)};
  return rot.transpose() * ret * rot;
}

/// Polarization-maintaining fiber in the {H, V} basis.
inline Mat2 fiber_unitary(double phi_h, double phi_v) {
  return Mat2{std::polar(1.0, phi_h), 0.0, 0.0, std::polar(1.0, phi_v)};
}

/// Completely positive trace-preserving single-qubit map in Kraus form.
struct Channel {
  std::vector<Mat2> kraus;

  static Channel identity() { return {{Mat2::identity()}}; }
  static Channel unitary(const Mat2& u) { return {{u}}; }

  /// (1 - 3p/4) rho + p/4 (X rho X + Y rho Y + Z rho Z), i.e. (1-p) rho + p I/2.
  static Channel depolarizing(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::DomainError, "depolarizing weight outside [0,1]");
    const double a = std::sqrt(1.0 - 0.75 * p), b = std::sqrt(0.25 * p);
    return {{a * pauli::I(), b * pauli::X(), b * pauli::Y(), b * pauli::Z()}};
  }

  /// Sum K^dag K; the identity for a trace-preserving map.
  Mat2 completeness() const {
    Mat2 s;
    for (const Mat2& k : kraus) s += k.adjoint() * k;
    return s;
  }

  Mat2 apply(const Mat2& rho) const {
    Mat2 out;
    for (const Mat2& k : kraus) out += k * rho * k.adjoint();
    return out;
  }

  QubitDensity apply(const QubitDensity& rho) const { return QubitDensity(apply(rho.matrix()), 0); }

  /// (I_A (x) E) applied to qubit B of a two-qubit state.
  TwoQubitDensity apply_on_b(const TwoQubitDensity& rho) const {
    Mat4 out;
    for (const Mat2& k : kraus) {
      const Mat4 kk = tensor_product(Mat2::identity(), k);
      out += kk * rho.matrix() * kk.adjoint();
    }
    return TwoQubitDensity(out, 0);
  }
};

/// `first` followed by `second`.
inline Channel compose(const Channel& first, const Channel& second) {
  Channel c;
  c.kraus.reserve(first.kraus.size() * second.kraus.size());
  for (const Mat2& k2 : second.kraus)
    for (const Mat2& k1 : first.kraus) c.kraus.push_back(k2 * k1);
  return c;
}

struct FiberPhases {
  double h1 = 0.0;
  double v1 = 0.0;
  double h2 = 0.0;
  double v2 = 0.0;

  static FiberPhases matched(double phi_h, double phi_v) { return {phi_h, phi_v, phi_h, phi_v}; }
};

/// Fiber 1 -> HWP(45) -> fiber 2 -> HWP(45), followed by depolarizing noise
/// of weight `noise`. With matched fibers and no noise the accumulated
/// birefringent phases cancel up to a global phase.
inline Channel spin_echo_memory(const FiberPhases& phases, double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error(ErrorCode::DomainError, "noise outside [0,1]");
  const Mat2 flip = waveplate_unitary(Waveplate::HWP, 45.0);
  const Mat2 u = flip * fiber_unitary(phases.h2, phases.v2) * flip * fiber_unitary(phases.h1, phases.v1);
  if (noise == 0.0) return Channel::unitary(u);
  return compose(Channel::unitary(u), Channel::depolarizing(noise));
}

/// Depolarizing weight whose identity-process fidelity 1 - 3p/4 equals `fidelity`.
inline double noise_for_process_fidelity(double fidelity) {
  if (!(fidelity >= 0.25 && fidelity <= 1.0)) {
    throw Error(ErrorCode::DomainError, "process fidelity outside [1/4, 1]");
  }
  return 4.0 * (1.0 - fidelity) / 3.0;
}

}  // namespace eurlab
