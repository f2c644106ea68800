#pragma once

// Both sides of the entropic uncertainty relations, with and without a
// quantum memory, and the two-setting entanglement witness.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eurlab/quantify.hpp"

namespace eurlab {

struct RelationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  /// max(rhs, 0)
  double rhs_clamped = 0.0;
  /// lhs - rhs
  double slack = 0.0;
};

inline RelationReport make_report(double lhs, double rhs) { return {lhs, rhs, std::max(rhs, 0.0), lhs - rhs}; }

/// H(R|B) + H(S|B) >= log2(1/c) + H(A|B)
inline RelationReport berta_relation(const TwoQubitDensity& rho_ab, const Observable& r, const Observable& s) {
  const double lhs = measured_conditional_entropy(rho_ab, r) + measured_conditional_entropy(rho_ab, s);
  const double rhs = complementarity(r, s).bound_bits + conditional_entropy(rho_ab);
  return make_report(lhs, rhs);
}

/// Born distribution of `obs` on a single qubit.
inline std::array<double, 2> outcome_probabilities(const QubitDensity& rho, const Observable& obs) {
  return {expectation(rho.matrix(), obs.eigenvector(0).amplitudes()),
          expectation(rho.matrix(), obs.eigenvector(1).amplitudes())};
}

/// H(R) + H(S) >= log2(1/c) for a single qubit without memory.
inline RelationReport maassen_uffink(const QubitDensity& rho_a, const Observable& r, const Observable& s) {
  auto clip = [](std::array<double, 2> p) {
    for (double& x : p) x = std::max(x, 0.0);
    return p;
  };
  const double lhs = shannon_entropy(clip(outcome_probabilities(rho_a, r))) +
                     shannon_entropy(clip(outcome_probabilities(rho_a, s)));
  return make_report(lhs, complementarity(r, s).bound_bits);
}

/// h(d_R) + h(d_S) - 1. Negative values certify H(A|B) < 0.
inline double fano_witness(double d_r, double d_s) { return binary_entropy(d_r) + binary_entropy(d_s) - 1.0; }

/// Probability that `obs` measured on both qubits gives different outcomes.
inline double predicted_disagreement(const TwoQubitDensity& rho_ab, const Observable& obs) {
  double d = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      if (i == j) continue;
      const Vec4 v = tensor_product(obs.eigenvector(i).amplitudes(), obs.eigenvector(j).amplitudes());
      d += expectation(rho_ab.matrix(), v);
    }
  return std::clamp(d, 0.0, 1.0);
}

/// c(theta) = max(cos^2 theta, sin^2 theta) for R(theta) against sigma_z.
inline double rotated_complementarity(double theta_deg) {
  const double t = theta_deg * std::numbers::pi / 180.0;
  return std::max(std::cos(t) * std::cos(t), std::sin(t) * std::sin(t));
}

/// log2(1/c(theta)) + H(A|B), before clamping.
inline double rotated_bound(double theta_deg, double h_ab) {
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) throw Error(ErrorCode::DomainError, "theta outside [0,90] degrees");
  return -std::log2(rotated_complementarity(theta_deg)) + h_ab;
}

/// Lower bound of the memory-assisted relation for R(theta), sigma_z, set
/// to zero where it would be negative.
inline double fig5_bound(double theta_deg, double h_ab) { return std::max(0.0, rotated_bound(theta_deg, h_ab)); }

}  // namespace eurlab
