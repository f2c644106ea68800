#pragma once

// Two-qubit state tomography from product-basis count data and single-qubit
// process tomography in the {I, X, Y, Z} operator basis.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "eurlab/error.hpp"
#include "eurlab/linalg.hpp"
#include "eurlab/measure.hpp"
#include "eurlab/states.hpp"

namespace eurlab {

/// All nine pairs from {X, Y, Z} x {X, Y, Z}: 36 product projectors.
inline std::vector<MeasurementSetting> tomography_plan() {
  const std::array<Observable, 3> bases{sigma_x(), sigma_y(), sigma_z()};
  std::vector<MeasurementSetting> plan;
  for (const Observable& a : bases)
    for (const Observable& b : bases) plan.emplace_back(a, b);
  return plan;
}

/// Outcome weights of one setting, counts or exact probabilities.
struct SettingData {
  MeasurementSetting setting;
  OutcomeWeights weights{};

  double total() const { return weights[0] + weights[1] + weights[2] + weights[3]; }
};

using TomographyData = std::vector<SettingData>;

inline TomographyData tomography_data(const CountTable& counts) {
  TomographyData d;
  d.reserve(counts.rows.size());
  for (const CountRow& r : counts.rows) d.push_back({r.setting, r.weights()});
  return d;
}

/// Noiseless data: the Born probabilities of `rho` for every setting.
inline TomographyData exact_tomography_data(const TwoQubitDensity& rho, const std::vector<MeasurementSetting>& plan) {
  TomographyData d;
  d.reserve(plan.size());
  for (const MeasurementSetting& s : plan) d.push_back({s, born_probabilities(rho, s)});
  return d;
}

namespace detail {

struct Outcome {
  Vec4 vector;
  double frequency;
};

inline void require_full_plan(const TomographyData& data) {
  for (const MeasurementSetting& s : tomography_plan()) {
    auto it = std::find_if(data.begin(), data.end(), [&](const SettingData& d) { return d.setting.label == s.label; });
    if (it == data.end()) throw Error(ErrorCode::MissingSetting, "setting " + s.label + " absent");
  }
  for (const SettingData& d : data) {
    if (!(d.total() > 0.0)) throw Error(ErrorCode::MissingSetting, "setting " + d.setting.label + " has no counts");
  }
}

/// Product outcome vectors with per-setting relative frequencies.
inline std::vector<Outcome> per_setting_outcomes(const TomographyData& data) {
  std::vector<Outcome> out;
  out.reserve(4 * data.size());
  for (const SettingData& d : data) {
    const double n = d.total();
    for (std::size_t k = 0; k < 4; ++k) out.push_back({d.setting.outcome_vector(k), d.weights[k] / n});
  }
  return out;
}

/// Rank of a dense row-major matrix by Gaussian elimination with partial pivoting.
inline std::size_t matrix_rank(std::vector<double> a, std::size_t rows, std::size_t cols, double tol) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    for (std::size_t r = rank + 1; r < rows; ++r)
      if (std::abs(a[r * cols + c]) > std::abs(a[piv * cols + c])) piv = r;
    if (std::abs(a[piv * cols + c]) <= tol) continue;
    for (std::size_t k = 0; k < cols; ++k) std::swap(a[rank * cols + k], a[piv * cols + k]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const double f = a[r * cols + c] / a[rank * cols + c];
      for (std::size_t k = c; k < cols; ++k) a[r * cols + k] -= f * a[rank * cols + k];
    }
    ++rank;
  }
  return rank;
}

/// Solves the square system a x = b in place; throws `code` if singular.
template <class T>
std::vector<T> solve_square(std::vector<T> a, std::vector<T> b, std::size_t n, ErrorCode code) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) < 1e-12) throw Error(code, "singular linear system");
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const T f = a[r * n + c] / a[c * n + c];
      if (f == T(0)) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<T> x(n);
  for (std::size_t i = n; i-- > 0;) {
    T s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

/// The 16 two-qubit Pauli products; index 0 is I (x) I.
inline std::array<Mat4, 16> pauli_products() {
  std::array<Mat4, 16> p;
  const auto b = pauli::basis();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) p[4 * i + j] = tensor_product(b[i], b[j]);
  return p;
}

}  // namespace detail

namespace detail {

/// Least-squares map from outcome frequencies to the 15 free Pauli
/// coefficients. Depends only on the measured projectors.
struct LinearInversionSolver {
  std::vector<Vec4> vectors;
  /// rows x 16, entry (r, k) = <v_r|P_k|v_r>/4
  std::vector<double> design;
  /// 15 x rows, (A^T A)^-1 A^T over the non-identity columns
  std::vector<double> pinv;

  explicit LinearInversionSolver(std::vector<Vec4> v) : vectors(std::move(v)) {
    const auto paulis = pauli_products();
    const std::size_t rows = vectors.size();
    design.resize(rows * 16);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t k = 0; k < 16; ++k) design[r * 16 + k] = 0.25 * expectation(paulis[k], vectors[r]);
    if (matrix_rank(design, rows, 16, 1e-9) < 16) {
      throw Error(ErrorCode::RankDeficient, "measurement settings are not informationally complete");
    }
    std::vector<double> ata(15 * 15, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t i = 0; i < 15; ++i)
        for (std::size_t j = 0; j < 15; ++j) ata[i * 15 + j] += design[r * 16 + i + 1] * design[r * 16 + j + 1];
    pinv.assign(15 * rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> col(15);
      for (std::size_t i = 0; i < 15; ++i) col[i] = design[r * 16 + i + 1];
      const auto x = solve_square(ata, col, 15, ErrorCode::RankDeficient);
      for (std::size_t i = 0; i < 15; ++i) pinv[i * rows + r] = x[i];
    }
  }
};

/// Per-thread cache of the most recent solver.
inline const LinearInversionSolver& linear_inversion_solver(const std::vector<Vec4>& vectors) {
  thread_local std::optional<LinearInversionSolver> cached;
  if (!cached || cached->vectors != vectors) {
    cached.reset();
    cached.emplace(vectors);
  }
  return *cached;
}

}  // namespace detail

/// Least-squares solution of f_ij = Tr(rho Pi_ij) over Hermitian unit-trace
/// operators, parameterized as rho = (I + sum_k r_k P_k)/4 with P_k the
/// non-identity Pauli products. The result need not be positive.
inline Mat4 state_linear_inversion(const TomographyData& data) {
  detail::require_full_plan(data);
  const auto outcomes = detail::per_setting_outcomes(data);
  std::vector<Vec4> vectors;
  vectors.reserve(outcomes.size());
  for (const auto& o : outcomes) vectors.push_back(o.vector);
  const auto& solver = detail::linear_inversion_solver(vectors);
  const std::size_t rows = outcomes.size();

  // The identity coefficient is pinned to 1.
  std::array<double, 15> coef{};
  for (std::size_t r = 0; r < rows; ++r) {
    const double target = outcomes[r].frequency - solver.design[r * 16];
    for (std::size_t i = 0; i < 15; ++i) coef[i] += solver.pinv[i * rows + r] * target;
  }
  const auto paulis = detail::pauli_products();
  Mat4 rho = paulis[0];
  for (std::size_t k = 0; k < 15; ++k) rho += coef[k] * paulis[k + 1];
  return hermitian_part(0.25 * rho);
}

/// Nearest unit-trace PSD matrix by eigenvalue clipping, then mixed with
/// `floor_weight` of I/4 so the result is full rank.
inline TwoQubitDensity positive_part(const Mat4& m, double floor_weight = 0.0) {
  const auto es = hermitian_eig(hermitian_part(m));
  double total = 0.0;
  for (double l : es.values) total += std::max(l, 0.0);
  if (!(total > 0.0)) return TwoQubitDensity::maximally_mixed();
  Mat4 clipped = spectral_apply(es, [&](double l) { return std::max(l, 0.0) / total; });
  clipped = (1.0 - floor_weight) * clipped + (floor_weight / 4.0) * Mat4::identity();
  return TwoQubitDensity(clipped);
}

struct MleOptions {
  /// Stop once one iteration raises the log-likelihood by less than this.
  double tol = 1e-10;
  int max_iter = 5000;
  bool record_history = false;
};

struct MleResult {
  TwoQubitDensity state;
  /// Mean log-likelihood per detected event, sum_ij f_ij log p_ij.
  double log_likelihood;
  int iterations;
  bool converged;
  /// Log-likelihood of the start point and of every accepted iterate.
  std::vector<double> history;
};

namespace detail {

struct MleProblem {
  std::vector<Vec4> vectors;
  std::vector<double> freq;  // normalized over all settings

  explicit MleProblem(const TomographyData& data) {
    double grand = 0.0;
    for (const SettingData& d : data) grand += d.total();
    for (const SettingData& d : data)
      for (std::size_t k = 0; k < 4; ++k) {
        if (d.weights[k] <= 0.0) continue;
        vectors.push_back(d.setting.outcome_vector(k));
        freq.push_back(d.weights[k] / grand);
      }
  }

  /// <v|rho|v> for Hermitian rho, using only the upper triangle.
  static double quadratic_form(const Mat4& rho, const Vec4& v) {
    double s = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
      s += rho(a, a).real() * std::norm(v[a]);
      for (std::size_t b = a + 1; b < 4; ++b) s += 2.0 * (std::conj(v[a]) * rho(a, b) * v[b]).real();
    }
    return std::max(s, std::numeric_limits<double>::min());
  }

  std::vector<double> probabilities(const Mat4& rho) const {
    std::vector<double> p(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) p[i] = quadratic_form(rho, vectors[i]);
    return p;
  }

  double log_likelihood(const std::vector<double>& p) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) ll += freq[i] * std::log(p[i]);
    return ll;
  }
  double log_likelihood(const Mat4& rho) const { return log_likelihood(probabilities(rho)); }

  /// R = sum_i (f_i / p_i) |v_i><v_i|
  Mat4 r_operator(const std::vector<double>& p) const {
    Mat4 r;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const double w = freq[i] / p[i];
      const Vec4& v = vectors[i];
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a; b < 4; ++b) r(a, b) += w * v[a] * std::conj(v[b]);
    }
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < a; ++b) r(a, b) = std::conj(r(b, a));
    return r;
  }

  /// Optimality of a state for the concave log-likelihood: every observed
  /// outcome has p > 0 and R(rho) <= I.
  bool is_optimal(const Mat4& rho, double tol = 1e-9) const {
    const auto p = probabilities(rho);
    for (double x : p)
      if (x < 1e-300) return false;
    return eigenvalues(r_operator(p))[0] <= 1.0 + tol;
  }
};

inline Mat4 normalized_sandwich(const Mat4& op, const Mat4& rho) {
  Mat4 next = op * rho * op;
  next = hermitian_part(next) * (1.0 / next.trace().real());
  return next;
}

}  // namespace detail

/// Iterative R rho R maximum-likelihood estimate. Starts from `start` when
/// given; otherwise from the positive part of the linear-inversion estimate
/// if that is already optimal, else from the same mixed with 1e-3 of I/4.
/// A step that would lower the likelihood is replaced by the diluted
/// update (I + eps R) rho (I + eps R) with eps halved until it does not.
inline MleResult state_mle(const TomographyData& data, const MleOptions& opt = {},
                           const TwoQubitDensity* start = nullptr) {
  detail::require_full_plan(data);
  const detail::MleProblem problem(data);

  Mat4 rho;
  if (start) {
    rho = start->matrix();
  } else {
    const Mat4 li = state_linear_inversion(data);
    rho = positive_part(li).matrix();
    if (!problem.is_optimal(rho)) rho = positive_part(li, 1e-3).matrix();
  }
  std::vector<double> p = problem.probabilities(rho);
  double ll = problem.log_likelihood(p);
  MleResult res{TwoQubitDensity::maximally_mixed(), ll, 0, false, {}};
  if (opt.record_history) res.history.push_back(ll);

  const Mat4 id = Mat4::identity();
  for (int it = 1; it <= opt.max_iter; ++it) {
    const Mat4 r = problem.r_operator(p);
    Mat4 next = detail::normalized_sandwich(r, rho);
    std::vector<double> next_p = problem.probabilities(next);
    double next_ll = problem.log_likelihood(next_p);
    for (double eps = 1.0; next_ll < ll && eps > 1e-9; eps *= 0.5) {
      next = detail::normalized_sandwich(id + eps * r, rho);
      next_p = problem.probabilities(next);
      next_ll = problem.log_likelihood(next_p);
    }
    res.iterations = it;
    if (next_ll < ll) {
      // No improving step exists at working precision.
      res.converged = true;
      break;
    }
    const double gain = next_ll - ll;
    rho = next;
    p = std::move(next_p);
    ll = next_ll;
    if (opt.record_history) res.history.push_back(ll);
    if (gain < opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.state = TwoQubitDensity(rho);
  res.log_likelihood = ll;
  return res;
}

/// Process matrix in the {I, X, Y, Z} basis: E(rho) = sum_mn chi_mn E_m rho E_n^dag.
struct ChiMatrix {
  Mat4 m;

  static ChiMatrix identity_process() { return {Mat4::diagonal({1.0, 0.0, 0.0, 0.0})}; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m(i, j); }
};

/// chi from Kraus operators: chi_mn = sum_k a_km conj(a_kn), a_km = Tr(E_m^dag K_k)/2.
inline ChiMatrix channel_chi(const Channel& ch) {
  const auto basis = pauli::basis();
  ChiMatrix chi;
  for (const Mat2& k : ch.kraus) {
    std::array<cplx, 4> a;
    for (std::size_t m = 0; m < 4; ++m) a[m] = 0.5 * (basis[m].adjoint() * k).trace();
    for (std::size_t m = 0; m < 4; ++m)
      for (std::size_t n = 0; n < 4; ++n) chi.m(m, n) += a[m] * std::conj(a[n]);
  }
  return chi;
}

/// Linear inversion of chi from the channel outputs for four input states.
///
/// The inputs' projectors are expanded onto the matrix units |i><j|, the
/// channel is extended linearly to its Choi operator J, and
/// chi_mn = w_m^dag J w_n / 4 with w_m = (I (x) E_m) sum_i |ii>.
inline ChiMatrix process_chi_reconstruct(const std::array<QubitState, 4>& inputs,
                                         const std::array<QubitDensity, 4>& outputs) {
  std::vector<cplx> span(16);
  for (std::size_t k = 0; k < 4; ++k) {
    const Mat2 p = inputs[k].projector();
    for (std::size_t e = 0; e < 4; ++e) span[e * 4 + k] = p(e / 2, e % 2);
  }

  Mat4 choi;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<cplx> unit(4, 0.0);
      unit[2 * i + j] = 1.0;
      const auto c = detail::solve_square(span, unit, 4, ErrorCode::SingularSystem);
      Mat2 image;
      for (std::size_t k = 0; k < 4; ++k) image += c[k] * outputs[k].matrix();
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) choi(2 * i + a, 2 * j + b) = image(a, b);
    }

  const auto basis = pauli::basis();
  std::array<Vec4, 4> w;
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t k = 0; k < 2; ++k) w[m][2 * i + k] = basis[m](k, i);

  ChiMatrix chi;
  for (std::size_t m = 0; m < 4; ++m) {
    const Vec4 jw = choi * w[m];
    for (std::size_t n = 0; n < 4; ++n) chi.m(n, m) = 0.25 * inner(w[n], jw);
  }
  chi.m = hermitian_part(chi.m);
  return chi;
}

inline std::array<QubitState, 4> process_tomography_inputs() { return {ket::H(), ket::V(), ket::D(), ket::R()}; }

/// Clips negative eigenvalues to zero and renormalizes the trace to one.
inline ChiMatrix chi_project_physical(const ChiMatrix& chi) {
  const auto es = hermitian_eig(chi.m);
  double total = 0.0;
  for (double l : es.values) total += std::max(l, 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroTrace, "no positive eigenvalues");
  return {spectral_apply(es, [&](double l) { return std::max(l, 0.0) / total; })};
}

struct ProcessFidelity {
  /// [Tr sqrt(sqrt(chi) chi_ideal sqrt(chi))]^2
  double fidelity;
  /// Tr sqrt(sqrt(chi) chi_ideal sqrt(chi))
  double root_fidelity;
};

inline ProcessFidelity process_fidelity(const ChiMatrix& chi, const ChiMatrix& chi_ideal) {
  const Mat4 root = matrix_sqrt(chi.m);
  if (eigenvalues(chi_ideal.m)[3] < -kNotPsdTol) throw Error(ErrorCode::NotPSD, "ideal process matrix");
  double t = 0.0;
  for (double l : eigenvalues(hermitian_part(root * chi_ideal.m * root))) t += l > 0.0 ? std::sqrt(l) : 0.0;
  return {std::min(t * t, 1.0), std::min(t, 1.0)};
}

/// Normalized Choi state (I (x) E)(|Phi+><Phi+|) with the channel on qubit B.
inline TwoQubitDensity choi_state(const Channel& ch) { return ch.apply_on_b(TwoQubitDensity(bell_state(Bell::PhiPlus))); }

/// Channel outputs for `inputs`, read off a (possibly reconstructed) Choi
/// state: E(s) is proportional to Tr_A[(s^T (x) I) choi].
inline std::array<QubitDensity, 4> outputs_from_choi(const TwoQubitDensity& choi,
                                                     const std::array<QubitState, 4>& inputs) {
  auto out = [&](const QubitState& s) {
    const Mat4 herald = tensor_product(s.projector().transpose(), Mat2::identity());
    Mat2 e = partial_trace_operator(herald * choi.matrix() * herald, Subsystem::A);
    return QubitDensity(hermitian_part(e) * (1.0 / e.trace().real()));
  };
  return {out(inputs[0]), out(inputs[1]), out(inputs[2]), out(inputs[3])};
}

}  // namespace eurlab
