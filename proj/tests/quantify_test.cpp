#include "eurlab/quantify.hpp"

#include <algorithm>
#include <numbers>

#include "gtest/gtest.h"

#include "test_support.hpp"

using namespace eurlab;

namespace {

double h(double p) { return p <= 0 || p >= 1 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

// Wootters' original recipe: square roots of the eigenvalues of the
// non-Hermitian product rho (Y(x)Y) rho* (Y(x)Y). The characteristic
// polynomial comes from Faddeev-LeVerrier and its roots from Durand-Kerner.
double wootters_bruteforce(const Mat4& rho) {
  const Mat4 yy = tensor_product(pauli::Y(), pauli::Y());
  const Mat4 r = rho * yy * rho.conj() * yy;
  std::array<cplx, 5> c{};  // monic: x^4 + c1 x^3 + ... + c4
  c[0] = 1.0;
  Mat4 m;  // M_0 = 0
  for (int k = 1; k <= 4; ++k) {
    m = r * m + c[k - 1] * Mat4::identity();
    c[k] = -(r * m).trace() / double(k);
  }
  auto poly = [&](cplx x) { return (((x + c[1]) * x + c[2]) * x + c[3]) * x + c[4]; };
  std::array<cplx, 4> z{cplx(0.4, 0.9), cplx(0.4, 0.9) * cplx(0.4, 0.9), cplx(0.4, 0.9) * cplx(0.4, 0.9) * cplx(0.4, 0.9),
                        cplx(0.4, 0.9) * cplx(0.4, 0.9) * cplx(0.4, 0.9) * cplx(0.4, 0.9)};
  for (int it = 0; it < 2000; ++it) {
    for (int i = 0; i < 4; ++i) {
      cplx den = 1.0;
      for (int j = 0; j < 4; ++j)
        if (j != i) den *= z[i] - z[j];
      z[i] -= poly(z[i]) / den;
    }
  }
  std::array<double, 4> s;
  for (int i = 0; i < 4; ++i) s[i] = std::sqrt(std::max(0.0, z[i].real()));
  std::sort(s.begin(), s.end(), std::greater<>());
  return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

}  // namespace

TEST(quantify, binary_entropy_values) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  // 0.25*2 + 0.75*log2(4/3)
  EXPECT_NEAR(binary_entropy(0.25), 0.5 + 0.75 * std::log2(4.0 / 3.0), 1e-15);
  EXPECT_NEAR(binary_entropy(0.25), 0.811278, 1e-6);
  for (double p : {0.01, 0.2, 0.37}) EXPECT_DOUBLE_EQ(binary_entropy(p), binary_entropy(1 - p));
  EXPECT_THROW(binary_entropy(-0.01), Error);
  EXPECT_THROW(binary_entropy(1.01), Error);
}

TEST(quantify, von_neumann_entropy_values) {
  EXPECT_NEAR(von_neumann_entropy(TwoQubitDensity(bell_state(Bell::PhiPlus))), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(TwoQubitDensity::maximally_mixed()), 2.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(bds_rho1(0.75)), h(0.75), 1e-12);
  EXPECT_NEAR(von_neumann_entropy(bds_rho1(0.75)), 0.8113, 1e-4);
}

TEST(quantify, von_neumann_entropy_unitary_invariance) {
  test::RandomOps rnd(31);
  for (int n = 0; n < 100; ++n) {
    const auto rho = rnd.density<4>(1 + n % 4);
    const Mat4 u = rnd.unitary<4>();
    const double s = von_neumann_entropy(rho);
    ASSERT_NEAR(von_neumann_entropy(rho.conjugated(u)), s, 1e-9);
    ASSERT_GE(s, -1e-12);
    ASSERT_LE(s, 2.0 + 1e-12);
  }
}

TEST(quantify, conditional_entropy_values) {
  EXPECT_NEAR(conditional_entropy(TwoQubitDensity(bell_state(Bell::PhiPlus))), -1.0, 1e-12);
  EXPECT_NEAR(conditional_entropy(TwoQubitDensity::maximally_mixed()), 1.0, 1e-12);
  for (int i = 0; i <= 10; ++i) {
    const double x = i / 10.0;
    EXPECT_NEAR(conditional_entropy(bds_rho1(x)), h(x) - 1.0, 1e-12);
  }
}

TEST(quantify, measured_conditional_entropy_closed_forms) {
  for (int i = 0; i <= 10; ++i) {
    const double x = i / 10.0;
    const double s1 = measured_conditional_entropy(bds_rho1(x), sigma_x()) +
                      measured_conditional_entropy(bds_rho1(x), sigma_z());
    EXPECT_NEAR(s1, -2 * x * (x > 0 ? std::log2(x) : 0) - 2 * (1 - x) * (x < 1 ? std::log2(1 - x) : 0), 1e-12);
    const double s2 = measured_conditional_entropy(bds_rho2(x), sigma_x()) +
                      measured_conditional_entropy(bds_rho2(x), sigma_z());
    EXPECT_NEAR(s2, h(x), 1e-12);
  }
  EXPECT_NEAR(measured_conditional_entropy(TwoQubitDensity(bell_state(Bell::PhiPlus)), sigma_z()), 0.0, 1e-12);
}

TEST(quantify, measurement_never_lowers_conditional_entropy) {
  test::RandomOps rnd(32);
  for (int n = 0; n < 1000; ++n) {
    const auto rho = rnd.density<4>(1 + n % 4);
    const auto obs = rnd.observable();
    const double measured = measured_conditional_entropy(rho, obs);
    ASSERT_GE(measured - conditional_entropy(rho), -1e-9);
    ASSERT_GE(measured, -1e-9);
  }
}

TEST(quantify, concurrence_values) {
  EXPECT_NEAR(concurrence(TwoQubitDensity(bell_state(Bell::PsiMinus))), 1.0, 1e-9);
  EXPECT_NEAR(concurrence(bds_rho1(0.5)), 0.0, 1e-9);
  EXPECT_NEAR(concurrence(bds_rho1(0.8)), 0.6, 1e-9);
  EXPECT_NEAR(concurrence(TwoQubitDensity::maximally_mixed()), 0.0, 1e-9);
  EXPECT_NEAR(concurrence(TwoQubitDensity(product_state(ket::H(), ket::D()))), 0.0, 1e-7);
}

TEST(quantify, concurrence_of_bell_diagonal_families) {
  for (int i = 0; i <= 10; ++i) {
    const double x = i / 10.0;
    EXPECT_NEAR(concurrence(bds_rho1(x)), std::abs(2 * x - 1), 1e-9);
    EXPECT_NEAR(concurrence(bds_rho2(x)), std::abs(2 * x - 1), 1e-9);
  }
}

TEST(quantify, concurrence_matches_nonhermitian_route) {
  test::RandomOps rnd(33);
  for (int n = 0; n < 200; ++n) {
    const auto rho = rnd.density<4>();
    ASSERT_NEAR(concurrence(rho), wootters_bruteforce(rho.matrix()), 1e-6);
  }
}

TEST(quantify, concurrence_local_unitary_invariance) {
  test::RandomOps rnd(34);
  for (int n = 0; n < 100; ++n) {
    const auto rho = rnd.density<4>(1 + n % 3);
    const Mat4 u = tensor_product(rnd.unitary<2>(), rnd.unitary<2>());
    ASSERT_NEAR(concurrence(rho.conjugated(u)), concurrence(rho), 1e-8);
  }
}

TEST(quantify, complementarity_values) {
  const auto xz = complementarity(sigma_x(), sigma_z());
  EXPECT_NEAR(xz.overlap, 0.5, 1e-15);
  EXPECT_NEAR(xz.bound_bits, 1.0, 1e-14);
  EXPECT_NEAR(complementarity(sigma_z(), sigma_z()).overlap, 1.0, 1e-15);
  EXPECT_NEAR(complementarity(sigma_z(), sigma_z()).bound_bits, 0.0, 1e-15);
  for (double theta : {0.0, 10.0, 30.0, 38.0, 45.0, 60.0, 90.0}) {
    const double t = theta * std::numbers::pi / 180;
    EXPECT_NEAR(complementarity(rotated_observable(theta), sigma_z()).overlap,
                std::max(std::cos(t) * std::cos(t), std::sin(t) * std::sin(t)), 1e-14);
  }
}

TEST(quantify, complementarity_symmetry_and_relabeling) {
  test::RandomOps rnd(35);
  for (int n = 0; n < 100; ++n) {
    const auto r = rnd.observable();
    const auto s = rnd.observable();
    const Observable s_swapped(s.eigenvector(1), s.eigenvector(0), "U", {"P1", "P2"});
    const double c = complementarity(r, s).overlap;
    ASSERT_NEAR(complementarity(s, r).overlap, c, 1e-15);
    ASSERT_NEAR(complementarity(r, s_swapped).overlap, c, 1e-15);
    ASSERT_GE(c, 0.5 - 1e-12);
    ASSERT_LE(c, 1.0 + 1e-12);
  }
}

TEST(quantify, observable_eigenbasis) {
  for (const auto& obs : {sigma_x(), sigma_y(), sigma_z(), rotated_observable(23.0)}) {
    for (std::size_t i = 0; i < 2; ++i) {
      const Vec2 v = obs.eigenvector(i).amplitudes();
      const Vec2 mv = obs.matrix() * v;
      const double lam = i == 0 ? 1.0 : -1.0;
      EXPECT_LT(std::abs(mv[0] - lam * v[0]) + std::abs(mv[1] - lam * v[1]), 1e-10);
    }
  }
  EXPECT_LT(max_abs_diff(sigma_x().matrix(), pauli::X()), 1e-15);
  EXPECT_LT(max_abs_diff(sigma_y().matrix(), pauli::Y()), 1e-15);
  EXPECT_LT(max_abs_diff(sigma_z().matrix(), pauli::Z()), 1e-15);
  EXPECT_THROW(Observable(ket::H(), ket::D(), "bad", {"a", "b"}), Error);
}
