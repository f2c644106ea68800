#include "eurlab/linalg.hpp"

#include "gtest/gtest.h"

#include "eurlab/states.hpp"
#include "test_support.hpp"

using namespace eurlab;

TEST(linalg, eig_sigma_z) {
  const auto es = hermitian_eig(pauli::Z());
  EXPECT_DOUBLE_EQ(es.values[0], 1.0);
  EXPECT_DOUBLE_EQ(es.values[1], -1.0);
  EXPECT_NEAR(std::abs(es.vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(1, 1)), 1.0, 1e-15);
}

TEST(linalg, eig_scalar_matrix) {
  const auto es = hermitian_eig(Mat4::identity() * 0.25);
  for (double l : es.values) EXPECT_DOUBLE_EQ(l, 0.25);
}

TEST(linalg, eig_bell_projector) {
  // |Phi+><Phi+| assembled entry by entry.
  Mat4 p;
  p(0, 0) = p(0, 3) = p(3, 0) = p(3, 3) = 0.5;
  const auto es = hermitian_eig(p);
  EXPECT_NEAR(es.values[0], 1.0, 1e-14);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(es.values[k], 0.0, 1e-14);
  const Vec4 top = es.vector(0);
  const cplx phase = top[0] / std::abs(top[0]);
  EXPECT_NEAR(std::abs(top[0] / phase - std::sqrt(0.5)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(top[3] / phase - std::sqrt(0.5)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(top[1]), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(top[2]), 0.0, 1e-12);
}

TEST(linalg, eig_rejects_non_hermitian) {
  Mat2 m{0.0, 1.0, 0.0, 0.0};
  try {
    hermitian_eig(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}

TEST(linalg, eig_random_hermitian_reconstruction) {
  test::RandomOps rnd(11);
  for (int n = 0; n < 1000; ++n) {
    const Mat4 m = rnd.hermitian<4>();
    const auto es = hermitian_eig(m);
    ASSERT_LT(max_abs_diff(es.reconstruct(), m), 1e-10);
    ASSERT_LT(max_abs_diff(es.vectors.adjoint() * es.vectors, Mat4::identity()), 1e-10);
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      sum += es.values[k];
      if (k > 0) {
        ASSERT_GE(es.values[k - 1], es.values[k]);
      }
    }
    ASSERT_NEAR(sum, m.trace().real(), 1e-10);
  }
}

TEST(linalg, eig_degenerate_and_complex_entries) {
  // Y (x) Y has a doubly degenerate spectrum {1, 1, -1, -1} and complex eigenvectors of Y alone.
  const auto es = hermitian_eig(tensor_product(pauli::Y(), pauli::Y()));
  EXPECT_NEAR(es.values[0], 1.0, 1e-14);
  EXPECT_NEAR(es.values[1], 1.0, 1e-14);
  EXPECT_NEAR(es.values[2], -1.0, 1e-14);
  EXPECT_NEAR(es.values[3], -1.0, 1e-14);
  const auto ey = hermitian_eig(pauli::Y());
  EXPECT_LT(max_abs_diff(ey.reconstruct(), pauli::Y()), 1e-14);
}

TEST(linalg, tensor_product_examples) {
  EXPECT_EQ(tensor_product(Mat2::identity(), Mat2::identity()), Mat4::identity());
  EXPECT_EQ(tensor_product(pauli::Z(), pauli::Z()), Mat4::diagonal({1.0, -1.0, -1.0, 1.0}));
  // Y (x) Y by hand: antidiagonal (-1, 1, 1, -1).
  Mat4 yy;
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  EXPECT_LT(max_abs_diff(tensor_product(pauli::Y(), pauli::Y()), yy), 1e-15);
}

TEST(linalg, tensor_product_ordering_a_is_most_significant) {
  // |0>_A (x) |1>_B is basis index 1.
  const Vec4 v = tensor_product(Vec2{1.0, 0.0}, Vec2{0.0, 1.0});
  EXPECT_EQ(v[1], cplx(1.0));
}

TEST(linalg, partial_trace_examples) {
  const Mat4 phi = TwoQubitDensity(bell_state(Bell::PhiPlus)).matrix();
  EXPECT_LT(max_abs_diff(partial_trace(phi, Subsystem::A), Mat2::identity() * 0.5), 1e-15);

  Mat4 p00;
  p00(0, 0) = 1.0;
  EXPECT_LT(max_abs_diff(partial_trace(p00, Subsystem::B), Mat2::diagonal({1.0, 0.0})), 1e-15);

  // rho1(0.75) = 0.75 Phi+ + 0.25 Psi-; both Bell marginals are I/2.
  const Mat4 psi = TwoQubitDensity(bell_state(Bell::PsiMinus)).matrix();
  const Mat4 rho1 = 0.75 * phi + 0.25 * psi;
  EXPECT_LT(max_abs_diff(partial_trace(rho1, Subsystem::A), Mat2::identity() * 0.5), 1e-15);
}

TEST(linalg, partial_trace_rejects_bad_trace) {
  try {
    partial_trace(Mat4::identity(), Subsystem::A);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidState);
  }
}

TEST(linalg, partial_trace_of_product_property) {
  test::RandomOps rnd(12);
  for (int n = 0; n < 200; ++n) {
    const Mat2 a = rnd.ginibre<2>(), b = rnd.ginibre<2>();
    const Mat4 ab = tensor_product(a, b);
    ASSERT_LT(max_abs_diff(partial_trace_operator(ab, Subsystem::A), a.trace() * b), 1e-12);
    ASSERT_LT(max_abs_diff(partial_trace_operator(ab, Subsystem::B), b.trace() * a), 1e-12);
  }
  for (int n = 0; n < 200; ++n) {
    const auto a = rnd.density<2>(), b = rnd.density<2>();
    const Mat2 rb = partial_trace(tensor_product(a.matrix(), b.matrix()), Subsystem::A);
    ASSERT_LT(max_abs_diff(rb, b.matrix()), 1e-12);
    ASSERT_NEAR(rb.trace().real(), 1.0, 1e-12);
  }
}

TEST(linalg, matrix_sqrt_examples) {
  EXPECT_LT(max_abs_diff(matrix_sqrt(Mat4::identity()), Mat4::identity()), 1e-14);
  EXPECT_LT(max_abs_diff(matrix_sqrt(Mat2::diagonal({4.0, 1.0})), Mat2::diagonal({2.0, 1.0})), 1e-14);
  const Mat4 phi = TwoQubitDensity(bell_state(Bell::PhiPlus)).matrix();
  EXPECT_LT(max_abs_diff(matrix_sqrt(phi), phi), 1e-12);
}

TEST(linalg, matrix_sqrt_rejects_negative) {
  try {
    matrix_sqrt(Mat2::diagonal({1.0, -1e-6}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPSD);
  }
  // Tiny negative noise is clipped.
  EXPECT_LT(max_abs_diff(matrix_sqrt(Mat2::diagonal({1.0, -1e-11})), Mat2::diagonal({1.0, 0.0})), 1e-14);
}

TEST(linalg, matrix_sqrt_squares_back) {
  test::RandomOps rnd(13);
  for (int n = 0; n < 100; ++n) {
    const Mat4 g = rnd.ginibre<4>();
    const Mat4 m = hermitian_part(g * g.adjoint());
    const Mat4 r = matrix_sqrt(m);
    ASSERT_LT(max_abs_diff(r * r, m), 1e-9);
  }
}
