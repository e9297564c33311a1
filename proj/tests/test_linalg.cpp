#include <gtest/gtest.h>

#include <cmath>

#include "romuq/error.hpp"
#include "romuq/linalg.hpp"
#include "support.hpp"

using namespace romuq;
using namespace romuq::linalg;

TEST(SymEig, IdentityHasUnitSpectrum) {
  const auto e = sym_eig(DenseMatrix::identity(3));
  for (double v : e.values) EXPECT_NEAR(v, 1.0, 1e-14);
  const DenseMatrix g = e.vectors.transpose() * e.vectors;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(SymEig, TwoByTwoHandSolution) {
  const auto e = sym_eig({{2.0, 1.0}, {1.0, 2.0}});
  EXPECT_NEAR(e.values[0], 3.0, 1e-12);
  EXPECT_NEAR(e.values[1], 1.0, 1e-12);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), r, 1e-12);
  EXPECT_NEAR(e.vectors(0, 0), e.vectors(1, 0), 1e-12);
  EXPECT_NEAR(e.vectors(0, 1), -e.vectors(1, 1), 1e-12);
}

TEST(SymEig, DiagonalSortedDescending) {
  const auto e = sym_eig({{2.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 5.0}});
  EXPECT_DOUBLE_EQ(e.values[0], 5.0);
  EXPECT_DOUBLE_EQ(e.values[1], 2.0);
  EXPECT_DOUBLE_EQ(e.values[2], 0.0);
  EXPECT_DOUBLE_EQ(std::abs(e.vectors(2, 0)), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(e.vectors(0, 1)), 1.0);
}

TEST(SymEig, RejectsBadInput) {
  EXPECT_THROW(sym_eig(DenseMatrix(2, 3)), ShapeError);
  EXPECT_THROW(sym_eig({{1.0, 2.0}, {2.1, 1.0}}), SymmetryError);
}

TEST(SymEig, RandomReconstructionProperty) {
  test::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix a = test::random_symmetric(rng, 10);
    const auto e = sym_eig(a);
    DenseMatrix lam(10, 10);
    for (int k = 0; k < 10; ++k) lam(k, k) = e.values[k];
    const DenseMatrix back = e.vectors * lam * e.vectors.transpose();
    double err = 0.0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) err += (back(i, j) - a(i, j)) * (back(i, j) - a(i, j));
    EXPECT_LE(std::sqrt(err), 1e-9 * a.frobenius());
    for (int k = 0; k + 1 < 10; ++k) EXPECT_GE(e.values[k], e.values[k + 1]);
    for (int k = 0; k < 10; ++k) {
      const DenseVector v = e.vectors.column(k);
      const DenseVector r = a * v;
      double res = 0.0;
      for (int i = 0; i < 10; ++i) res += std::pow(r[i] - e.values[k] * v[i], 2);
      EXPECT_LE(std::sqrt(res), 1e-10 * a.frobenius());
    }
  }
}

TEST(LuSolve, Examples) {
  const DenseVector x1 = lu_solve(DenseMatrix::identity(2), {4.0, 7.0});
  EXPECT_DOUBLE_EQ(x1[0], 4.0);
  EXPECT_DOUBLE_EQ(x1[1], 7.0);
  const DenseVector x2 = lu_solve({{2.0, 0.0}, {0.0, 4.0}}, {2.0, 8.0});
  EXPECT_DOUBLE_EQ(x2[0], 1.0);
  EXPECT_DOUBLE_EQ(x2[1], 2.0);
  const DenseVector x3 = lu_solve({{1.0, 1.0}, {1.0, -1.0}}, {3.0, 1.0});
  EXPECT_NEAR(x3[0], 2.0, 1e-15);
  EXPECT_NEAR(x3[1], 1.0, 1e-15);
}

TEST(LuSolve, NeedsPivoting) {
  const DenseVector x = lu_solve({{0.0, 1.0}, {1.0, 0.0}}, {3.0, 5.0});
  EXPECT_DOUBLE_EQ(x[0], 5.0);
  EXPECT_DOUBLE_EQ(x[1], 3.0);
}

TEST(LuSolve, SingularThrows) {
  EXPECT_THROW(lu_solve({{1.0, 2.0}, {2.0, 4.0}}, {1.0, 1.0}), SingularMatrixError);
  EXPECT_THROW(lu_solve(DenseMatrix(2, 3), {1.0, 1.0}), ShapeError);
}

TEST(LuSolve, RandomRoundTripProperty) {
  test::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 12;
    DenseMatrix a = test::random_matrix(rng, n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);  // well conditioned
    DenseVector x(n);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const DenseVector got = lu_solve(a, a * x);
    EXPECT_LE((got - x).norm2(), 1e-9 * x.norm2());
  }
}

TEST(Lstsq, Examples) {
  const DenseVector x1 = lstsq(DenseMatrix::identity(3), {1.0, 2.0, 3.0});
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(x1[i], i + 1.0, 1e-14);
  const DenseVector x2 = lstsq({{1.0}, {1.0}, {1.0}}, {1.0, 2.0, 3.0});
  EXPECT_NEAR(x2[0], 2.0, 1e-14);
  const DenseVector x3 = lstsq({{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}}, {5.0, 6.0, 0.0});
  EXPECT_NEAR(x3[0], 5.0, 1e-14);
  EXPECT_NEAR(x3[1], 6.0, 1e-14);
}

TEST(Lstsq, RankDeficiencyNamesColumns) {
  try {
    lstsq({{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}}, {1.0, 2.0, 3.0});
    FAIL() << "expected ConditioningError";
  } catch (const ConditioningError& e) {
    EXPECT_EQ(e.deficient_columns(), 1);
  }
  EXPECT_THROW(lstsq(DenseMatrix(2, 3), {1.0, 2.0}), ShapeError);
}

TEST(Lstsq, ResidualOrthogonalToColumnSpaceProperty) {
  test::Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t rows = 5 + rng.integer(0, 30);
    const std::size_t cols = 1 + rng.integer(0, 4);
    const DenseMatrix l = test::random_matrix(rng, rows, cols);
    DenseVector y(rows);
    for (double& v : y) v = rng.normal();
    const DenseVector c = lstsq(l, y);
    const DenseVector g = l.transpose() * (l * c - y);
    EXPECT_LE(g.norm_inf(), 1e-9 * l.frobenius() * y.norm2());
  }
}

TEST(Lstsq, SquareMatchesLu) {
  test::Rng rng(3);
  DenseMatrix a = test::random_matrix(rng, 6, 6);
  for (int i = 0; i < 6; ++i) a(i, i) += 6.0;
  const DenseVector b{1.0, -2.0, 0.5, 3.0, 0.0, 1.0};
  EXPECT_LE((lstsq(a, b) - lu_solve(a, b)).norm_inf(), 1e-12);
}

TEST(Dense, RejectsNonFinite) {
  EXPECT_ANY_THROW(DenseMatrix(1, 1, std::nan("")));
  EXPECT_ANY_THROW(DenseVector({1.0, INFINITY}));
}
