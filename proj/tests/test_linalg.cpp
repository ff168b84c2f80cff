#include <random>

#include <gtest/gtest.h>

#include "nepbe/linalg.hpp"
#include "support.hpp"

using namespace nepbe;
using namespace nepbe::linalg;
using testing_support::random_complex;

TEST(Linalg, VecUnvecRoundTrip) {
  std::mt19937_64 rng(1);
  const Matrix a = random_complex(4, 3, rng);
  EXPECT_EQ(unvec(vec(a), 4, 3), a);
  EXPECT_THROW(unvec(vec(a), 5, 3), DimensionError);
}

TEST(Linalg, KronMatchesDefinitionAndVecIdentity) {
  std::mt19937_64 rng(2);
  const Matrix a = random_complex(2, 3, rng);
  const Matrix b = random_complex(4, 2, rng);
  const Matrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 8);
  ASSERT_EQ(k.cols(), 6);
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 6; ++j) {
      EXPECT_EQ(k(i, j), a(i / 4, j / 2) * b(i % 4, j % 2));
    }
  }
  // vec(B X A^T) = (A kron B) vec(X)
  const Matrix x = random_complex(2, 3, rng);
  const Matrix lhs = b * x * a.transpose();
  EXPECT_LT((vec(lhs) - k * vec(x)).norm(), 1e-12 * lhs.norm());
}

TEST(Linalg, KhatriRaoTransposedRows) {
  std::mt19937_64 rng(3);
  const Matrix g = random_complex(3, 2, rng);
  const Matrix vt = random_complex(3, 5, rng);
  const Matrix m = khatri_rao_t(g, vt);
  ASSERT_EQ(m.cols(), 10);
  for (Index i = 0; i < 3; ++i) {
    const Matrix row = kron(g.row(i), vt.row(i));
    EXPECT_LT((m.row(i) - row).norm(), 1e-15);
  }
  EXPECT_THROW(khatri_rao_t(g, random_complex(2, 5, rng)), DimensionError);
}

TEST(Linalg, CommutationMapsVecToVecTranspose) {
  std::mt19937_64 rng(4);
  for (Index p : {1, 2, 5}) {
    const Matrix x = random_complex(p, p, rng);
    const RealSparseMatrix pi = commutation(p);
    const Vector mapped = pi.cast<Scalar>() * vec(x);
    EXPECT_EQ(mapped, vec(Matrix(x.transpose())));
  }
}

TEST(Linalg, PinvSatisfiesPenroseConditions) {
  std::mt19937_64 rng(5);
  const Matrix a = random_complex(6, 3, rng) * random_complex(3, 5, rng);
  const Matrix x = pinv(a);
  EXPECT_LT((a * x * a - a).norm(), 1e-10 * a.norm());
  EXPECT_LT((x * a * x - x).norm(), 1e-10 * x.norm());
  EXPECT_LT((Matrix(a * x).adjoint() - a * x).norm(), 1e-10);
  EXPECT_LT((Matrix(x * a).adjoint() - x * a).norm(), 1e-10);
}

TEST(Linalg, MinNormMatchesCompleteOrthogonalDecomposition) {
  std::mt19937_64 rng(6);
  for (auto [r, c] : {std::pair<Index, Index>{5, 40}, {8, 8}, {12, 7}, {4, 9}}) {
    const Matrix a = random_complex(r, c, rng);
    const Vector b = random_complex(r, 1, rng);
    const MinNormSolution s = min_norm_solve(a, b);
    const Vector ref = Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(b);
    EXPECT_LT((s.x - ref).norm(), 1e-10 * ref.norm()) << r << "x" << c;
    EXPECT_NEAR(s.residual_norm, (a * ref - b).norm(), 1e-10 * b.norm());
  }
}

TEST(Linalg, MinNormSolverReusesFactorization) {
  std::mt19937_64 rng(7);
  const Matrix a = random_complex(6, 30, rng);
  const MinNormSolver solver(a);
  EXPECT_EQ(solver.effective_rank(), 6);
  for (int t = 0; t < 3; ++t) {
    const Vector b = random_complex(6, 1, rng);
    const MinNormSolution s = solver.solve(b);
    EXPECT_LT((a * s.x - b).norm(), 1e-10 * b.norm());
    EXPECT_LT(s.residual_norm, 1e-10 * b.norm());
  }
  EXPECT_NEAR(solver.sigma_min(), singular_values(a)(5), 1e-12);
}

TEST(Linalg, RankDeficientSolveDropsNullDirections) {
  std::mt19937_64 rng(8);
  const Matrix a = random_complex(6, 2, rng) * random_complex(2, 6, rng);
  const Vector b = random_complex(6, 1, rng);
  const MinNormSolution s = min_norm_solve(a, b);
  EXPECT_EQ(s.effective_rank, 2);
  const Vector ref = pinv(a) * b;
  EXPECT_LT((s.x - ref).norm(), 1e-9 * ref.norm());
}

TEST(Linalg, SigmaAndCondition) {
  const Matrix d = RealVector::LinSpaced(4, 4.0, 1.0).cast<Scalar>().asDiagonal();
  EXPECT_DOUBLE_EQ(sigma(d, 1), 4.0);
  EXPECT_DOUBLE_EQ(sigma(d, 4), 1.0);
  EXPECT_EQ(sigma(d, 5), 0.0);
  EXPECT_NEAR(condition_number(d), 4.0, 1e-14);
  EXPECT_TRUE(std::isinf(condition_number(Matrix::Zero(3, 3))));
}

TEST(Linalg, EconomyQrAndTriangle) {
  std::mt19937_64 rng(9);
  const Matrix v = random_complex(7, 3, rng);
  const QrFactors f = economy_qr(v);
  EXPECT_LT((f.Q * f.T - v).norm(), 1e-12 * v.norm());
  EXPECT_LT((f.Q.adjoint() * f.Q - Matrix::Identity(3, 3)).norm(), 1e-12);
  const Matrix t = qr_triangle(v);
  // Same Gram matrix as v.
  EXPECT_LT((t.adjoint() * t - v.adjoint() * v).norm(), 1e-12 * v.squaredNorm());
  const Matrix wide = random_complex(2, 4, rng);
  const Matrix tw = qr_triangle(wide);
  EXPECT_EQ(tw.rows(), 4);
  EXPECT_LT((tw.adjoint() * tw - wide.adjoint() * wide).norm(), 1e-12 * wide.squaredNorm());
}

TEST(Linalg, MatrixFunctionOfDiagonalizable) {
  std::mt19937_64 rng(10);
  const Matrix x = random_complex(3, 3, rng);
  Vector ev(3);
  ev << Scalar(0.5, 0.1), Scalar(-1.0, 0.0), Scalar(0.2, -0.7);
  const Matrix m = x * ev.asDiagonal() * x.inverse();
  const Matrix fm = matrix_function([](Scalar z) { return std::exp(z); }, m);
  Vector fev = ev.array().exp();
  const Matrix ref = x * fev.asDiagonal() * x.inverse();
  EXPECT_LT((fm - ref).norm(), 1e-10 * ref.norm());
  Matrix jordan = Matrix::Zero(2, 2);
  jordan(0, 1) = 1.0;
  EXPECT_THROW(matrix_function([](Scalar z) { return z; }, jordan), NumericalError);
}
