#include <random>

#include <gtest/gtest.h>

#include "nepbe/gallery.hpp"
#include "nepbe/newton.hpp"
#include "support.hpp"

using namespace nepbe;
using namespace testing_support;

namespace {

SplitNEP diagonal_pencil(Index n) {
  const RealVector d = RealVector::LinSpaced(n, 1.0, static_cast<double>(n));
  return SplitNEP({Coefficient(SparseMatrix(Matrix(d.cast<Scalar>().asDiagonal()).sparseView())),
                   Coefficient::identity(n, -1.0)},
                  {functions::one(), functions::lambda()});
}

}  // namespace

TEST(Newton, ConvergesQuadraticallyOnDiagonalPencil) {
  const SplitNEP nep = diagonal_pencil(6);
  NewtonStart s;
  s.lambda = 3.2;
  s.v = Vector::Ones(6);
  s.v(2) = 10.0;
  const NewtonResult r = newton_eigenpair(nep, s);
  ASSERT_TRUE(r.converged) << r.failure;
  EXPECT_NEAR(std::abs(r.lambda - Scalar(3.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r.v(2)), 1.0, 1e-12);
  EXPECT_NEAR(r.v.norm(), 1.0, 1e-14);
  EXPECT_LE(r.iterations, 8);
}

TEST(Newton, CollectsDistinctPairsInStartOrder) {
  const SplitNEP nep = diagonal_pencil(5);
  CollectOptions co;
  co.p = 3;
  for (double l : {1.1, 1.05, 2.1, 4.8}) co.explicit_starts.push_back({Scalar(l), {}});
  const CollectResult c = collect_pairs(nep, co);
  ASSERT_TRUE(c.complete);
  EXPECT_NEAR(c.pairs.lambdas(0).real(), 1.0, 1e-10);
  EXPECT_NEAR(c.pairs.lambdas(1).real(), 2.0, 1e-10);
  EXPECT_NEAR(c.pairs.lambdas(2).real(), 5.0, 1e-10);
}

TEST(Newton, ReportsIncompleteCollection) {
  const SplitNEP nep = diagonal_pencil(4);
  CollectOptions co;
  co.p = 3;
  co.explicit_starts = {{Scalar(2.1), {}}, {Scalar(2.05), {}}};
  const CollectResult c = collect_pairs(nep, co);
  EXPECT_FALSE(c.complete);
  EXPECT_EQ(c.pairs.size(), 1);
  EXPECT_FALSE(c.warning.empty());
}

TEST(Newton, BeamEigenpairsHaveSmallResiduals) {
  const GalleryProblem g = build_beam(200);
  CollectOptions co = g.solve;
  co.p = 3;
  const CollectResult c = collect_pairs(g.nep, co);
  ASSERT_TRUE(c.complete) << c.warning;
  for (Index i = 0; i < 3; ++i) {
    const Matrix f = dense_F(g.nep, c.pairs.lambdas(i));
    EXPECT_LT((f * c.pairs.V.col(i)).norm(), 1e-12 * f.norm());
    EXPECT_NEAR(relative_residual(g.nep, c.pairs.lambdas(i), c.pairs.V.col(i)),
                (f * c.pairs.V.col(i)).norm() / f.norm(), 1e-14);
    for (Index j = 0; j < i; ++j) {
      EXPECT_GT(std::abs(c.pairs.lambdas(i) - c.pairs.lambdas(j)), 1e-6);
    }
  }
}

TEST(Newton, ComplexEigenvaluesOfDenseProblem) {
  const GalleryProblem g = build_random_split(20, 3);
  CollectOptions co = g.solve;
  co.p = 2;
  co.starts = 16;
  const CollectResult c = collect_pairs(g.nep, co);
  ASSERT_TRUE(c.complete) << c.warning;
  for (Index i = 0; i < 2; ++i) {
    const Matrix f = dense_F(g.nep, c.pairs.lambdas(i));
    EXPECT_LT((f * c.pairs.V.col(i)).norm(), 1e-11 * f.norm());
  }
}

TEST(Newton, SparseLowRankSolvePath) {
  const GalleryProblem g = build_quadratic_lowrank(60, 5, 2);
  CollectOptions co = g.solve;
  co.p = 2;
  const CollectResult c = collect_pairs(g.nep, co);
  ASSERT_TRUE(c.complete) << c.warning;
  for (Index i = 0; i < 2; ++i) {
    const Matrix f = dense_F(g.nep, c.pairs.lambdas(i));
    EXPECT_LT((f * c.pairs.V.col(i)).norm(), 1e-12 * f.norm());
  }
}

TEST(Newton, EvaluationNormMatchesDense) {
  const GalleryProblem q = build_quadratic_lowrank(30, 1, 2);
  const GalleryProblem b = build_beam(25);
  const GalleryProblem r = build_random_split(9, 2);
  for (const GalleryProblem* g : {&q, &b, &r}) {
    for (Scalar z : {Scalar(0.3, 0.0), Scalar(-1.2, 0.8)}) {
      const double ref = dense_F(g->nep, z).norm();
      EXPECT_NEAR(evaluation_norm(g->nep, z), ref, 1e-12 * ref) << g->name;
    }
  }
}
