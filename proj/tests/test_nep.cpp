#include <random>

#include <gtest/gtest.h>

#include "nepbe/nep.hpp"
#include "nepbe/structure.hpp"
#include "support.hpp"

using namespace nepbe;
using namespace testing_support;

TEST(Functions, DerivativesMatchCentralDifferences) {
  const std::vector<ScalarFunction> fs = {functions::one(),         functions::lambda(),
                                          functions::lambda2(),     functions::exp_neg(),
                                          functions::exp_neg2(),    functions::scaled_exp({0.3, -1.0}),
                                          functions::polynomial({1.0, 2.0, -3.0, 0.5})};
  const Scalar z(0.4, -0.7);
  const double h = 1e-6;
  for (const auto& f : fs) {
    const Scalar fd = (f(z + h) - f(z - h)) / (2.0 * h);
    EXPECT_LT(std::abs(fd - f.derivative(z)), 1e-8 * std::max(1.0, std::abs(fd))) << f.name;
  }
}

TEST(Functions, ByNameLookup) {
  EXPECT_EQ(functions::by_name("exp_neg")(0.0), Scalar(1.0));
  EXPECT_EQ(functions::by_name("lambda2")(Scalar(0.0, 2.0)), Scalar(-4.0));
  EXPECT_THROW(functions::by_name("sinh"), std::invalid_argument);
}

TEST(Coefficient, RepresentationsAgree) {
  std::mt19937_64 rng(1);
  const Matrix l = random_complex(6, 2, rng);
  const Matrix r = random_complex(6, 2, rng);
  const Coefficient lr(LowRankFactors{l, r});
  const Matrix d = l * r.transpose();
  EXPECT_LT((lr.dense() - d).norm(), 1e-13 * d.norm());
  EXPECT_NEAR(lr.frobenius_norm(), d.norm(), 1e-12 * d.norm());
  const Matrix x = random_complex(6, 3, rng);
  EXPECT_LT((lr.apply(x) - d * x).norm(), 1e-12 * d.norm() * x.norm());
  EXPECT_LT((lr.apply_transpose(x) - d.transpose() * x).norm(), 1e-12 * d.norm() * x.norm());

  const Coefficient sp(SparseMatrix(d.sparseView()));
  EXPECT_LT((sp.apply(x) - d * x).norm(), 1e-12 * d.norm() * x.norm());
  EXPECT_LT((sp.plus(lr).dense() - 2.0 * d).norm(), 1e-12 * d.norm());
  EXPECT_LT((lr.scaled(Scalar(0, 2)).dense() - Scalar(0, 2) * d).norm(), 1e-12 * d.norm());

  const Coefficient id = Coefficient::identity(4, 3.0);
  EXPECT_EQ(id.dense(), Matrix(3.0 * Matrix::Identity(4, 4)));
  EXPECT_DOUBLE_EQ(id.frobenius_norm(), 6.0);
  EXPECT_EQ(Coefficient::zero(3).frobenius_norm(), 0.0);
}

TEST(SplitNEP, EvaluateMatchesDefinition) {
  std::mt19937_64 rng(2);
  const SplitNEP nep = random_dense_nep(7, 4, rng);
  const Scalar z(0.3, 0.9);
  EXPECT_LT((nep.evaluate(z) - dense_F(nep, z)).norm(), 1e-12 * dense_F(nep, z).norm());
  const Matrix x = random_complex(7, 2, rng);
  EXPECT_LT((nep.apply(z, x) - dense_F(nep, z) * x).norm(), 1e-12 * nep.evaluate(z).norm() * x.norm());
  Matrix dref = Matrix::Zero(7, 7);
  for (Index j = 0; j < 4; ++j) dref += nep.function(j).derivative(z) * nep.coefficient(j).dense();
  EXPECT_LT((nep.evaluate_derivative(z) - dref).norm(), 1e-12 * dref.norm());
  EXPECT_LT((Matrix(nep.evaluate_sparse(z)) - nep.evaluate(z)).norm(), 1e-12 * dref.norm());
}

TEST(SplitNEP, WeightsAreFoldedIntoCoefficients) {
  std::mt19937_64 rng(3);
  const Matrix a = random_complex(3, 3, rng);
  const SplitNEP nep({Coefficient(a), Coefficient::identity(3)},
                     {functions::one(), functions::lambda()}, {2.0, 0.5});
  EXPECT_LT((nep.coefficient(0).dense() - 2.0 * a).norm(), 1e-14);
  EXPECT_LT((nep.raw_coefficient(0).dense() - a).norm(), 1e-14);
  const double expect = std::sqrt(4.0 * a.squaredNorm() + 0.25 * 3.0);
  EXPECT_NEAR(nep.coefficient_norm(), expect, 1e-12);
}

TEST(SplitNEP, RejectsInconsistentInput) {
  EXPECT_THROW(SplitNEP({Coefficient::identity(3), Coefficient::identity(4)},
                        {functions::one(), functions::lambda()}),
               std::invalid_argument);
  EXPECT_THROW(SplitNEP({Coefficient::identity(3)}, {functions::one(), functions::lambda()}),
               std::invalid_argument);
}

TEST(ResidualBundle, BlocksMatchDefinition) {
  std::mt19937_64 rng(4);
  const SplitNEP nep = random_dense_nep(5, 3, rng);
  const EigenpairSet pairs = random_pairs(5, 2, rng);
  const ResidualBundle b = residual_bundle(nep, pairs);
  EXPECT_LT((b.W - stacked_W(nep, pairs)).norm(), 1e-14 * b.W.norm());
  EXPECT_LT((b.R - residual_of(nep, pairs)).norm(), 1e-12 * b.R.norm());
  EXPECT_NEAR(b.residual_norm, b.R.norm(), 1e-12 * b.R.norm());
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 3; ++j) EXPECT_EQ(b.G(i, j), nep.function(j)(pairs.lambdas(i)));
  }
}

TEST(Structure, CanonicalBasesAreOrthonormalAndCorrectlySized) {
  const Index n = 5;
  std::mt19937_64 rng(5);
  const SparsityPattern pat = random_pattern(n, 0.3, rng);
  const std::vector<std::pair<StructureSpec, Index>> cases = {
      {StructureSpec::unstructured(), n * n},
      {StructureSpec::symmetric(), n * (n + 1) / 2},
      {StructureSpec::scaled_identity(), 1},
      {StructureSpec::sparsity(pat), static_cast<Index>(pat.size())},
      {StructureSpec::sparsity(tridiagonal_pattern(n)), 3 * n - 2},
  };
  for (const auto& [spec, dim] : cases) {
    const SubspaceBasis b = canonical_basis(spec, n);
    ASSERT_EQ(b.dim(), dim) << spec.name();
    const Matrix g = b.gram();
    EXPECT_LT((g - Matrix::Identity(dim, dim)).norm(), 1e-12) << spec.name();
    const Matrix w = random_complex(n, 2, rng);
    for (Index i = 0; i < dim; i += std::max<Index>(1, dim / 4)) {
      EXPECT_LT((b.product(i, w) - b.element(i) * w).norm(), 1e-13);
    }
  }
  EXPECT_THROW(canonical_basis(StructureSpec::fixed_rank(2), n), std::invalid_argument);
}

TEST(Structure, SubspaceBasisOrthonormalizesAndDropsDependents) {
  std::mt19937_64 rng(6);
  const Matrix a = random_complex(3, 3, rng);
  const Matrix b = random_complex(3, 3, rng);
  const SubspaceBasis s = SubspaceBasis::from_dense(3, {a, b, a + 2.0 * b});
  EXPECT_EQ(s.dim(), 2);
  EXPECT_LT((s.gram() - Matrix::Identity(2, 2)).norm(), 1e-12);
  // a lies in the span: combine(coordinates(a)) reproduces it.
  EXPECT_LT((s.combine(s.coordinates(a)).dense() - a).norm(), 1e-12 * a.norm());
}

TEST(Structure, PatternOfAndValidation) {
  SparseMatrix s(4, 4);
  s.insert(0, 0) = 1.0;
  s.insert(3, 1) = 2.0;
  s.insert(2, 2) = 1e-20;
  EXPECT_EQ(pattern_of(Coefficient(s)).size(), 3u);
  EXPECT_EQ(pattern_of(Coefficient(s), 1e-10).size(), 2u);
  EXPECT_THROW(StructureSpec::sparsity({{0, 5}}).validate(4), DimensionError);
  EXPECT_THROW(StructureSpec::fixed_rank(5).validate(4), DimensionError);
}
