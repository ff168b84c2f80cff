#include <random>

#include <gtest/gtest.h>

#include "nepbe/structured_linear.hpp"
#include "nepbe/symmetric.hpp"
#include "support.hpp"

using namespace nepbe;
using namespace testing_support;

TEST(Symmetric, AgreesWithStructuredSymmetricBasis) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 12; ++t) {
    const Index n = 3 + t;
    const Index p = 1 + t % 3;
    const SplitNEP nep = random_symmetric_nep(n, 3, rng);
    const EigenpairSet pairs = random_pairs(n, p, rng, true);
    const SymmetricResult s = symmetric_backward_error(nep, pairs);
    const OracleSolution o = structured_oracle(
        nep, pairs, std::vector<StructureSpec>(3, StructureSpec::symmetric()));
    EXPECT_LT(rel_diff(s.eta(), o.eta), 1e-8) << "n=" << n << " p=" << p;
  }
}

TEST(Symmetric, PerturbationsAreRealSymmetricAndExact) {
  std::mt19937_64 rng(32);
  const SplitNEP nep = random_symmetric_nep(10, 3, rng);
  const EigenpairSet pairs = random_pairs(10, 3, rng, true);
  const SymmetricResult s = symmetric_backward_error(nep, pairs);
  for (Index j = 0; j < 3; ++j) {
    const Matrix d = s.perturbation.dense(j);
    EXPECT_LT((d - d.transpose()).norm(), 1e-12 * d.norm());
    EXPECT_LT(linalg::max_abs_imag(d), 1e-12 * d.norm());
    const RealVector sv = linalg::singular_values(d);
    EXPECT_LT(sv(6), 1e-10 * sv(0));  // rank at most 2p
  }
  const Matrix w = stacked_W(nep, pairs);
  EXPECT_LT(perturbed_residual(nep, w, s.perturbation).norm(), 1e-10 * residual_scale(nep, w));
  EXPECT_LT(s.block21_inconsistency, 1e-10);
  EXPECT_LT(s.block11_inconsistency, 1e-10);
}

TEST(Symmetric, WorkspaceFactorsReconstructV) {
  std::mt19937_64 rng(33);
  const SplitNEP nep = random_symmetric_nep(8, 3, rng);
  const EigenpairSet pairs = random_pairs(8, 2, rng, true);
  const SymmetricSolveWorkspace ws = symmetric_workspace(nep, pairs);
  EXPECT_LT((ws.Q * ws.T - pairs.V).norm(), 1e-12);
  EXPECT_LT((ws.Q.adjoint() * ws.Q - Matrix::Identity(2, 2)).norm(), 1e-12);
  // R splits into its component along Q and the orthogonal remainder C.
  EXPECT_LT((-ws.Q * ws.B1 - ws.C - ws.R).norm(), 1e-12 * ws.R.norm());
  EXPECT_LT((ws.Q.adjoint() * ws.C).norm(), 1e-12 * ws.R.norm());
}

TEST(Symmetric, BoundsDominateExactError) {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 15; ++t) {
    const Index n = 4 + t;
    const SplitNEP nep = random_symmetric_nep(n, 3, rng);
    const EigenpairSet pairs = random_pairs(n, 1 + t % 3, rng, true);
    const SymmetricResult s = symmetric_backward_error(nep, pairs);
    const SymmetricBound b = symmetric_bound(s.workspace);
    EXPECT_GE(b.with_pinv, s.eta() * (1 - 1e-10));
    EXPECT_DOUBLE_EQ(b.headline(), std::max(b.with_pinv, b.with_ttilde));
    const SymmetricBound b2 = symmetric_bound(nep, pairs);
    EXPECT_DOUBLE_EQ(b2.with_pinv, b.with_pinv);
  }
}

TEST(Symmetric, NeverBelowUnstructured) {
  std::mt19937_64 rng(35);
  const SplitNEP nep = random_symmetric_nep(9, 3, rng);
  const EigenpairSet pairs = random_pairs(9, 2, rng, true);
  EXPECT_GE(symmetric_backward_error(nep, pairs).eta(),
            backward_error_exact(nep, pairs).eta * (1 - 1e-12));
}

TEST(Symmetric, RejectsNonSymmetricInput) {
  std::mt19937_64 rng(36);
  const SplitNEP dense = random_dense_nep(5, 2, rng, true);
  EXPECT_THROW(require_real_symmetric(dense), std::invalid_argument);
  const SplitNEP sym = random_symmetric_nep(5, 2, rng);
  EXPECT_NO_THROW(require_real_symmetric(sym));
  EXPECT_THROW(symmetric_backward_error(sym, random_pairs(5, 1, rng, false)),
               std::invalid_argument);
}
