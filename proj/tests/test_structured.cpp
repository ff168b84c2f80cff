#include <random>

#include <gtest/gtest.h>

#include "nepbe/structured_linear.hpp"
#include "support.hpp"

using namespace nepbe;
using namespace testing_support;

namespace {

SplitNEP random_sparse_nep(Index n, Index k, std::mt19937_64& rng, std::vector<StructureSpec>& specs) {
  std::vector<Coefficient> c;
  std::vector<ScalarFunction> f;
  const auto pool = function_pool();
  specs.clear();
  for (Index j = 0; j < k; ++j) {
    const SparsityPattern pat = random_pattern(n, 0.35, rng);
    c.emplace_back(sparse_on(n, pat, rng));
    f.push_back(pool[static_cast<std::size_t>(j)]);
    specs.push_back(StructureSpec::sparsity(pat));
  }
  return SplitNEP(std::move(c), std::move(f), {}, specs);
}

}  // namespace

TEST(Structured, MatchesBasisBruteForce) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    std::vector<StructureSpec> specs;
    const Index n = 4 + t;
    const SplitNEP nep = random_sparse_nep(n, 3, rng, specs);
    const EigenpairSet pairs = random_pairs(n, 1 + t % 2, rng);
    const StructuredResult s = structured_backward_error(nep, pairs);
    const OracleSolution o = structured_oracle(nep, pairs, specs);
    EXPECT_LT(rel_diff(s.eta(), o.eta), 1e-8);
    EXPECT_TRUE(s.consistent);
    for (Index j = 0; j < 3; ++j) {
      EXPECT_LT((s.perturbation.dense(j) - o.deltas[static_cast<std::size_t>(j)]).norm(),
                1e-8 * o.eta);
    }
  }
}

TEST(Structured, PerturbationsKeepTheirPattern) {
  std::mt19937_64 rng(22);
  std::vector<StructureSpec> specs;
  const SplitNEP nep = random_sparse_nep(9, 3, rng, specs);
  const EigenpairSet pairs = random_pairs(9, 2, rng);
  const StructuredResult s = structured_backward_error(nep, pairs);
  for (Index j = 0; j < 3; ++j) {
    Matrix d = s.perturbation.dense(j);
    for (const auto& [a, b] : specs[static_cast<std::size_t>(j)].pattern) d(a, b) = 0.0;
    EXPECT_EQ(d.norm(), 0.0);
  }
  const Matrix w = stacked_W(nep, pairs);
  EXPECT_LT(perturbed_residual(nep, w, s.perturbation).norm(), 1e-10 * residual_scale(nep, w));
}

TEST(Structured, NeverBelowUnstructuredAndBelowItsBound) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 15; ++t) {
    std::vector<StructureSpec> specs;
    const SplitNEP nep = random_sparse_nep(6 + t % 5, 2 + t % 2, rng, specs);
    const EigenpairSet pairs = random_pairs(nep.n(), 1 + t % 2, rng);
    const StructuredResult s = structured_backward_error(nep, pairs);
    const double eta = backward_error_exact(nep, pairs).eta;
    EXPECT_GE(s.eta(), eta * (1 - 1e-12));
    EXPECT_LE(s.eta(), s.upper_bound * (1 + 1e-10));
  }
}

TEST(Structured, UnstructuredSpecsReproduceExactError) {
  std::mt19937_64 rng(24);
  const SplitNEP nep = random_dense_nep(5, 3, rng);
  const EigenpairSet pairs = random_pairs(5, 2, rng);
  const StructuredResult s = structured_backward_error(
      nep, pairs, std::vector<StructureSpec>(3, StructureSpec::unstructured()));
  EXPECT_LT(rel_diff(s.eta(), backward_error_exact(nep, pairs).eta), 1e-10);
}

TEST(Structured, InconsistentSystemIsFlagged) {
  // Scaled identities cannot fix a residual that is not parallel to v.
  const Index n = 4;
  std::mt19937_64 rng(25);
  const SplitNEP nep({Coefficient(Matrix(random_real(n, n, rng).cast<Scalar>())),
                      Coefficient::identity(n, -1.0)},
                     {functions::one(), functions::lambda()});
  const EigenpairSet pairs = random_pairs(n, 1, rng, true);
  const StructuredResult s = structured_backward_error(
      nep, pairs, {StructureSpec::scaled_identity(), StructureSpec::scaled_identity()});
  EXPECT_FALSE(s.consistent);
  EXPECT_GT(s.inconsistency, 1e-3);
}

TEST(Structured, SolverMatchesFreeFunctionAcrossResiduals) {
  std::mt19937_64 rng(26);
  std::vector<StructureSpec> specs;
  const SplitNEP nep = random_sparse_nep(8, 3, rng, specs);
  const EigenpairSet pairs = random_pairs(8, 2, rng);
  const Matrix w = stacked_W(nep, pairs);
  const StructuredSolver solver(structure_bases(specs, 8), w);
  EXPECT_EQ(solver.dimension(), structured_system(structure_bases(specs, 8), w).cols());
  const StructuredResult a = solver.solve(residual_of(nep, pairs));
  const StructuredResult b = structured_backward_error(nep, pairs);
  EXPECT_LT(rel_diff(a.eta(), b.eta()), 1e-12);
  EXPECT_LT(rel_diff(a.upper_bound, b.upper_bound), 1e-12);
}

TEST(Structured, InvariantPairWithDiagonalMatchesEigenpairs) {
  std::mt19937_64 rng(27);
  std::vector<StructureSpec> specs;
  const SplitNEP nep = random_sparse_nep(7, 3, rng, specs);
  const EigenpairSet pairs = random_pairs(7, 2, rng);
  InvariantPair ip{pairs.V, Matrix(pairs.lambdas.asDiagonal())};
  const StructuredResult a = structured_backward_error_invariant(nep, ip);
  const StructuredResult b = structured_backward_error(nep, pairs);
  EXPECT_LT(rel_diff(a.eta(), b.eta()), 1e-8);
}

TEST(Structured, FixedRankSpecIsRejected) {
  EXPECT_THROW(structure_bases({StructureSpec::fixed_rank(1)}, 4), std::invalid_argument);
}
