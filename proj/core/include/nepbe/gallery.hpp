#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nepbe/newton.hpp"
#include "nepbe/nep.hpp"

namespace nepbe {

struct GalleryProblem {
  std::string name;
  SplitNEP nep;
  std::uint64_t seed = 0;
  /// Random factor U of a -U U^T coefficient, per term (empty if none).
  std::vector<RealMatrix> lowrank_factors;
  /// Newton start distribution that finds eigenvalues of this problem.
  CollectOptions solve;

  const std::vector<StructureSpec>& specs() const { return nep.structures(); }
};

/// D(lambda) = -lambda I + A0 + exp(-lambda) e_n e_n^T.
GalleryProblem build_beam(Index n);

/// The beam's A0: [[tridiag(1,-2,1), -w^T], [-n w, n]] with w = e_{n-1}^T.
SparseMatrix beam_a0(Index n);

/// A0 + lambda A1 + lambda^2 I + exp(-lambda) E1 + exp(-2 lambda) E2 with
/// standard normal coefficients (symmetrized when asked).
GalleryProblem build_random_split(Index n, std::uint64_t seed, bool symmetric = false);

/// Same functions with A0, A1, E1, E2 drawn on independent random sparsity
/// patterns of the given density (diagonal always included) and sparsity
/// structure specs on every term.
GalleryProblem build_random_sparse(Index n, std::uint64_t seed, double density = 0.1);

/// A0 + lambda A1 + lambda^2 I with A0 = tridiag(1,-2,1), A1 = -U U^T.
GalleryProblem build_quadratic_lowrank(Index n, std::uint64_t seed, Index rank = 2);

/// Builder by name: beam, random, random-symmetric, random-sparse, quadratic.
GalleryProblem build_gallery(const std::string& name, Index n, std::uint64_t seed);

enum class PerturbationLaw {
  /// Every term receives the same Frobenius share target / sqrt(k).
  equal_share,
  /// Every structure parameter is i.i.d. standard normal; one common scale.
  entrywise,
};

struct Perturbation {
  SplitNEP nep;
  std::vector<Coefficient> deltas;
  /// ||[dF_1 .. dF_k]||_F
  double norm = 0.0;
};

/// Random perturbation of Frobenius norm target_norm keeping each term's
/// structure (rank-r terms -U U^T become -(U + dU)(U + dU)^T). With
/// structured = false every term is perturbed by a dense matrix.
Perturbation perturb(const GalleryProblem& problem, double target_norm, std::mt19937_64& rng,
                     PerturbationLaw law = PerturbationLaw::equal_share,
                     bool structured = true);

struct EnsembleOptions {
  int count = 1000;
  std::uint64_t seed = 0;
  /// Log-uniform magnitude range relative to ||[F_1 .. F_k]||_F.
  double lo = 1e-12;
  double hi = 1e-1;
  PerturbationLaw law = PerturbationLaw::equal_share;
  bool structured = true;
};

/// Member i of a perturbation ensemble; deterministic in (options, i).
Perturbation ensemble_member(const GalleryProblem& problem, const EnsembleOptions& opts, int i);

}  // namespace nepbe
