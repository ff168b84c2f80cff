#pragma once

#include <vector>

#include "nepbe/nep.hpp"
#include "nepbe/structure.hpp"
#include "nepbe/unstructured.hpp"

namespace nepbe {

struct StructuredResult {
  PerturbationSet perturbation;
  /// ||A A^+ r - r|| <= 1e-10 ||r||, i.e. the constraints can be met exactly.
  bool consistent = true;
  /// ||A A^+ r - r|| / ||r|| (zero when r = 0).
  double inconsistency = 0.0;
  /// sigma_min(A)^{-1} ||R||_F over the nonzero singular values of A.
  double upper_bound = 0.0;
  Index effective_rank = 0;
  /// Total number of structure parameters sum_j d_j.
  Index dimension = 0;

  double eta() const { return perturbation.eta; }
};

/// The structured system for fixed (bases, W), factored once. Useful when
/// many residuals share the same eigenpairs, as in perturbation sweeps.
class StructuredSolver {
 public:
  StructuredSolver(std::vector<SubspaceBasis> bases, const Matrix& W,
                   double rank_tol = kDefaultRankTol);

  /// Result for the residual R = sum_j F_j W_j.
  StructuredResult solve(const Matrix& R) const;

  Index dimension() const { return offsets_.back(); }
  /// Smallest nonzero singular value of the system matrix.
  double sigma_min() const { return solver_.sigma_min(); }

 private:
  std::vector<SubspaceBasis> bases_;
  std::vector<Index> offsets_;
  Index n_ = 0;
  linalg::MinNormSolver solver_;
};

/// Structured backward error with every dF_j confined to the linear space of
/// specs[j]. Empty specs means the structures stored in the problem.
StructuredResult structured_backward_error(const SplitNEP& nep, const EigenpairSet& pairs,
                                           std::vector<StructureSpec> specs = {},
                                           double rank_tol = kDefaultRankTol);

/// Same for an invariant pair (V, M); M must be diagonalizable.
StructuredResult structured_backward_error_invariant(const SplitNEP& nep,
                                                     const InvariantPair& pair,
                                                     std::vector<StructureSpec> specs = {},
                                                     double rank_tol = kDefaultRankTol);

/// The n p x d matrix ((G krt V^T) (x) I_n) P assembled column by column from
/// the stacked blocks W_j. Column offsets per term are written to offsets.
Matrix structured_system(const std::vector<SubspaceBasis>& bases, const Matrix& W,
                         std::vector<Index>* offsets = nullptr);

/// Bases for every term; throws std::invalid_argument on a fixed-rank spec.
std::vector<SubspaceBasis> structure_bases(const std::vector<StructureSpec>& specs, Index n);

}  // namespace nepbe
