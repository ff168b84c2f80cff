#pragma once

#include "nepbe/nep.hpp"
#include "nepbe/unstructured.hpp"

namespace nepbe {

/// Factors shared by the exact symmetric backward error and its bound.
/// Q holds only the leading p columns of the orthogonal factor of V; the
/// trailing block B2 is carried as C = Q2 * B2 = -(I - Q Q^T) R, which has the
/// same Frobenius norm.
struct SymmetricSolveWorkspace {
  Matrix Q;       // n x p
  Matrix T;       // p x p
  Matrix Ttilde;  // kp x p, block j = T f_j(Lambda)
  Matrix B1;      // p x p, -Q^T R
  Matrix C;       // n x p
  Matrix M_S;     // (p^2 + k p^2) x k p^2
  Matrix R;
};

SymmetricSolveWorkspace symmetric_workspace(const SplitNEP& nep, const EigenpairSet& pairs);

struct SymmetricResult {
  PerturbationSet perturbation;
  SymmetricSolveWorkspace workspace;
  /// ||C Ttilde^+ Ttilde - C||_F / ||C||_F.
  double block21_inconsistency = 0.0;
  /// Relative residual of the M_S system.
  double block11_inconsistency = 0.0;
  /// Squared Frobenius norms of the A11 blocks and of the C_j blocks.
  RealVector a11_norms2;
  RealVector a21_norms2;

  double eta() const { return perturbation.eta; }
};

/// Exact minimal real-symmetric perturbation for real symmetric coefficients
/// and real eigenpairs. dF_j = Q A11_j Q^T + C_j Q^T + Q C_j^T, stored as a
/// rank-2p factorization.
SymmetricResult symmetric_backward_error(const SplitNEP& nep, const EigenpairSet& pairs,
                                         double rank_tol = kDefaultRankTol);

struct SymmetricBound {
  /// sqrt(||M_S^+||_F^2 + 2 ||Ttilde^+||_F^2) ||R||_F
  double with_pinv = 0.0;
  /// sqrt(||M_S^+||_F^2 + 2 ||Ttilde||_F^2) ||R||_F
  double with_ttilde = 0.0;
  /// max of the two.
  double headline() const { return with_pinv > with_ttilde ? with_pinv : with_ttilde; }
};

SymmetricBound symmetric_bound(const SplitNEP& nep, const EigenpairSet& pairs,
                               double rank_tol = kDefaultRankTol);
SymmetricBound symmetric_bound(const SymmetricSolveWorkspace& ws,
                               double rank_tol = kDefaultRankTol);

/// Throws std::invalid_argument unless every coefficient is real symmetric
/// to 1e-12 relative.
void require_real_symmetric(const SplitNEP& nep);

}  // namespace nepbe
