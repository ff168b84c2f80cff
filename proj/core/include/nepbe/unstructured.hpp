#pragma once

#include <optional>
#include <vector>

#include "nepbe/coefficient.hpp"
#include "nepbe/nep.hpp"

namespace nepbe {

/// Coefficient perturbations dF_1 .. dF_k and their joint Frobenius norm.
///
/// In factored mode every term shares the left factor: dF_j = -L * right[j]^T
/// with L = shared_left (the n x p residual matrix), so each dF_j and every
/// linear combination of them has rank at most p.
struct PerturbationSet {
  std::vector<Coefficient> deltas;
  double eta = 0.0;
  std::optional<Matrix> shared_left;
  std::vector<Matrix> right;

  bool factored() const { return shared_left.has_value(); }
  Index terms() const { return static_cast<Index>(deltas.size()); }
  Matrix dense(Index j) const { return deltas.at(static_cast<std::size_t>(j)).dense(); }
  /// sqrt(sum_j ||dF_j||_F^2) recomputed from the stored terms.
  double norm_from_terms() const;
};

/// sum_j (F_j + dF_j) W_j for stacked W (kn x p).
Matrix perturbed_residual(const SplitNEP& nep, const Matrix& W,
                          const PerturbationSet& delta);

/// Minimal-norm unstructured perturbation making every pair exact,
/// returned in factored form.
PerturbationSet backward_error_exact(const SplitNEP& nep, const EigenpairSet& pairs,
                                     double rank_tol = kDefaultRankTol);

struct BoundsReport {
  std::optional<double> eta_exact;
  /// sigma_phat(G krt V^T)^{-1} ||R||_F (eigenvector case) or the
  /// sqrt(p) max sigma_hat variant (eigenvalue-only case).
  double upper_krt = 0.0;
  /// sigma_p(G)^{-1} kappa_2(V) ||R||_F, present when p <= kn.
  std::optional<double> upper_G_kappa;
  /// sigma_p(G)^{-1} ||R||_F, present when p <= k.
  std::optional<double> upper_G;
  /// max_i sigma_hat_i / ||G(i,:)||_2, eigenvalue-only case.
  std::optional<double> lower_sv;
  /// Smallest singular value of F(lambda_i) per eigenvalue (eigenvalue-only).
  RealVector sigma_hats;
  /// Right singular vectors behind sigma_hats, one column per eigenvalue.
  Matrix singular_vectors;

  double residual_norm = 0.0;
  Index effective_rank = 0;
  double sigma_phat = 0.0;
  double sigma_p_G = 0.0;
  double kappa_V = 0.0;
  /// True when eigenvector columns had to be rescaled to unit norm.
  bool rescaled = false;
};

BoundsReport bounds_with_eigenvectors(const SplitNEP& nep, const EigenpairSet& pairs);

BoundsReport bounds_eigenvalues_only(const SplitNEP& nep, const Vector& lambdas);

/// norm / sigma with the conventions 0 when norm == 0 and +inf when sigma == 0.
double ratio_bound(double norm, double sigma);

}  // namespace nepbe
