#pragma once

#include <string>
#include <vector>

#include "nepbe/penalty.hpp"
#include "nepbe/unstructured.hpp"

namespace nepbe::riemann {

struct TrustRegionOptions {
  int max_iter = 1000;
  /// Inner truncated-CG iterations; 0 means min(manifold dimension, 1000).
  int max_inner = 0;
  /// Stop once ||grad|| <= gtol_rel * ||grad(start)|| or <= gtol_abs.
  double gtol_rel = 1e-8;
  double gtol_abs = 0.0;
  double theta = 1.0;
  double kappa = 0.1;
  /// Maximum and initial radius; 0 picks max(1, ||F||_F) and a eighth of it.
  double delta_bar = 0.0;
  double delta0 = 0.0;
  double rho_prime = 0.1;
  HessianMode hessian = HessianMode::exact;
};

struct TrustRegionStep {
  int iteration = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double radius = 0.0;
  int inner = 0;
  bool accepted = false;
};

struct TrustRegionResult {
  ProductPoint x;
  double cost = 0.0;
  double grad_norm = 0.0;
  double initial_grad_norm = 0.0;
  int iterations = 0;
  int inner_total = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<TrustRegionStep> history;
};

/// Riemannian trust region with Steihaug-Toint truncated CG. Non-convergence
/// is reported in the result, not thrown.
TrustRegionResult trust_region_minimize(const PenaltyProblem& problem, ProductPoint start,
                                        const TrustRegionOptions& opts = {});

struct ContinuationOptions {
  double mu0 = 1.0;
  /// Penalty decrease factor per outer step.
  double rho = 0.1;
  /// Stop once sqrt(mu) <= eps.
  double eps = 1e-8;
  double feasibility_tol = 1e-10;
  /// Inner solves also stop once the gradient norm falls to this multiple
  /// of machine epsilon times ||F||_F ||W||_F^2, the rounding level of the
  /// penalty gradient.
  double gradient_floor = 0.1;
  TrustRegionOptions inner;
};

struct ContinuationStep {
  double mu = 0.0;
  double residual_norm = 0.0;
  double eta = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  double seconds = 0.0;
};

struct ContinuationResult {
  /// dF_j = X_j - F_j; eta = ||X - F||_F.
  PerturbationSet perturbation;
  std::vector<Coefficient> coefficients;
  ProductPoint point;
  double residual_norm = 0.0;
  /// ||[F_1..F_k]||_F ||W||_F for judging residual_norm.
  double residual_scale = 0.0;
  bool converged = true;
  std::vector<ContinuationStep> history;

  double eta() const { return perturbation.eta; }
};

/// Penalty continuation: minimize the penalized functional for
/// mu = mu0, mu0 rho, ... until sqrt(mu) <= eps, each solve warm-started from
/// the previous one. Empty specs means the structures stored in the problem.
ContinuationResult penalty_continuation(const SplitNEP& nep, const EigenpairSet& pairs,
                                        std::vector<StructureSpec> specs = {},
                                        const ContinuationOptions& opts = {});

/// Same with stacked W (kn x p) given directly.
ContinuationResult penalty_continuation(const SplitNEP& nep, const Matrix& W,
                                        std::vector<StructureSpec> specs,
                                        const ContinuationOptions& opts);

}  // namespace nepbe::riemann
