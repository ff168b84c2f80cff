#pragma once

#include <vector>

#include "nepbe/manifold.hpp"
#include "nepbe/nep.hpp"

namespace nepbe::riemann {

enum class HessianMode { exact, gauss_newton };

/// f(X_1..X_k) = ||sum_j X_j W_j||_F^2 + mu sum_j ||X_j - F_j||_F^2 over a
/// product of real manifolds. Complex W is split as [Re W, Im W], which leaves
/// the residual norm unchanged for real X_j.
class PenaltyProblem {
 public:
  PenaltyProblem(ProductManifold manifold, ProductPoint reference, RealMatrix W, double mu);

  /// Manifolds from specs, reference points from the problem coefficients
  /// (which must lie on their manifolds to within feasibility_tol).
  static PenaltyProblem from_nep(const SplitNEP& nep, const Matrix& W,
                                 const std::vector<StructureSpec>& specs, double mu,
                                 double feasibility_tol = 1e-10);

  const ProductManifold& manifold() const { return manifold_; }
  const ProductPoint& reference() const { return reference_; }
  const RealMatrix& W() const { return W_; }
  Index n() const { return n_; }
  Index k() const { return static_cast<Index>(manifold_.size()); }
  double mu() const { return mu_; }
  void set_mu(double mu);

  /// sum_j X_j W_j (n x m).
  RealMatrix residual(const ProductPoint& x) const;
  /// ||X - F||_F over all terms.
  double distance(const ProductPoint& x) const;
  double cost(const ProductPoint& x, RealMatrix* residual_out = nullptr) const;

  /// Block j: 2 (X W) W_j^T + 2 mu (X_j - F_j), low-rank plus structured.
  std::vector<Ambient> egrad(const ProductPoint& x, const RealMatrix& residual) const;
  std::vector<Ambient> egrad(const ProductPoint& x) const;
  /// Block j: 2 (E W) W_j^T + 2 mu E_j.
  std::vector<Ambient> ehess(const ProductPoint& x, const ProductTangent& xi) const;

  ProductTangent rgrad(const ProductPoint& x, const std::vector<Ambient>& eg) const;
  ProductTangent rhess(const ProductPoint& x, const ProductTangent& xi,
                       const std::vector<Ambient>& eg, HessianMode mode) const;

  /// Reference norm ||[F_1 .. F_k]||_F.
  double reference_norm() const { return reference_norm_; }

 private:
  RealMatrix block(Index j) const { return W_.middleRows(j * n_, n_); }

  ProductManifold manifold_;
  ProductPoint reference_;
  RealMatrix W_;
  Index n_ = 0;
  double mu_ = 1.0;
  double reference_norm_ = 0.0;
};

/// Real stacked W for the penalty problem: W itself when real, otherwise the
/// columns of Re W followed by those of Im W.
RealMatrix real_split(const Matrix& W);

}  // namespace nepbe::riemann
