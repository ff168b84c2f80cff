#pragma once

#include <vector>

#include "nepbe/coefficient.hpp"
#include "nepbe/functions.hpp"
#include "nepbe/linalg.hpp"
#include "nepbe/structure.hpp"

namespace nepbe {

/// F(lambda) = sum_j w_j f_j(lambda) F_j. Weights are folded into the stored
/// coefficients at construction, so coefficient(j) already carries w_j.
class SplitNEP {
 public:
  SplitNEP() = default;
  SplitNEP(std::vector<Coefficient> coeffs, std::vector<ScalarFunction> funcs,
           std::vector<double> weights = {},
           std::vector<StructureSpec> structures = {});

  Index n() const { return n_; }
  Index k() const { return static_cast<Index>(coeffs_.size()); }

  const Coefficient& coefficient(Index j) const { return coeffs_.at(static_cast<std::size_t>(j)); }
  const Coefficient& raw_coefficient(Index j) const { return raw_.at(static_cast<std::size_t>(j)); }
  const std::vector<Coefficient>& coefficients() const { return coeffs_; }
  const ScalarFunction& function(Index j) const { return funcs_.at(static_cast<std::size_t>(j)); }
  const std::vector<ScalarFunction>& functions() const { return funcs_; }
  double weight(Index j) const { return weights_.at(static_cast<std::size_t>(j)); }
  const std::vector<double>& weights() const { return weights_; }
  const StructureSpec& structure(Index j) const { return structures_.at(static_cast<std::size_t>(j)); }
  const std::vector<StructureSpec>& structures() const { return structures_; }

  /// (f_1(lambda), ..., f_k(lambda)).
  RowVector function_values(Scalar lambda) const;
  RowVector derivative_values(Scalar lambda) const;

  Matrix evaluate(Scalar lambda) const;
  Matrix evaluate_derivative(Scalar lambda) const;
  /// Sparse assembly; low-rank and dense terms are densified into it.
  SparseMatrix evaluate_sparse(Scalar lambda) const;
  bool all_sparse() const;

  /// F(lambda) * x without forming F(lambda).
  Matrix apply(Scalar lambda, const Matrix& x) const;
  Matrix apply_derivative(Scalar lambda, const Matrix& x) const;

  /// ||[F_1 ... F_k]||_F of the (weighted) coefficients.
  double coefficient_norm() const;

  /// Same functions and structure tags, new (already weighted) coefficients.
  SplitNEP with_coefficients(std::vector<Coefficient> coeffs) const;

 private:
  Index n_ = 0;
  std::vector<Coefficient> raw_;
  std::vector<Coefficient> coeffs_;
  std::vector<ScalarFunction> funcs_;
  std::vector<double> weights_;
  std::vector<StructureSpec> structures_;
};

/// p approximate eigenvalues with matching eigenvector columns.
struct EigenpairSet {
  Vector lambdas;
  Matrix V;
  bool normalized = false;

  Index size() const { return lambdas.size(); }
  /// Copy with every column scaled to unit 2-norm.
  EigenpairSet normalized_copy() const;
  void validate(Index n) const;
};

/// (V, M) with sum_j F_j V f_j(M) = 0 for an exact invariant pair.
struct InvariantPair {
  Matrix V;
  Matrix M;
};

struct ResidualBundle {
  Matrix R;  // n x p
  Matrix G;  // p x k, G(i,j) = f_j(lambda_i)
  Matrix W;  // kn x p, block j = V f_j(Lambda)
  double residual_norm = 0.0;
  RealVector column_norms;

  Index n() const { return R.rows(); }
  Index p() const { return R.cols(); }
  Index k() const { return G.cols(); }
  /// Block j of W (n x p).
  Matrix W_block(Index j) const { return W.middleRows(j * n(), n()); }
};

struct InvariantResidual {
  Matrix R;     // n x p
  Matrix Ghat;  // p x kp, [f_1(M)^T ... f_k(M)^T]
  Matrix W;     // kn x p, block j = V f_j(M)
};

/// G(i,j) = f_j(lambda_i).
Matrix function_matrix(const SplitNEP& nep, const Vector& lambdas);

ResidualBundle residual_bundle(const SplitNEP& nep, const EigenpairSet& pairs);

InvariantResidual invariant_residual(const SplitNEP& nep, const InvariantPair& pair,
                                     double diag_cond_tol = 1e8);

/// sum_j C_j W_j for coefficient-like blocks C_j and stacked W (kn x p).
Matrix apply_blocks(const std::vector<Coefficient>& blocks, const Matrix& W);

/// ||[F_1 ... F_k]||_F * ||W||_F, the natural size of a residual.
double residual_scale(const SplitNEP& nep, const Matrix& W);

}  // namespace nepbe
