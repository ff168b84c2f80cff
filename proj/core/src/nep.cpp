#include "nepbe/nep.hpp"

#include <cmath>

namespace nepbe {

SplitNEP::SplitNEP(std::vector<Coefficient> coeffs, std::vector<ScalarFunction> funcs,
                   std::vector<double> weights,
                   std::vector<StructureSpec> structures)
    : raw_(std::move(coeffs)), funcs_(std::move(funcs)),
      weights_(std::move(weights)), structures_(std::move(structures)) {
  if (raw_.empty()) throw DimensionError("SplitNEP needs at least one term");
  if (funcs_.size() != raw_.size()) {
    throw DimensionError("SplitNEP: " + std::to_string(raw_.size()) +
                         " coefficients but " + std::to_string(funcs_.size()) +
                         " functions");
  }
  n_ = raw_.front().rows();
  for (std::size_t j = 0; j < raw_.size(); ++j) {
    if (raw_[j].rows() != n_ || raw_[j].cols() != n_) {
      throw DimensionError("SplitNEP: coefficient " + std::to_string(j) +
                           " is not " + std::to_string(n_) + "x" +
                           std::to_string(n_));
    }
  }
  if (weights_.empty()) weights_.assign(raw_.size(), 1.0);
  if (weights_.size() != raw_.size()) {
    throw DimensionError("SplitNEP: weight count does not match term count");
  }
  for (double w : weights_) {
    if (!(w > 0.0)) throw DimensionError("SplitNEP: weights must be positive");
  }
  if (structures_.empty()) structures_.assign(raw_.size(), StructureSpec::unstructured());
  if (structures_.size() != raw_.size()) {
    throw DimensionError("SplitNEP: structure count does not match term count");
  }
  for (const auto& s : structures_) s.validate(n_);

  coeffs_.reserve(raw_.size());
  for (std::size_t j = 0; j < raw_.size(); ++j) {
    coeffs_.push_back(weights_[j] == 1.0 ? raw_[j] : raw_[j].scaled(weights_[j]));
  }
}

RowVector SplitNEP::function_values(Scalar lambda) const {
  RowVector f(k());
  for (Index j = 0; j < k(); ++j) f(j) = funcs_[static_cast<std::size_t>(j)](lambda);
  return f;
}

RowVector SplitNEP::derivative_values(Scalar lambda) const {
  RowVector f(k());
  for (Index j = 0; j < k(); ++j) {
    f(j) = funcs_[static_cast<std::size_t>(j)].derivative(lambda);
  }
  return f;
}

namespace {

Matrix combine_dense(const std::vector<Coefficient>& coeffs, const RowVector& f,
                     Index n) {
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const Scalar fj = f(static_cast<Index>(j));
    if (fj == Scalar(0.0)) continue;
    const auto& c = coeffs[j];
    if (c.is_dense()) {
      out += fj * c.as_dense();
    } else if (c.is_sparse()) {
      out += fj * Matrix(c.as_sparse());
    } else {
      const auto& lr = c.as_low_rank();
      out.noalias() += (fj * lr.left) * lr.right.transpose();
    }
  }
  return out;
}

}  // namespace

Matrix SplitNEP::evaluate(Scalar lambda) const {
  return combine_dense(coeffs_, function_values(lambda), n_);
}

Matrix SplitNEP::evaluate_derivative(Scalar lambda) const {
  return combine_dense(coeffs_, derivative_values(lambda), n_);
}

bool SplitNEP::all_sparse() const {
  for (const auto& c : coeffs_) {
    if (!c.is_sparse()) return false;
  }
  return true;
}

SparseMatrix SplitNEP::evaluate_sparse(Scalar lambda) const {
  const RowVector f = function_values(lambda);
  SparseMatrix out(n_, n_);
  for (Index j = 0; j < k(); ++j) {
    const auto& c = coeffs_[static_cast<std::size_t>(j)];
    if (c.is_sparse()) {
      out += f(j) * c.as_sparse();
    } else {
      out += SparseMatrix((f(j) * c.dense()).sparseView(0.0, 0.0));
    }
  }
  out.makeCompressed();
  return out;
}

Matrix SplitNEP::apply(Scalar lambda, const Matrix& x) const {
  const RowVector f = function_values(lambda);
  Matrix out = Matrix::Zero(n_, x.cols());
  for (Index j = 0; j < k(); ++j) {
    if (f(j) != Scalar(0.0)) out += f(j) * coeffs_[static_cast<std::size_t>(j)].apply(x);
  }
  return out;
}

Matrix SplitNEP::apply_derivative(Scalar lambda, const Matrix& x) const {
  const RowVector f = derivative_values(lambda);
  Matrix out = Matrix::Zero(n_, x.cols());
  for (Index j = 0; j < k(); ++j) {
    if (f(j) != Scalar(0.0)) out += f(j) * coeffs_[static_cast<std::size_t>(j)].apply(x);
  }
  return out;
}

double SplitNEP::coefficient_norm() const {
  double acc = 0.0;
  for (const auto& c : coeffs_) {
    const double v = c.frobenius_norm();
    acc += v * v;
  }
  return std::sqrt(acc);
}

SplitNEP SplitNEP::with_coefficients(std::vector<Coefficient> coeffs) const {
  return SplitNEP(std::move(coeffs), funcs_, {}, structures_);
}

EigenpairSet EigenpairSet::normalized_copy() const {
  EigenpairSet out = *this;
  for (Index i = 0; i < out.V.cols(); ++i) {
    const double nrm = out.V.col(i).norm();
    if (nrm > 0.0) out.V.col(i) /= nrm;
  }
  out.normalized = true;
  return out;
}

void EigenpairSet::validate(Index n) const {
  if (lambdas.size() < 1) throw DimensionError("eigenpair set is empty");
  if (V.cols() != lambdas.size()) {
    throw DimensionError("eigenpair set: " + std::to_string(lambdas.size()) +
                         " eigenvalues but " + std::to_string(V.cols()) +
                         " eigenvector columns");
  }
  if (V.rows() != n) {
    throw DimensionError("eigenpair set: eigenvectors have length " +
                         std::to_string(V.rows()) + ", problem dimension is " +
                         std::to_string(n));
  }
}

Matrix function_matrix(const SplitNEP& nep, const Vector& lambdas) {
  Matrix g(lambdas.size(), nep.k());
  for (Index i = 0; i < lambdas.size(); ++i) g.row(i) = nep.function_values(lambdas(i));
  return g;
}

ResidualBundle residual_bundle(const SplitNEP& nep, const EigenpairSet& pairs) {
  pairs.validate(nep.n());
  const Index n = nep.n();
  const Index p = pairs.size();
  const Index k = nep.k();

  ResidualBundle b;
  b.G = function_matrix(nep, pairs.lambdas);
  b.W.resize(k * n, p);
  b.R = Matrix::Zero(n, p);
  for (Index j = 0; j < k; ++j) {
    Matrix wj = pairs.V * b.G.col(j).asDiagonal();
    b.R += nep.coefficient(j).apply(wj);
    b.W.middleRows(j * n, n) = std::move(wj);
  }
  b.residual_norm = b.R.norm();
  b.column_norms = b.R.colwise().norm().transpose();
  return b;
}

InvariantResidual invariant_residual(const SplitNEP& nep, const InvariantPair& pair,
                                     double diag_cond_tol) {
  const Index n = nep.n();
  const Index p = pair.M.rows();
  if (pair.M.cols() != p) throw DimensionError("invariant pair: M must be square");
  if (pair.V.rows() != n || pair.V.cols() != p) {
    throw DimensionError("invariant pair: V must be n x p with p = size(M)");
  }
  const Index k = nep.k();
  InvariantResidual out;
  out.R = Matrix::Zero(n, p);
  out.Ghat.resize(p, k * p);
  out.W.resize(k * n, p);
  for (Index j = 0; j < k; ++j) {
    const Matrix fm = linalg::matrix_function(nep.function(j).value, pair.M, diag_cond_tol);
    out.Ghat.middleCols(j * p, p) = fm.transpose();
    Matrix wj = pair.V * fm;
    out.R += nep.coefficient(j).apply(wj);
    out.W.middleRows(j * n, n) = std::move(wj);
  }
  return out;
}

Matrix apply_blocks(const std::vector<Coefficient>& blocks, const Matrix& W) {
  if (blocks.empty()) return Matrix::Zero(0, W.cols());
  const Index n = blocks.front().rows();
  if (W.rows() != n * static_cast<Index>(blocks.size())) {
    throw DimensionError("apply_blocks: W has wrong row count");
  }
  Matrix out = Matrix::Zero(n, W.cols());
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    out += blocks[j].apply(W.middleRows(static_cast<Index>(j) * n, n));
  }
  return out;
}

double residual_scale(const SplitNEP& nep, const Matrix& W) {
  return nep.coefficient_norm() * W.norm();
}

}  // namespace nepbe
