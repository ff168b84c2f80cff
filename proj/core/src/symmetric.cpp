#include "nepbe/symmetric.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nepbe {

void require_real_symmetric(const SplitNEP& nep) {
  const Index n = nep.n();
  for (Index j = 0; j < nep.k(); ++j) {
    const Coefficient& c = nep.coefficient(j);
    const double nrm = c.frobenius_norm();
    const double tol = 1e-12 * std::max(nrm, 1e-300);
    const std::string where = "coefficient " + std::to_string(j);
    if (c.max_abs_imag() > tol) throw std::invalid_argument(where + " is not real");
    double asym = 0.0;
    if (c.is_dense()) {
      asym = (c.as_dense() - c.as_dense().transpose()).norm();
    } else if (c.is_sparse()) {
      const SparseMatrix t = c.as_sparse().transpose();
      asym = SparseMatrix(c.as_sparse() - t).norm();
    } else {
      // Probe x^T F y - y^T F x on a few random directions.
      std::mt19937_64 rng(7);
      std::normal_distribution<double> nd;
      Matrix x(n, 4), y(n, 4);
      for (Index i = 0; i < x.size(); ++i) {
        x(i) = nd(rng);
        y(i) = nd(rng);
      }
      const Matrix lhs = x.transpose() * c.apply(y);
      const Matrix rhs = (y.transpose() * c.apply(x)).transpose();
      asym = (lhs - rhs).norm() / (x.norm() * y.norm());
    }
    if (asym > tol) throw std::invalid_argument(where + " is not symmetric");
  }
}

namespace {

void require_real_pairs(const EigenpairSet& pairs) {
  for (Index i = 0; i < pairs.size(); ++i) {
    const Scalar l = pairs.lambdas(i);
    if (std::abs(l.imag()) > 1e-12 * (1.0 + std::abs(l))) {
      throw std::invalid_argument(
          "symmetric backward error needs real eigenvalues; eigenvalue " +
          std::to_string(i) + " is complex (pass conjugate pairs as a real invariant pair)");
    }
  }
  if (linalg::max_abs_imag(pairs.V) > 1e-12 * pairs.V.norm()) {
    throw std::invalid_argument("symmetric backward error needs real eigenvectors");
  }
}

Matrix real_part(const Matrix& a) { return a.real().cast<Scalar>(); }

}  // namespace

SymmetricSolveWorkspace symmetric_workspace(const SplitNEP& nep, const EigenpairSet& pairs) {
  pairs.validate(nep.n());
  require_real_symmetric(nep);
  require_real_pairs(pairs);
  const Index n = nep.n();
  const Index p = pairs.size();
  const Index k = nep.k();
  if (p > n) {
    throw DimensionError("symmetric backward error needs p <= n (got p = " +
                         std::to_string(p) + ", n = " + std::to_string(n) + ")");
  }
  EigenpairSet real_pairs = pairs;
  real_pairs.lambdas = pairs.lambdas.real().cast<Scalar>();
  real_pairs.V = real_part(pairs.V);
  const ResidualBundle b = residual_bundle(nep, real_pairs);

  SymmetricSolveWorkspace ws;
  ws.R = real_part(b.R);
  const linalg::QrFactors qr = linalg::economy_qr(real_pairs.V);
  ws.Q = qr.Q;
  ws.T = qr.T;
  ws.Ttilde.resize(k * p, p);
  for (Index j = 0; j < k; ++j) {
    ws.Ttilde.middleRows(j * p, p) = real_part(ws.T * b.G.col(j).asDiagonal());
  }
  ws.B1 = -ws.Q.transpose() * ws.R;
  ws.C = -(ws.R - ws.Q * (ws.Q.transpose() * ws.R));

  const Index p2 = p * p;
  ws.M_S = Matrix::Zero(p2 + k * p2, k * p2);
  ws.M_S.topRows(p2) = linalg::kron(ws.Ttilde.transpose(), Matrix::Identity(p, p));
  const Matrix shuffle =
      Matrix(linalg::commutation(p).cast<Scalar>()) - Matrix::Identity(p2, p2);
  for (Index j = 0; j < k; ++j) {
    ws.M_S.block(p2 + j * p2, j * p2, p2, p2) = shuffle;
  }
  return ws;
}

SymmetricResult symmetric_backward_error(const SplitNEP& nep, const EigenpairSet& pairs,
                                         double rank_tol) {
  SymmetricResult out;
  out.workspace = symmetric_workspace(nep, pairs);
  const SymmetricSolveWorkspace& ws = out.workspace;
  const Index p = ws.T.rows();
  const Index k = nep.k();
  const Index p2 = p * p;

  // Block (2,1): [A21_1 ... A21_k] = B2 Ttilde^+, carried through C = Q2 B2.
  const Matrix tpinv = linalg::pinv(ws.Ttilde, rank_tol);  // p x kp
  const double cn = ws.C.norm();
  out.block21_inconsistency =
      cn > 0.0 ? (ws.C * tpinv * ws.Ttilde - ws.C).norm() / cn : 0.0;

  // Block (1,1): symmetric A11_j with sum_j A11_j T f_j(Lambda) = B1.
  Vector rhs = Vector::Zero(ws.M_S.rows());
  rhs.head(p2) = linalg::vec(ws.B1);
  const linalg::MinNormSolution sol = linalg::min_norm_solve(ws.M_S, rhs, rank_tol);
  const double bn = rhs.norm();
  out.block11_inconsistency = bn > 0.0 ? sol.residual_norm / bn : 0.0;

  out.a11_norms2.resize(k);
  out.a21_norms2.resize(k);
  PerturbationSet& ps = out.perturbation;
  double total = 0.0;
  for (Index j = 0; j < k; ++j) {
    Matrix a11 = linalg::unvec(sol.x.segment(j * p2, p2), p, p);
    a11 = real_part(0.5 * (a11 + a11.transpose()));
    const Matrix cj = ws.C * tpinv.middleCols(j * p, p);
    out.a11_norms2(j) = a11.squaredNorm();
    out.a21_norms2(j) = cj.squaredNorm();
    total += out.a11_norms2(j) + 2.0 * out.a21_norms2(j);

    LowRankFactors f;
    f.left.resize(nep.n(), 2 * p);
    f.right.resize(nep.n(), 2 * p);
    f.left << ws.Q * a11 + cj, ws.Q;
    f.right << ws.Q, cj;
    ps.deltas.emplace_back(std::move(f));
  }
  ps.eta = std::sqrt(total);
  return out;
}

SymmetricBound symmetric_bound(const SymmetricSolveWorkspace& ws, double rank_tol) {
  SymmetricBound b;
  const double rn = ws.R.norm();
  if (rn == 0.0) return b;
  const double ms = linalg::pinv(ws.M_S, rank_tol).squaredNorm();
  const double tp = linalg::pinv(ws.Ttilde, rank_tol).squaredNorm();
  const double tt = ws.Ttilde.squaredNorm();
  b.with_pinv = std::sqrt(ms + 2.0 * tp) * rn;
  b.with_ttilde = std::sqrt(ms + 2.0 * tt) * rn;
  return b;
}

SymmetricBound symmetric_bound(const SplitNEP& nep, const EigenpairSet& pairs,
                               double rank_tol) {
  return symmetric_bound(symmetric_workspace(nep, pairs), rank_tol);
}

}  // namespace nepbe
