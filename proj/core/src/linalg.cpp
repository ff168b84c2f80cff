#include "nepbe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nepbe::linalg {

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw DimensionError("unvec: length does not match rows*cols");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix khatri_rao_t(const Matrix& g, const Matrix& vt) {
  if (g.rows() != vt.rows()) {
    throw DimensionError("khatri_rao_t: row counts differ (" +
                         std::to_string(g.rows()) + " vs " +
                         std::to_string(vt.rows()) + ")");
  }
  const Index n = vt.cols();
  Matrix out(g.rows(), g.cols() * n);
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = 0; j < g.cols(); ++j) {
      out.row(i).segment(j * n, n) = g(i, j) * vt.row(i);
    }
  }
  return out;
}

RealSparseMatrix commutation(Index p) {
  if (p < 1) throw DimensionError("commutation: p must be positive");
  RealSparseMatrix pi(p * p, p * p);
  pi.reserve(Eigen::VectorXi::Constant(p * p, 1));
  // vec(X)[a + b p] = X(a,b) lands at vec(X^T)[b + a p].
  for (Index a = 0; a < p; ++a) {
    for (Index b = 0; b < p; ++b) {
      pi.insert(b + a * p, a + b * p) = 1.0;
    }
  }
  pi.makeCompressed();
  return pi;
}

Index SvdFactors::rank(double rank_tol) const {
  if (S.size() == 0 || S(0) == 0.0) return 0;
  const double cut = rank_tol * S(0);
  Index r = 0;
  while (r < S.size() && S(r) > cut) ++r;
  return r;
}

SvdFactors svd(const Matrix& a, bool full) {
  SvdFactors out;
  if (a.size() == 0) {
    out.U = Matrix::Identity(a.rows(), full ? a.rows() : 0);
    out.Vt = Matrix::Identity(full ? a.cols() : 0, a.cols());
    return out;
  }
  const unsigned opts = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                             : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (std::min(a.rows(), a.cols()) <= 16) {
    Eigen::JacobiSVD<Matrix> s(a, opts);
    out.U = s.matrixU();
    out.S = s.singularValues();
    out.Vt = s.matrixV().adjoint();
  } else {
    Eigen::BDCSVD<Matrix> s(a, opts);
    out.U = s.matrixU();
    out.S = s.singularValues();
    out.Vt = s.matrixV().adjoint();
  }
  return out;
}

RealVector singular_values(const Matrix& a) {
  if (a.size() == 0) return RealVector();
  if (std::min(a.rows(), a.cols()) <= 16) {
    return Eigen::JacobiSVD<Matrix>(a).singularValues();
  }
  return Eigen::BDCSVD<Matrix>(a).singularValues();
}

RealVector singular_values(const RealMatrix& a) {
  if (a.size() == 0) return RealVector();
  if (std::min(a.rows(), a.cols()) <= 16) {
    return Eigen::JacobiSVD<RealMatrix>(a).singularValues();
  }
  return Eigen::BDCSVD<RealMatrix>(a).singularValues();
}

double sigma(const Matrix& a, Index p) {
  const RealVector s = singular_values(a);
  if (p < 1 || p > s.size()) return 0.0;
  return s(p - 1);
}

double condition_number(const Matrix& a) {
  const RealVector s = singular_values(a);
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Matrix pinv(const Matrix& a, double rank_tol) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  const SvdFactors f = svd(a);
  const Index r = f.rank(rank_tol);
  RealVector inv = RealVector::Zero(f.S.size());
  for (Index i = 0; i < r; ++i) inv(i) = 1.0 / f.S(i);
  return f.Vt.adjoint() * inv.asDiagonal() * f.U.adjoint();
}

RealMatrix pinv(const RealMatrix& a, double rank_tol) {
  if (a.size() == 0) return RealMatrix::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<RealMatrix> s(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = s.singularValues();
  RealVector inv = RealVector::Zero(sv.size());
  if (sv.size() > 0 && sv(0) > 0.0) {
    for (Index i = 0; i < sv.size() && sv(i) > rank_tol * sv(0); ++i) {
      inv(i) = 1.0 / sv(i);
    }
  }
  return s.matrixV() * inv.asDiagonal() * s.matrixU().transpose();
}

MinNormSolver::MinNormSolver(const Matrix& a, double rank_tol)
    : rows_(a.rows()), cols_(a.cols()) {
  if (a.size() == 0) return;
  wide_ = a.cols() > 2 * a.rows();
  if (wide_) {
    // Wide system: A^H = Q T compresses the long dimension, then the SVD of
    // the small square factor T^H carries the rank decision.
    Eigen::HouseholderQR<Matrix> qr(a.adjoint());
    const Index m = a.rows();
    q_ = qr.householderQ() * Matrix::Identity(a.cols(), m);
    const Matrix t = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    f_ = svd(t.adjoint());
  } else {
    f_ = svd(a);
  }
  rank_ = f_.rank(rank_tol);
}

MinNormSolution MinNormSolver::solve(const Vector& b) const {
  if (b.size() != rows_) {
    throw DimensionError("min_norm_solve: rhs length does not match rows");
  }
  MinNormSolution out;
  out.x = Vector::Zero(cols_);
  out.effective_rank = rank_;
  out.singular_values = f_.S;
  if (rows_ == 0 || cols_ == 0) {
    out.residual_norm = b.norm();
    return out;
  }
  const Vector utb = f_.U.leftCols(rank_).adjoint() * b;
  Vector y = f_.Vt.topRows(rank_).adjoint() * utb.cwiseQuotient(f_.S.head(rank_).cast<Scalar>());
  out.x = wide_ ? Vector(q_ * y) : y;
  out.residual_norm = (b - f_.U.leftCols(rank_) * utb).norm();
  return out;
}

MinNormSolution min_norm_solve(const Matrix& a, const Vector& b,
                               double rank_tol) {
  if (a.rows() != b.size()) {
    throw DimensionError("min_norm_solve: rhs length does not match rows");
  }
  MinNormSolution out = MinNormSolver(a, rank_tol).solve(b);
  if (a.size() > 0) out.residual_norm = (a * out.x - b).norm();
  return out;
}

QrFactors economy_qr(const Matrix& v, bool full_q) {
  if (v.rows() < v.cols()) {
    throw DimensionError("economy_qr: requires rows >= cols");
  }
  const Index n = v.rows();
  const Index p = v.cols();
  Eigen::HouseholderQR<Matrix> qr(v);
  QrFactors out;
  out.Q = full_q ? Matrix(qr.householderQ())
                 : Matrix(qr.householderQ() * Matrix::Identity(n, p));
  out.T = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  return out;
}

Matrix qr_triangle(const Matrix& a) {
  if (a.cols() == 0) return Matrix(0, 0);
  if (a.rows() < a.cols()) {
    // Pad so the triangle is square in the column count.
    Matrix padded = Matrix::Zero(a.cols(), a.cols());
    padded.topRows(a.rows()) = a;
    return qr_triangle(padded);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
}

Matrix matrix_function(const ComplexFunction& f, const Matrix& m,
                       double diag_cond_tol) {
  if (m.rows() != m.cols()) {
    throw DimensionError("matrix_function: matrix must be square");
  }
  if (m.size() == 0) return m;
  Eigen::ComplexEigenSolver<Matrix> es(m, true);
  if (es.info() != Eigen::Success) {
    throw NumericalError("matrix_function: eigendecomposition failed");
  }
  Matrix x = es.eigenvectors();
  for (Index j = 0; j < x.cols(); ++j) {
    const double nrm = x.col(j).norm();
    if (nrm > 0.0) x.col(j) /= nrm;
  }
  const double cond = condition_number(x);
  if (!(cond <= diag_cond_tol)) {
    std::ostringstream msg;
    msg << "matrix_function: matrix is not safely diagonalizable "
           "(eigenvector condition estimate "
        << cond << " exceeds " << diag_cond_tol << ")";
    throw NumericalError(msg.str());
  }
  Vector fd(m.rows());
  for (Index i = 0; i < m.rows(); ++i) fd(i) = f(es.eigenvalues()(i));
  return x * fd.asDiagonal() * x.partialPivLu().inverse();
}

double max_abs_imag(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.imag().cwiseAbs().maxCoeff();
}

}  // namespace nepbe::linalg
