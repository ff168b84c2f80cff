#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace nepbe {

using Index = Eigen::Index;
using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;
using RealSparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Raised when an input violates a shape or structural precondition.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical precondition fails (defective matrix, rank
/// collapse, singular system).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative singular-value threshold used for every pseudoinverse.
inline constexpr double kDefaultRankTol = 1e-12;

namespace linalg {

Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Index rows, Index cols);

Matrix kron(const Matrix& a, const Matrix& b);

/// Row-wise Kronecker product: row i equals g.row(i) (x) vt.row(i).
Matrix khatri_rao_t(const Matrix& g, const Matrix& vt);

/// The (p,p) perfect shuffle: commutation(p) * vec(X) == vec(X^T).
RealSparseMatrix commutation(Index p);

/// A = U * diag(S) * Vt with S descending.
struct SvdFactors {
  Matrix U;
  RealVector S;
  Matrix Vt;

  /// Number of singular values strictly above rank_tol * S(0).
  Index rank(double rank_tol = kDefaultRankTol) const;
};

SvdFactors svd(const Matrix& a, bool full = false);
RealVector singular_values(const Matrix& a);
RealVector singular_values(const RealMatrix& a);

/// p-th largest singular value (1-based), zero when p exceeds min(rows, cols).
double sigma(const Matrix& a, Index p);

double condition_number(const Matrix& a);

Matrix pinv(const Matrix& a, double rank_tol = kDefaultRankTol);
RealMatrix pinv(const RealMatrix& a, double rank_tol = kDefaultRankTol);

struct MinNormSolution {
  Vector x;
  Index effective_rank = 0;
  /// ||A x - b||_2
  double residual_norm = 0.0;
  /// Singular values of A, descending.
  RealVector singular_values;
};

/// Minimum-norm least-squares solution A^+ b, truncating singular values
/// at or below rank_tol * sigma_1.
MinNormSolution min_norm_solve(const Matrix& a, const Vector& b,
                               double rank_tol = kDefaultRankTol);

/// Factors A once for repeated min-norm solves with different right-hand sides.
class MinNormSolver {
 public:
  MinNormSolver() = default;
  explicit MinNormSolver(const Matrix& a, double rank_tol = kDefaultRankTol);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index effective_rank() const { return rank_; }
  const RealVector& singular_values() const { return f_.S; }
  /// Smallest retained singular value, zero when the rank is zero.
  double sigma_min() const { return rank_ > 0 ? f_.S(rank_ - 1) : 0.0; }

  /// residual_norm is ||(I - U_r U_r^H) b||, the distance of b from range(A).
  MinNormSolution solve(const Vector& b) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Index rank_ = 0;
  bool wide_ = false;
  Matrix q_;
  SvdFactors f_;
};

struct QrFactors {
  Matrix Q;  // n x p (economy) or n x n (full)
  Matrix T;  // p x p upper triangular
};

QrFactors economy_qr(const Matrix& v, bool full_q = false);

/// Upper-triangular factor of an economy QR of a real or complex tall
/// matrix; used to compress ||A B^T||_F into a small product.
Matrix qr_triangle(const Matrix& a);

using ComplexFunction = std::function<Scalar(Scalar)>;

/// f(M) = X f(D) X^{-1} for diagonalizable M. Throws NumericalError naming
/// the eigenvector condition estimate when it exceeds diag_cond_tol.
Matrix matrix_function(const ComplexFunction& f, const Matrix& m,
                       double diag_cond_tol = 1e8);

double max_abs_imag(const Matrix& a);

}  // namespace linalg
}  // namespace nepbe
