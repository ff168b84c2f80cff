#include "nepbe/coefficient.hpp"

#include <cmath>

namespace nepbe {

Coefficient::Coefficient(Matrix dense) : data_(std::move(dense)) {
  if (as_dense().rows() != as_dense().cols()) {
    throw DimensionError("coefficient matrices must be square");
  }
}

Coefficient::Coefficient(SparseMatrix sparse) : data_(std::move(sparse)) {
  if (as_sparse().rows() != as_sparse().cols()) {
    throw DimensionError("coefficient matrices must be square");
  }
  std::get<SparseMatrix>(data_).makeCompressed();
}

Coefficient::Coefficient(LowRankFactors factors) : data_(std::move(factors)) {
  const auto& f = as_low_rank();
  if (f.left.rows() != f.right.rows() || f.left.cols() != f.right.cols()) {
    throw DimensionError("low-rank factors must both be n x m");
  }
}

Coefficient Coefficient::identity(Index n, Scalar scale) {
  SparseMatrix s(n, n);
  s.setIdentity();
  s *= scale;
  return Coefficient(std::move(s));
}

Coefficient Coefficient::zero(Index n) { return Coefficient(SparseMatrix(n, n)); }

Index Coefficient::rows() const {
  return std::visit(
      [](const auto& d) -> Index {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, LowRankFactors>) {
          return d.left.rows();
        } else {
          return d.rows();
        }
      },
      data_);
}

Index Coefficient::cols() const { return rows(); }

Matrix Coefficient::apply(const Matrix& x) const {
  if (x.rows() != rows()) throw DimensionError("coefficient apply: size mismatch");
  if (is_dense()) return as_dense() * x;
  if (is_sparse()) return as_sparse() * x;
  const auto& f = as_low_rank();
  return f.left * (f.right.transpose() * x);
}

Matrix Coefficient::apply_transpose(const Matrix& x) const {
  if (x.rows() != rows()) throw DimensionError("coefficient apply: size mismatch");
  if (is_dense()) return as_dense().transpose() * x;
  if (is_sparse()) return as_sparse().transpose() * x;
  const auto& f = as_low_rank();
  return f.right * (f.left.transpose() * x);
}

Matrix Coefficient::dense() const {
  if (is_dense()) return as_dense();
  if (is_sparse()) return Matrix(as_sparse());
  const auto& f = as_low_rank();
  return f.left * f.right.transpose();
}

SparseMatrix Coefficient::sparse() const {
  if (is_sparse()) return as_sparse();
  return dense().sparseView(0.0, 0.0);
}

double Coefficient::frobenius_norm() const {
  if (is_dense()) return as_dense().norm();
  if (is_sparse()) return as_sparse().norm();
  const auto& f = as_low_rank();
  if (f.left.cols() == 0) return 0.0;
  // ||L R^T||_F = ||T_L T_R^T||_F with L = Q_L T_L, R = Q_R T_R.
  return (linalg::qr_triangle(f.left) * linalg::qr_triangle(f.right).transpose())
      .norm();
}

double Coefficient::max_abs_imag() const {
  if (is_dense()) return linalg::max_abs_imag(as_dense());
  if (is_sparse()) {
    double m = 0.0;
    const auto& s = as_sparse();
    for (Index k = 0; k < s.nonZeros(); ++k) {
      m = std::max(m, std::abs(s.valuePtr()[k].imag()));
    }
    return m;
  }
  const auto& f = as_low_rank();
  // Factors may carry a common phase; judge the product.
  if (f.left.rows() <= 512) return linalg::max_abs_imag(dense());
  return std::max(linalg::max_abs_imag(f.left), linalg::max_abs_imag(f.right));
}

Coefficient Coefficient::scaled(Scalar s) const {
  if (is_dense()) return Coefficient(Matrix(s * as_dense()));
  if (is_sparse()) return Coefficient(SparseMatrix(s * as_sparse()));
  const auto& f = as_low_rank();
  return Coefficient(LowRankFactors{s * f.left, f.right});
}

Coefficient Coefficient::plus(const Coefficient& other) const {
  if (rows() != other.rows()) throw DimensionError("coefficient sum: size mismatch");
  if (is_sparse() && other.is_sparse()) {
    return Coefficient(SparseMatrix(as_sparse() + other.as_sparse()));
  }
  if (is_low_rank() && other.is_low_rank()) {
    const auto& a = as_low_rank();
    const auto& b = other.as_low_rank();
    Matrix l(a.left.rows(), a.left.cols() + b.left.cols());
    Matrix r(a.right.rows(), a.right.cols() + b.right.cols());
    l << a.left, b.left;
    r << a.right, b.right;
    return Coefficient(LowRankFactors{std::move(l), std::move(r)});
  }
  if (is_sparse() && other.is_low_rank()) return other.plus(*this);
  if (is_low_rank() && other.is_sparse()) {
    return Coefficient(Matrix(dense() + Matrix(other.as_sparse())));
  }
  return Coefficient(Matrix(dense() + other.dense()));
}

}  // namespace nepbe
