#pragma once

#include <variant>

#include "nepbe/linalg.hpp"

namespace nepbe {

/// left * right^T, both n x m.
struct LowRankFactors {
  Matrix left;
  Matrix right;
};

/// An n x n matrix stored dense, sparse, or as a low-rank product. All
/// downstream formulas only need products with thin blocks, so large sparse
/// and low-rank coefficients are never densified unless asked.
class Coefficient {
 public:
  Coefficient() = default;
  Coefficient(Matrix dense);  // NOLINT(google-explicit-constructor)
  Coefficient(SparseMatrix sparse);  // NOLINT(google-explicit-constructor)
  Coefficient(LowRankFactors factors);  // NOLINT(google-explicit-constructor)

  static Coefficient identity(Index n, Scalar scale = 1.0);
  static Coefficient zero(Index n);

  Index rows() const;
  Index cols() const;

  bool is_dense() const { return std::holds_alternative<Matrix>(data_); }
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(data_); }
  bool is_low_rank() const {
    return std::holds_alternative<LowRankFactors>(data_);
  }

  const Matrix& as_dense() const { return std::get<Matrix>(data_); }
  const SparseMatrix& as_sparse() const { return std::get<SparseMatrix>(data_); }
  const LowRankFactors& as_low_rank() const {
    return std::get<LowRankFactors>(data_);
  }

  /// this * x for a thin block x (n x p).
  Matrix apply(const Matrix& x) const;
  /// this^T * x (plain transpose).
  Matrix apply_transpose(const Matrix& x) const;

  Matrix dense() const;
  SparseMatrix sparse() const;

  double frobenius_norm() const;
  /// Largest |imag| over the stored representation.
  double max_abs_imag() const;

  Coefficient scaled(Scalar s) const;

  /// this + other, keeping a compact representation when both sides share one.
  Coefficient plus(const Coefficient& other) const;

 private:
  std::variant<Matrix, SparseMatrix, LowRankFactors> data_;
};

}  // namespace nepbe
