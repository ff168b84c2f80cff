#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nepbe/coefficient.hpp"
#include "nepbe/linalg.hpp"

namespace nepbe {

enum class StructureKind {
  unstructured,
  subspace,
  symmetric,
  sparsity,
  scaled_identity,
  fixed_rank,
};

using SparsityPattern = std::vector<std::pair<Index, Index>>;

/// Structure that a coefficient (and its perturbation) must keep.
struct StructureSpec {
  StructureKind kind = StructureKind::unstructured;
  /// (row, col) pairs, zero-based, sorted column-major and unique.
  SparsityPattern pattern;
  /// Explicit subspace basis; need not be orthonormal.
  std::vector<Matrix> basis;
  Index rank = 0;

  static StructureSpec unstructured();
  static StructureSpec symmetric();
  static StructureSpec scaled_identity();
  static StructureSpec sparsity(SparsityPattern pattern);
  static StructureSpec fixed_rank(Index r);
  static StructureSpec subspace(std::vector<Matrix> basis);

  bool is_linear() const { return kind != StructureKind::fixed_rank; }

  /// Throws DimensionError when indices or rank fall outside n x n.
  void validate(Index n) const;
  std::string name() const;
};

/// Nonzero pattern of a coefficient; entries with |value| <= drop_tol count
/// as zero.
SparsityPattern pattern_of(const Coefficient& c, double drop_tol = 0.0);

/// Tridiagonal pattern of an n x n matrix.
SparsityPattern tridiagonal_pattern(Index n);

/// A Frobenius-orthonormal basis {P_1 .. P_d} of a linear structure set.
/// Elements built from canonical kinds are stored as short lists of weighted
/// entries; explicit bases are stored dense.
class SubspaceBasis {
 public:
  struct Entry {
    Index row;
    Index col;
    double weight;
  };

  SubspaceBasis() = default;
  static SubspaceBasis from_entries(Index n, std::vector<std::vector<Entry>> elements);
  /// Orthonormalizes by modified Gram-Schmidt in the Frobenius inner product,
  /// dropping numerically dependent elements.
  static SubspaceBasis from_dense(Index n, const std::vector<Matrix>& elements);

  Index n() const { return n_; }
  Index dim() const;
  bool orthonormal() const { return true; }
  bool is_sparse() const { return dense_.empty() && !offsets_.empty(); }

  Matrix element(Index i) const;
  /// P_i * w for a thin block w (n x p).
  Matrix product(Index i, const Matrix& w) const;
  /// out += P_i * w without a temporary for entry-based bases.
  template <typename Out>
  void accumulate_product(Index i, const Matrix& w, Out&& out) const {
    if (!dense_.empty()) {
      out += dense_[static_cast<std::size_t>(i)] * w;
      return;
    }
    for (Index e = offsets_[i]; e < offsets_[i + 1]; ++e) {
      const auto& en = entries_[static_cast<std::size_t>(e)];
      out.row(en.row) += en.weight * w.row(en.col);
    }
  }
  /// Sum_i c_i P_i.
  Coefficient combine(const Vector& c) const;
  /// <P_i, X>_F for every i.
  Vector coordinates(const Matrix& x) const;
  Matrix gram() const;

 private:
  Index n_ = 0;
  std::vector<Index> offsets_;  // size dim+1 for entry-based bases
  std::vector<Entry> entries_;
  std::vector<Matrix> dense_;
};

/// Orthonormal basis realizing a linear StructureSpec. Fixed-rank specs are
/// rejected with std::invalid_argument.
SubspaceBasis canonical_basis(const StructureSpec& spec, Index n);

}  // namespace nepbe
