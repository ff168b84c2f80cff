#include "nepbe/structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nepbe {

namespace {

void normalize_pattern(SparsityPattern& p) {
  std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
}

}  // namespace

StructureSpec StructureSpec::unstructured() { return {}; }

StructureSpec StructureSpec::symmetric() {
  StructureSpec s;
  s.kind = StructureKind::symmetric;
  return s;
}

StructureSpec StructureSpec::scaled_identity() {
  StructureSpec s;
  s.kind = StructureKind::scaled_identity;
  return s;
}

StructureSpec StructureSpec::sparsity(SparsityPattern pattern) {
  StructureSpec s;
  s.kind = StructureKind::sparsity;
  normalize_pattern(pattern);
  s.pattern = std::move(pattern);
  return s;
}

StructureSpec StructureSpec::fixed_rank(Index r) {
  StructureSpec s;
  s.kind = StructureKind::fixed_rank;
  s.rank = r;
  return s;
}

StructureSpec StructureSpec::subspace(std::vector<Matrix> basis) {
  StructureSpec s;
  s.kind = StructureKind::subspace;
  s.basis = std::move(basis);
  return s;
}

void StructureSpec::validate(Index n) const {
  switch (kind) {
    case StructureKind::sparsity:
      for (const auto& [r, c] : pattern) {
        if (r < 0 || c < 0 || r >= n || c >= n) {
          throw DimensionError("sparsity pattern index (" + std::to_string(r) +
                               "," + std::to_string(c) + ") outside " +
                               std::to_string(n) + "x" + std::to_string(n));
        }
      }
      break;
    case StructureKind::fixed_rank:
      if (rank < 1 || rank > n) {
        throw DimensionError("fixed rank " + std::to_string(rank) +
                             " outside [1, " + std::to_string(n) + "]");
      }
      break;
    case StructureKind::subspace:
      for (const auto& b : basis) {
        if (b.rows() != n || b.cols() != n) {
          throw DimensionError("subspace basis element has wrong size");
        }
      }
      break;
    default:
      break;
  }
}

std::string StructureSpec::name() const {
  switch (kind) {
    case StructureKind::unstructured: return "unstructured";
    case StructureKind::subspace: return "subspace";
    case StructureKind::symmetric: return "symmetric";
    case StructureKind::sparsity: return "sparsity";
    case StructureKind::scaled_identity: return "scaled_identity";
    case StructureKind::fixed_rank: return "fixed_rank";
  }
  return "unknown";
}

SparsityPattern pattern_of(const Coefficient& c, double drop_tol) {
  SparsityPattern p;
  if (c.is_sparse()) {
    const auto& s = c.as_sparse();
    for (Index j = 0; j < s.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(s, j); it; ++it) {
        if (std::abs(it.value()) > drop_tol) p.emplace_back(it.row(), it.col());
      }
    }
  } else {
    const Matrix d = c.dense();
    for (Index j = 0; j < d.cols(); ++j) {
      for (Index i = 0; i < d.rows(); ++i) {
        if (std::abs(d(i, j)) > drop_tol) p.emplace_back(i, j);
      }
    }
  }
  normalize_pattern(p);
  return p;
}

SparsityPattern tridiagonal_pattern(Index n) {
  SparsityPattern p;
  for (Index j = 0; j < n; ++j) {
    if (j > 0) p.emplace_back(j - 1, j);
    p.emplace_back(j, j);
    if (j + 1 < n) p.emplace_back(j + 1, j);
  }
  return p;
}

SubspaceBasis SubspaceBasis::from_entries(Index n,
                                          std::vector<std::vector<Entry>> elements) {
  SubspaceBasis b;
  b.n_ = n;
  b.offsets_.reserve(elements.size() + 1);
  b.offsets_.push_back(0);
  for (auto& e : elements) {
    b.entries_.insert(b.entries_.end(), e.begin(), e.end());
    b.offsets_.push_back(static_cast<Index>(b.entries_.size()));
  }
  return b;
}

SubspaceBasis SubspaceBasis::from_dense(Index n, const std::vector<Matrix>& elements) {
  SubspaceBasis b;
  b.n_ = n;
  for (const auto& e : elements) {
    if (e.rows() != n || e.cols() != n) {
      throw DimensionError("subspace basis element has wrong size");
    }
    Matrix q = e;
    const double original = q.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& prev : b.dense_) {
        const Scalar overlap = prev.conjugate().cwiseProduct(q).sum();
        q -= overlap * prev;
      }
    }
    const double nrm = q.norm();
    if (nrm <= 1e-10 * original) continue;
    b.dense_.push_back(q / nrm);
  }
  b.offsets_.clear();
  return b;
}

Index SubspaceBasis::dim() const {
  if (!dense_.empty()) return static_cast<Index>(dense_.size());
  return offsets_.empty() ? 0 : static_cast<Index>(offsets_.size()) - 1;
}

Matrix SubspaceBasis::element(Index i) const {
  if (!dense_.empty()) return dense_.at(static_cast<std::size_t>(i));
  Matrix m = Matrix::Zero(n_, n_);
  for (Index e = offsets_[i]; e < offsets_[i + 1]; ++e) {
    const auto& en = entries_[static_cast<std::size_t>(e)];
    m(en.row, en.col) += en.weight;
  }
  return m;
}

Matrix SubspaceBasis::product(Index i, const Matrix& w) const {
  if (!dense_.empty()) return dense_.at(static_cast<std::size_t>(i)) * w;
  Matrix out = Matrix::Zero(n_, w.cols());
  for (Index e = offsets_[i]; e < offsets_[i + 1]; ++e) {
    const auto& en = entries_[static_cast<std::size_t>(e)];
    out.row(en.row) += en.weight * w.row(en.col);
  }
  return out;
}

Coefficient SubspaceBasis::combine(const Vector& c) const {
  if (c.size() != dim()) throw DimensionError("combine: coefficient count mismatch");
  if (!dense_.empty()) {
    Matrix m = Matrix::Zero(n_, n_);
    for (Index i = 0; i < dim(); ++i) m += c(i) * dense_[static_cast<std::size_t>(i)];
    return Coefficient(std::move(m));
  }
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(entries_.size());
  for (Index i = 0; i < dim(); ++i) {
    for (Index e = offsets_[i]; e < offsets_[i + 1]; ++e) {
      const auto& en = entries_[static_cast<std::size_t>(e)];
      trips.emplace_back(en.row, en.col, c(i) * en.weight);
    }
  }
  SparseMatrix s(n_, n_);
  s.setFromTriplets(trips.begin(), trips.end());
  return Coefficient(std::move(s));
}

Vector SubspaceBasis::coordinates(const Matrix& x) const {
  Vector out(dim());
  if (!dense_.empty()) {
    for (Index i = 0; i < dim(); ++i) {
      out(i) = dense_[static_cast<std::size_t>(i)].conjugate().cwiseProduct(x).sum();
    }
    return out;
  }
  for (Index i = 0; i < dim(); ++i) {
    Scalar acc = 0.0;
    for (Index e = offsets_[i]; e < offsets_[i + 1]; ++e) {
      const auto& en = entries_[static_cast<std::size_t>(e)];
      acc += en.weight * x(en.row, en.col);
    }
    out(i) = acc;
  }
  return out;
}

Matrix SubspaceBasis::gram() const {
  const Index d = dim();
  Matrix g(d, d);
  std::vector<Matrix> els;
  els.reserve(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) els.push_back(element(i));
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      g(i, j) = els[static_cast<std::size_t>(i)].conjugate().cwiseProduct(
                    els[static_cast<std::size_t>(j)]).sum();
    }
  }
  return g;
}

SubspaceBasis canonical_basis(const StructureSpec& spec, Index n) {
  spec.validate(n);
  using Entry = SubspaceBasis::Entry;
  std::vector<std::vector<Entry>> els;
  switch (spec.kind) {
    case StructureKind::unstructured:
      els.reserve(static_cast<std::size_t>(n * n));
      for (Index b = 0; b < n; ++b) {
        for (Index a = 0; a < n; ++a) els.push_back({{a, b, 1.0}});
      }
      break;
    case StructureKind::sparsity:
      for (const auto& [a, b] : spec.pattern) els.push_back({{a, b, 1.0}});
      break;
    case StructureKind::scaled_identity: {
      std::vector<Entry> diag;
      const double w = 1.0 / std::sqrt(static_cast<double>(n));
      for (Index a = 0; a < n; ++a) diag.push_back({a, a, w});
      els.push_back(std::move(diag));
      break;
    }
    case StructureKind::symmetric: {
      const double w = 1.0 / std::sqrt(2.0);
      for (Index b = 0; b < n; ++b) {
        els.push_back({{b, b, 1.0}});
        for (Index a = b + 1; a < n; ++a) els.push_back({{a, b, w}, {b, a, w}});
      }
      break;
    }
    case StructureKind::subspace:
      return SubspaceBasis::from_dense(n, spec.basis);
    case StructureKind::fixed_rank:
      throw std::invalid_argument(
          "canonical_basis: fixed-rank structure is not a linear subspace");
  }
  return SubspaceBasis::from_entries(n, std::move(els));
}

}  // namespace nepbe
