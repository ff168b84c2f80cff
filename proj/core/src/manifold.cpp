#include "nepbe/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nepbe::riemann {

RealMatrix Ambient::apply(const RealMatrix& x) const {
  RealMatrix out = RealMatrix::Zero(x.rows(), x.cols());
  if (A.cols() > 0) out.noalias() += A * (B.transpose() * x);
  if (S.rows() > 0) out += S * x;
  if (identity != 0.0) out += identity * x;
  if (D.size() > 0) out.noalias() += D * x;
  return out;
}

RealMatrix Ambient::apply_transpose(const RealMatrix& x) const {
  RealMatrix out = RealMatrix::Zero(x.rows(), x.cols());
  if (A.cols() > 0) out.noalias() += B * (A.transpose() * x);
  if (S.rows() > 0) out += S.transpose() * x;
  if (identity != 0.0) out += identity * x;
  if (D.size() > 0) out.noalias() += D.transpose() * x;
  return out;
}

double Ambient::entry(Index a, Index b) const {
  double v = 0.0;
  if (A.cols() > 0) v += A.row(a).dot(B.row(b));
  if (S.rows() > 0) v += S.coeff(a, b);
  if (a == b) v += identity;
  if (D.size() > 0) v += D(a, b);
  return v;
}

double Ambient::trace(Index n) const {
  double t = identity * static_cast<double>(n);
  if (A.cols() > 0) t += A.cwiseProduct(B).sum();
  if (S.rows() > 0) t += S.diagonal().sum();
  if (D.size() > 0) t += D.trace();
  return t;
}

RealMatrix Ambient::dense(Index n) const {
  RealMatrix out = RealMatrix::Zero(n, n);
  if (A.cols() > 0) out.noalias() += A * B.transpose();
  if (S.rows() > 0) out += RealMatrix(S);
  out.diagonal().array() += identity;
  if (D.size() > 0) out += D;
  return out;
}

void Ambient::add(const Ambient& other, double s) {
  if (other.A.cols() > 0) {
    if (A.cols() == 0) {
      A = s * other.A;
      B = other.B;
    } else {
      RealMatrix a(A.rows(), A.cols() + other.A.cols());
      RealMatrix b(B.rows(), B.cols() + other.B.cols());
      a << A, s * other.A;
      b << B, other.B;
      A = std::move(a);
      B = std::move(b);
    }
  }
  if (other.S.rows() > 0) {
    if (S.rows() == 0) {
      S = s * other.S;
    } else {
      S = S + s * other.S;
    }
  }
  identity += s * other.identity;
  if (other.D.size() > 0) {
    if (D.size() == 0) {
      D = s * other.D;
    } else {
      D += s * other.D;
    }
  }
}

TangentVector& TangentVector::operator*=(double a) {
  values *= a;
  scale *= a;
  M *= a;
  Up *= a;
  Vp *= a;
  dense *= a;
  return *this;
}

void TangentVector::axpy(double a, const TangentVector& x) {
  if (x.values.size() > 0) values += a * x.values;
  scale += a * x.scale;
  if (x.M.size() > 0) M += a * x.M;
  if (x.Up.size() > 0) Up += a * x.Up;
  if (x.Vp.size() > 0) Vp += a * x.Vp;
  if (x.dense.size() > 0) dense += a * x.dense;
}

TangentVector Manifold::weingarten(const ManifoldPoint& x, const TangentVector&,
                                   const Ambient&) const {
  return zero(x);
}

RealQr real_qr(const RealMatrix& a) {
  RealQr out;
  const Index m = a.cols();
  if (a.rows() >= m) {
    Eigen::HouseholderQR<RealMatrix> qr(a);
    out.Q = qr.householderQ() * RealMatrix::Identity(a.rows(), m);
    out.T = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  } else {
    Eigen::HouseholderQR<RealMatrix> qr(a);
    out.Q = qr.householderQ();
    out.T = qr.matrixQR().triangularView<Eigen::Upper>();
  }
  return out;
}

double low_rank_norm(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols() == 0) return 0.0;
  return (real_qr(a).T * real_qr(b).T.transpose()).norm();
}

namespace {

double normal(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return nd(rng);
}

RealMatrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  RealMatrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = normal(rng);
  return m;
}

void require_real(const Coefficient& c, double tol, const char* who) {
  const double nrm = c.frobenius_norm();
  if (c.max_abs_imag() > tol * std::max(nrm, 1e-300)) {
    throw std::invalid_argument(std::string(who) +
                                ": riemannian solver needs real coefficients");
  }
}

Scalar entry_of(const Coefficient& c, Index a, Index b) {
  if (c.is_dense()) return c.as_dense()(a, b);
  if (c.is_sparse()) return c.as_sparse().coeff(a, b);
  const auto& f = c.as_low_rank();
  return f.left.row(a).cwiseProduct(f.right.row(b)).sum();
}

// -------------------------------------------------------------------------

class SparseManifold final : public Manifold {
 public:
  SparseManifold(Index n, SparsityPattern pattern) : n_(n), pattern_(std::move(pattern)) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(pattern_.size());
    for (const auto& [a, b] : pattern_) trips.emplace_back(a, b, 1.0);
    templ_.resize(n_, n_);
    templ_.setFromTriplets(trips.begin(), trips.end());
    templ_.makeCompressed();
  }

  StructureKind kind() const override { return StructureKind::sparsity; }
  Index n() const override { return n_; }
  Index dim() const override { return static_cast<Index>(pattern_.size()); }

  ManifoldPoint from_coefficient(const Coefficient& c, double tol) const override {
    require_real(c, tol, "sparsity manifold");
    ManifoldPoint x;
    x.values.resize(dim());
    for (Index e = 0; e < dim(); ++e) {
      const auto& [a, b] = pattern_[static_cast<std::size_t>(e)];
      x.values(e) = entry_of(c, a, b).real();
    }
    const double nrm = c.frobenius_norm();
    double off = 0.0;
    if (c.is_sparse()) {
      const auto& s = c.as_sparse();
      for (Index col = 0; col < s.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(s, col); it; ++it) {
          if (!std::binary_search(pattern_.begin(), pattern_.end(),
                                  std::make_pair(it.row(), it.col()), col_major_less)) {
            off += std::norm(it.value());
          }
        }
      }
    } else {
      const Matrix d = c.dense();
      Matrix masked = d;
      for (const auto& [a, b] : pattern_) masked(a, b) = 0.0;
      off = masked.squaredNorm();
    }
    if (std::sqrt(off) > tol * std::max(nrm, 1e-300)) {
      throw std::invalid_argument(
          "reference coefficient has entries outside its sparsity pattern");
    }
    return x;
  }

  Coefficient to_coefficient(const ManifoldPoint& x) const override {
    return Coefficient(SparseMatrix(with_values(x.values).cast<Scalar>()));
  }

  RealMatrix apply(const ManifoldPoint& x, const RealMatrix& w) const override {
    return apply_values(x.values, w);
  }
  RealMatrix apply_tangent(const ManifoldPoint&, const TangentVector& xi,
                           const RealMatrix& w) const override {
    return apply_values(xi.values, w);
  }

  TangentVector project(const ManifoldPoint&, const Ambient& z) const override {
    TangentVector t;
    t.values.resize(dim());
    for (Index e = 0; e < dim(); ++e) {
      const auto& [a, b] = pattern_[static_cast<std::size_t>(e)];
      t.values(e) = z.entry(a, b);
    }
    return t;
  }

  double inner(const ManifoldPoint&, const TangentVector& a,
               const TangentVector& b) const override {
    return a.values.dot(b.values);
  }

  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& xi) const override {
    ManifoldPoint y;
    y.values = x.values + xi.values;
    return y;
  }

  TangentVector zero(const ManifoldPoint&) const override {
    TangentVector t;
    t.values = RealVector::Zero(dim());
    return t;
  }

  Ambient to_ambient(const ManifoldPoint&, const TangentVector& xi) const override {
    Ambient z;
    z.S = with_values(xi.values);
    return z;
  }

  Ambient difference(const ManifoldPoint& x, const ManifoldPoint& ref) const override {
    Ambient z;
    z.S = with_values(x.values - ref.values);
    return z;
  }

  double distance2(const ManifoldPoint& x, const ManifoldPoint& ref) const override {
    return (x.values - ref.values).squaredNorm();
  }

  TangentVector random_tangent(const ManifoldPoint&, std::mt19937_64& rng) const override {
    TangentVector t;
    t.values = random_matrix(dim(), 1, rng);
    return t;
  }

 private:
  static bool col_major_less(const std::pair<Index, Index>& l,
                             const std::pair<Index, Index>& r) {
    return l.second != r.second ? l.second < r.second : l.first < r.first;
  }

  RealSparseMatrix with_values(const RealVector& v) const {
    RealSparseMatrix s = templ_;
    std::copy(v.data(), v.data() + v.size(), s.valuePtr());
    return s;
  }

  RealMatrix apply_values(const RealVector& v, const RealMatrix& w) const {
    RealMatrix out = RealMatrix::Zero(n_, w.cols());
    for (Index e = 0; e < dim(); ++e) {
      const auto& [a, b] = pattern_[static_cast<std::size_t>(e)];
      out.row(a) += v(e) * w.row(b);
    }
    return out;
  }

  Index n_;
  SparsityPattern pattern_;
  RealSparseMatrix templ_;
};

// -------------------------------------------------------------------------

class ScaledIdentityManifold final : public Manifold {
 public:
  explicit ScaledIdentityManifold(Index n) : n_(n) {}

  StructureKind kind() const override { return StructureKind::scaled_identity; }
  Index n() const override { return n_; }
  Index dim() const override { return 1; }

  ManifoldPoint from_coefficient(const Coefficient& c, double tol) const override {
    require_real(c, tol, "scaled-identity manifold");
    ManifoldPoint x;
    Scalar tr = 0.0;
    for (Index i = 0; i < n_; ++i) tr += entry_of(c, i, i);
    x.scale = tr.real() / static_cast<double>(n_);
    double off = 0.0;
    if (c.is_sparse()) {
      const auto& s = c.as_sparse();
      for (Index col = 0; col < s.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(s, col); it; ++it) {
          const Scalar want = it.row() == it.col() ? Scalar(x.scale) : Scalar(0.0);
          off += std::norm(it.value() - want);
        }
      }
      // Diagonal entries missing from the sparse storage are zeros.
      for (Index i = 0; i < n_; ++i) {
        if (s.coeff(i, i) == Scalar(0.0)) off += x.scale * x.scale;
      }
    } else {
      Matrix d = c.dense();
      d.diagonal().array() -= x.scale;
      off = d.squaredNorm();
    }
    if (std::sqrt(off) > tol * std::max(c.frobenius_norm(), 1e-300)) {
      throw std::invalid_argument("reference coefficient is not a multiple of the identity");
    }
    return x;
  }

  Coefficient to_coefficient(const ManifoldPoint& x) const override {
    return Coefficient::identity(n_, x.scale);
  }

  RealMatrix apply(const ManifoldPoint& x, const RealMatrix& w) const override {
    return x.scale * w;
  }
  RealMatrix apply_tangent(const ManifoldPoint&, const TangentVector& xi,
                           const RealMatrix& w) const override {
    return xi.scale * w;
  }

  TangentVector project(const ManifoldPoint&, const Ambient& z) const override {
    TangentVector t;
    t.scale = z.trace(n_) / static_cast<double>(n_);
    return t;
  }

  double inner(const ManifoldPoint&, const TangentVector& a,
               const TangentVector& b) const override {
    return static_cast<double>(n_) * a.scale * b.scale;
  }

  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& xi) const override {
    ManifoldPoint y;
    y.scale = x.scale + xi.scale;
    return y;
  }

  TangentVector zero(const ManifoldPoint&) const override { return {}; }

  Ambient to_ambient(const ManifoldPoint&, const TangentVector& xi) const override {
    Ambient z;
    z.identity = xi.scale;
    return z;
  }

  Ambient difference(const ManifoldPoint& x, const ManifoldPoint& ref) const override {
    Ambient z;
    z.identity = x.scale - ref.scale;
    return z;
  }

  double distance2(const ManifoldPoint& x, const ManifoldPoint& ref) const override {
    const double d = x.scale - ref.scale;
    return static_cast<double>(n_) * d * d;
  }

  TangentVector random_tangent(const ManifoldPoint&, std::mt19937_64& rng) const override {
    TangentVector t;
    t.scale = normal(rng) / std::sqrt(static_cast<double>(n_));
    return t;
  }

 private:
  Index n_;
};

// -------------------------------------------------------------------------

/// All real n x n matrices, or the symmetric ones.
class DenseManifold final : public Manifold {
 public:
  DenseManifold(Index n, bool symmetric) : n_(n), symmetric_(symmetric) {}

  StructureKind kind() const override {
    return symmetric_ ? StructureKind::symmetric : StructureKind::unstructured;
  }
  Index n() const override { return n_; }
  Index dim() const override { return symmetric_ ? n_ * (n_ + 1) / 2 : n_ * n_; }

  ManifoldPoint from_coefficient(const Coefficient& c, double tol) const override {
    require_real(c, tol, "dense manifold");
    ManifoldPoint x;
    x.dense = c.dense().real();
    if (symmetric_ &&
        (x.dense - x.dense.transpose()).norm() > tol * std::max(x.dense.norm(), 1e-300)) {
      throw std::invalid_argument("reference coefficient is not symmetric");
    }
    return x;
  }

  Coefficient to_coefficient(const ManifoldPoint& x) const override {
    return Coefficient(Matrix(x.dense.cast<Scalar>()));
  }

  RealMatrix apply(const ManifoldPoint& x, const RealMatrix& w) const override {
    return x.dense * w;
  }
  RealMatrix apply_tangent(const ManifoldPoint&, const TangentVector& xi,
                           const RealMatrix& w) const override {
    return xi.dense * w;
  }

  TangentVector project(const ManifoldPoint&, const Ambient& z) const override {
    TangentVector t;
    t.dense = z.dense(n_);
    if (symmetric_) t.dense = 0.5 * (t.dense + t.dense.transpose()).eval();
    return t;
  }

  double inner(const ManifoldPoint&, const TangentVector& a,
               const TangentVector& b) const override {
    return a.dense.cwiseProduct(b.dense).sum();
  }

  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& xi) const override {
    ManifoldPoint y;
    y.dense = x.dense + xi.dense;
    return y;
  }

  TangentVector zero(const ManifoldPoint&) const override {
    TangentVector t;
    t.dense = RealMatrix::Zero(n_, n_);
    return t;
  }

  Ambient to_ambient(const ManifoldPoint&, const TangentVector& xi) const override {
    Ambient z;
    z.D = xi.dense;
    return z;
  }

  Ambient difference(const ManifoldPoint& x, const ManifoldPoint& ref) const override {
    Ambient z;
    z.D = x.dense - ref.dense;
    return z;
  }

  double distance2(const ManifoldPoint& x, const ManifoldPoint& ref) const override {
    return (x.dense - ref.dense).squaredNorm();
  }

  TangentVector random_tangent(const ManifoldPoint&, std::mt19937_64& rng) const override {
    TangentVector t;
    t.dense = random_matrix(n_, n_, rng);
    if (symmetric_) t.dense = 0.5 * (t.dense + t.dense.transpose()).eval();
    return t;
  }

 private:
  Index n_;
  bool symmetric_;
};

// -------------------------------------------------------------------------

/// Real n x n matrices of rank exactly r, stored as U diag(s) V^T.
class FixedRankManifold final : public Manifold {
 public:
  FixedRankManifold(Index n, Index r) : n_(n), r_(r) {}

  StructureKind kind() const override { return StructureKind::fixed_rank; }
  Index n() const override { return n_; }
  Index dim() const override { return (2 * n_ - r_) * r_; }

  ManifoldPoint from_coefficient(const Coefficient& c, double tol) const override {
    require_real(c, tol, "fixed-rank manifold");
    RealMatrix u, v;
    RealVector s;
    if (c.is_low_rank()) {
      const auto& f = c.as_low_rank();
      const RealQr ql = real_qr(f.left.real());
      const RealQr qrr = real_qr(f.right.real());
      Eigen::JacobiSVD<RealMatrix> svd(ql.T * qrr.T.transpose(),
                                       Eigen::ComputeFullU | Eigen::ComputeFullV);
      u = ql.Q * svd.matrixU();
      v = qrr.Q * svd.matrixV();
      s = svd.singularValues();
    } else {
      Eigen::BDCSVD<RealMatrix> svd(c.dense().real(), Eigen::ComputeThinU | Eigen::ComputeThinV);
      u = svd.matrixU();
      v = svd.matrixV();
      s = svd.singularValues();
    }
    if (s.size() < r_ || s(r_ - 1) <= tol * s(0)) {
      throw std::invalid_argument("reference coefficient has rank below " +
                                  std::to_string(r_));
    }
    const double tail = s.size() > r_ ? s.tail(s.size() - r_).norm() : 0.0;
    if (tail > tol * s.norm()) {
      throw std::invalid_argument("reference coefficient has rank above " +
                                  std::to_string(r_));
    }
    ManifoldPoint x;
    x.U = u.leftCols(r_);
    x.s = s.head(r_);
    x.V = v.leftCols(r_);
    return x;
  }

  Coefficient to_coefficient(const ManifoldPoint& x) const override {
    return Coefficient(LowRankFactors{(x.U * x.s.asDiagonal()).cast<Scalar>(),
                                      x.V.cast<Scalar>()});
  }

  RealMatrix apply(const ManifoldPoint& x, const RealMatrix& w) const override {
    return x.U * (x.s.asDiagonal() * (x.V.transpose() * w));
  }

  RealMatrix apply_tangent(const ManifoldPoint& x, const TangentVector& xi,
                           const RealMatrix& w) const override {
    const RealMatrix vw = x.V.transpose() * w;
    return x.U * (xi.M * vw + xi.Vp.transpose() * w) + xi.Up * vw;
  }

  TangentVector project(const ManifoldPoint& x, const Ambient& z) const override {
    const RealMatrix zv = z.apply(x.V);
    const RealMatrix ztu = z.apply_transpose(x.U);
    TangentVector t;
    t.M = x.U.transpose() * zv;
    t.Up = zv - x.U * t.M;
    t.Vp = ztu - x.V * t.M.transpose();
    return t;
  }

  double inner(const ManifoldPoint&, const TangentVector& a,
               const TangentVector& b) const override {
    return a.M.cwiseProduct(b.M).sum() + a.Up.cwiseProduct(b.Up).sum() +
           a.Vp.cwiseProduct(b.Vp).sum();
  }

  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& xi) const override {
    ManifoldPoint y;
    if (try_retract(x, xi, y)) return y;
    ManifoldPoint nudged = x;
    nudged.s.array() += 1e-14 * x.s.norm();
    if (try_retract(nudged, xi, y)) return y;
    throw NumericalError("fixed-rank retraction: rank collapsed below " +
                         std::to_string(r_) + " (smallest singular value 0)");
  }

  TangentVector zero(const ManifoldPoint&) const override {
    TangentVector t;
    t.M = RealMatrix::Zero(r_, r_);
    t.Up = RealMatrix::Zero(n_, r_);
    t.Vp = RealMatrix::Zero(n_, r_);
    return t;
  }

  Ambient to_ambient(const ManifoldPoint& x, const TangentVector& xi) const override {
    Ambient z;
    z.A.resize(n_, 2 * r_);
    z.B.resize(n_, 2 * r_);
    z.A << x.U * xi.M + xi.Up, x.U;
    z.B << x.V, xi.Vp;
    return z;
  }

  Ambient difference(const ManifoldPoint& x, const ManifoldPoint& ref) const override {
    Ambient z;
    z.A.resize(n_, x.U.cols() + ref.U.cols());
    z.B.resize(n_, x.U.cols() + ref.U.cols());
    z.A << x.U * x.s.asDiagonal(), -(ref.U * ref.s.asDiagonal());
    z.B << x.V, ref.V;
    return z;
  }

  double distance2(const ManifoldPoint& x, const ManifoldPoint& ref) const override {
    const Ambient z = difference(x, ref);
    const double d = low_rank_norm(z.A, z.B);
    return d * d;
  }

  TangentVector weingarten(const ManifoldPoint& x, const TangentVector& xi,
                           const Ambient& egrad) const override {
    TangentVector t = zero(x);
    const RealVector sinv = x.s.cwiseInverse();
    RealMatrix g = egrad.apply(xi.Vp) * sinv.asDiagonal();
    t.Up = g - x.U * (x.U.transpose() * g);
    g = egrad.apply_transpose(xi.Up) * sinv.asDiagonal();
    t.Vp = g - x.V * (x.V.transpose() * g);
    return t;
  }

  TangentVector random_tangent(const ManifoldPoint& x, std::mt19937_64& rng) const override {
    TangentVector t;
    t.M = random_matrix(r_, r_, rng);
    RealMatrix g = random_matrix(n_, r_, rng);
    t.Up = g - x.U * (x.U.transpose() * g);
    g = random_matrix(n_, r_, rng);
    t.Vp = g - x.V * (x.V.transpose() * g);
    return t;
  }

 private:
  bool try_retract(const ManifoldPoint& x, const TangentVector& xi, ManifoldPoint& y) const {
    const RealQr qu = real_qr(xi.Up);
    const RealQr qv = real_qr(xi.Vp);
    RealMatrix core = RealMatrix::Zero(2 * r_, 2 * r_);
    core.topLeftCorner(r_, r_) = RealMatrix(x.s.asDiagonal()) + xi.M;
    core.topRightCorner(r_, r_) = qv.T.transpose();
    core.bottomLeftCorner(r_, r_) = qu.T;
    Eigen::JacobiSVD<RealMatrix> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector s = svd.singularValues();
    if (!(s(r_ - 1) > 0.0) || !std::isfinite(s(0))) return false;
    RealMatrix bu(n_, 2 * r_), bv(n_, 2 * r_);
    bu << x.U, qu.Q;
    bv << x.V, qv.Q;
    y.U = bu * svd.matrixU().leftCols(r_);
    y.V = bv * svd.matrixV().leftCols(r_);
    y.s = s.head(r_);
    return true;
  }

  Index n_;
  Index r_;
};

}  // namespace

std::shared_ptr<const Manifold> make_manifold(const StructureSpec& spec, Index n) {
  spec.validate(n);
  switch (spec.kind) {
    case StructureKind::unstructured:
      return std::make_shared<DenseManifold>(n, false);
    case StructureKind::symmetric:
      return std::make_shared<DenseManifold>(n, true);
    case StructureKind::sparsity:
      return std::make_shared<SparseManifold>(n, spec.pattern);
    case StructureKind::scaled_identity:
      return std::make_shared<ScaledIdentityManifold>(n);
    case StructureKind::fixed_rank:
      return std::make_shared<FixedRankManifold>(n, spec.rank);
    case StructureKind::subspace:
      break;
  }
  throw std::invalid_argument("structure " + spec.name() +
                              " has no manifold; use the linear structured solver");
}

ProductManifold::ProductManifold(std::vector<std::shared_ptr<const Manifold>> parts)
    : parts_(std::move(parts)) {}

Index ProductManifold::dim() const {
  Index d = 0;
  for (const auto& p : parts_) d += p->dim();
  return d;
}

double ProductManifold::inner(const ProductPoint& x, const ProductTangent& a,
                              const ProductTangent& b) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < parts_.size(); ++j) acc += parts_[j]->inner(x[j], a[j], b[j]);
  return acc;
}

double ProductManifold::norm(const ProductPoint& x, const ProductTangent& a) const {
  return std::sqrt(std::max(0.0, inner(x, a, a)));
}

ProductTangent ProductManifold::zero(const ProductPoint& x) const {
  ProductTangent t;
  t.reserve(parts_.size());
  for (std::size_t j = 0; j < parts_.size(); ++j) t.push_back(parts_[j]->zero(x[j]));
  return t;
}

ProductPoint ProductManifold::retract(const ProductPoint& x, const ProductTangent& xi) const {
  ProductPoint y;
  y.reserve(parts_.size());
  for (std::size_t j = 0; j < parts_.size(); ++j) y.push_back(parts_[j]->retract(x[j], xi[j]));
  return y;
}

ProductTangent ProductManifold::project(const ProductPoint& x,
                                        const std::vector<Ambient>& z) const {
  ProductTangent t;
  t.reserve(parts_.size());
  for (std::size_t j = 0; j < parts_.size(); ++j) t.push_back(parts_[j]->project(x[j], z[j]));
  return t;
}

ProductTangent ProductManifold::random_tangent(const ProductPoint& x,
                                               std::mt19937_64& rng) const {
  ProductTangent t;
  t.reserve(parts_.size());
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    t.push_back(parts_[j]->random_tangent(x[j], rng));
  }
  return t;
}

void axpy(double s, const ProductTangent& b, ProductTangent& a) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j].axpy(s, b[j]);
}

ProductTangent scaled(double s, ProductTangent a) {
  for (auto& t : a) t *= s;
  return a;
}

}  // namespace nepbe::riemann
