#pragma once

#include <memory>
#include <random>
#include <vector>

#include "nepbe/coefficient.hpp"
#include "nepbe/structure.hpp"

namespace nepbe::riemann {

/// An n x n ambient matrix A B^T + S + identity * I + D. Every part may be
/// empty; large terms only ever carry the low-rank and sparse parts.
struct Ambient {
  RealMatrix A;
  RealMatrix B;
  RealSparseMatrix S;
  double identity = 0.0;
  RealMatrix D;

  /// this * X
  RealMatrix apply(const RealMatrix& x) const;
  /// this^T * X
  RealMatrix apply_transpose(const RealMatrix& x) const;
  /// Entry (a, b).
  double entry(Index a, Index b) const;
  double trace(Index n) const;
  RealMatrix dense(Index n) const;

  /// Appends/adds other scaled by s.
  void add(const Ambient& other, double s = 1.0);
};

/// Feasible point of one factor manifold. Only the fields of its kind are set:
/// sparse -> values, scaled identity -> scale, fixed rank -> U, s, V (s holds
/// the diagonal of S), dense kinds -> dense.
struct ManifoldPoint {
  RealVector values;
  double scale = 0.0;
  RealMatrix U;
  RealVector s;
  RealMatrix V;
  RealMatrix dense;
};

/// Tangent vector; fixed rank uses the (M, Up, Vp) parametrization of
/// U M V^T + Up V^T + U Vp^T with U^T Up = 0 and V^T Vp = 0.
struct TangentVector {
  RealVector values;
  double scale = 0.0;
  RealMatrix M;
  RealMatrix Up;
  RealMatrix Vp;
  RealMatrix dense;

  TangentVector& operator*=(double a);
  /// this += a * x (shapes must agree).
  void axpy(double a, const TangentVector& x);
};

class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual StructureKind kind() const = 0;
  virtual Index n() const = 0;
  virtual Index dim() const = 0;

  /// Point representing c; throws std::invalid_argument when c lies off the
  /// manifold by more than tol * ||c||_F.
  virtual ManifoldPoint from_coefficient(const Coefficient& c, double tol = 1e-10) const = 0;
  virtual Coefficient to_coefficient(const ManifoldPoint& x) const = 0;

  /// X * W
  virtual RealMatrix apply(const ManifoldPoint& x, const RealMatrix& w) const = 0;
  /// xi * W for a tangent vector at x.
  virtual RealMatrix apply_tangent(const ManifoldPoint& x, const TangentVector& xi,
                                   const RealMatrix& w) const = 0;

  virtual TangentVector project(const ManifoldPoint& x, const Ambient& z) const = 0;
  virtual double inner(const ManifoldPoint& x, const TangentVector& a,
                       const TangentVector& b) const = 0;
  virtual ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& xi) const = 0;
  virtual TangentVector zero(const ManifoldPoint& x) const = 0;
  virtual Ambient to_ambient(const ManifoldPoint& x, const TangentVector& xi) const = 0;

  /// x - ref as an ambient matrix and its squared Frobenius norm.
  virtual Ambient difference(const ManifoldPoint& x, const ManifoldPoint& ref) const = 0;
  virtual double distance2(const ManifoldPoint& x, const ManifoldPoint& ref) const = 0;

  /// Curvature term added to the projected Euclidean Hessian; zero for
  /// flat manifolds.
  virtual TangentVector weingarten(const ManifoldPoint& x, const TangentVector& xi,
                                   const Ambient& egrad) const;

  virtual TangentVector random_tangent(const ManifoldPoint& x, std::mt19937_64& rng) const = 0;
};

/// Manifold for a structure spec. Supported: unstructured, symmetric,
/// sparsity, scaled identity, fixed rank.
std::shared_ptr<const Manifold> make_manifold(const StructureSpec& spec, Index n);

using ProductPoint = std::vector<ManifoldPoint>;
using ProductTangent = std::vector<TangentVector>;

class ProductManifold {
 public:
  ProductManifold() = default;
  explicit ProductManifold(std::vector<std::shared_ptr<const Manifold>> parts);

  std::size_t size() const { return parts_.size(); }
  const Manifold& part(std::size_t j) const { return *parts_.at(j); }
  Index dim() const;

  double inner(const ProductPoint& x, const ProductTangent& a, const ProductTangent& b) const;
  double norm(const ProductPoint& x, const ProductTangent& a) const;
  ProductTangent zero(const ProductPoint& x) const;
  ProductPoint retract(const ProductPoint& x, const ProductTangent& xi) const;
  ProductTangent project(const ProductPoint& x, const std::vector<Ambient>& z) const;
  ProductTangent random_tangent(const ProductPoint& x, std::mt19937_64& rng) const;

 private:
  std::vector<std::shared_ptr<const Manifold>> parts_;
};

/// a += s * b for product tangents.
void axpy(double s, const ProductTangent& b, ProductTangent& a);
ProductTangent scaled(double s, ProductTangent a);

/// Real economy QR helpers shared by the fixed-rank geometry.
struct RealQr {
  RealMatrix Q;
  RealMatrix T;
};
RealQr real_qr(const RealMatrix& a);

/// ||A B^T||_F without forming the product.
double low_rank_norm(const RealMatrix& a, const RealMatrix& b);

}  // namespace nepbe::riemann
