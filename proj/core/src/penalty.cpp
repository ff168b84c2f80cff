#include "nepbe/penalty.hpp"

#include <chrono>
#include <limits>
#include <cmath>
#include <stdexcept>

#include "nepbe/trust_region.hpp"

namespace nepbe::riemann {

RealMatrix real_split(const Matrix& W) {
  if (linalg::max_abs_imag(W) == 0.0) return W.real();
  RealMatrix out(W.rows(), 2 * W.cols());
  out << W.real(), W.imag();
  return out;
}

PenaltyProblem::PenaltyProblem(ProductManifold manifold, ProductPoint reference,
                               RealMatrix W, double mu)
    : manifold_(std::move(manifold)), reference_(std::move(reference)), W_(std::move(W)) {
  if (manifold_.size() == 0) throw DimensionError("penalty problem: no terms");
  if (reference_.size() != manifold_.size()) {
    throw DimensionError("penalty problem: reference point has wrong term count");
  }
  n_ = manifold_.part(0).n();
  if (W_.rows() != n_ * k()) throw DimensionError("penalty problem: W has wrong row count");
  set_mu(mu);
  double acc = 0.0;
  for (std::size_t j = 0; j < manifold_.size(); ++j) {
    const double v = manifold_.part(j).to_coefficient(reference_[j]).frobenius_norm();
    acc += v * v;
  }
  reference_norm_ = std::sqrt(acc);
}

PenaltyProblem PenaltyProblem::from_nep(const SplitNEP& nep, const Matrix& W,
                                        const std::vector<StructureSpec>& specs, double mu,
                                        double feasibility_tol) {
  if (static_cast<Index>(specs.size()) != nep.k()) {
    throw DimensionError("penalty problem: " + std::to_string(specs.size()) +
                         " structure specs for " + std::to_string(nep.k()) + " terms");
  }
  std::vector<std::shared_ptr<const Manifold>> parts;
  ProductPoint ref;
  for (Index j = 0; j < nep.k(); ++j) {
    parts.push_back(make_manifold(specs[static_cast<std::size_t>(j)], nep.n()));
    try {
      ref.push_back(parts.back()->from_coefficient(nep.coefficient(j), feasibility_tol));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("term " + std::to_string(j) + ": " + e.what());
    }
  }
  return PenaltyProblem(ProductManifold(std::move(parts)), std::move(ref), real_split(W), mu);
}

void PenaltyProblem::set_mu(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("penalty weight mu must be positive");
  mu_ = mu;
}

RealMatrix PenaltyProblem::residual(const ProductPoint& x) const {
  RealMatrix y = RealMatrix::Zero(n_, W_.cols());
  for (Index j = 0; j < k(); ++j) {
    y += manifold_.part(static_cast<std::size_t>(j)).apply(x[static_cast<std::size_t>(j)],
                                                           block(j));
  }
  return y;
}

double PenaltyProblem::distance(const ProductPoint& x) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < manifold_.size(); ++j) {
    acc += manifold_.part(j).distance2(x[j], reference_[j]);
  }
  return std::sqrt(acc);
}

double PenaltyProblem::cost(const ProductPoint& x, RealMatrix* residual_out) const {
  RealMatrix y = residual(x);
  const double d = distance(x);
  const double f = y.squaredNorm() + mu_ * d * d;
  if (residual_out != nullptr) *residual_out = std::move(y);
  return f;
}

std::vector<Ambient> PenaltyProblem::egrad(const ProductPoint& x,
                                           const RealMatrix& residual) const {
  std::vector<Ambient> out(manifold_.size());
  for (std::size_t j = 0; j < manifold_.size(); ++j) {
    out[j].A = 2.0 * residual;
    out[j].B = block(static_cast<Index>(j));
    out[j].add(manifold_.part(j).difference(x[j], reference_[j]), 2.0 * mu_);
  }
  return out;
}

std::vector<Ambient> PenaltyProblem::egrad(const ProductPoint& x) const {
  return egrad(x, residual(x));
}

std::vector<Ambient> PenaltyProblem::ehess(const ProductPoint& x,
                                           const ProductTangent& xi) const {
  RealMatrix z = RealMatrix::Zero(n_, W_.cols());
  for (Index j = 0; j < k(); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    z += manifold_.part(jj).apply_tangent(x[jj], xi[jj], block(j));
  }
  std::vector<Ambient> out(manifold_.size());
  for (std::size_t j = 0; j < manifold_.size(); ++j) {
    out[j].A = 2.0 * z;
    out[j].B = block(static_cast<Index>(j));
    out[j].add(manifold_.part(j).to_ambient(x[j], xi[j]), 2.0 * mu_);
  }
  return out;
}

ProductTangent PenaltyProblem::rgrad(const ProductPoint& x,
                                     const std::vector<Ambient>& eg) const {
  return manifold_.project(x, eg);
}

ProductTangent PenaltyProblem::rhess(const ProductPoint& x, const ProductTangent& xi,
                                     const std::vector<Ambient>& eg,
                                     HessianMode mode) const {
  ProductTangent h = manifold_.project(x, ehess(x, xi));
  if (mode == HessianMode::exact) {
    for (std::size_t j = 0; j < manifold_.size(); ++j) {
      if (manifold_.part(j).kind() == StructureKind::fixed_rank) {
        h[j].axpy(1.0, manifold_.part(j).weingarten(x[j], xi[j], eg[j]));
      }
    }
  }
  return h;
}

ContinuationResult penalty_continuation(const SplitNEP& nep, const EigenpairSet& pairs,
                                        std::vector<StructureSpec> specs,
                                        const ContinuationOptions& opts) {
  const ResidualBundle b = residual_bundle(nep, pairs);
  return penalty_continuation(nep, b.W, std::move(specs), opts);
}

ContinuationResult penalty_continuation(const SplitNEP& nep, const Matrix& W,
                                        std::vector<StructureSpec> specs,
                                        const ContinuationOptions& opts) {
  if (specs.empty()) specs = nep.structures();
  if (!(opts.rho > 0.0 && opts.rho < 1.0)) {
    throw std::invalid_argument("continuation factor rho must lie in (0, 1)");
  }
  if (!(opts.eps > 0.0)) throw std::invalid_argument("accuracy eps must be positive");
  PenaltyProblem problem = PenaltyProblem::from_nep(nep, W, specs, opts.mu0,
                                                    opts.feasibility_tol);
  ContinuationResult out;
  out.residual_scale = nep.coefficient_norm() * W.norm();

  TrustRegionOptions inner = opts.inner;
  const double wn = W.norm();
  inner.gtol_abs = std::max(inner.gtol_abs, opts.gradient_floor *
                                                std::numeric_limits<double>::epsilon() *
                                                nep.coefficient_norm() * wn * wn);

  ProductPoint x = problem.reference();
  double mu = opts.mu0;
  for (;;) {
    problem.set_mu(mu);
    const auto t0 = std::chrono::steady_clock::now();
    TrustRegionResult tr = trust_region_minimize(problem, std::move(x), inner);
    const auto t1 = std::chrono::steady_clock::now();
    x = std::move(tr.x);

    ContinuationStep step;
    step.mu = mu;
    step.residual_norm = problem.residual(x).norm();
    step.eta = problem.distance(x);
    step.iterations = tr.iterations;
    step.grad_norm = tr.grad_norm;
    step.converged = tr.converged;
    step.seconds = std::chrono::duration<double>(t1 - t0).count();
    out.history.push_back(step);
    out.converged = out.converged && tr.converged;

    if (std::sqrt(mu) <= opts.eps) break;
    mu *= opts.rho;
  }

  out.residual_norm = problem.residual(x).norm();
  out.perturbation.eta = problem.distance(x);
  for (std::size_t j = 0; j < problem.manifold().size(); ++j) {
    const Manifold& m = problem.manifold().part(j);
    Coefficient c = m.to_coefficient(x[j]);
    const Ambient d = m.difference(x[j], problem.reference()[j]);
    if (m.kind() == StructureKind::fixed_rank) {
      out.perturbation.deltas.emplace_back(
          LowRankFactors{d.A.cast<Scalar>(), d.B.cast<Scalar>()});
    } else if (m.kind() == StructureKind::sparsity) {
      out.perturbation.deltas.emplace_back(SparseMatrix(d.S.cast<Scalar>()));
    } else if (m.kind() == StructureKind::scaled_identity) {
      out.perturbation.deltas.push_back(Coefficient::identity(nep.n(), d.identity));
    } else {
      out.perturbation.deltas.emplace_back(Matrix(d.D.cast<Scalar>()));
    }
    out.coefficients.push_back(std::move(c));
  }
  out.point = std::move(x);
  return out;
}

}  // namespace nepbe::riemann
