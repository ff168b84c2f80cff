#include "nepbe/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nepbe::riemann {

namespace {

struct InnerResult {
  ProductTangent eta;
  ProductTangent heta;
  int iterations = 0;
  bool hit_boundary = false;
};

// Steihaug-Toint truncated conjugate gradient on the trust-region model
// m(eta) = <g, eta> + 0.5 <eta, H eta>, ||eta|| <= delta.
InnerResult truncated_cg(const PenaltyProblem& problem, const ProductPoint& x,
                         const ProductTangent& grad, const std::vector<Ambient>& eg,
                         double delta, const TrustRegionOptions& opts, int max_inner) {
  const ProductManifold& mf = problem.manifold();
  InnerResult out;
  out.eta = mf.zero(x);
  out.heta = mf.zero(x);

  ProductTangent r = grad;
  double r_r = mf.inner(x, r, r);
  const double norm_r0 = std::sqrt(r_r);
  ProductTangent d = scaled(-1.0, r);
  double e_pe = 0.0;
  double e_pd = 0.0;
  double d_pd = r_r;
  double model = 0.0;

  for (int j = 0; j < max_inner; ++j) {
    out.iterations = j + 1;
    const ProductTangent hd = problem.rhess(x, d, eg, opts.hessian);
    const double d_hd = mf.inner(x, d, hd);
    const double alpha = r_r / d_hd;
    const double e_pe_new = e_pe + 2.0 * alpha * e_pd + alpha * alpha * d_pd;

    if (!(d_hd > 0.0) || e_pe_new >= delta * delta) {
      const double tau =
          (-e_pd + std::sqrt(std::max(0.0, e_pd * e_pd + d_pd * (delta * delta - e_pe)))) /
          d_pd;
      axpy(tau, d, out.eta);
      axpy(tau, hd, out.heta);
      out.hit_boundary = true;
      return out;
    }

    ProductTangent eta_new = out.eta;
    axpy(alpha, d, eta_new);
    ProductTangent heta_new = out.heta;
    axpy(alpha, hd, heta_new);
    const double model_new =
        mf.inner(x, eta_new, grad) + 0.5 * mf.inner(x, eta_new, heta_new);
    if (model_new >= model) return out;
    model = model_new;
    out.eta = std::move(eta_new);
    out.heta = std::move(heta_new);
    e_pe = e_pe_new;

    axpy(alpha, hd, r);
    const double r_r_old = r_r;
    r_r = mf.inner(x, r, r);
    const double norm_r = std::sqrt(r_r);
    if (norm_r <= norm_r0 * std::min(std::pow(norm_r0, opts.theta), opts.kappa)) return out;

    const double beta = r_r / r_r_old;
    ProductTangent d_new = scaled(-1.0, r);
    axpy(beta, d, d_new);
    d = std::move(d_new);
    e_pd = beta * (e_pd + alpha * d_pd);
    d_pd = r_r + beta * beta * d_pd;
  }
  return out;
}

}  // namespace

TrustRegionResult trust_region_minimize(const PenaltyProblem& problem, ProductPoint start,
                                        const TrustRegionOptions& opts) {
  const ProductManifold& mf = problem.manifold();
  TrustRegionResult out;
  out.x = std::move(start);

  const double delta_bar =
      opts.delta_bar > 0.0 ? opts.delta_bar : std::max(1.0, problem.reference_norm());
  double delta = opts.delta0 > 0.0 ? opts.delta0 : delta_bar / 8.0;
  const int max_inner = opts.max_inner > 0
                            ? opts.max_inner
                            : static_cast<int>(std::min<Index>(mf.dim(), 1000));

  RealMatrix y;
  double f = problem.cost(out.x, &y);
  std::vector<Ambient> eg = problem.egrad(out.x, y);
  ProductTangent grad = problem.rgrad(out.x, eg);
  double gnorm = mf.norm(out.x, grad);
  out.initial_grad_norm = gnorm;
  const double gtol = std::max(opts.gtol_abs, opts.gtol_rel * gnorm);

  int iter = 0;
  for (;;) {
    if (gnorm <= gtol) {
      out.converged = true;
      out.stop_reason = "gradient tolerance reached";
      break;
    }
    if (iter >= opts.max_iter) {
      out.stop_reason = "maximum iterations reached";
      break;
    }
    if (delta < 1e-15 * delta_bar) {
      out.stop_reason = "trust-region radius collapsed";
      break;
    }
    ++iter;

    const InnerResult inner = truncated_cg(problem, out.x, grad, eg, delta, opts, max_inner);
    out.inner_total += inner.iterations;
    const double model_decrease =
        -(mf.inner(out.x, grad, inner.eta) + 0.5 * mf.inner(out.x, inner.eta, inner.heta));

    ProductPoint candidate;
    double f_new = std::numeric_limits<double>::infinity();
    RealMatrix y_new;
    try {
      candidate = mf.retract(out.x, inner.eta);
      f_new = problem.cost(candidate, &y_new);
    } catch (const NumericalError&) {
      // Treated as a rejected step; the radius shrinks below.
    }

    // Regularized ratio: both differences gain a few ulps of f so that
    // steps at the noise level of f are judged by the model alone.
    const double reg = 1e3 * std::numeric_limits<double>::epsilon() * std::max(std::abs(f), 1e-300);
    const double rho = (f - f_new + reg) / (model_decrease + reg);

    const bool accept = rho > opts.rho_prime && f_new <= f && model_decrease > 0.0;
    if (!(rho >= 0.25) || !accept) {
      delta /= 4.0;
    } else if (rho > 0.75 && inner.hit_boundary) {
      delta = std::min(2.0 * delta, delta_bar);
    }
    TrustRegionStep step;
    step.iteration = iter;
    step.inner = inner.iterations;
    step.radius = delta;
    step.accepted = accept;
    if (accept) {
      out.x = std::move(candidate);
      f = f_new;
      eg = problem.egrad(out.x, y_new);
      grad = problem.rgrad(out.x, eg);
      gnorm = mf.norm(out.x, grad);
    }
    step.cost = f;
    step.grad_norm = gnorm;
    out.history.push_back(step);
  }
  out.iterations = iter;
  out.cost = f;
  out.grad_norm = gnorm;
  return out;
}

}  // namespace nepbe::riemann
