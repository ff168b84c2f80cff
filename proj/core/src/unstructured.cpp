#include "nepbe/unstructured.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nepbe/parallel.hpp"

namespace nepbe {

double PerturbationSet::norm_from_terms() const {
  double acc = 0.0;
  for (const auto& d : deltas) {
    const double v = d.frobenius_norm();
    acc += v * v;
  }
  return std::sqrt(acc);
}

Matrix perturbed_residual(const SplitNEP& nep, const Matrix& W,
                          const PerturbationSet& delta) {
  const Index n = nep.n();
  Matrix out = apply_blocks(nep.coefficients(), W);
  for (Index j = 0; j < delta.terms(); ++j) {
    out += delta.deltas[static_cast<std::size_t>(j)].apply(W.middleRows(j * n, n));
  }
  return out;
}

double ratio_bound(double norm, double sigma) {
  if (norm == 0.0) return 0.0;
  if (sigma == 0.0) return std::numeric_limits<double>::infinity();
  return norm / sigma;
}

PerturbationSet backward_error_exact(const SplitNEP& nep, const EigenpairSet& pairs,
                                     double rank_tol) {
  const ResidualBundle b = residual_bundle(nep, pairs);
  const Index n = nep.n();
  const Index k = nep.k();

  // [dF_1 ... dF_k] = -R [(G krt V^T)^+]^T
  const Matrix m = linalg::khatri_rao_t(b.G, pairs.V.transpose());
  const Matrix mdag = linalg::pinv(m, rank_tol);

  PerturbationSet out;
  out.shared_left = b.R;
  out.right.reserve(static_cast<std::size_t>(k));
  out.deltas.reserve(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    Matrix mj = mdag.middleRows(j * n, n);
    out.deltas.emplace_back(LowRankFactors{-b.R, mj});
    out.right.push_back(std::move(mj));
  }
  // ||R X||_F = ||T_R X||_F for R = Q_R T_R.
  out.eta = (linalg::qr_triangle(b.R) * mdag.transpose()).norm();
  return out;
}

BoundsReport bounds_with_eigenvectors(const SplitNEP& nep, const EigenpairSet& pairs) {
  pairs.validate(nep.n());
  BoundsReport rep;
  for (Index i = 0; i < pairs.V.cols(); ++i) {
    if (std::abs(pairs.V.col(i).norm() - 1.0) > 1e-14) rep.rescaled = true;
  }
  const EigenpairSet unit = pairs.normalized_copy();
  const ResidualBundle b = residual_bundle(nep, unit);
  const Index n = nep.n();
  const Index k = nep.k();
  const Index p = unit.size();

  rep.residual_norm = b.residual_norm;
  const Matrix m = linalg::khatri_rao_t(b.G, unit.V.transpose());
  const RealVector sm = linalg::singular_values(m);
  linalg::SvdFactors dummy;
  dummy.S = sm;
  rep.effective_rank = dummy.rank();
  rep.sigma_phat = rep.effective_rank > 0 ? sm(rep.effective_rank - 1) : 0.0;
  rep.upper_krt = ratio_bound(b.residual_norm, rep.sigma_phat);

  rep.eta_exact = backward_error_exact(nep, unit).eta;

  rep.sigma_p_G = linalg::sigma(b.G, p);
  const RealVector sv = linalg::singular_values(unit.V);
  const double sv_p = p <= sv.size() ? sv(p - 1) : 0.0;
  rep.kappa_V = sv_p > 0.0 ? sv(0) / sv_p : std::numeric_limits<double>::infinity();

  if (p <= k * n) {
    if (b.residual_norm == 0.0) {
      rep.upper_G_kappa = 0.0;
    } else if (rep.sigma_p_G == 0.0 || !std::isfinite(rep.kappa_V)) {
      rep.upper_G_kappa = std::numeric_limits<double>::infinity();
    } else {
      rep.upper_G_kappa = rep.kappa_V * b.residual_norm / rep.sigma_p_G;
    }
  }
  if (p <= k) rep.upper_G = ratio_bound(b.residual_norm, rep.sigma_p_G);
  return rep;
}

BoundsReport bounds_eigenvalues_only(const SplitNEP& nep, const Vector& lambdas) {
  const Index n = nep.n();
  const Index p = lambdas.size();
  if (p < 1) throw DimensionError("bounds_eigenvalues_only: no eigenvalues given");

  BoundsReport rep;
  rep.sigma_hats.resize(p);
  rep.singular_vectors.resize(n, p);
  parallel_for(static_cast<std::size_t>(p), [&](std::size_t idx) {
    const Index i = static_cast<Index>(idx);
    const linalg::SvdFactors f = linalg::svd(nep.evaluate(lambdas(i)), true);
    rep.sigma_hats(i) = f.S(n - 1);
    rep.singular_vectors.col(i) = f.Vt.row(n - 1).adjoint();
  });

  const Matrix g = function_matrix(nep, lambdas);
  double lower = 0.0;
  for (Index i = 0; i < p; ++i) {
    const double gn = g.row(i).norm();
    if (rep.sigma_hats(i) == 0.0) continue;
    lower = std::max(lower, gn > 0.0 ? rep.sigma_hats(i) / gn
                                     : std::numeric_limits<double>::infinity());
  }
  rep.lower_sv = lower;

  EigenpairSet svp{lambdas, rep.singular_vectors, true};
  const Matrix m = linalg::khatri_rao_t(g, svp.V.transpose());
  const RealVector sm = linalg::singular_values(m);
  linalg::SvdFactors dummy;
  dummy.S = sm;
  rep.effective_rank = dummy.rank();
  rep.sigma_phat = rep.effective_rank > 0 ? sm(rep.effective_rank - 1) : 0.0;
  const double smax = rep.sigma_hats.maxCoeff();
  rep.upper_krt = ratio_bound(std::sqrt(static_cast<double>(p)) * smax, rep.sigma_phat);

  const ResidualBundle b = residual_bundle(nep, svp);
  rep.residual_norm = b.residual_norm;
  rep.eta_exact = backward_error_exact(nep, svp).eta;
  return rep;
}

}  // namespace nepbe
