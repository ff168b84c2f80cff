#include "nepbe/structured_linear.hpp"

#include <limits>
#include <stdexcept>

#include "nepbe/parallel.hpp"

namespace nepbe {

std::vector<SubspaceBasis> structure_bases(const std::vector<StructureSpec>& specs,
                                           Index n) {
  std::vector<SubspaceBasis> out;
  out.reserve(specs.size());
  for (std::size_t j = 0; j < specs.size(); ++j) {
    if (!specs[j].is_linear()) {
      throw std::invalid_argument("term " + std::to_string(j) + " has structure " +
                                  specs[j].name() +
                                  ", which is not a linear space; use the riemannian solver");
    }
    out.push_back(canonical_basis(specs[j], n));
  }
  return out;
}

Matrix structured_system(const std::vector<SubspaceBasis>& bases, const Matrix& W,
                         std::vector<Index>* offsets) {
  if (bases.empty()) throw DimensionError("structured_system: no terms");
  const Index n = bases.front().n();
  const Index p = W.cols();
  if (W.rows() != n * static_cast<Index>(bases.size())) {
    throw DimensionError("structured_system: W has wrong row count");
  }
  std::vector<Index> off(bases.size() + 1, 0);
  for (std::size_t j = 0; j < bases.size(); ++j) off[j + 1] = off[j] + bases[j].dim();

  Matrix a = Matrix::Zero(n * p, off.back());
  std::vector<std::pair<std::size_t, Index>> cols;
  cols.reserve(static_cast<std::size_t>(off.back()));
  for (std::size_t j = 0; j < bases.size(); ++j) {
    for (Index i = 0; i < bases[j].dim(); ++i) cols.emplace_back(j, i);
  }
  std::vector<Matrix> blocks;
  for (std::size_t j = 0; j < bases.size(); ++j) {
    blocks.push_back(W.middleRows(static_cast<Index>(j) * n, n));
  }
  parallel_for(cols.size(), [&](std::size_t c) {
    const auto [j, i] = cols[c];
    Eigen::Map<Matrix> block(a.col(off[j] + i).data(), n, p);
    bases[j].accumulate_product(i, blocks[j], block);
  });
  if (offsets != nullptr) *offsets = std::move(off);
  return a;
}

StructuredSolver::StructuredSolver(std::vector<SubspaceBasis> bases, const Matrix& W,
                                   double rank_tol)
    : bases_(std::move(bases)) {
  const Matrix a = structured_system(bases_, W, &offsets_);
  n_ = bases_.front().n();
  if (offsets_.back() > 0) solver_ = linalg::MinNormSolver(a, rank_tol);
}

StructuredResult StructuredSolver::solve(const Matrix& R) const {
  if (R.rows() != n_) throw DimensionError("structured solve: residual has wrong row count");
  StructuredResult out;
  out.dimension = offsets_.back();
  const Vector r = -linalg::vec(R);
  const double rn = r.norm();

  Vector x = Vector::Zero(out.dimension);
  if (out.dimension == 0) {
    out.inconsistency = rn > 0.0 ? 1.0 : 0.0;
    out.consistent = rn == 0.0;
    out.upper_bound = rn > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    const linalg::MinNormSolution sol = solver_.solve(r);
    x = sol.x;
    out.effective_rank = sol.effective_rank;
    out.inconsistency = rn > 0.0 ? sol.residual_norm / rn : 0.0;
    out.consistent = sol.residual_norm <= 1e-10 * rn;
    out.upper_bound = ratio_bound(rn, solver_.sigma_min());
  }

  PerturbationSet& ps = out.perturbation;
  ps.deltas.reserve(bases_.size());
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    const Index d = bases_[j].dim();
    if (d == 0) {
      ps.deltas.push_back(Coefficient::zero(n_));
    } else {
      ps.deltas.push_back(bases_[j].combine(x.segment(offsets_[j], d)));
    }
  }
  ps.eta = x.norm();
  return out;
}

namespace {

std::vector<StructureSpec> resolve_specs(const SplitNEP& nep,
                                         std::vector<StructureSpec> specs) {
  if (specs.empty()) return nep.structures();
  if (static_cast<Index>(specs.size()) != nep.k()) {
    throw DimensionError("structured backward error: " + std::to_string(specs.size()) +
                         " structure specs for " + std::to_string(nep.k()) + " terms");
  }
  for (const auto& s : specs) s.validate(nep.n());
  return specs;
}

}  // namespace

StructuredResult structured_backward_error(const SplitNEP& nep, const EigenpairSet& pairs,
                                           std::vector<StructureSpec> specs,
                                           double rank_tol) {
  specs = resolve_specs(nep, std::move(specs));
  auto bases = structure_bases(specs, nep.n());
  const ResidualBundle b = residual_bundle(nep, pairs);
  return StructuredSolver(std::move(bases), b.W, rank_tol).solve(b.R);
}

StructuredResult structured_backward_error_invariant(const SplitNEP& nep,
                                                     const InvariantPair& pair,
                                                     std::vector<StructureSpec> specs,
                                                     double rank_tol) {
  specs = resolve_specs(nep, std::move(specs));
  auto bases = structure_bases(specs, nep.n());
  const InvariantResidual ir = invariant_residual(nep, pair);
  return StructuredSolver(std::move(bases), ir.W, rank_tol).solve(ir.R);
}

}  // namespace nepbe
