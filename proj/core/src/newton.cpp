#include "nepbe/newton.hpp"

#include <cmath>
#include <random>

#include <Eigen/SparseLU>

#include "nepbe/parallel.hpp"

namespace nepbe {

double evaluation_norm(const SplitNEP& nep, Scalar lambda) {
  if (nep.all_sparse()) return nep.evaluate_sparse(lambda).norm();
  bool has_dense = false;
  for (const auto& c : nep.coefficients()) has_dense = has_dense || c.is_dense();
  if (has_dense) return nep.evaluate(lambda).norm();

  // ||S + L R^T||_F^2 = ||S||^2 + 2 Re <S, L R^T> + ||L R^T||^2
  const RowVector f = nep.function_values(lambda);
  const Index n = nep.n();
  SparseMatrix s(n, n);
  std::vector<Matrix> ls, rs;
  for (Index j = 0; j < nep.k(); ++j) {
    const Coefficient& c = nep.coefficient(j);
    if (c.is_sparse()) {
      s += f(j) * c.as_sparse();
    } else {
      ls.push_back(f(j) * c.as_low_rank().left);
      rs.push_back(c.as_low_rank().right);
    }
  }
  Index m = 0;
  for (const auto& l : ls) m += l.cols();
  Matrix l(n, m), r(n, m);
  for (std::size_t t = 0, at = 0; t < ls.size(); at += ls[t].cols(), ++t) {
    l.middleCols(static_cast<Index>(at), ls[t].cols()) = ls[t];
    r.middleCols(static_cast<Index>(at), rs[t].cols()) = rs[t];
  }
  double cross = 0.0;
  for (Index col = 0; col < s.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(s, col); it; ++it) {
      const Scalar lr = l.row(it.row()).cwiseProduct(r.row(col)).sum();
      cross += (std::conj(it.value()) * lr).real();
    }
  }
  const double lr2 = ((l.adjoint() * l).cwiseProduct((r.adjoint() * r).conjugate())).sum().real();
  return std::sqrt(std::max(0.0, s.squaredNorm() + 2.0 * cross + lr2));
}

double relative_residual(const SplitNEP& nep, Scalar lambda, const Vector& v) {
  const double fn = evaluation_norm(nep, lambda);
  const double r = nep.apply(lambda, v / v.norm()).norm();
  return fn > 0.0 ? r / fn : r;
}

namespace {

// Solves F(lambda) x = b; returns false when F(lambda) is numerically singular.
// Sparse plus low-rank problems go through SparseLU and the Woodbury identity.
bool solve_at(const SplitNEP& nep, Scalar lambda, const Vector& b, Vector& x) {
  bool has_dense = false;
  Index lr_cols = 0;
  for (const auto& c : nep.coefficients()) {
    has_dense = has_dense || c.is_dense();
    if (c.is_low_rank()) lr_cols += c.as_low_rank().left.cols();
  }
  if (!has_dense) {
    const RowVector f = nep.function_values(lambda);
    const Index n = nep.n();
    SparseMatrix s(n, n);
    Matrix l(n, lr_cols), r(n, lr_cols);
    Index at = 0;
    for (Index j = 0; j < nep.k(); ++j) {
      const Coefficient& c = nep.coefficient(j);
      if (c.is_sparse()) {
        s += f(j) * c.as_sparse();
      } else {
        const LowRankFactors& lr = c.as_low_rank();
        l.middleCols(at, lr.left.cols()) = f(j) * lr.left;
        r.middleCols(at, lr.left.cols()) = lr.right;
        at += lr.left.cols();
      }
    }
    s.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(s);
    lu.factorize(s);
    if (lu.info() != Eigen::Success) {
      if (lr_cols == 0 || n > 4000) return false;
    } else {
      x = lu.solve(b);
      if (lr_cols > 0) {
        const Matrix sl = lu.solve(l);
        Matrix cap = Matrix::Identity(lr_cols, lr_cols) + r.transpose() * sl;
        Eigen::FullPivLU<Matrix> small(cap);
        if (!small.isInvertible()) return false;
        x -= sl * small.solve(r.transpose() * x);
      }
      return x.allFinite();
    }
  }
  Eigen::PartialPivLU<Matrix> lu(nep.evaluate(lambda));
  x = lu.solve(b);
  return x.allFinite();
}

Vector random_real(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

}  // namespace

NewtonResult newton_eigenpair(const SplitNEP& nep, const NewtonStart& start,
                              const NewtonOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("Newton tolerance must be positive");
  const Index n = nep.n();
  std::mt19937_64 rng(opts.seed);
  Vector c = opts.c.size() == 0 ? Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)))
                                : opts.c;
  if (c.size() != n || c.norm() == 0.0) {
    throw DimensionError("Newton normalization vector must be a nonzero n-vector");
  }

  NewtonResult out;
  out.lambda = start.lambda;
  Vector v = start.v.size() == 0 ? random_real(n, rng) : start.v;
  if (v.size() != n) throw DimensionError("Newton start vector has wrong length");
  Scalar cv = c.dot(v);  // conjugates c; c is real by default
  if (cv == Scalar(0.0)) {
    v = random_real(n, rng);
    cv = c.dot(v);
  }
  v /= cv;

  bool rerandomized = false;
  for (int it = 0;; ++it) {
    const double res = relative_residual(nep, out.lambda, v);
    out.residual_history.push_back(res);
    if (res <= opts.tol) {
      out.converged = true;
      break;
    }
    if (it >= opts.max_iter) {
      out.failure = "no convergence after " + std::to_string(opts.max_iter) +
                    " iterations (relative residual " + std::to_string(res) + ")";
      break;
    }
    out.iterations = it + 1;
    Vector u;
    if (!solve_at(nep, out.lambda, nep.apply_derivative(out.lambda, v), u)) {
      out.failure = "singular Jacobian at lambda = " + std::to_string(out.lambda.real()) +
                    (out.lambda.imag() >= 0 ? "+" : "") + std::to_string(out.lambda.imag()) + "i";
      break;
    }
    Scalar cu = c.dot(u);
    if (std::abs(cu) <= 1e-14 * c.norm() * u.norm()) {
      if (rerandomized) {
        out.failure = "bordered system singular: c^T u vanished twice";
        break;
      }
      c = random_real(n, rng);
      c /= c.norm();
      rerandomized = true;
      cu = c.dot(u);
      const Scalar cvv = c.dot(v);
      if (cvv != Scalar(0.0)) v /= cvv;
    }
    out.lambda -= 1.0 / cu;
    v = u / cu;
    if (!v.allFinite() || !std::isfinite(std::abs(out.lambda))) {
      out.failure = "iterate became non-finite";
      break;
    }
  }
  out.v = v / v.norm();
  return out;
}

CollectResult collect_pairs(const SplitNEP& nep, const CollectOptions& opts) {
  if (opts.p < 1) throw std::invalid_argument("collect_pairs: p must be at least 1");
  std::vector<NewtonStart> starts = opts.explicit_starts;
  if (starts.empty()) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < opts.starts; ++s) {
      NewtonStart st;
      if (opts.real_starts) {
        st.lambda = opts.center + opts.radius * (2.0 * unit(rng) - 1.0);
      } else {
        const double r = opts.radius * std::sqrt(unit(rng));
        const double t = 2.0 * M_PI * unit(rng);
        st.lambda = opts.center + std::polar(r, t);
      }
      starts.push_back(st);
    }
  }

  CollectResult out;
  out.runs.resize(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    NewtonOptions o = opts.newton;
    o.seed = opts.newton.seed + 7919 * static_cast<std::uint64_t>(s);
    out.runs[s] = newton_eigenpair(nep, starts[s], o);
  });

  double lmax = 0.0;
  for (const auto& r : out.runs) {
    if (r.converged) lmax = std::max(lmax, std::abs(r.lambda));
  }
  const double tol = opts.dedup_tol * std::max(lmax, 1e-300);
  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < out.runs.size() && static_cast<Index>(kept.size()) < opts.p; ++s) {
    const auto& r = out.runs[s];
    if (!r.converged) continue;
    bool dup = false;
    for (std::size_t q : kept) dup = dup || std::abs(out.runs[q].lambda - r.lambda) <= tol;
    if (!dup) kept.push_back(s);
  }

  const Index found = static_cast<Index>(kept.size());
  out.pairs.lambdas.resize(found);
  out.pairs.V.resize(nep.n(), found);
  out.pairs.normalized = true;
  for (Index i = 0; i < found; ++i) {
    out.pairs.lambdas(i) = out.runs[kept[static_cast<std::size_t>(i)]].lambda;
    out.pairs.V.col(i) = out.runs[kept[static_cast<std::size_t>(i)]].v;
  }
  out.complete = found == opts.p;
  if (!out.complete) {
    out.warning = "found " + std::to_string(found) + " distinct eigenpairs, " +
                  std::to_string(opts.p) + " requested";
  }
  return out;
}

}  // namespace nepbe
