#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nepbe/nep.hpp"
#include "nepbe/structure.hpp"

namespace testing_support {

using namespace nepbe;

inline Matrix random_complex(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = Scalar(nd(rng), nd(rng));
  return m;
}

inline RealMatrix random_real(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RealMatrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = nd(rng);
  return m;
}

inline std::vector<ScalarFunction> function_pool() {
  return {functions::one(), functions::lambda(), functions::lambda2(), functions::exp_neg(),
          functions::exp_neg2(), functions::polynomial({1.0, -0.5, 0.25, 2.0})};
}

/// k dense coefficients with functions drawn in order from the pool.
inline SplitNEP random_dense_nep(Index n, Index k, std::mt19937_64& rng, bool real = false) {
  std::vector<Coefficient> c;
  std::vector<ScalarFunction> f;
  const auto pool = function_pool();
  for (Index j = 0; j < k; ++j) {
    c.emplace_back(real ? Matrix(random_real(n, n, rng).cast<Scalar>()) : random_complex(n, n, rng));
    f.push_back(pool[static_cast<std::size_t>(j) % pool.size()]);
  }
  return SplitNEP(std::move(c), std::move(f));
}

inline SplitNEP random_symmetric_nep(Index n, Index k, std::mt19937_64& rng) {
  std::vector<Coefficient> c;
  std::vector<ScalarFunction> f;
  const auto pool = function_pool();
  for (Index j = 0; j < k; ++j) {
    const RealMatrix a = random_real(n, n, rng);
    c.emplace_back(Matrix((a + a.transpose()).cast<Scalar>()));
    f.push_back(pool[static_cast<std::size_t>(j) % pool.size()]);
  }
  return SplitNEP(std::move(c), std::move(f), {},
                  std::vector<StructureSpec>(static_cast<std::size_t>(k),
                                             StructureSpec::symmetric()));
}

inline SparsityPattern random_pattern(Index n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SparsityPattern p;
  for (Index b = 0; b < n; ++b) {
    for (Index a = 0; a < n; ++a) {
      if (a == b || u(rng) < density) p.emplace_back(a, b);
    }
  }
  return p;
}

inline SparseMatrix sparse_on(Index n, const SparsityPattern& p, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<Eigen::Triplet<Scalar>> t;
  for (const auto& [a, b] : p) t.emplace_back(a, b, nd(rng));
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

inline EigenpairSet random_pairs(Index n, Index p, std::mt19937_64& rng, bool real = false) {
  EigenpairSet e;
  std::normal_distribution<double> nd;
  e.lambdas.resize(p);
  for (Index i = 0; i < p; ++i) e.lambdas(i) = real ? Scalar(nd(rng)) : Scalar(nd(rng), nd(rng));
  e.V = real ? Matrix(random_real(n, p, rng).cast<Scalar>()) : random_complex(n, p, rng);
  for (Index i = 0; i < p; ++i) e.V.col(i).normalize();
  e.normalized = true;
  return e;
}

/// Dense F(lambda) assembled entry by entry from the coefficients.
inline Matrix dense_F(const SplitNEP& nep, Scalar lambda) {
  Matrix f = Matrix::Zero(nep.n(), nep.n());
  for (Index j = 0; j < nep.k(); ++j) f += nep.function(j)(lambda) * nep.coefficient(j).dense();
  return f;
}

/// Stacked W (kn x p) built directly from the definition.
inline Matrix stacked_W(const SplitNEP& nep, const EigenpairSet& pairs) {
  const Index n = nep.n();
  Matrix w(nep.k() * n, pairs.size());
  for (Index j = 0; j < nep.k(); ++j) {
    for (Index i = 0; i < pairs.size(); ++i) {
      w.block(j * n, i, n, 1) = nep.function(j)(pairs.lambdas(i)) * pairs.V.col(i);
    }
  }
  return w;
}

inline Matrix residual_of(const SplitNEP& nep, const EigenpairSet& pairs) {
  Matrix r(nep.n(), pairs.size());
  for (Index i = 0; i < pairs.size(); ++i) {
    r.col(i) = dense_F(nep, pairs.lambdas(i)) * pairs.V.col(i);
  }
  return r;
}

struct OracleSolution {
  double eta = 0.0;
  std::vector<Matrix> deltas;
  double residual = 0.0;
};

/// Minimum-norm solution of sum_j dF_j W_j = -R over all n x n complex dF_j,
/// through the dense n p x k n^2 system (W^T kron I_n) vec([dF_1 .. dF_k]).
inline OracleSolution unstructured_oracle(const SplitNEP& nep, const EigenpairSet& pairs) {
  const Index n = nep.n();
  const Index k = nep.k();
  const Index p = pairs.size();
  const Matrix w = stacked_W(nep, pairs);
  const Matrix r = residual_of(nep, pairs);
  Matrix a = Matrix::Zero(n * p, k * n * n);
  // vec(dF W) = (W^T kron I) vec(dF), dF = [dF_1 .. dF_k] is n x kn.
  for (Index c = 0; c < k * n; ++c) {
    for (Index i = 0; i < p; ++i) {
      a.block(i * n, c * n, n, n) = w(c, i) * Matrix::Identity(n, n);
    }
  }
  const Eigen::Map<const Vector> rhs(r.data(), r.size());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  const Vector x = cod.solve(Vector(-rhs));
  OracleSolution out;
  out.eta = x.norm();
  out.residual = (a * x + rhs).norm();
  for (Index j = 0; j < k; ++j) {
    out.deltas.push_back(Eigen::Map<const Matrix>(x.data() + j * n * n, n, n));
  }
  return out;
}

/// Same over span{P_i} per term, with the basis elements formed densely.
inline OracleSolution structured_oracle(const SplitNEP& nep, const EigenpairSet& pairs,
                                        const std::vector<StructureSpec>& specs) {
  const Index n = nep.n();
  const Index p = pairs.size();
  const Matrix w = stacked_W(nep, pairs);
  const Matrix r = residual_of(nep, pairs);
  std::vector<Matrix> elems;
  std::vector<Index> owner;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const SubspaceBasis b = canonical_basis(specs[j], n);
    for (Index i = 0; i < b.dim(); ++i) {
      elems.push_back(b.element(i));
      owner.push_back(static_cast<Index>(j));
    }
  }
  Matrix a(n * p, static_cast<Index>(elems.size()));
  for (std::size_t c = 0; c < elems.size(); ++c) {
    const Matrix prod = elems[c] * w.middleRows(owner[c] * n, n);
    a.col(static_cast<Index>(c)) = Eigen::Map<const Vector>(prod.data(), prod.size());
  }
  const Eigen::Map<const Vector> rhs(r.data(), r.size());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  const Vector x = cod.solve(Vector(-rhs));
  OracleSolution out;
  out.eta = x.norm();
  out.residual = (a * x + rhs).norm();
  out.deltas.assign(specs.size(), Matrix::Zero(n, n));
  for (std::size_t c = 0; c < elems.size(); ++c) {
    out.deltas[static_cast<std::size_t>(owner[c])] += x(static_cast<Index>(c)) * elems[c];
  }
  return out;
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace testing_support
