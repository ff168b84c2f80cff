#include "nepbe/gallery.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace nepbe {

namespace {

RealMatrix normal_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RealMatrix m(r, c);
  for (Index j = 0; j < c; ++j) {
    for (Index i = 0; i < r; ++i) m(i, j) = nd(rng);
  }
  return m;
}

SparseMatrix tridiagonal(Index n, double sub, double diag, double super) {
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(static_cast<std::size_t>(3 * n));
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, diag);
    if (i + 1 < n) {
      t.emplace_back(i + 1, i, sub);
      t.emplace_back(i, i + 1, super);
    }
  }
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

SparseMatrix from_pattern(Index n, const SparsityPattern& pattern, const RealVector& values) {
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(pattern.size());
  for (std::size_t e = 0; e < pattern.size(); ++e) {
    t.emplace_back(pattern[e].first, pattern[e].second, values(static_cast<Index>(e)));
  }
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

std::vector<ScalarFunction> random_family_functions() {
  return {functions::one(), functions::lambda(), functions::lambda2(), functions::exp_neg(),
          functions::exp_neg2()};
}

}  // namespace

SparseMatrix beam_a0(Index n) {
  if (n < 2) throw DimensionError("beam problem needs n >= 2");
  std::vector<Eigen::Triplet<Scalar>> t;
  const Index m = n - 1;
  for (Index i = 0; i < m; ++i) {
    t.emplace_back(i, i, -2.0);
    if (i + 1 < m) {
      t.emplace_back(i + 1, i, 1.0);
      t.emplace_back(i, i + 1, 1.0);
    }
  }
  t.emplace_back(m - 1, m, -1.0);
  t.emplace_back(m, m - 1, -static_cast<double>(n));
  t.emplace_back(m, m, static_cast<double>(n));
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

GalleryProblem build_beam(Index n) {
  const SparseMatrix a0 = beam_a0(n);
  SparseMatrix a1(n, n);
  a1.insert(n - 1, n - 1) = 1.0;
  a1.makeCompressed();

  std::vector<Coefficient> coeffs{Coefficient::identity(n), Coefficient(a0), Coefficient(a1)};
  std::vector<StructureSpec> specs{StructureSpec::scaled_identity(),
                                   StructureSpec::sparsity(pattern_of(coeffs[1])),
                                   StructureSpec::sparsity({{n - 1, n - 1}})};
  GalleryProblem g;
  g.name = "beam";
  g.nep = SplitNEP(std::move(coeffs),
                   {functions::polynomial({0.0, -1.0}), functions::one(), functions::exp_neg()},
                   {}, std::move(specs));
  g.lowrank_factors.resize(3);
  g.solve.real_starts = true;
  g.solve.center = -2.0;
  g.solve.radius = 2.0;
  return g;
}

GalleryProblem build_random_split(Index n, std::uint64_t seed, bool symmetric) {
  std::mt19937_64 rng(seed);
  std::vector<Coefficient> coeffs;
  for (int j = 0; j < 5; ++j) {
    if (j == 2) {
      coeffs.push_back(Coefficient::identity(n));
      continue;
    }
    RealMatrix a = normal_matrix(n, n, rng);
    if (symmetric) a = RealMatrix(a + a.transpose()) / std::sqrt(2.0);
    coeffs.emplace_back(Matrix(a.cast<Scalar>()));
  }
  const StructureSpec s = symmetric ? StructureSpec::symmetric() : StructureSpec::unstructured();
  GalleryProblem g;
  g.name = symmetric ? "random-symmetric" : "random";
  g.seed = seed;
  g.nep = SplitNEP(std::move(coeffs), random_family_functions(), {},
                   std::vector<StructureSpec>(5, s));
  g.lowrank_factors.resize(5);
  g.solve.real_starts = symmetric;
  g.solve.center = 0.0;
  g.solve.radius = 3.0;
  return g;
}

GalleryProblem build_random_sparse(Index n, std::uint64_t seed, double density) {
  if (!(density > 0.0 && density <= 1.0)) {
    throw std::invalid_argument("sparsity density must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  std::vector<Coefficient> coeffs;
  std::vector<StructureSpec> specs;
  for (int j = 0; j < 5; ++j) {
    SparsityPattern pat;
    if (j == 2) {
      for (Index i = 0; i < n; ++i) pat.emplace_back(i, i);
      coeffs.push_back(Coefficient::identity(n));
    } else {
      for (Index b = 0; b < n; ++b) {
        for (Index a = 0; a < n; ++a) {
          if (a == b || u(rng) < density) pat.emplace_back(a, b);
        }
      }
      RealVector vals(static_cast<Index>(pat.size()));
      for (Index e = 0; e < vals.size(); ++e) vals(e) = nd(rng);
      coeffs.emplace_back(from_pattern(n, pat, vals));
    }
    specs.push_back(StructureSpec::sparsity(std::move(pat)));
  }
  GalleryProblem g;
  g.name = "random-sparse";
  g.seed = seed;
  g.nep = SplitNEP(std::move(coeffs), random_family_functions(), {}, std::move(specs));
  g.lowrank_factors.resize(5);
  g.solve.center = 0.0;
  g.solve.radius = 3.0;
  return g;
}

GalleryProblem build_quadratic_lowrank(Index n, std::uint64_t seed, Index rank) {
  if (n < 2) throw DimensionError("quadratic problem needs n >= 2");
  std::mt19937_64 rng(seed);
  const RealMatrix u = normal_matrix(n, rank, rng);
  std::vector<Coefficient> coeffs{
      Coefficient(tridiagonal(n, 1.0, -2.0, 1.0)),
      Coefficient(LowRankFactors{Matrix(-u.cast<Scalar>()), Matrix(u.cast<Scalar>())}),
      Coefficient::identity(n)};
  std::vector<StructureSpec> specs{StructureSpec::sparsity(tridiagonal_pattern(n)),
                                   StructureSpec::fixed_rank(rank),
                                   StructureSpec::scaled_identity()};
  GalleryProblem g;
  g.name = "quadratic";
  g.seed = seed;
  g.nep = SplitNEP(std::move(coeffs),
                   {functions::one(), functions::lambda(), functions::lambda2()}, {},
                   std::move(specs));
  g.lowrank_factors = {RealMatrix(), u, RealMatrix()};
  g.solve.real_starts = true;
  g.solve.center = 0.0;
  g.solve.radius = 0.5;
  return g;
}

GalleryProblem build_gallery(const std::string& name, Index n, std::uint64_t seed) {
  if (name == "beam") return build_beam(n);
  if (name == "random") return build_random_split(n, seed, false);
  if (name == "random-symmetric") return build_random_split(n, seed, true);
  if (name == "random-sparse") return build_random_sparse(n, seed);
  if (name == "quadratic") return build_quadratic_lowrank(n, seed);
  throw std::invalid_argument("unknown gallery problem '" + name +
                              "' (known: beam, random, random-symmetric, random-sparse, "
                              "quadratic)");
}

namespace {

// delta(t) for one term together with the perturbed coefficient.
struct TermPath {
  bool linear = true;
  std::function<Coefficient(double)> delta;
  std::function<Coefficient(double)> perturbed;
};

TermPath make_path(const GalleryProblem& g, Index j, std::mt19937_64& rng, bool structured) {
  const SplitNEP& nep = g.nep;
  const Index n = nep.n();
  const Coefficient base = nep.coefficient(j);
  const StructureSpec spec = structured ? nep.structure(j) : StructureSpec::unstructured();
  TermPath path;

  if (spec.kind == StructureKind::fixed_rank) {
    path.linear = false;
    const RealMatrix& u = g.lowrank_factors.size() > static_cast<std::size_t>(j)
                              ? g.lowrank_factors[static_cast<std::size_t>(j)]
                              : RealMatrix();
    if (u.size() > 0) {
      const RealMatrix du = normal_matrix(n, u.cols(), rng);
      path.perturbed = [u, du](double t) {
        const Matrix f = (u + t * du).cast<Scalar>();
        return Coefficient(LowRankFactors{-f, f});
      };
      path.delta = [u, du](double t) {
        const Index r = u.cols();
        Matrix l(u.rows(), 2 * r), rr(u.rows(), 2 * r);
        l << -(u + t * du).cast<Scalar>(), u.cast<Scalar>();
        rr << (u + t * du).cast<Scalar>(), u.cast<Scalar>();
        return Coefficient(LowRankFactors{l, rr});
      };
      return path;
    }
    if (!base.is_low_rank()) {
      throw std::invalid_argument("fixed-rank perturbation needs a factored coefficient");
    }
    path.linear = true;
    const LowRankFactors f = base.as_low_rank();
    const Matrix dl = normal_matrix(n, f.left.cols(), rng).cast<Scalar>();
    path.perturbed = [f, dl](double t) {
      return Coefficient(LowRankFactors{f.left + t * dl, f.right});
    };
    path.delta = [f, dl](double t) { return Coefficient(LowRankFactors{t * dl, f.right}); };
    return path;
  }

  Coefficient dir;
  switch (spec.kind) {
    case StructureKind::sparsity: {
      RealVector v = normal_matrix(static_cast<Index>(spec.pattern.size()), 1, rng);
      dir = Coefficient(from_pattern(n, spec.pattern, v));
      break;
    }
    case StructureKind::scaled_identity: {
      std::normal_distribution<double> nd;
      dir = Coefficient::identity(n, nd(rng));
      break;
    }
    case StructureKind::symmetric: {
      const RealMatrix a = normal_matrix(n, n, rng);
      dir = Coefficient(Matrix(((a + a.transpose()) / std::sqrt(2.0)).cast<Scalar>()));
      break;
    }
    case StructureKind::subspace: {
      const SubspaceBasis b = canonical_basis(spec, n);
      dir = b.combine(normal_matrix(b.dim(), 1, rng).cast<Scalar>());
      break;
    }
    default:
      dir = Coefficient(Matrix(normal_matrix(n, n, rng).cast<Scalar>()));
      break;
  }
  path.delta = [dir](double t) { return dir.scaled(t); };
  path.perturbed = [base, dir](double t) { return base.plus(dir.scaled(t)); };
  return path;
}

// Smallest t >= 0 with norm_of(t) = target, by bracketing and bisection.
double solve_scale(const std::function<double(double)>& norm_of, double target) {
  double hi = 1.0;
  for (int i = 0; i < 200 && norm_of(hi) < target; ++i) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (norm_of(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Perturbation perturb(const GalleryProblem& problem, double target_norm, std::mt19937_64& rng,
                     PerturbationLaw law, bool structured) {
  if (!(target_norm >= 0.0)) throw std::invalid_argument("perturbation norm must be >= 0");
  const SplitNEP& nep = problem.nep;
  const Index k = nep.k();
  std::vector<TermPath> paths;
  paths.reserve(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) paths.push_back(make_path(problem, j, rng, structured));

  std::vector<double> t(static_cast<std::size_t>(k), 0.0);
  if (target_norm > 0.0) {
    if (law == PerturbationLaw::equal_share) {
      const double share = target_norm / std::sqrt(static_cast<double>(k));
      for (std::size_t j = 0; j < paths.size(); ++j) {
        const auto& p = paths[j];
        if (p.linear) {
          const double unit = p.delta(1.0).frobenius_norm();
          t[j] = unit > 0.0 ? share / unit : 0.0;
        } else {
          t[j] = solve_scale([&p](double s) { return p.delta(s).frobenius_norm(); }, share);
        }
      }
    } else {
      auto total = [&paths](double s) {
        double acc = 0.0;
        for (const auto& p : paths) {
          const double v = p.delta(s).frobenius_norm();
          acc += v * v;
        }
        return std::sqrt(acc);
      };
      bool all_linear = true;
      for (const auto& p : paths) all_linear = all_linear && p.linear;
      const double s = all_linear ? target_norm / total(1.0) : solve_scale(total, target_norm);
      std::fill(t.begin(), t.end(), s);
    }
  }

  Perturbation out;
  std::vector<Coefficient> coeffs;
  double acc = 0.0;
  for (std::size_t j = 0; j < paths.size(); ++j) {
    out.deltas.push_back(paths[j].delta(t[j]));
    coeffs.push_back(t[j] == 0.0 ? nep.coefficient(static_cast<Index>(j))
                                 : paths[j].perturbed(t[j]));
    const double v = out.deltas.back().frobenius_norm();
    acc += v * v;
  }
  out.norm = std::sqrt(acc);
  out.nep = nep.with_coefficients(std::move(coeffs));
  return out;
}

Perturbation ensemble_member(const GalleryProblem& problem, const EnsembleOptions& opts, int i) {
  std::mt19937_64 rng(opts.seed * 1000003ULL + static_cast<std::uint64_t>(i) + 17ULL);
  std::uniform_real_distribution<double> u(std::log10(opts.lo), std::log10(opts.hi));
  const double rel = opts.lo == opts.hi ? opts.lo : std::pow(10.0, u(rng));
  return perturb(problem, rel * problem.nep.coefficient_norm(), rng, opts.law, opts.structured);
}

}  // namespace nepbe
