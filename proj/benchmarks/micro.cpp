#include <random>

#include <benchmark/benchmark.h>

#include "nepbe/gallery.hpp"
#include "nepbe/newton.hpp"
#include "nepbe/penalty.hpp"
#include "nepbe/structured_linear.hpp"
#include "nepbe/symmetric.hpp"
#include "nepbe/unstructured.hpp"

using namespace nepbe;

namespace {

EigenpairSet unit_pairs(Index n, Index p, std::uint64_t seed, bool real) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  EigenpairSet s;
  s.lambdas.resize(p);
  s.V.resize(n, p);
  for (Index i = 0; i < p; ++i) s.lambdas(i) = real ? Scalar(g(rng)) : Scalar(g(rng), g(rng));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) s.V(i, j) = real ? Scalar(g(rng)) : Scalar(g(rng), g(rng));
  }
  s.V.colwise().normalize();
  return s;
}

void BM_BackwardErrorExact(benchmark::State& state) {
  const Index n = state.range(0);
  const GalleryProblem g = build_beam(n);
  const EigenpairSet pairs = unit_pairs(n, 3, 1, false);
  for (auto _ : state) benchmark::DoNotOptimize(backward_error_exact(g.nep, pairs).eta);
  state.SetComplexityN(n);
}
BENCHMARK(BM_BackwardErrorExact)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_BoundsWithEigenvectors(benchmark::State& state) {
  const Index n = state.range(0);
  const GalleryProblem g = build_beam(n);
  const EigenpairSet pairs = unit_pairs(n, 3, 2, false);
  for (auto _ : state) benchmark::DoNotOptimize(bounds_with_eigenvectors(g.nep, pairs).upper_krt);
}
BENCHMARK(BM_BoundsWithEigenvectors)->Arg(1000)->Arg(4000);

void BM_BoundsEigenvaluesOnly(benchmark::State& state) {
  const Index n = state.range(0);
  const GalleryProblem g = build_random_split(n, 3);
  Vector lambdas(3);
  lambdas << Scalar(0.1, 0.2), Scalar(-0.4, 0.0), Scalar(0.3, -0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bounds_eigenvalues_only(g.nep, lambdas).upper_krt);
  }
}
BENCHMARK(BM_BoundsEigenvaluesOnly)->Arg(32)->Arg(128);

void BM_StructuredSparse(benchmark::State& state) {
  const Index n = state.range(0);
  const GalleryProblem g = build_random_sparse(n, 4);
  const EigenpairSet pairs = unit_pairs(n, 2, 4, false);
  for (auto _ : state) benchmark::DoNotOptimize(structured_backward_error(g.nep, pairs).eta());
}
BENCHMARK(BM_StructuredSparse)->Arg(20)->Arg(40);

void BM_Symmetric(benchmark::State& state) {
  const Index n = state.range(0);
  const GalleryProblem g = build_random_split(n, 5, true);
  const EigenpairSet pairs = unit_pairs(n, 3, 5, true);
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_backward_error(g.nep, pairs).eta());
}
BENCHMARK(BM_Symmetric)->Arg(64)->Arg(256);

void BM_PenaltyCostAndGradient(benchmark::State& state) {
  const Index n = state.range(0);
  const GalleryProblem g = build_beam(n);
  const EigenpairSet pairs = unit_pairs(n, 3, 6, true);
  const ResidualBundle rb = residual_bundle(g.nep, pairs);
  const riemann::PenaltyProblem pp =
      riemann::PenaltyProblem::from_nep(g.nep, rb.W, g.nep.structures(), 1e-2);
  const riemann::ProductPoint& x = pp.reference();
  for (auto _ : state) {
    RealMatrix r;
    benchmark::DoNotOptimize(pp.cost(x, &r));
    benchmark::DoNotOptimize(pp.rgrad(x, pp.egrad(x, r)));
  }
}
BENCHMARK(BM_PenaltyCostAndGradient)->Arg(1000)->Arg(10000);

void BM_NewtonBeam(benchmark::State& state) {
  const GalleryProblem g = build_beam(state.range(0));
  CollectOptions o = g.solve;
  o.p = 3;
  for (auto _ : state) benchmark::DoNotOptimize(collect_pairs(g.nep, o).complete);
}
BENCHMARK(BM_NewtonBeam)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
