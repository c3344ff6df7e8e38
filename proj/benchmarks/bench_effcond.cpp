#include <random>

#include <benchmark/benchmark.h>

#include "effcond/canonical_rep.hpp"
#include "effcond/effective_approx.hpp"
#include "effcond/reference_solver.hpp"

using namespace effcond;

static void BM_ProjectLambda(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const VectorField h = random_field(n, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(project_lambda(1, h).data.data());
  state.SetComplexityN(n * n);
}
BENCHMARK(BM_ProjectLambda)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_SolveCheckerboard(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const GridGeometry g = checkerboard(n);
  const AdmissiblePair p = admissible_pair(10.0 * Tensor2::Identity(), Tensor2::Identity());
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_effective(g, p).sigma_star(0, 0));
}
BENCHMARK(BM_SolveCheckerboard)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_BuildEigenbasis(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const GridGeometry g = random_symmetric(n, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_eigenbasis(g).half_m);
}
BENCHMARK(BM_BuildEigenbasis)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_TensorFormula(benchmark::State &state) {
  std::mt19937_64 rng(3);
  const CanonicalRep rep = extract_rep(build_eigenbasis(random_symmetric(8, rng)));
  const TheoremTwoEvaluator ev(rep);
  Tensor2 s1;
  s1 << cplx(3.0, 0.4), 0.2, -0.1, cplx(1.5, 0.1);
  const Tensor2 s2 = Tensor2::Identity();
  for (auto _ : state)
    benchmark::DoNotOptimize(ev.sigma_star(s1, s2)(0, 0));
}
BENCHMARK(BM_TensorFormula)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
