#include "ptwg/eigensolver.hpp"
#include "ptwg/solvability.hpp"
#include "ptwg/spectral_cluster.hpp"
#include "ptwg/strip.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace ptwg;

namespace {

BoundaryProfile well(const StripGeometry& g) {
  return BoundaryProfile::from_function(
      g, [](double x) { return 2.0 - 1.1 * std::exp(-(x / 5.0) * (x / 5.0)); }, 2.0);
}

StripGeometry grid_for(const benchmark::State& state) {
  return StripGeometry::make(1.0, 20.0, static_cast<int>(state.range(0)), 16);
}

void BM_Assemble(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto alpha = well(g);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(g, alpha));
}
BENCHMARK(BM_Assemble)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_EigsNear(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto op = assemble_operator(g, well(g));
  for (auto _ : state) benchmark::DoNotOptimize(solve_eigs_near(op, cplx(1.0, 0.0), 6));
}
BENCHMARK(BM_EigsNear)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_KernelCriterion(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto alpha = well(g);
  const auto op = assemble_operator(g, alpha);
  const auto psi = pt_normalize(op, solve_eigs_near(op, cplx(1.0, 0.0), 1).pairs.front().psi).psi;
  CriterionOptions opts;
  opts.pt_tol = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(kernel_criterion(op, psi, alpha, opts));
}
BENCHMARK(BM_KernelCriterion)->Arg(200)->Arg(800)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
