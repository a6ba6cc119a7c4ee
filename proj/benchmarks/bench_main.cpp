#include <benchmark/benchmark.h>

#include "dunmix/dispersion.hpp"
#include "dunmix/fixtures.hpp"
#include "dunmix/synth.hpp"
#include "dunmix/unmixer.hpp"

using namespace dunmix;

namespace {

const WavenumberGrid& grid() {
  static const WavenumberGrid g = WavenumberGrid::uniform(200.0, 2000.0, 4.0);
  return g;
}

SynthSample perturbed_mixture() {
  const EndmemberLibrary lib = fixture_library(grid());
  PerturbSpec ps;
  ps.within_box = true;
  ps.seed = 1;
  return synth_mixture(lib, SimplexVector({0.5, 0.3, 0.2}), ps, NoiseSpec{});
}

void BM_Render(benchmark::State& state) {
  const DispersionParams p = load_fixture_params("hematite");
  for (auto _ : state) benchmark::DoNotOptimize(render_values(p, grid()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid().size()));
}
BENCHMARK(BM_Render);

void BM_RenderWithGradient(benchmark::State& state) {
  const DispersionParams p = load_fixture_params("hematite");
  for (auto _ : state) benchmark::DoNotOptimize(render_with_gradient(p, grid()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid().size()));
}
BENCHMARK(BM_RenderWithGradient);

void BM_SolveAbundances(benchmark::State& state) {
  const EndmemberLibrary lib = fixture_library(grid());
  const Eigen::MatrixXd A = build_A(lib);
  const SynthSample s = perturbed_mixture();
  for (auto _ : state) benchmark::DoNotOptimize(solve_abundances(A, s.mixed, 0.95, 1e-4));
}
BENCHMARK(BM_SolveAbundances);

void BM_AnalysisBySynthesis(benchmark::State& state) {
  const EndmemberLibrary lib = fixture_library(grid());
  const SynthSample s = perturbed_mixture();
  UnmixConfig cfg;
  cfg.outer_iters = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(analysis_by_synthesis(lib, s.mixed, cfg));
}
BENCHMARK(BM_AnalysisBySynthesis)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
