// Micro-benchmarks for the per-step hot paths: collision checks, cost-field
// builds, particle updates, utility evaluation and tree construction.

#include <benchmark/benchmark.h>

#include "plumesearch/harness.hpp"

namespace {

using namespace plumesearch;

OccupancyGrid bench_grid() {
  MapSpec spec;
  spec.rows = 160;
  spec.cols = 240;
  spec.cell_size = 5.0;
  spec.blocks = 55;
  spec.map_seed = 9;
  return build_map(spec);
}

void bm_segment_free(benchmark::State& state) {
  const OccupancyGrid grid = bench_grid();
  Rng rng(1);
  std::uniform_real_distribution<double> ux(0.0, 1200.0), uy(0.0, 800.0);
  for (auto _ : state) {
    const WorldPoint a{ux(rng), uy(rng)}, b{ux(rng), uy(rng)};
    benchmark::DoNotOptimize(segment_free(grid, a, b));
  }
}
BENCHMARK(bm_segment_free);

void bm_build_distribution(benchmark::State& state) {
  const OccupancyGrid grid = bench_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_distribution(grid, 270.0));
  }
}
BENCHMARK(bm_build_distribution);

void bm_pf_update(benchmark::State& state) {
  const OccupancyGrid grid = bench_grid();
  const LikelihoodModel model{0.3, 0.01, 2.5};
  PriorSpec prior;
  FilterConfig fc;
  fc.n = static_cast<int>(state.range(0));
  Rng rng(2);
  ParticleSet ps = init_prior(prior, fc.n, rng);
  Measurement z;
  z.position = {700.0, 400.0};
  z.detected = false;
  for (auto _ : state) {
    update(ps, z, model, fc, prior, rng);
  }
}
BENCHMARK(bm_pf_update)->Arg(5000)->Arg(20000);

void bm_entrotaxis_utility(benchmark::State& state) {
  const LikelihoodModel model{0.3, 0.01, 2.5};
  PriorSpec prior;
  Rng rng(3);
  ParticleSet ps = init_prior(prior, static_cast<int>(state.range(0)), rng);
  const PredictiveDraws draws = make_predictive_draws(ps, 40, false, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(entrotaxis_utility(ps, {650.0, 420.0}, draws, model));
  }
}
BENCHMARK(bm_entrotaxis_utility)->Arg(5000)->Arg(20000);

void bm_tree_build(benchmark::State& state) {
  const OccupancyGrid grid = bench_grid();
  const SampleDistribution dist = build_distribution(grid, 270.0);
  PlannerConfig cfg;
  cfg.n_samples = static_cast<int>(state.range(0));
  Rng rng(4);
  for (auto _ : state) {
    const auto samples = draw_samples(dist, grid, cfg.n_samples, rng);
    benchmark::DoNotOptimize(
        build_candidate_tree(samples, {1100.0, 325.0}, {600.0, 400.0}, 60.0, grid, dist, cfg, rng));
  }
}
BENCHMARK(bm_tree_build)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
