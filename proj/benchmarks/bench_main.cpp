#include <benchmark/benchmark.h>

#include <moran/construction.hpp>
#include <moran/dimension.hpp>
#include <moran/estimation.hpp>
#include <moran/filtration.hpp>
#include <moran/lq_spectrum.hpp>
#include <moran/measure.hpp>
#include <moran/realization.hpp>

using namespace moran;

static void BM_DimensionReportDoublingBlocks(benchmark::State& state) {
  const auto spec = doubling_block_spec(uniform_level(2, 0.5), uniform_level(1, 0.5));
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dimension_report(spec, depth, depth / 5));
}
BENCHMARK(BM_DimensionReportDoublingBlocks)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_SymbolicFiltration(benchmark::State& state) {
  const auto spec = constant_spec({0.5, 0.25});
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_symbolic_filtration(spec, depth));
}
BENCHMARK(BM_SymbolicFiltration)->Arg(60)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_LqDimensions(benchmark::State& state) {
  const auto measure = make_weighted_measure(middle_thirds_spec(), bernoulli_weights({0.3, 0.7}));
  const std::vector<double> qs{0.5, 2.0, 3.0};
  for (auto _ : state) benchmark::DoNotOptimize(lq_dimensions(measure, qs, 512));
}
BENCHMARK(BM_LqDimensions)->Unit(benchmark::kMillisecond);

static void BM_BoxCount(benchmark::State& state) {
  const auto r = realize_on_interval(middle_thirds_spec(), GapRule::edge_anchored, 12);
  const auto cloud = cylinder_midpoints(r, 12);
  const auto scales = geometric_scales(1.0 / 9, 1.0 / 3, 8);
  for (auto _ : state) benchmark::DoNotOptimize(box_count_dimension(cloud, scales));
}
BENCHMARK(BM_BoxCount)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
