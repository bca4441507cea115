#include <benchmark/benchmark.h>

#include "oschom/gammacheck.hpp"
#include "oschom/geodesic.hpp"
#include "oschom/levelset.hpp"

using namespace oschom;

static void BM_ExtractLevel(benchmark::State& state) {
  auto phi = PeriodicConstraint::dist_to_lattice_2d();
  int res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_level_graph(phi, 0.5, res));
  state.SetComplexityN(res);
}
BENCHMARK(BM_ExtractLevel)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_ClassifyComponents(benchmark::State& state) {
  auto g = extract_level_graph(PeriodicConstraint::sin_product(), 0.0, 128);
  for (auto _ : state) benchmark::DoNotOptimize(classify_components(g));
}
BENCHMARK(BM_ClassifyComponents)->Unit(benchmark::kMicrosecond);

static void BM_StableNorm2D(benchmark::State& state) {
  auto g = extract_level_graph(PeriodicConstraint::sin_product(), 0.0, 128);
  LiftedGraphSearch search(g);
  StableNormOptions opts;
  opts.schedule = {10, 20, 40, static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(stable_norm(search, vec2(0.6, 0.8), opts));
}
BENCHMARK(BM_StableNorm2D)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_StableNorm3D(benchmark::State& state) {
  auto g = exact_network_graph(NetworkKind::FaceNetwork3D);
  LiftedGraphSearch search(g);
  Vec3 w = Vec3(1, 2, 3).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(stable_norm(search, w));
}
BENCHMARK(BM_StableNorm3D)->Unit(benchmark::kMillisecond)->Iterations(3);

static void BM_EnergyGradient(benchmark::State& state) {
  auto phi = PeriodicConstraint::sin_product();
  int K = static_cast<int>(state.range(0));
  auto curve = DiscreteCurve::straight(vec2(0, 0), vec2(0.6, 0.8), K, 2);
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(phi, 0.01, 0.05, curve));
  state.SetItemsProcessed(state.iterations() * K);
}
BENCHMARK(BM_EnergyGradient)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
