#include <benchmark/benchmark.h>

#include "polybddc/bddc.hpp"
#include "polybddc/seminorms.hpp"
#include "polybddc/skeletal.hpp"

using namespace polybddc;

namespace {

Method method_arg(int64_t i) { return static_cast<Method>(i); }

void BM_Assemble(benchmark::State& state) {
  const PolytopalMesh mesh = voronoi_polygonal(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const SkeletalDiscretization disc(mesh, MethodConfig(method_arg(state.range(1)), 1));
  for (auto _ : state) benchmark::DoNotOptimize(disc.assemble(manufactured_source));
  state.SetLabel(to_string(method_arg(state.range(1))));
}

void BM_BddcSetup(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const PolytopalMesh mesh = simplexify(build_cartesian(8 * side, 8 * side));
  const SkeletalDiscretization disc(mesh, MethodConfig(Method::hho, 1));
  const CoarsePartition partition = agglomerate(mesh, side, side);
  for (auto _ : state) {
    const BddcPreconditioner bddc(disc, partition);
    benchmark::DoNotOptimize(bddc.num_coarse_dofs());
  }
}

void BM_BddcApply(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const PolytopalMesh mesh = simplexify(build_cartesian(8 * side, 8 * side));
  const SkeletalDiscretization disc(mesh, MethodConfig(Method::hho, 1));
  const BddcPreconditioner bddc(disc, agglomerate(mesh, side, side));
  const Eigen::VectorXd r = Eigen::VectorXd::Ones(bddc.size());
  for (auto _ : state) benchmark::DoNotOptimize(bddc.apply(r));
}

void BM_HhalfGram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PolytopalMesh mesh = build_cartesian(n, n);
  const HybridSpace space(mesh, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(hhalf_gram(space));
}

}  // namespace

BENCHMARK(BM_Assemble)->ArgsProduct({{16, 32}, {0, 1, 2, 3}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BddcSetup)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BddcApply)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HhalfGram)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
