#include <benchmark/benchmark.h>

#include "parakernel/feynman_kac.hpp"
#include "parakernel/green_kato.hpp"
#include "parakernel/heat.hpp"
#include "parakernel/schrodinger.hpp"

using namespace parakernel;

namespace {

const RadialGeometry& plane() {
  static const RadialGeometry g = RadialGeometry::flatPlane();
  return g;
}

const Potential& canonicalBump() {
  static const Potential q = Potential::bump(2.0, 1.0, 0.4);
  return q;
}

void BM_Volume(benchmark::State& state) {
  const auto& g = plane();
  double r = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.volume(r));
    r = r < 1e9 ? r * 1.7 : 1.0;
  }
}
BENCHMARK(BM_Volume);

void BM_BigH(benchmark::State& state) {
  const auto& g = plane();
  double r = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bigH(g, r));
    r = r < 1e9 ? r * 1.7 : 2.0;
  }
}
BENCHMARK(BM_BigH);

void BM_ProfileSolve(benchmark::State& state) {
  const auto& g = plane();
  ProfileOptions opt;
  opt.rMax = 1e4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solveProfileIVP(g, canonicalBump(), opt));
  }
}
BENCHMARK(BM_ProfileSolve);

void BM_HeatStepThroughput(benchmark::State& state) {
  const auto& g = plane();
  HeatRunConfig cfg;
  cfg.rMax = 50.0;
  cfg.tMax = 1.0;
  cfg.recordCount = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(heatKernelAtPole(g, Potential(), cfg));
  }
}
BENCHMARK(BM_HeatStepThroughput);

void BM_MonteCarloPaths(benchmark::State& state) {
  const auto& g = plane();
  const Profile profile = solveProfileIVP(g, canonicalBump());
  const TransformedGeometry tg = hTransform(g, canonicalBump(), profile);
  PathSimOptions opt;
  opt.horizon = 10.0;
  opt.dt = 1e-2;
  opt.pathCount = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulatePaths(tg, canonicalBump(), 0.0, opt));
  }
}
BENCHMARK(BM_MonteCarloPaths)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
