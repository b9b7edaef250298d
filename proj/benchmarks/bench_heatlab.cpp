#include <benchmark/benchmark.h>

#include <random>

#include "heatlab/atoms.hpp"
#include "heatlab/heat.hpp"
#include "heatlab/norms.hpp"
#include "heatlab/qp.hpp"

using namespace heatlab;

namespace {

Field random_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Field f(g, 1);
  for (double& v : f.data) v = gauss(rng);
  return f;
}

void bm_heat_extend(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  int N = d == 1 ? 16384 : 256;
  GridSpec g = make_grid(d, N, 8.0);
  Field f = random_field(g, 7);
  for (auto _ : state) benchmark::DoNotOptimize(heat_extend(f, 0.5));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(bm_heat_extend)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void bm_build_ladder(benchmark::State& state) {
  GridSpec g = make_grid(1, 8192, 8.0);
  Field f = gen_near_delta(g, 0.02, {1.0});
  for (auto _ : state) benchmark::DoNotOptimize(build_ladder(f, 3, 5));
}
BENCHMARK(bm_build_ladder)->Unit(benchmark::kMillisecond);

void bm_atom_table(benchmark::State& state) {
  GridSpec g = make_grid(1, 4096, 8.0);
  HeatLadder ladder = build_ladder(gen_near_delta(g, 0.02, {1.0}), 3, 5);
  ProofParameters params = ProofParameters::defaults(1);
  for (auto _ : state) benchmark::DoNotOptimize(build_atom_table(ladder, params));
}
BENCHMARK(bm_atom_table)->Unit(benchmark::kMillisecond);

void bm_lorentz_norm(benchmark::State& state) {
  GridSpec g = make_grid(2, static_cast<int>(state.range(0)), 8.0);
  Field f = random_field(g, 11);
  for (auto _ : state) benchmark::DoNotOptimize(lorentz_norm(f, 2.0, 1.0));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(bm_lorentz_norm)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_qp_eval(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  PointMeasure mu(d, {{{-0.3, 0.0, 0.0}, 0.6}, {{0.7, 0.4, 0.0}, 0.4}});
  ParametricWeight G = ParametricWeight::poly_decay(d, 4.0 * d + 9.0);
  for (auto _ : state) benchmark::DoNotOptimize(qp(mu, G, 2.0, 0.5));
}
BENCHMARK(bm_qp_eval)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
