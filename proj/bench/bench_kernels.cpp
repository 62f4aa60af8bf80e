// Serial reference vs OpenMP kernels. Pass --benchmark_filter to pick one.

#include <benchmark/benchmark.h>

#include <random>

#include "cmnls/pde.hpp"
#include "cmnls/pipeline.hpp"
#include "cmnls/regions.hpp"
#include "cmnls/scattering.hpp"

using namespace cmnls;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_Rhs(benchmark::State& st) {
  const std::size_t n = static_cast<std::size_t>(st.range(1));
  std::mt19937_64 g(1);
  std::normal_distribution<double> d;
  std::vector<cplx> u(n), v(n), du(n), dv(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = {d(g), d(g)};
    v[i] = {d(g), d(g)};
  }
  for (auto _ : st) {
    cmnls_rhs(u, v, du, dv, 0.025, ModelParams{}, false, exec_of(st));
    benchmark::DoNotOptimize(du.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Rhs)->ArgsProduct({{0, 1}, {1601, 16001}});

void BM_RegionRaster(benchmark::State& st) {
  const std::size_t n = static_cast<std::size_t>(st.range(1));
  for (auto _ : st)
    benchmark::DoNotOptimize(region_map_grid({-3, 3, -3, 3}, n, n, ModelParams{}, exec_of(st)));
}
BENCHMARK(BM_RegionRaster)->ArgsProduct({{0, 1}, {200, 600}})->Unit(benchmark::kMillisecond);

const FieldData& bench_data() {
  static const FieldData fd = [] {
    RunConfig c;
    c.grid.dx = 0.1;
    c.grid.dt = 0.002;
    c.grid.store_stride = 5;
    return generate_dataset(c, Exec::Serial);
  }();
  return fd;
}

void BM_SpectralSweep(benchmark::State& st) {
  const FieldData& f = bench_data();
  std::vector<cplx> lams;
  for (int i = 0; i < 32; ++i) lams.push_back(-1.5 + 3.0 * i / 31.0);
  for (auto _ : st) benchmark::DoNotOptimize(spectral_sweep(f, lams, {}, true, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(lams.size()));
}
BENCHMARK(BM_SpectralSweep)->ArgsProduct({{0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
