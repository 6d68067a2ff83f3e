// Serial vs OpenMP: band sweep over the zone and Toeplitz quadrature blocks.
#include <benchmark/benchmark.h>

#include "locsim/floquet_band.hpp"
#include "locsim/toeplitz_roots.hpp"

using namespace locsim;

namespace {

constexpr double kOmega = 0.034;

ResonatorGeometry cell() { return ResonatorGeometry::build({1, 1, 1}, {1, 2, 1}); }
ModulationProfile profile() {
  const std::vector<double> ph{0.0, pi * pi, pi * pi / 2};
  return ModulationProfile::from_cosine(kOmega, 3, 0.4, 0.2, ph, ph);
}

template <bool Parallel>
void BM_band_sweep(benchmark::State& state) {
  const auto g = cell();
  const auto c = MaterialContrast::uniform(3, 1e-4);
  const auto p = profile();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto bs = Parallel ? band_sweep(g, c, p, n) : band_sweep_serial(g, c, p, n);
    benchmark::DoNotOptimize(bs.bands.data());
  }
}

template <bool Parallel>
void BM_toeplitz_blocks(benchmark::State& state) {
  const ToeplitzModel model(ResonatorGeometry::build({1}, {1}), MaterialContrast::uniform(1, 1e-4),
                            ModulationProfile::from_cosine(kOmega, 1, 0.4, 0.2), 4,
                            static_cast<std::size_t>(state.range(0)));
  const cplx w(0.0215, 0.0);
  for (auto _ : state) {
    auto t = Parallel ? toeplitz_blocks(w, 4, model) : toeplitz_blocks_serial(w, 4, model);
    benchmark::DoNotOptimize(t.size());
  }
}

}  // namespace

BENCHMARK(BM_band_sweep<false>)->Name("band_sweep/serial")->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_band_sweep<true>)->Name("band_sweep/openmp")->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_toeplitz_blocks<false>)
    ->Name("toeplitz_blocks/serial")
    ->Arg(512)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_toeplitz_blocks<true>)
    ->Name("toeplitz_blocks/openmp")
    ->Arg(512)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
