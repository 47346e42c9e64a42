#include <benchmark/benchmark.h>

#include "covqec/qfi.hpp"
#include "covqec/recovery.hpp"

using namespace covqec;

namespace {

void BM_RegularizedQfi(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  Channel ch = random_channel(d, d, d, rng);
  Hamiltonian h(random_hermitian(d, rng));
  for (auto _ : state) benchmark::DoNotOptimize(sld_qfi_channel_regularized(ch, h));
}
BENCHMARK(BM_RegularizedQfi)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RldQfi(benchmark::State& state) {
  Channel ch = depolarizing(static_cast<int>(state.range(0)), 0.3);
  std::vector<double> e(static_cast<size_t>(state.range(0)));
  for (size_t i = 0; i < e.size(); ++i) e[i] = double(i);
  Hamiltonian h = Hamiltonian::diagonal(e);
  for (auto _ : state) benchmark::DoNotOptimize(rld_qfi_channel(ch, h));
}
BENCHMARK(BM_RldQfi)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ThermoEncoding(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ThermoEncoding enc(ThermoCodeSpec(n, 3), SingleSiteNoise::uniform(n, erasure(2, 1.0)));
    benchmark::DoNotOptimize(enc.encoded().support_dim());
  }
}
BENCHMARK(BM_ThermoEncoding)->Arg(9)->Arg(25)->Arg(81)->Unit(benchmark::kMillisecond);

void BM_ChoiRecoverySdp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ThermoEncoding enc(ThermoCodeSpec(n, 3), SingleSiteNoise::uniform(n, erasure(2, 1.0)));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_choi_recovery(enc.encoded()).choi_infidelity);
}
BENCHMARK(BM_ChoiRecoverySdp)->Arg(5)->Arg(9)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_WorstCase(benchmark::State& state) {
  Rng rng(2);
  Channel ch = random_channel(2, 2, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_infidelity(ch, kDefaultSeed, 20).infidelity);
}
BENCHMARK(BM_WorstCase)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
