#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "zrp/birth_death.hpp"
#include "zrp/gamma.hpp"
#include "zrp/generator.hpp"
#include "zrp/lsi.hpp"
#include "zrp/measures.hpp"
#include "zrp/numeric.hpp"
#include "zrp/simulate.hpp"

using namespace zrp;

namespace {

const RateFunction& parity() {
  static const RateFunction c = build_family(RateFamily::parity_perturbed, {0.5});
  return c;
}

void BM_CanonicalTable(benchmark::State& state) {
  const int v = static_cast<int>(state.range(0));
  const std::int64_t N = state.range(1);
  for (auto _ : state) benchmark::DoNotOptimize(canonical_table(parity(), v, N));
}
BENCHMARK(BM_CanonicalTable)->Args({4, 100})->Args({16, 200})->Args({64, 400})->Unit(benchmark::kMicrosecond);

void BM_LogConvolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = -0.5 * std::log1p(static_cast<double>(k));
    b[k] = -0.01 * static_cast<double>(k * k) / static_cast<double>(n);
  }
  for (auto _ : state) benchmark::DoNotOptimize(log_convolve(a, b, n));
}
BENCHMARK(BM_LogConvolve)->Arg(64)->Arg(256)->Arg(1024);

void BM_GammaProduct(benchmark::State& state) {
  const std::int64_t N = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(gamma_product(parity(), 8, 8, N));
}
BENCHMARK(BM_GammaProduct)->Arg(100)->Arg(1000);

void BM_SpectralGap(benchmark::State& state) {
  const SparseGenerator gen(StateSpace(static_cast<int>(state.range(0)), 1, static_cast<int>(state.range(1))), parity());
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(gen));
  state.counters["states"] = static_cast<double>(gen.size());
}
BENCHMARK(BM_SpectralGap)->Args({2, 20})->Args({3, 12})->Args({4, 10})->Unit(benchmark::kMillisecond);

void BM_BirthDeathLsi(benchmark::State& state) {
  const GammaDistribution g = gamma_product(parity(), 2, 2, state.range(0));
  const BirthDeathChain ch = bd_from_gamma(g);
  LsiOptions opt;
  opt.restarts = 4;
  for (auto _ : state) benchmark::DoNotOptimize(bd_lsi_exact(ch, opt));
}
BENCHMARK(BM_BirthDeathLsi)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  SimConfig c;
  c.L = static_cast<int>(state.range(0));
  c.N = static_cast<int>(state.range(1));
  c.rate = parity();
  c.events = 200000;
  for (auto _ : state) benchmark::DoNotOptimize(run(c));
  state.SetItemsProcessed(state.iterations() * c.events);
}
BENCHMARK(BM_Simulate)->Args({3, 6})->Args({16, 64})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
