#include <benchmark/benchmark.h>

#include <random>

#include "sdram/address.hpp"
#include "sdram/dram.hpp"
#include "sdram/predictor.hpp"
#include "sdram/system.hpp"
#include "sdram/trace.hpp"

namespace {

using namespace sdram;

void BM_DecomposeAddress(benchmark::State& state) {
  const SimConfig cfg;
  std::mt19937_64 rng(1);
  std::vector<Addr> addrs(4096);
  for (auto& a : addrs) a = (rng() % cfg.capacity()) & ~Addr{7};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decompose_address(addrs[i], cfg));
    i = (i + 1) & 4095;
  }
}
BENCHMARK(BM_DecomposeAddress);

void BM_ShtPredict(benchmark::State& state) {
  SectorHistoryTable sht(512, SectorMask::full());
  Addr pc = 0x400000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sht.predict(sht_index(pc, pc & 7, 512)));
    pc += 4;
  }
}
BENCHMARK(BM_ShtPredict);

void BM_ActWindow(benchmark::State& state) {
  const SimConfig cfg;
  const TimingCycles t = cfg.timing_cycles();
  ActWindow w(t, ActBudget{32, 4}, 4);
  Cycle now = 0;
  unsigned g = 0;
  for (auto _ : state) {
    now = w.earliest(now, 1, g, ActRule::SectorBudget);
    w.record(now, 1, g);
    g = (g + 1) & 3;
  }
}
BENCHMARK(BM_ActWindow);

// Whole-system throughput in simulated accesses per second.
void BM_SimulateRandom(benchmark::State& state) {
  SimConfig cfg;
  cfg.mode = static_cast<Mode>(state.range(0));
  cfg.cores = static_cast<unsigned>(state.range(1));
  const Trace t = gen_random(1, 20000, 1ull << 30);
  for (auto _ : state) {
    const SimResult r = simulate(cfg, {t});
    benchmark::DoNotOptimize(r.cycles);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size() * cfg.cores));
}
BENCHMARK(BM_SimulateRandom)
    ->Args({static_cast<int>(Mode::Baseline), 1})
    ->Args({static_cast<int>(Mode::SectoredLASP), 1})
    ->Args({static_cast<int>(Mode::SectoredLASP), 8})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
