#include <gtest/gtest.h>

#include <map>
#include <vector>

#include "sdram/cache.hpp"
#include "sdram/cpu.hpp"
#include "sdram/trace.hpp"

using namespace sdram;

namespace {

// Memory that answers every read after a fixed delay; Cycle max means never.
struct DelayPort : MemoryPort {
  Cycle latency;
  std::vector<std::pair<MemoryRequest, Cycle>> pending;
  std::uint64_t reads = 0;
  explicit DelayPort(Cycle l) : latency(l) {}
  void send(const MemoryRequest& r, Cycle ready) override {
    if (r.kind == AccessKind::Writeback) return;
    ++reads;
    if (latency != ~Cycle{0}) pending.emplace_back(r, ready + latency);
  }
  bool try_prefetch(const MemoryRequest&, Cycle) override { return false; }
};

struct CoreRig {
  SimConfig cfg;
  DelayPort port;
  CacheHierarchy h;
  Trace trace;
  Core core;
  std::vector<std::pair<SectorMask, SectorMask>> fetches;

  CoreRig(Trace t, LookaheadConfig la, Cycle mem_latency = 100, SimConfig c = {})
      : cfg(c), port(mem_latency), h(cfg, HierarchyOptions{true, false}, port), trace(std::move(t)),
        core(0, cfg, trace, la) {
    h.set_completion([this](unsigned, std::uint64_t w, Cycle at) { core.complete(w, at); });
    h.set_fetch_observer([this](unsigned, Addr, SectorMask d, SectorMask f) { fetches.emplace_back(d, f); });
  }

  void run(Cycle limit) {
    for (Cycle now = 0; now < limit && !core.finished(); ++now) {
      h.process(now);
      for (auto it = port.pending.begin(); it != port.pending.end();) {
        h.dram_fill(it->first, it->second);
        it = port.pending.erase(it);
      }
      h.process(now);
      core.tick(now, h);
      h.commit_predictors();
    }
  }
};

Trace loads(std::initializer_list<Addr> addrs, std::uint32_t bubbles = 0) {
  Trace t;
  for (Addr a : addrs) t.push_back(TraceEntry{bubbles, 0x400000, a, AccessKind::Load});
  return t;
}

}  // namespace

TEST(Core, IpcDefinition) {
  // 400 instructions: 100 fetch cycles plus the store's pipeline tail.
  Trace t{TraceEntry{399, 0x400000, 0, AccessKind::Store}};
  CoreRig r(t, {});
  r.run(1000);
  ASSERT_TRUE(r.core.finished());
  EXPECT_EQ(r.core.stats().retired, 400u);
  const Cycle cycles = 100 - 1 + r.cfg.issue_latency + 2;
  EXPECT_EQ(r.core.cycles(), cycles);
  EXPECT_DOUBLE_EQ(r.core.ipc(), 400.0 / static_cast<double>(cycles));
  Trace empty;
  CoreRig e(empty, {});
  EXPECT_TRUE(e.core.finished());
  EXPECT_EQ(e.core.ipc(), 0.0);
}

TEST(Core, BubblesRetireAtFullWidth) {
  // 100 non-memory instructions then one store. Fetch takes ceil(101/4) cycles;
  // the store dispatches issue_latency cycles after its fetch and retires one
  // cycle later.
  Trace t{TraceEntry{100, 0x400000, 0x80, AccessKind::Store}};
  CoreRig r(t, {});
  r.run(1000);
  ASSERT_TRUE(r.core.finished());
  const Cycle fetch_cycles = (101 + 3) / 4;
  EXPECT_EQ(r.core.cycles(), fetch_cycles - 1 + r.cfg.issue_latency + 2);
  EXPECT_EQ(r.core.stats().retired, 101u);
}

TEST(Core, StoreOnlyTraceRunsNearFullWidth) {
  Trace t;
  for (unsigned i = 0; i < 2000; ++i) t.push_back(TraceEntry{3, 0x400000, Addr{i} * 4096, AccessKind::Store});
  CoreRig r(t, {}, ~Cycle{0});  // memory never answers
  r.run(100000);
  ASSERT_TRUE(r.core.finished());
  const std::uint64_t insts = 2000 * 4;
  EXPECT_EQ(r.core.stats().retired, insts);
  // Stores never wait for memory: only the fixed pipeline tail is added.
  EXPECT_EQ(r.core.cycles(), insts / 4 - 1 + r.cfg.issue_latency + 2);
}

TEST(Core, LoadWithNoResponseBlocksHead) {
  CoreRig r(loads({0x1000}, 10), {}, ~Cycle{0});
  r.run(5000);
  EXPECT_FALSE(r.core.finished());
  EXPECT_EQ(r.core.stats().retired, 10u);  // the bubbles before the load
}

TEST(Core, WindowBoundsOccupancy) {
  Trace t = loads({0x1000});
  t.push_back(TraceEntry{1000, 0x400000, 0x2000, AccessKind::Load});
  CoreRig r(t, {}, ~Cycle{0});
  r.run(500);
  EXPECT_EQ(r.core.window_occupancy(), r.cfg.window_size);
}

TEST(Core, LookaheadAccumulatesIntoOldestSlot) {
  CoreRig r(loads({0x1000, 0x1008, 0x1010}), LookaheadConfig{true, 128});
  r.run(2000);
  ASSERT_TRUE(r.core.finished());
  ASSERT_EQ(r.fetches.size(), 1u);
  EXPECT_EQ(r.fetches[0].first, SectorMask(0b00000111));
  EXPECT_EQ(r.core.stats().subsumed, 2u);
  EXPECT_EQ(r.core.stats().requests, 1u);
}

TEST(Core, LookaheadDifferentBlocksNotMerged) {
  CoreRig r(loads({0x1000, 0x2000}), LookaheadConfig{true, 128});
  r.run(2000);
  ASSERT_EQ(r.fetches.size(), 2u);
  EXPECT_EQ(r.fetches[0].first, SectorMask(0b1));
  EXPECT_EQ(r.fetches[1].first, SectorMask(0b1));
  EXPECT_EQ(r.core.stats().subsumed, 0u);
}

TEST(Core, LookaheadDisabledIssuesEveryEntry) {
  CoreRig r(loads({0x1000, 0x1008, 0x1010}), LookaheadConfig{false, 128});
  r.run(2000);
  EXPECT_EQ(r.core.stats().requests, 3u);
  EXPECT_EQ(r.core.stats().subsumed, 0u);
}

TEST(Core, SeqWordsOneRequestPerBlock) {
  const unsigned blocks = 200;
  CoreRig r(gen_seqwords(blocks), LookaheadConfig{true, 8});
  r.run(200000);
  ASSERT_TRUE(r.core.finished());
  EXPECT_EQ(r.core.stats().requests, blocks);
  ASSERT_EQ(r.fetches.size(), blocks);
  for (const auto& [demand, fetch] : r.fetches) EXPECT_EQ(demand, SectorMask(0xFF));
  EXPECT_EQ(r.h.l1(0).stats().sector_misses, 0u);
}

TEST(Core, DeeperLookaheadNeverAddsRequests) {
  const Trace t = gen_random(4, 3000, 1 << 16);
  std::uint64_t prev = ~std::uint64_t{0};
  for (unsigned depth : {0u, 4u, 32u, 128u, 512u}) {
    CoreRig r(t, LookaheadConfig{depth > 0, depth});
    r.run(10'000'000);
    ASSERT_TRUE(r.core.finished());
    EXPECT_EQ(r.core.stats().retired, 3000u * 5);
    EXPECT_LE(r.core.stats().requests, prev) << depth;
    prev = r.core.stats().requests;
  }
}

TEST(Core, VirtualWindowBeyondPhysical) {
  // Two accesses to one block separated by more than the physical window.
  Trace t;
  t.push_back(TraceEntry{0, 0x400000, 0x1000, AccessKind::Load});
  for (unsigned i = 0; i < 200; ++i) t.push_back(TraceEntry{0, 0x400000, 0x100000 + Addr{i} * 4096, AccessKind::Store});
  t.push_back(TraceEntry{0, 0x400000, 0x1038, AccessKind::Load});
  CoreRig shallow(t, LookaheadConfig{true, 128});
  shallow.run(100000);
  CoreRig deep(t, LookaheadConfig{true, 2048});
  deep.run(100000);
  ASSERT_TRUE(shallow.core.finished());
  ASSERT_TRUE(deep.core.finished());
  EXPECT_EQ(deep.core.stats().retired, shallow.core.stats().retired);
  EXPECT_EQ(deep.core.stats().subsumed, shallow.core.stats().subsumed + 1);
  EXPECT_EQ(deep.fetches.front().first, SectorMask(0b10000001));
}

TEST(Core, TranslateAppliesCoreOffset) {
  SimConfig cfg;
  Trace t;
  Core c0(0, cfg, t, {});
  Core c3(3, cfg, t, {});
  EXPECT_EQ(c0.translate(0x1008), 0x1008u);
  EXPECT_EQ(c3.translate(0x1008), 0x1008u + 3 * cfg.core_offset_bytes);
  EXPECT_EQ(c3.translate(cfg.capacity() - 8), 3 * cfg.core_offset_bytes - 8);
}
