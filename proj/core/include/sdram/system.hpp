#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "sdram/audit.hpp"
#include "sdram/cache.hpp"
#include "sdram/config.hpp"
#include "sdram/controller.hpp"
#include "sdram/cpu.hpp"
#include "sdram/dram.hpp"
#include "sdram/energy.hpp"
#include "sdram/predictor.hpp"
#include "sdram/trace.hpp"

namespace sdram {

struct CoreResult {
  CoreStats stats;
  Cycle cycles = 0;
  double ipc = 0.0;
  LevelStats l1;
  LevelStats l2;
  PredictorStats predictor;
};

struct ChannelResult {
  ControllerStats controller;
  DramStats dram;
  AuditResult audit;
  std::vector<Cycle> rank_active;
  std::vector<Cycle> rank_precharged;
};

struct SimResult {
  SimConfig config;
  std::vector<CoreResult> cores;
  LevelStats l3;
  PrefetchStats prefetch;
  std::vector<ChannelResult> channels;
  EnergyLedger energy;
  Cycle cycles = 0;       ///< CPU cycles until the last core finished
  Cycle dram_cycles = 0;  ///< controller cycles simulated
  std::uint64_t instructions = 0;

  bool audit_clean() const;
  double ipc_total() const;
  double llc_mpki() const;
  std::uint64_t l1_sector_misses() const;
  std::uint64_t bus_bytes() const;
  std::uint64_t activations() const;
  double avg_read_latency_ns() const;
  double row_hit_rate() const;
};

struct RunOptions {
  /// Optional command-log sink per channel (missing or null entries are skipped).
  std::vector<std::ostream*> command_logs;
  CacheHierarchy::FetchObserver fetch_observer;
  MemoryController::CommandHook command_hook;
  /// Abort if no instruction retires for this many CPU cycles.
  Cycle deadlock_cycles = 50'000'000;
};

/// Runs one trace per core (a single trace is replicated to every core) until
/// every core retires its trace or the instruction cap.
SimResult simulate(const SimConfig& cfg, const std::vector<Trace>& traces, const RunOptions& opt = {});

}  // namespace sdram
