#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>

#include "sdram/types.hpp"

namespace sdram {

/// DRAM timing parameters in nanoseconds.
struct TimingNs {
  double tRCD = 13.75;
  double tRAS = 35.00;
  double tRC = 48.75;
  double tRP = 13.75;  ///< tRC - tRAS
  double tFAW = 25.0;
  double tRRD_L = 5.00;
  double tRRD_S = 2.50;
  double tAA = 12.5;   ///< read latency (CL)
  double tCWL = 11.25;
  double tWR = 15.0;
  double tRTP = 7.5;
  double tCCD_L = 5.0;
  double tCCD_S = 2.5;
  double tWTR_L = 7.5;
  double tWTR_S = 2.5;
};

/// The same parameters rounded up to whole controller clock cycles.
struct TimingCycles {
  Cycle tRCD, tRAS, tRC, tRP, tFAW, tRRD_L, tRRD_S, tAA, tCWL, tWR, tRTP, tCCD_L, tCCD_S,
      tWTR_L, tWTR_S;
};

inline constexpr std::uint64_t kNoInstructionCap = ~std::uint64_t{0};

struct CacheLevelConfig {
  std::uint64_t capacity = 0;  ///< bytes
  unsigned ways = 8;
  Cycle latency = 4;  ///< CPU cycles

  std::uint64_t sets() const { return capacity / (static_cast<std::uint64_t>(ways) * kBlockBytes); }
};

struct EnergyConstants {
  // DDR4-3200 x8, 8 chips per rank, IDD x VDD x time.
  double e_act8_pj = 3384.0;
  double e_rd8_pj = 2112.0;
  double e_wr8_pj = 1752.0;
  double r_act = 0.873;
  double r_rd = 0.300;
  double r_wr = 0.294;
  double sa_overhead = 1.0026;
  double p_bg_active_mw = 499.2;
  double p_bg_precharged_mw = 355.2;
  double cpu_dynamic_w = 101.7;  ///< for 8 cores
  double cpu_static_w = 32.0;    ///< for 8 cores
};

struct SimConfig {
  // Organization.
  unsigned channels = 1;
  unsigned ranks = 4;
  unsigned banks_per_rank = 16;
  unsigned bank_groups = 4;
  unsigned rows_per_bank = 32768;
  unsigned row_bytes = 8192;
  unsigned sectors_per_block = 8;
  unsigned data_rate_mts = 3200;
  TimingNs timing;

  // Processor.
  unsigned cores = 1;
  double cpu_ghz = 3.6;
  unsigned window_size = 128;
  unsigned retire_width = 4;
  unsigned fetch_width = 4;
  unsigned issue_latency = 2;  ///< cycles from fetch until a memory slot may dispatch
  unsigned mshrs_per_core = 8;
  unsigned lookahead_depth = 128;
  CacheLevelConfig l1{32 * 1024, 8, 4};
  CacheLevelConfig l2{256 * 1024, 8, 12};
  CacheLevelConfig l3{8 * 1024 * 1024, 16, 38};
  unsigned sht_entries = 512;
  bool prefetcher = false;
  unsigned prefetch_table_entries = 64;
  unsigned prefetch_degree = 4;
  unsigned prefetch_distance = 4;

  // Memory controller.
  unsigned read_queue = 64;
  unsigned write_queue = 64;
  unsigned write_high_watermark = 48;
  unsigned write_low_watermark = 16;
  unsigned frfcfs_cap = 16;
  unsigned sector_budget = 32;   ///< sectors per tFAW window per rank
  unsigned baseline_act_budget = 4;
  Cycle gate_window = 1000;      ///< controller cycles
  double gate_threshold = 30.0;

  EnergyConstants energy;

  Mode mode = Mode::SectoredLASP;
  /// Forces every mask to all-ones and the coarse-grained ACT budget in a sectored mode.
  bool force_full_masks = false;
  std::uint64_t max_insts = kNoInstructionCap;  ///< per core
  std::uint64_t core_offset_bytes = 1ull << 30;

  // Derived quantities.
  double tck_ns() const { return 2000.0 / data_rate_mts; }
  TimingCycles timing_cycles() const;
  unsigned blocks_per_row() const { return row_bytes / kBlockBytes; }
  unsigned banks_per_group() const { return banks_per_rank / bank_groups; }
  std::uint64_t channel_capacity() const {
    return static_cast<std::uint64_t>(ranks) * banks_per_rank * rows_per_bank * row_bytes;
  }
  std::uint64_t capacity() const { return channel_capacity() * channels; }
  SectorMask full_mask() const { return SectorMask::full(sectors_per_block); }

  /// Checks internal consistency; throws ConfigError.
  void validate() const;
};

/// Ceiling conversion of nanoseconds to cycles of period `tck_ns`.
Cycle ns_to_cycles(double ns, double tck_ns);

/// Parses `key = value` lines (`#` comments). Keys absent from the document keep
/// the defaults already in `cfg`. Unknown keys raise ConfigError.
void load_config(std::istream& in, SimConfig& cfg);
SimConfig load_config_file(const std::string& path);

/// Flat key/value rendering; load_config() of the result reproduces the config.
std::map<std::string, std::string> config_to_map(const SimConfig& cfg);
void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value);

}  // namespace sdram
