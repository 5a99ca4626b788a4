#pragma once

#include <cstdint>

#include "sdram/config.hpp"
#include "sdram/types.hpp"

namespace sdram {

/// E8 * (r + (1 - r) * (s - 1) / 7): linear in the sector count, E8 at s = 8
/// and r * E8 at s = 1. Throws std::invalid_argument if s is outside [1, 8].
double scale(double e8, double r, unsigned sectors);

/// Accumulated energies in joules.
struct EnergyLedger {
  double e_act = 0.0;
  double e_rdwr = 0.0;
  double e_background = 0.0;
  double e_processor = 0.0;
  std::uint64_t bytes_on_bus = 0;

  double dram_total() const { return e_act + e_rdwr + e_background; }
  double system_total() const { return dram_total() + e_processor; }
};

class EnergyModel {
 public:
  EnergyModel(const EnergyConstants& k, bool sectored_device) : k_(k), sectored_(sectored_device) {}

  /// Adds the array and I/O energy of one command. PREs cost nothing here:
  /// an ACT's figure already covers its paired precharge.
  void account_command(EnergyLedger& ledger, const DramCommand& cmd) const;
  /// Adds per-rank background energy for the given standby durations (seconds).
  void account_background(EnergyLedger& ledger, double active_s, double precharged_s) const;

  const EnergyConstants& constants() const { return k_; }

 private:
  EnergyConstants k_;
  bool sectored_;
};

/// IPC-based processor power in watts for `n_cores` cores with summed IPC `ipc_total`.
double system_power(double ipc_total, unsigned n_cores, const EnergyConstants& k = {});

}  // namespace sdram
