#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sdram/types.hpp"

namespace sdram {

/// Folds pc bits [2, 64) into log2(entries)-bit groups by XOR, then XORs in the word offset.
std::uint32_t sht_index(Addr pc, unsigned word, std::uint32_t entries);

struct PredictorStats {
  std::uint64_t predictions = 0;
  std::uint64_t predicted_sectors = 0;  ///< sectors added beyond the demand mask
  std::uint64_t unused_predicted = 0;   ///< predicted sectors never touched before eviction
  std::uint64_t updates_applied = 0;
  std::uint64_t updates_dropped = 0;
};

/// Sector History Table: previously used sectors per (pc, word) hash.
class SectorHistoryTable {
 public:
  SectorHistoryTable(std::uint32_t entries, SectorMask initial);

  std::uint32_t size() const { return static_cast<std::uint32_t>(entries_.size()); }
  SectorMask predict(std::uint32_t index);
  SectorMask peek(std::uint32_t index) const { return entries_.at(index); }

  /// Queues an eviction-time update. Only one queued update survives per cycle:
  /// the one with the lowest set index.
  void stage_update(std::uint32_t index, SectorMask used, std::uint64_t set);
  bool has_pending() const { return pending_.has_value(); }
  /// Applies the surviving update of the current cycle.
  void commit();

  PredictorStats& stats() { return stats_; }
  const PredictorStats& stats() const { return stats_; }

 private:
  struct Pending {
    std::uint32_t index;
    SectorMask used;
    std::uint64_t set;
  };
  std::vector<SectorMask> entries_;
  std::optional<Pending> pending_;
  PredictorStats stats_;
};

}  // namespace sdram
