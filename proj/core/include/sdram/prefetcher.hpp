#pragma once

#include <cstdint>
#include <vector>

#include "sdram/types.hpp"

namespace sdram {

struct RegionEntry {
  bool valid = false;
  Addr region = 0;        ///< 4 KiB-aligned region number
  Addr last_block = 0;
  std::int64_t stride = 0;  ///< in blocks
  unsigned confirmations = 0;

  bool trained() const { return confirmations >= 4; }
};

struct PrefetchStats {
  std::uint64_t issued = 0;
  std::uint64_t useful = 0;
  std::uint64_t useless = 0;
};

/// Region-based single-stride prefetcher observing LLC accesses.
class StridePrefetcher {
 public:
  static constexpr unsigned kRegionShift = 12;

  StridePrefetcher(unsigned table_entries, unsigned degree, unsigned distance);

  /// Returns block addresses to prefetch; each prefetch carries the trigger's mask.
  std::vector<Addr> observe(Addr block, bool hit);

  const RegionEntry& entry_for(Addr block) const;
  PrefetchStats& stats() { return stats_; }
  const PrefetchStats& stats() const { return stats_; }

 private:
  std::vector<RegionEntry> table_;
  unsigned degree_;
  unsigned distance_;
  PrefetchStats stats_;
};

}  // namespace sdram
