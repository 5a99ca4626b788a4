#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "sdram/config.hpp"
#include "sdram/types.hpp"

namespace sdram {

/// How activations are limited inside a rolling tFAW window.
enum class ActRule : std::uint8_t {
  ActCount,      ///< at most `max_acts` ACTs (coarse-grained DRAM)
  SectorBudget,  ///< at most `max_sectors` activated sectors
};

struct ActBudget {
  unsigned max_sectors = 32;
  unsigned max_acts = 4;
};

/// Per-rank activation history: the tFAW window plus the tRRD_S/tRRD_L floors.
class ActWindow {
 public:
  ActWindow(const TimingCycles& t, ActBudget budget, unsigned bank_groups);

  /// True iff an ACT of `sectors` sectors to `group` may issue at `now`.
  bool allowed(Cycle now, unsigned sectors, unsigned group, ActRule rule) const;
  /// Earliest cycle >= now at which allowed() holds, assuming no further ACTs.
  Cycle earliest(Cycle now, unsigned sectors, unsigned group, ActRule rule) const;
  /// Earliest cycle >= now satisfying the window budget alone (tRRD ignored).
  Cycle earliest_budget(Cycle now, unsigned sectors, ActRule rule) const;
  void record(Cycle now, unsigned sectors, unsigned group);

  /// Sectors / ACTs inside (now - tFAW, now].
  unsigned sectors_in_window(Cycle now) const;
  unsigned acts_in_window(Cycle now) const;

 private:
  void prune(Cycle now) const;

  Cycle tFAW_, tRRD_S_, tRRD_L_;
  ActBudget budget_;
  mutable std::deque<std::pair<Cycle, unsigned>> history_;
  std::optional<Cycle> last_act_;
  std::vector<std::optional<Cycle>> last_act_group_;
};

/// Free-function form used by schedulers and tests.
inline bool act_allowed(const ActWindow& w, Cycle now, unsigned sectors, unsigned group,
                        ActRule rule) {
  return w.allowed(now, sectors, group, rule);
}

}  // namespace sdram
