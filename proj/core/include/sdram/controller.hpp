#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <unordered_map>
#include <vector>

#include "sdram/config.hpp"
#include "sdram/dram.hpp"
#include "sdram/types.hpp"

namespace sdram {

/// A read whose data burst ends at `done` (controller cycles).
struct Completion {
  MemoryRequest req;
  Cycle done = 0;
};

struct ControllerStats {
  std::uint64_t reads_served = 0;
  std::uint64_t writes_served = 0;
  std::uint64_t column_commands = 0;
  std::uint64_t activations = 0;
  std::uint64_t mask_precharges = 0;   ///< PREs issued to closed banks
  std::uint64_t sector_conflicts = 0;  ///< PREs of an open row caused by missing sectors
  std::uint64_t read_latency_sum = 0;  ///< controller cycles, arrival to last beat
  std::uint64_t tfaw_stall_cycles = 0;
  Cycle max_queue_age = 0;
  std::uint64_t gate_windows = 0;
  std::uint64_t gate_on_windows = 0;
  std::vector<std::uint64_t> read_occupancy;  ///< cycles spent at each read-queue depth

  double row_hit_rate() const {
    return column_commands ? 1.0 - static_cast<double>(activations) / column_commands : 0.0;
  }
  double avg_read_latency() const {
    return reads_served ? static_cast<double>(read_latency_sum) / reads_served : 0.0;
  }
};

/// Dynamic-mode gate: on for the next window iff the window's average read-queue
/// occupancy (occupancy summed over cycles / window) strictly exceeds `threshold`.
inline bool gate_decision(double occupancy_sum, Cycle window, double threshold) {
  return window > 0 && occupancy_sum / static_cast<double>(window) > threshold;
}

/// FR-FCFS-Cap scheduler for one channel, driving its DramChannel.
class MemoryController {
 public:
  using CommandHook = std::function<void(const DramCommand&, unsigned channel)>;

  MemoryController(const SimConfig& cfg, unsigned channel);

  bool can_accept(AccessKind kind) const;
  /// Queues a request at controller cycle `now`. Masks are widened to all-ones
  /// while sectored operation is off.
  void enqueue(MemoryRequest req, Cycle now);
  /// Issues at most one command at `now`; finished reads are appended to `done`.
  void tick(Cycle now, std::vector<Completion>& done);
  /// Earliest cycle at which tick() could do anything.
  Cycle next_wakeup() const { return wakeup_; }
  bool idle() const { return reads_.empty() && writes_.empty(); }
  std::size_t read_queue_size() const { return reads_.size(); }
  std::size_t write_queue_size() const { return writes_.size(); }
  bool sectored_active() const { return sectored_ && gate_on_; }
  ActRule act_rule() const { return sectored_active() ? ActRule::SectorBudget : ActRule::ActCount; }
  void finish(Cycle now);

  void set_command_hook(CommandHook hook) { hook_ = std::move(hook); }
  const DramChannel& device() const { return dram_; }
  const ControllerStats& stats() const { return stats_; }

 private:
  struct Entry {
    MemoryRequest req;
    DramCoordinates at;
    unsigned flat_bank;
  };
  struct RowUse {
    unsigned refs = 0;
    std::uint16_t sector_refs[kMaxSectors] = {};
  };

  static std::uint64_t row_key(unsigned flat_bank, std::uint32_t row) {
    return (static_cast<std::uint64_t>(flat_bank) << 32) | row;
  }
  void add_use(const Entry& e);
  void drop_use(const Entry& e);
  SectorMask row_union(unsigned flat_bank, std::uint32_t row) const;
  SectorMask activation_mask(const Entry& e) const;
  bool other_hit_queued(const Entry& served, const BankState& b) const;
  void account(Cycle now);
  void issue(DramCommand cmd, Cycle now);

  const SimConfig cfg_;
  unsigned channel_;
  bool sectored_;
  bool dynamic_;
  SectorMask full_;
  DramChannel dram_;
  std::deque<Entry> reads_;
  std::deque<Entry> writes_;
  std::unordered_map<std::uint64_t, RowUse> row_use_;
  std::vector<unsigned> streak_;
  std::vector<std::int64_t> latch_row_;  ///< row the latch was last set for, -1 if none
  std::vector<std::uint64_t> seen_;      ///< per-bank stamp for one scheduling pass
  std::uint64_t pass_ = 0;
  bool draining_ = false;
  bool gate_on_ = true;
  Cycle gate_window_end_ = 0;
  Cycle last_account_ = 0;
  double occupancy_sum_ = 0.0;
  Cycle wakeup_ = 0;
  bool tfaw_blocked_ = false;
  Cycle last_tick_ = 0;
  CommandHook hook_;
  ControllerStats stats_;
};

}  // namespace sdram
