#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <string_view>
#include <vector>

#include "sdram/act_window.hpp"
#include "sdram/config.hpp"
#include "sdram/types.hpp"

namespace sdram {

inline constexpr Cycle kNever = std::numeric_limits<Cycle>::max();

enum class Violation : std::uint8_t {
  None,
  State,  ///< wrong bank state for the command (e.g. RD to a closed bank)
  Mask,   ///< mask not covered by the open sectors, or ACT mask differs from the latch
  tRCD,
  tRAS,
  tRP,
  tRC,
  tRRD,
  tFAW,
  tCCD,
  tRTP,
  tWR,
  tWTR,
  BusConflict,
  CommandBus,
};

std::string_view to_string(Violation v);

struct BankState {
  bool open = false;
  std::uint32_t row = 0;
  SectorMask open_mask;
  SectorMask latch;      ///< sector bits conveyed by the last PRE
  Cycle closed_at = 0;  ///< cycle the current or last precharge began
  // Earliest cycles allowed by each constraint.
  Cycle rp_ready = 0;   ///< ACT after PRE
  Cycle rc_ready = 0;   ///< ACT after ACT
  Cycle rcd_ready = 0;  ///< column command after ACT
  Cycle ras_ready = 0;  ///< PRE after ACT
  Cycle rtp_ready = 0;  ///< PRE after RD
  Cycle wr_ready = 0;   ///< PRE after write data

  Cycle next_act() const { return rp_ready > rc_ready ? rp_ready : rc_ready; }
  Cycle next_pre() const {
    Cycle t = ras_ready > rtp_ready ? ras_ready : rtp_ready;
    return t > wr_ready ? t : wr_ready;
  }
};

struct Burst {
  unsigned beats = 0;
  Cycle bus_cycles = 0;
};

/// Beats equal the number of open sectors; two beats per controller cycle.
constexpr Burst burst_beats(SectorMask open_mask) {
  const unsigned b = open_mask.popcount();
  return Burst{b, static_cast<Cycle>((b + 1) / 2)};
}

/// Time a rank spends with at least one bank open versus all banks closed.
class RankActivity {
 public:
  void open(Cycle t);
  /// Closes one open bank at `t`, which may lie in the future.
  void close_at(Cycle t);
  void advance(Cycle t);

  Cycle active_cycles() const { return active_; }
  Cycle precharged_cycles() const { return precharged_; }
  unsigned open_banks() const { return open_; }

 private:
  Cycle now_ = 0;
  unsigned open_ = 0;
  Cycle active_ = 0;
  Cycle precharged_ = 0;
  std::priority_queue<Cycle, std::vector<Cycle>, std::greater<>> closes_;
};

struct DramStats {
  std::array<std::uint64_t, 6> commands{};  ///< indexed by CommandKind
  std::uint64_t pre_to_closed = 0;
  std::uint64_t act_sectors = 0;
  std::uint64_t read_beats = 0;
  std::uint64_t write_beats = 0;

  std::uint64_t count(CommandKind k) const { return commands[static_cast<unsigned>(k)]; }
  std::uint64_t bus_bytes() const { return 8 * (read_beats + write_beats); }
};

/// One channel's ranks and banks with every inter-command timing rule.
class DramChannel {
 public:
  DramChannel(const SimConfig& cfg, unsigned channel);

  /// Earliest cycle >= now at which `cmd` satisfies every device constraint,
  /// ignoring command-bus occupancy. kNever if the bank state forbids it.
  Cycle earliest(const DramCommand& cmd, Cycle now, ActRule rule) const;
  /// The first violated constraint if `cmd` were issued at `now`.
  Violation check(const DramCommand& cmd, Cycle now, ActRule rule) const;
  /// Applies `cmd` at cmd.t_issue. Returns the cycle the data burst ends for
  /// RD/WR variants and cmd.t_issue otherwise. Throws std::logic_error on violation.
  Cycle issue(const DramCommand& cmd, ActRule rule);

  /// Closes the activity timeline at `end`.
  void finish(Cycle end);

  const BankState& bank(unsigned rank, unsigned bank) const { return banks_[rank * banks_per_rank_ + bank]; }
  const RankActivity& activity(unsigned rank) const { return ranks_[rank].activity; }
  const ActWindow& act_window(unsigned rank) const { return ranks_[rank].window; }
  const DramStats& stats() const { return stats_; }
  const TimingCycles& timing() const { return t_; }
  unsigned channel() const { return channel_; }
  unsigned ranks() const { return static_cast<unsigned>(ranks_.size()); }
  unsigned banks_per_rank() const { return banks_per_rank_; }
  unsigned group_of(unsigned bank) const { return bank / banks_per_group_; }

 private:
  struct RankState {
    ActWindow window;
    std::vector<std::optional<Cycle>> last_col_group;
    std::optional<Cycle> last_col;
    std::vector<std::optional<Cycle>> write_end_group;  ///< end of last write burst per group
    std::optional<Cycle> write_end;
    RankActivity activity;
  };

  BankState& bank_mut(unsigned rank, unsigned bank) { return banks_[rank * banks_per_rank_ + bank]; }
  Cycle column_earliest(const DramCommand& cmd, Cycle now, Violation* why) const;

  TimingCycles t_;
  unsigned channel_;
  unsigned banks_per_rank_;
  unsigned banks_per_group_;
  std::vector<BankState> banks_;
  std::vector<RankState> ranks_;
  Cycle bus_free_ = 0;
  std::optional<Cycle> last_cmd_;
  DramStats stats_;
};

}  // namespace sdram
