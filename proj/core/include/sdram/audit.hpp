#pragma once

#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdram/act_window.hpp"
#include "sdram/config.hpp"
#include "sdram/types.hpp"

namespace sdram {

/// Constraint set the auditor enforces.
struct AuditRules {
  TimingCycles t{};
  unsigned ranks = 4;
  unsigned banks_per_rank = 16;
  unsigned bank_groups = 4;
  unsigned sectors = 8;
  ActRule rule = ActRule::SectorBudget;
  unsigned max_sectors = 32;
  unsigned max_acts = 4;

  static AuditRules from(const SimConfig& cfg);
};

struct AuditResult {
  std::uint64_t commands = 0;
  std::uint64_t violations = 0;
  std::vector<std::string> messages;  ///< the first few violations
  unsigned max_acts_in_window = 0;    ///< over all ranks and tFAW windows
  unsigned max_sectors_in_window = 0;
  unsigned max_single_sector_acts_in_window = 0;
  std::vector<Cycle> rank_active;      ///< cycles with at least one open bank
  std::vector<Cycle> rank_precharged;  ///< cycles with every bank closed

  bool clean() const { return violations == 0; }
};

/// Streaming checker for one channel's command sequence. Keeps its own model
/// of bank state and timing history, separate from the device model.
class Auditor {
 public:
  explicit Auditor(const AuditRules& rules);

  void feed(const DramCommand& cmd);
  /// Closes the standby timelines at `end` and returns the verdict.
  AuditResult finish(Cycle end);
  const AuditResult& partial() const { return result_; }

 private:
  struct Bank {
    bool open = false;
    std::uint32_t row = 0;
    SectorMask open_mask;
    SectorMask latch;
    std::optional<Cycle> act;
    std::optional<Cycle> pre;  ///< start of the latest precharge (explicit, auto, or mask-only)
    std::optional<Cycle> rd;
    std::optional<Cycle> wr_end;
    Cycle open_since = 0;
  };
  struct Rank {
    std::deque<std::pair<Cycle, unsigned>> acts;
    std::optional<Cycle> last_act;
    std::vector<std::optional<Cycle>> last_act_group;
    std::optional<Cycle> last_col;
    std::vector<std::optional<Cycle>> last_col_group;
    std::optional<Cycle> wr_end;
    std::vector<std::optional<Cycle>> wr_end_group;
    std::vector<std::pair<Cycle, Cycle>> open_intervals;
  };

  void fail(const DramCommand& cmd, const std::string& what);
  void require(bool ok, const DramCommand& cmd, const char* what) {
    if (!ok) fail(cmd, what);
  }
  void close_bank(Rank& r, Bank& b, Cycle at);

  AuditRules rules_;
  std::vector<Bank> banks_;
  std::vector<Rank> ranks_;
  std::deque<std::pair<Cycle, Cycle>> bursts_;
  std::optional<Cycle> last_cmd_;
  AuditResult result_;
};

/// Writes `<time-ps> <cmd> <rank> <bank> <row|-> <mask-hex>` lines.
class CommandLogWriter {
 public:
  CommandLogWriter(std::ostream& out, double tck_ns) : out_(out), tck_ps_(tck_ns * 1000.0) {}
  void write(const DramCommand& cmd);

 private:
  std::ostream& out_;
  double tck_ps_;
};

class CommandLogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a command log back into commands with controller-cycle timestamps.
std::vector<DramCommand> parse_command_log(std::istream& in, double tck_ns);

/// Audits a parsed command log.
AuditResult audit_commands(const std::vector<DramCommand>& cmds, const AuditRules& rules);

}  // namespace sdram
