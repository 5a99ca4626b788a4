#include "sdram/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdram {

AuditRules AuditRules::from(const SimConfig& cfg) {
  AuditRules r;
  r.t = cfg.timing_cycles();
  r.ranks = cfg.ranks;
  r.banks_per_rank = cfg.banks_per_rank;
  r.bank_groups = cfg.bank_groups;
  r.sectors = cfg.sectors_per_block;
  const bool sectored = is_sectored(cfg.mode) && !cfg.force_full_masks;
  r.rule = sectored ? ActRule::SectorBudget : ActRule::ActCount;
  r.max_sectors = cfg.sector_budget;
  r.max_acts = cfg.baseline_act_budget;
  return r;
}

Auditor::Auditor(const AuditRules& rules) : rules_(rules) {
  Bank init;
  init.latch = SectorMask::full(rules.sectors);
  banks_.assign(static_cast<std::size_t>(rules.ranks) * rules.banks_per_rank, init);
  for (unsigned i = 0; i < rules.ranks; ++i) {
    Rank r;
    r.last_act_group.resize(rules.bank_groups);
    r.last_col_group.resize(rules.bank_groups);
    r.wr_end_group.resize(rules.bank_groups);
    ranks_.push_back(std::move(r));
  }
}

void Auditor::fail(const DramCommand& cmd, const std::string& what) {
  ++result_.violations;
  if (result_.messages.size() < 20) {
    std::ostringstream os;
    os << "cycle " << cmd.t_issue << ' ' << to_string(cmd.kind) << " rank " << cmd.coords.rank
       << " bank " << cmd.coords.bank << ": " << what;
    result_.messages.push_back(os.str());
  }
}

void Auditor::close_bank(Rank& r, Bank& b, Cycle at) {
  b.open = false;
  b.pre = at;
  r.open_intervals.emplace_back(b.open_since, at);
}

void Auditor::feed(const DramCommand& cmd) {
  ++result_.commands;
  const Cycle t = cmd.t_issue;
  const TimingCycles& T = rules_.t;
  if (last_cmd_) require(t > *last_cmd_, cmd, "two commands in one command-bus cycle");
  last_cmd_ = t;
  if (cmd.coords.rank >= rules_.ranks || cmd.coords.bank >= rules_.banks_per_rank) {
    fail(cmd, "no such rank/bank");
    return;
  }
  Rank& r = ranks_[cmd.coords.rank];
  Bank& b = banks_[cmd.coords.rank * rules_.banks_per_rank + cmd.coords.bank];
  const unsigned g = cmd.coords.bank / (rules_.banks_per_rank / rules_.bank_groups);
  const unsigned pop = cmd.mask.popcount();
  const SectorMask all = SectorMask::full(rules_.sectors);

  switch (cmd.kind) {
    case CommandKind::ACT: {
      require(!b.open, cmd, "ACT to a bank with an open row");
      require(pop >= 1 && cmd.mask.is_subset_of(all), cmd, "ACT mask out of range");
      require(cmd.mask == b.latch, cmd, "ACT mask differs from the latched sector bits");
      if (b.pre) require(t >= *b.pre + T.tRP, cmd, "tRP");
      if (b.act) require(t >= *b.act + T.tRC, cmd, "tRC");
      if (r.last_act) require(t >= *r.last_act + T.tRRD_S, cmd, "tRRD_S");
      if (r.last_act_group[g]) require(t >= *r.last_act_group[g] + T.tRRD_L, cmd, "tRRD_L");
      while (!r.acts.empty() && r.acts.front().first + T.tFAW <= t) r.acts.pop_front();
      r.acts.emplace_back(t, pop);
      unsigned n = 0, sectors = 0, singles = 0;
      for (const auto& [at, s] : r.acts) {
        ++n;
        sectors += s;
        if (s == 1) ++singles;
      }
      if (rules_.rule == ActRule::SectorBudget) {
        require(sectors <= rules_.max_sectors, cmd, "tFAW sector budget exceeded");
      } else {
        require(n <= rules_.max_acts, cmd, "tFAW activation count exceeded");
      }
      result_.max_acts_in_window = std::max(result_.max_acts_in_window, n);
      result_.max_sectors_in_window = std::max(result_.max_sectors_in_window, sectors);
      result_.max_single_sector_acts_in_window = std::max(result_.max_single_sector_acts_in_window, singles);
      r.last_act = t;
      r.last_act_group[g] = t;
      b.open = true;
      b.row = cmd.coords.row;
      b.open_mask = cmd.mask;
      b.act = t;
      b.rd.reset();
      b.wr_end.reset();
      b.open_since = t;
      break;
    }
    case CommandKind::PRE:
      require(pop >= 1 && cmd.mask.is_subset_of(all), cmd, "PRE mask out of range");
      if (b.open) {
        require(t >= *b.act + T.tRAS, cmd, "tRAS");
        if (b.rd) require(t >= *b.rd + T.tRTP, cmd, "tRTP");
        if (b.wr_end) require(t >= *b.wr_end + T.tWR, cmd, "tWR");
        close_bank(r, b, t);
      } else {
        if (b.pre) require(t >= *b.pre, cmd, "PRE before the bank's auto-precharge");
        b.pre = t;
      }
      b.latch = cmd.mask;
      break;
    default: {
      const bool rd = is_read(cmd.kind);
      if (!b.open || b.row != cmd.coords.row) {
        fail(cmd, "column command to a row that is not open");
        break;
      }
      require(pop >= 1 && cmd.mask.is_subset_of(b.open_mask), cmd, "column mask not within the open sectors");
      require(t >= *b.act + T.tRCD, cmd, "tRCD");
      if (r.last_col) require(t >= *r.last_col + T.tCCD_S, cmd, "tCCD_S");
      if (r.last_col_group[g]) require(t >= *r.last_col_group[g] + T.tCCD_L, cmd, "tCCD_L");
      if (rd) {
        if (r.wr_end) require(t >= *r.wr_end + T.tWTR_S, cmd, "tWTR_S");
        if (r.wr_end_group[g]) require(t >= *r.wr_end_group[g] + T.tWTR_L, cmd, "tWTR_L");
      }
      const Cycle beats = b.open_mask.popcount();
      const Cycle start = t + (rd ? T.tAA : T.tCWL);
      const Cycle end = start + (beats + 1) / 2;
      while (!bursts_.empty() && bursts_.front().second <= t) bursts_.pop_front();
      for (const auto& [s0, e0] : bursts_)
        if (start < e0 && s0 < end) {
          fail(cmd, "data bus conflict");
          break;
        }
      bursts_.emplace_back(start, end);
      std::sort(bursts_.begin(), bursts_.end(),
                [](const auto& a, const auto& c) { return a.second < c.second; });
      r.last_col = t;
      r.last_col_group[g] = t;
      if (rd) {
        b.rd = t;
      } else {
        b.wr_end = end;
        r.wr_end = end;
        r.wr_end_group[g] = end;
      }
      if (is_auto_precharge(cmd.kind)) {
        Cycle pre = *b.act + T.tRAS;
        if (b.rd) pre = std::max(pre, *b.rd + T.tRTP);
        if (b.wr_end) pre = std::max(pre, *b.wr_end + T.tWR);
        close_bank(r, b, pre);
      }
      break;
    }
  }
}

AuditResult Auditor::finish(Cycle end) {
  result_.rank_active.assign(rules_.ranks, 0);
  result_.rank_precharged.assign(rules_.ranks, 0);
  for (unsigned ri = 0; ri < rules_.ranks; ++ri) {
    auto iv = ranks_[ri].open_intervals;
    for (unsigned bi = 0; bi < rules_.banks_per_rank; ++bi) {
      const Bank& b = banks_[ri * rules_.banks_per_rank + bi];
      if (b.open) iv.emplace_back(b.open_since, end);
    }
    std::sort(iv.begin(), iv.end());
    Cycle active = 0, cur_s = 0, cur_e = 0;
    bool have = false;
    for (auto [s, e] : iv) {
      s = std::min(s, end);
      e = std::min(e, end);
      if (have && s <= cur_e) {
        cur_e = std::max(cur_e, e);
      } else {
        if (have) active += cur_e - cur_s;
        cur_s = s;
        cur_e = e;
        have = true;
      }
    }
    if (have) active += cur_e - cur_s;
    result_.rank_active[ri] = active;
    result_.rank_precharged[ri] = end - active;
  }
  return result_;
}

void CommandLogWriter::write(const DramCommand& cmd) {
  const auto ps = static_cast<unsigned long long>(std::llround(static_cast<double>(cmd.t_issue) * tck_ps_));
  out_ << ps << ' ' << to_string(cmd.kind) << ' ' << cmd.coords.rank << ' ' << cmd.coords.bank << ' ';
  if (cmd.kind == CommandKind::PRE) out_ << '-';
  else out_ << cmd.coords.row;
  out_ << ' ' << to_hex(cmd.mask) << '\n';
}

std::vector<DramCommand> parse_command_log(std::istream& in, double tck_ns) {
  std::vector<DramCommand> out;
  const double tck_ps = tck_ns * 1000.0;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    unsigned long long ps = 0;
    std::string kind, row, mask;
    DramCommand cmd;
    if (!(ls >> ps >> kind >> cmd.coords.rank >> cmd.coords.bank >> row >> mask))
      throw CommandLogError("command log line " + std::to_string(n) + ": malformed");
    try {
      cmd.kind = command_from_string(kind);
      cmd.coords.row = row == "-" ? 0 : static_cast<std::uint32_t>(std::stoul(row));
      cmd.mask = SectorMask(static_cast<std::uint16_t>(std::stoul(mask, nullptr, 16)));
    } catch (const std::exception& e) {
      throw CommandLogError("command log line " + std::to_string(n) + ": " + e.what());
    }
    cmd.t_issue = static_cast<Cycle>(std::llround(static_cast<double>(ps) / tck_ps));
    if (std::abs(static_cast<double>(cmd.t_issue) * tck_ps - static_cast<double>(ps)) > 1.0)
      throw CommandLogError("command log line " + std::to_string(n) + ": time " + std::to_string(ps) +
                            " ps is not on the command clock");
    out.push_back(cmd);
  }
  return out;
}

AuditResult audit_commands(const std::vector<DramCommand>& cmds, const AuditRules& rules) {
  Auditor a(rules);
  Cycle end = 0;
  for (const auto& c : cmds) {
    a.feed(c);
    end = std::max(end, c.t_issue + 1);
  }
  return a.finish(end);
}

}  // namespace sdram
