#include "sdram/dram.hpp"

#include <stdexcept>
#include <string>

namespace sdram {

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::None: return "none";
    case Violation::State: return "state";
    case Violation::Mask: return "mask";
    case Violation::tRCD: return "tRCD";
    case Violation::tRAS: return "tRAS";
    case Violation::tRP: return "tRP";
    case Violation::tRC: return "tRC";
    case Violation::tRRD: return "tRRD";
    case Violation::tFAW: return "tFAW";
    case Violation::tCCD: return "tCCD";
    case Violation::tRTP: return "tRTP";
    case Violation::tWR: return "tWR";
    case Violation::tWTR: return "tWTR";
    case Violation::BusConflict: return "bus-conflict";
    case Violation::CommandBus: return "command-bus";
  }
  return "?";
}

void RankActivity::advance(Cycle t) {
  while (!closes_.empty() && closes_.top() <= t) {
    const Cycle c = closes_.top();
    closes_.pop();
    if (c > now_) {
      (open_ ? active_ : precharged_) += c - now_;
      now_ = c;
    }
    --open_;
  }
  if (t > now_) {
    (open_ ? active_ : precharged_) += t - now_;
    now_ = t;
  }
}

void RankActivity::open(Cycle t) {
  advance(t);
  ++open_;
}

void RankActivity::close_at(Cycle t) { closes_.push(t); }

namespace {

struct Bound {
  Cycle t;
  Violation why = Violation::None;
  void need(Cycle c, Violation v) {
    if (c > t) {
      t = c;
      why = v;
    }
  }
};

}  // namespace

DramChannel::DramChannel(const SimConfig& cfg, unsigned channel)
    : t_(cfg.timing_cycles()),
      channel_(channel),
      banks_per_rank_(cfg.banks_per_rank),
      banks_per_group_(cfg.banks_per_group()) {
  BankState init;
  init.latch = cfg.full_mask();
  banks_.assign(static_cast<std::size_t>(cfg.ranks) * cfg.banks_per_rank, init);
  const ActBudget budget{cfg.sector_budget, cfg.baseline_act_budget};
  for (unsigned r = 0; r < cfg.ranks; ++r) {
    ranks_.push_back(RankState{ActWindow(t_, budget, cfg.bank_groups),
                               std::vector<std::optional<Cycle>>(cfg.bank_groups),
                               std::nullopt,
                               std::vector<std::optional<Cycle>>(cfg.bank_groups),
                               std::nullopt,
                               RankActivity{}});
  }
}

Cycle DramChannel::column_earliest(const DramCommand& cmd, Cycle now, Violation* why) const {
  const BankState& b = bank(cmd.coords.rank, cmd.coords.bank);
  if (!b.open || b.row != cmd.coords.row) {
    *why = Violation::State;
    return kNever;
  }
  if (cmd.mask.empty() || !cmd.mask.is_subset_of(b.open_mask)) {
    *why = Violation::Mask;
    return kNever;
  }
  const RankState& r = ranks_[cmd.coords.rank];
  const unsigned g = group_of(cmd.coords.bank);
  Bound bound{now};
  bound.need(b.rcd_ready, Violation::tRCD);
  if (r.last_col) bound.need(*r.last_col + t_.tCCD_S, Violation::tCCD);
  if (r.last_col_group[g]) bound.need(*r.last_col_group[g] + t_.tCCD_L, Violation::tCCD);
  const Cycle lead = is_read(cmd.kind) ? t_.tAA : t_.tCWL;
  if (is_read(cmd.kind)) {
    if (r.write_end) bound.need(*r.write_end + t_.tWTR_S, Violation::tWTR);
    if (r.write_end_group[g]) bound.need(*r.write_end_group[g] + t_.tWTR_L, Violation::tWTR);
  }
  if (bus_free_ > lead) bound.need(bus_free_ - lead, Violation::BusConflict);
  *why = bound.why;
  return bound.t;
}

Cycle DramChannel::earliest(const DramCommand& cmd, Cycle now, ActRule rule) const {
  const BankState& b = bank(cmd.coords.rank, cmd.coords.bank);
  switch (cmd.kind) {
    case CommandKind::ACT: {
      if (b.open || cmd.mask != b.latch) return kNever;
      const auto& w = ranks_[cmd.coords.rank].window;
      Cycle t = std::max(now, b.next_act());
      return std::max(t, w.earliest(now, b.latch.popcount(), group_of(cmd.coords.bank), rule));
    }
    case CommandKind::PRE:
      return std::max(now, b.next_pre());
    default: {
      Violation why;
      return column_earliest(cmd, now, &why);
    }
  }
}

Violation DramChannel::check(const DramCommand& cmd, Cycle now, ActRule rule) const {
  if (cmd.coords.rank >= ranks_.size() || cmd.coords.bank >= banks_per_rank_) return Violation::State;
  if (last_cmd_ && *last_cmd_ >= now) return Violation::CommandBus;
  const BankState& b = bank(cmd.coords.rank, cmd.coords.bank);
  Bound bound{now};
  switch (cmd.kind) {
    case CommandKind::ACT: {
      if (b.open) return Violation::State;
      if (cmd.mask != b.latch) return Violation::Mask;
      bound.need(b.rp_ready, Violation::tRP);
      bound.need(b.rc_ready, Violation::tRC);
      const auto& w = ranks_[cmd.coords.rank].window;
      const unsigned sectors = b.latch.popcount();
      bound.need(w.earliest_budget(now, sectors, rule), Violation::tFAW);
      bound.need(w.earliest(now, sectors, group_of(cmd.coords.bank), rule), Violation::tRRD);
      break;
    }
    case CommandKind::PRE:
      if (cmd.mask.empty()) return Violation::Mask;
      bound.need(b.ras_ready, Violation::tRAS);
      bound.need(b.rtp_ready, Violation::tRTP);
      bound.need(b.wr_ready, Violation::tWR);
      break;
    default: {
      Violation why = Violation::None;
      const Cycle t = column_earliest(cmd, now, &why);
      return t > now ? why : Violation::None;
    }
  }
  return bound.t > now ? bound.why : Violation::None;
}

Cycle DramChannel::issue(const DramCommand& cmd, ActRule rule) {
  const Cycle now = cmd.t_issue;
  if (const Violation v = check(cmd, now, rule); v != Violation::None) {
    throw std::logic_error("DRAM timing violation (" + std::string(to_string(v)) + ") on " +
                           std::string(to_string(cmd.kind)) + " at cycle " + std::to_string(now));
  }
  last_cmd_ = now;
  ++stats_.commands[static_cast<unsigned>(cmd.kind)];
  BankState& b = bank_mut(cmd.coords.rank, cmd.coords.bank);
  RankState& r = ranks_[cmd.coords.rank];
  const unsigned g = group_of(cmd.coords.bank);

  auto auto_precharge = [&](Cycle earliest_pre) {
    const Cycle pre = std::max(earliest_pre, b.next_pre());
    b.open = false;
    b.closed_at = pre;
    b.rp_ready = pre + t_.tRP;
    r.activity.close_at(pre);
  };

  switch (cmd.kind) {
    case CommandKind::ACT:
      b.open = true;
      b.row = cmd.coords.row;
      b.open_mask = b.latch;
      b.rcd_ready = now + t_.tRCD;
      b.ras_ready = now + t_.tRAS;
      b.rc_ready = now + t_.tRC;
      r.window.record(now, b.open_mask.popcount(), g);
      r.activity.open(now);
      stats_.act_sectors += b.open_mask.popcount();
      return now;
    case CommandKind::PRE:
      if (b.open) {
        b.open = false;
        b.closed_at = now;
        r.activity.close_at(now);
      } else {
        ++stats_.pre_to_closed;
      }
      b.latch = cmd.mask;
      b.rp_ready = std::max(b.rp_ready, now + t_.tRP);
      return now;
    case CommandKind::RD:
    case CommandKind::RDA: {
      const Burst burst = burst_beats(b.open_mask);
      const Cycle end = now + t_.tAA + burst.bus_cycles;
      bus_free_ = end;
      r.last_col = now;
      r.last_col_group[g] = now;
      b.rtp_ready = std::max(b.rtp_ready, now + t_.tRTP);
      stats_.read_beats += burst.beats;
      if (cmd.kind == CommandKind::RDA) auto_precharge(now + t_.tRTP);
      return end;
    }
    case CommandKind::WR:
    case CommandKind::WRA: {
      const Burst burst = burst_beats(b.open_mask);
      const Cycle end = now + t_.tCWL + burst.bus_cycles;
      bus_free_ = end;
      r.last_col = now;
      r.last_col_group[g] = now;
      r.write_end = end;
      r.write_end_group[g] = end;
      b.wr_ready = std::max(b.wr_ready, end + t_.tWR);
      stats_.write_beats += burst.beats;
      if (cmd.kind == CommandKind::WRA) auto_precharge(end + t_.tWR);
      return end;
    }
  }
  return now;
}

void DramChannel::finish(Cycle end) {
  for (auto& r : ranks_) r.activity.advance(end);
}

}  // namespace sdram
