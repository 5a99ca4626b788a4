#include "sdram/controller.hpp"

#include <algorithm>

#include "sdram/address.hpp"

namespace sdram {

MemoryController::MemoryController(const SimConfig& cfg, unsigned channel)
    : cfg_(cfg),
      channel_(channel),
      sectored_(is_sectored(cfg.mode) && !cfg.force_full_masks),
      dynamic_(cfg.mode == Mode::Dynamic && !cfg.force_full_masks),
      full_(cfg.full_mask()),
      dram_(cfg, channel) {
  const std::size_t banks = static_cast<std::size_t>(cfg.ranks) * cfg.banks_per_rank;
  streak_.assign(banks, 0);
  latch_row_.assign(banks, -1);
  seen_.assign(banks, 0);
  gate_on_ = !dynamic_;
  gate_window_end_ = cfg.gate_window;
  stats_.read_occupancy.assign(cfg.read_queue + 1, 0);
}

bool MemoryController::can_accept(AccessKind kind) const {
  return kind == AccessKind::Writeback ? writes_.size() < cfg_.write_queue
                                       : reads_.size() < cfg_.read_queue;
}

void MemoryController::add_use(const Entry& e) {
  RowUse& u = row_use_[row_key(e.flat_bank, e.at.row)];
  ++u.refs;
  for (unsigned s = 0; s < kMaxSectors; ++s)
    if (e.req.mask.test(s)) ++u.sector_refs[s];
}

void MemoryController::drop_use(const Entry& e) {
  auto it = row_use_.find(row_key(e.flat_bank, e.at.row));
  RowUse& u = it->second;
  for (unsigned s = 0; s < kMaxSectors; ++s)
    if (e.req.mask.test(s)) --u.sector_refs[s];
  if (--u.refs == 0) row_use_.erase(it);
}

SectorMask MemoryController::row_union(unsigned flat_bank, std::uint32_t row) const {
  auto it = row_use_.find(row_key(flat_bank, row));
  if (it == row_use_.end()) return SectorMask{};
  std::uint16_t bits = 0;
  for (unsigned s = 0; s < kMaxSectors; ++s)
    if (it->second.sector_refs[s]) bits |= static_cast<std::uint16_t>(1u << s);
  return SectorMask(bits);
}

SectorMask MemoryController::activation_mask(const Entry& e) const {
  return sectored_active() ? row_union(e.flat_bank, e.at.row) : full_;
}

bool MemoryController::other_hit_queued(const Entry& served, const BankState& b) const {
  auto hit = [&](const Entry& e) {
    return &e != &served && e.flat_bank == served.flat_bank && e.at.row == b.row &&
           e.req.mask.is_subset_of(b.open_mask);
  };
  return std::any_of(reads_.begin(), reads_.end(), hit) ||
         std::any_of(writes_.begin(), writes_.end(), hit);
}

void MemoryController::account(Cycle now) {
  auto add = [&](Cycle until) {
    if (until <= last_account_) return;
    const Cycle d = until - last_account_;
    stats_.read_occupancy[reads_.size()] += d;
    occupancy_sum_ += static_cast<double>(reads_.size()) * static_cast<double>(d);
    last_account_ = until;
  };
  if (dynamic_) {
    while (now >= gate_window_end_) {
      add(gate_window_end_);
      gate_on_ = gate_decision(occupancy_sum_, cfg_.gate_window, cfg_.gate_threshold);
      ++stats_.gate_windows;
      if (gate_on_) ++stats_.gate_on_windows;
      occupancy_sum_ = 0.0;
      gate_window_end_ += cfg_.gate_window;
    }
  }
  add(now);
}

void MemoryController::enqueue(MemoryRequest req, Cycle now) {
  account(now);
  if (!sectored_active() || req.mask.empty()) req.mask = full_;
  req.t_arrive = now;
  Entry e{req, decompose_address(req.paddr, cfg_), 0};
  e.flat_bank = e.at.rank * cfg_.banks_per_rank + e.at.bank;
  add_use(e);
  (req.kind == AccessKind::Writeback ? writes_ : reads_).push_back(e);
  wakeup_ = std::min(wakeup_, now);
}

void MemoryController::issue(DramCommand cmd, Cycle now) {
  cmd.t_issue = now;
  dram_.issue(cmd, act_rule());
  if (hook_) hook_(cmd, channel_);
}

void MemoryController::tick(Cycle now, std::vector<Completion>& done) {
  account(now);
  if (now < wakeup_) return;
  if (tfaw_blocked_) stats_.tfaw_stall_cycles += now - last_tick_;
  tfaw_blocked_ = false;
  last_tick_ = now;

  if (writes_.size() >= cfg_.write_high_watermark) draining_ = true;
  else if (writes_.size() <= cfg_.write_low_watermark) draining_ = false;
  std::deque<Entry>& q = (draining_ || reads_.empty()) ? writes_ : reads_;

  for (const auto* dq : {&reads_, &writes_})
    if (!dq->empty()) stats_.max_queue_age = std::max(stats_.max_queue_age, now - dq->front().req.t_arrive);

  if (q.empty()) {
    wakeup_ = dynamic_ ? gate_window_end_ : kNever;
    return;
  }

  const ActRule rule = act_rule();
  const bool write_q = &q == &writes_;
  Cycle next = kNever;
  bool faw_seen = false;

  // Row hits that may use first-ready priority; also marks banks to keep open.
  ++pass_;
  const std::uint64_t hit_pass = pass_;
  std::ptrdiff_t best_hit = -1;
  std::ptrdiff_t best_other = -1;
  DramCommand other_cmd;
  std::vector<std::uint8_t> is_hit(q.size(), 0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Entry& e = q[i];
    const BankState& b = dram_.bank(e.at.rank, e.at.bank);
    if (!(b.open && b.row == e.at.row && e.req.mask.is_subset_of(b.open_mask))) continue;
    is_hit[i] = 1;
    const bool capped = streak_[e.flat_bank] >= cfg_.frfcfs_cap;
    if (!capped) seen_[e.flat_bank] = hit_pass;
    DramCommand cmd{write_q ? CommandKind::WR : CommandKind::RD, e.at, b.open_mask, now};
    const Cycle t = dram_.earliest(cmd, now, rule);
    if (t > now) {
      next = std::min(next, t);
    } else if (!capped && best_hit < 0) {
      best_hit = static_cast<std::ptrdiff_t>(i);
    } else if (capped && best_other < 0) {
      best_other = static_cast<std::ptrdiff_t>(i);
      other_cmd = cmd;
    }
  }

  if (best_hit < 0) {
    ++pass_;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (is_hit[i]) continue;
      if (best_other >= 0 && static_cast<std::ptrdiff_t>(i) > best_other) break;
      const Entry& e = q[i];
      if (seen_[e.flat_bank] >= hit_pass) continue;  // an older request or a live hit owns the bank
      seen_[e.flat_bank] = pass_;
      const BankState& b = dram_.bank(e.at.rank, e.at.bank);
      const SectorMask want = activation_mask(e);
      DramCommand cmd{CommandKind::PRE, e.at, want, now};
      if (!b.open) {
        const bool latch_ok =
            b.latch == want ||
            (latch_row_[e.flat_bank] == static_cast<std::int64_t>(e.at.row) &&
             e.req.mask.is_subset_of(b.latch) && sectored_active());
        if (latch_ok) {
          cmd.kind = CommandKind::ACT;
          cmd.mask = b.latch;
        }
      }
      const Cycle t = dram_.earliest(cmd, now, rule);
      if (t <= now) {
        best_other = static_cast<std::ptrdiff_t>(i);
        other_cmd = cmd;
        break;
      }
      next = std::min(next, t);
      if (cmd.kind == CommandKind::ACT && b.next_act() <= now) {
        const auto& w = dram_.act_window(e.at.rank);
        if (w.earliest_budget(now, b.latch.popcount(), rule) > now) faw_seen = true;
      }
    }
  }

  const std::ptrdiff_t pick = best_hit >= 0 ? best_hit : best_other;
  if (pick < 0) {
    tfaw_blocked_ = faw_seen;
    wakeup_ = std::max(now + 1, next);
    if (dynamic_) wakeup_ = std::min(wakeup_, std::max(now + 1, gate_window_end_));
    return;
  }
  wakeup_ = now + 1;

  Entry& e = q[static_cast<std::size_t>(pick)];
  const BankState& b = dram_.bank(e.at.rank, e.at.bank);
  if (is_hit[static_cast<std::size_t>(pick)]) {
    const bool last = !other_hit_queued(e, b);
    CommandKind kind = write_q ? (last ? CommandKind::WRA : CommandKind::WR)
                               : (last ? CommandKind::RDA : CommandKind::RD);
    DramCommand cmd{kind, e.at, b.open_mask, now};
    cmd.t_issue = now;
    const Cycle end = dram_.issue(cmd, rule);
    if (hook_) hook_(cmd, channel_);
    ++streak_[e.flat_bank];
    ++stats_.column_commands;
    if (write_q) {
      ++stats_.writes_served;
    } else {
      ++stats_.reads_served;
      stats_.read_latency_sum += end - e.req.t_arrive;
      e.req.t_depart = end;
      done.push_back(Completion{e.req, end});
    }
    drop_use(e);
    q.erase(q.begin() + pick);
    return;
  }

  if (other_cmd.kind == CommandKind::ACT) {
    streak_[e.flat_bank] = 0;
    ++stats_.activations;
  } else {
    if (b.open) {
      if (b.row == e.at.row) ++stats_.sector_conflicts;
    } else {
      ++stats_.mask_precharges;
    }
    latch_row_[e.flat_bank] = e.at.row;
  }
  issue(other_cmd, now);
}

void MemoryController::finish(Cycle now) {
  account(now);
  dram_.finish(now);
}

}  // namespace sdram
