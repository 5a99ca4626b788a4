#include "sdram/act_window.hpp"

#include <algorithm>

namespace sdram {

ActWindow::ActWindow(const TimingCycles& t, ActBudget budget, unsigned bank_groups)
    : tFAW_(t.tFAW), tRRD_S_(t.tRRD_S), tRRD_L_(t.tRRD_L), budget_(budget),
      last_act_group_(bank_groups) {}

void ActWindow::prune(Cycle now) const {
  while (!history_.empty() && history_.front().first + tFAW_ <= now) history_.pop_front();
}

unsigned ActWindow::sectors_in_window(Cycle now) const {
  prune(now);
  unsigned s = 0;
  for (const auto& [t, n] : history_) s += n;
  return s;
}

unsigned ActWindow::acts_in_window(Cycle now) const {
  prune(now);
  return static_cast<unsigned>(history_.size());
}

Cycle ActWindow::earliest_budget(Cycle now, unsigned sectors, ActRule rule) const {
  prune(now);
  // Entries leave the window in order; find the first point where enough have left.
  unsigned used = 0;
  for (const auto& [t, n] : history_) used += (rule == ActRule::SectorBudget ? n : 1);
  const unsigned need = rule == ActRule::SectorBudget ? sectors : 1;
  const unsigned cap = rule == ActRule::SectorBudget ? budget_.max_sectors : budget_.max_acts;
  Cycle when = now;
  for (const auto& [t, n] : history_) {
    if (used + need <= cap) break;
    used -= (rule == ActRule::SectorBudget ? n : 1);
    when = std::max(when, t + tFAW_);
  }
  return when;
}

Cycle ActWindow::earliest(Cycle now, unsigned sectors, unsigned group, ActRule rule) const {
  Cycle when = earliest_budget(now, sectors, rule);
  if (last_act_) when = std::max(when, *last_act_ + tRRD_S_);
  if (last_act_group_[group]) when = std::max(when, *last_act_group_[group] + tRRD_L_);
  return when;
}

bool ActWindow::allowed(Cycle now, unsigned sectors, unsigned group, ActRule rule) const {
  return earliest(now, sectors, group, rule) <= now;
}

void ActWindow::record(Cycle now, unsigned sectors, unsigned group) {
  prune(now);
  history_.emplace_back(now, sectors);
  last_act_ = now;
  last_act_group_[group] = now;
}

}  // namespace sdram
