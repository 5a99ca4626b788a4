#include "sdram/predictor.hpp"

#include <bit>

namespace sdram {

std::uint32_t sht_index(Addr pc, unsigned word, std::uint32_t entries) {
  const unsigned bits = static_cast<unsigned>(std::countr_zero(entries));
  const Addr mask = entries - 1;
  Addr folded = 0;
  for (Addr p = pc >> 2; p != 0; p >>= bits) folded ^= p & mask;
  return static_cast<std::uint32_t>((folded ^ word) & mask);
}

SectorHistoryTable::SectorHistoryTable(std::uint32_t entries, SectorMask initial)
    : entries_(entries, initial) {}

SectorMask SectorHistoryTable::predict(std::uint32_t index) {
  ++stats_.predictions;
  return entries_.at(index);
}

void SectorHistoryTable::stage_update(std::uint32_t index, SectorMask used, std::uint64_t set) {
  if (pending_) {
    ++stats_.updates_dropped;
    if (set >= pending_->set) return;
  }
  pending_ = Pending{index, used, set};
}

void SectorHistoryTable::commit() {
  if (!pending_) return;
  entries_.at(pending_->index) = pending_->used;
  ++stats_.updates_applied;
  pending_.reset();
}

}  // namespace sdram
