#include "sdram/prefetcher.hpp"

namespace sdram {

namespace {
constexpr unsigned kBlocksPerRegionShift = StridePrefetcher::kRegionShift - kBlockShift;
}

StridePrefetcher::StridePrefetcher(unsigned table_entries, unsigned degree, unsigned distance)
    : table_(table_entries), degree_(degree), distance_(distance) {}

const RegionEntry& StridePrefetcher::entry_for(Addr block) const {
  const Addr region = block >> kBlocksPerRegionShift;
  return table_[region & (table_.size() - 1)];
}

std::vector<Addr> StridePrefetcher::observe(Addr block, bool /*hit*/) {
  const Addr region = block >> kBlocksPerRegionShift;
  RegionEntry& e = table_[region & (table_.size() - 1)];
  std::vector<Addr> out;
  if (!e.valid || e.region != region) {
    e = RegionEntry{true, region, block, 0, 1};
    return out;
  }
  const auto stride = static_cast<std::int64_t>(block) - static_cast<std::int64_t>(e.last_block);
  if (stride == 0) return out;
  const bool was_trained = e.trained();
  if (stride == e.stride) {
    ++e.confirmations;
  } else {
    e.stride = stride;
    e.confirmations = 2;
  }
  e.last_block = block;
  if (!was_trained || !e.trained()) return out;

  for (unsigned i = 0; i < degree_; ++i) {
    const auto target = static_cast<std::int64_t>(block) + stride * static_cast<std::int64_t>(distance_ + i);
    if (target < 0) break;
    const auto t = static_cast<Addr>(target);
    if ((t >> kBlocksPerRegionShift) != region) continue;
    out.push_back(t);
  }
  return out;
}

}  // namespace sdram
