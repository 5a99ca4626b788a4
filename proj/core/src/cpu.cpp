#include "sdram/cpu.hpp"

#include <algorithm>

namespace sdram {

namespace {
constexpr Cycle kPending = ~Cycle{0};
}

Core::Core(unsigned id, const SimConfig& cfg, const Trace& trace, LookaheadConfig la)
    : id_(id),
      cfg_(cfg),
      trace_(trace),
      la_(la),
      offset_(static_cast<Addr>(id) * cfg.core_offset_bytes),
      capacity_(cfg.capacity()),
      window_(cfg.window_size),
      limit_(cfg.max_insts) {
  if (trace_.empty() || limit_ == 0) finished_ = true;
}

Addr Core::translate(Addr vaddr) const { return ((vaddr + offset_) % capacity_) & ~Addr{7}; }

bool Core::fetch_one(Cycle now) {
  if (entry_ >= trace_.size() || fetched_insts_ >= limit_) return false;
  if (tail_ - head_ >= window_.size()) return false;
  const TraceEntry& te = trace_[entry_];
  Slot& s = slot(tail_);
  s = Slot{};
  s.seq = tail_;
  s.fetched = now;
  ++fetched_insts_;
  ++tail_;
  if (bubbles_done_ < te.bubbles) {
    ++bubbles_done_;
    s.done = now + 1;
    return true;
  }
  // The memory access of this entry.
  const std::size_t index = entry_;
  ++entry_;
  bubbles_done_ = 0;
  const bool store = te.kind == AccessKind::Store;
  s.kind = store ? SlotKind::Store : SlotKind::Load;
  ++(store ? stats_.stores : stats_.loads);
  s.mem_seq = mem_seq_++;
  s.pc = te.pc;
  s.paddr = translate(te.vaddr);
  const unsigned word = static_cast<unsigned>((s.paddr >> 3) & (cfg_.sectors_per_block - 1));
  s.mask = SectorMask::single(word);
  if (store) s.store_mask = s.mask;
  s.done = kPending;
  const Addr block = s.paddr >> kBlockShift;

  if (la_.enabled) {
    if (auto c = claimed_.find(index); c != claimed_.end()) {
      const std::uint64_t h = c->second;
      claimed_.erase(c);
      ++stats_.subsumed;
      VirtualHead& vh = virtual_heads_[h];
      if (!vh.dispatched) {
        deps_[h].push_back(Dependent{s.seq, store});
      } else if (store) {
        s.done = now;
      } else if (vh.done != kPending) {
        s.done = std::max(vh.done, now);
      } else {
        deps_[h].push_back(Dependent{s.seq, false});
      }
      if (--vh.refs == 0 && vh.done != kPending) virtual_heads_.erase(h);
      return true;
    }
    if (auto it = open_heads_.find(block); it != open_heads_.end()) {
      Slot& h = slot(it->second);
      if (h.seq == it->second && !h.issued && s.mem_seq - h.mem_seq <= la_.depth) {
        h.mask |= s.mask;
        h.store_mask |= s.store_mask;
        ++stats_.subsumed;
        deps_[h.seq].push_back(Dependent{s.seq, store});
        return true;
      }
    }
    open_heads_[block] = s.seq;
  }
  ready_heads_.push_back(s.seq);
  return true;
}

void Core::decode_ahead(Slot& head) {
  const std::uint64_t extra = la_.depth - cfg_.window_size;
  const Addr block = head.paddr >> kBlockShift;
  std::uint64_t scanned = 0;
  for (std::size_t i = entry_; i < trace_.size() && scanned < extra; ++i, ++scanned) {
    // Entry i holds memory access number i.
    if (i - head.mem_seq > la_.depth) break;
    const TraceEntry& te = trace_[i];
    const Addr pa = translate(te.vaddr);
    if ((pa >> kBlockShift) != block || claimed_.count(i)) continue;
    claimed_[i] = head.seq;
    ++virtual_heads_[head.seq].refs;
    const unsigned word = static_cast<unsigned>((pa >> 3) & (cfg_.sectors_per_block - 1));
    head.mask |= SectorMask::single(word);
    if (te.kind == AccessKind::Store) head.store_mask |= SectorMask::single(word);
  }
}

void Core::resolve(std::uint64_t head_seq, Cycle store_done, Cycle load_done, bool at_dispatch) {
  if (auto v = virtual_heads_.find(head_seq); v != virtual_heads_.end()) {
    if (at_dispatch) v->second.dispatched = true;
    v->second.done = load_done;
    if (v->second.refs == 0 && load_done != kPending) virtual_heads_.erase(v);
  }
  auto it = deps_.find(head_seq);
  if (it == deps_.end()) return;
  std::vector<Dependent> keep;
  for (const Dependent& d : it->second) {
    Slot& s = slot(d.seq);
    if (s.seq != d.seq) continue;
    const Cycle t = d.store ? store_done : load_done;
    if (t == kPending) keep.push_back(d);
    else if (s.done == kPending) s.done = t;
  }
  if (keep.empty()) deps_.erase(it);
  else it->second = std::move(keep);
}

void Core::dispatch(Cycle now, CacheHierarchy& mem) {
  unsigned n = 0;
  while (!ready_heads_.empty() && n < cfg_.fetch_width) {
    Slot& s = slot(ready_heads_.front());
    if (s.fetched + cfg_.issue_latency > now) break;
    if (la_.enabled && la_.depth > cfg_.window_size) decode_ahead(s);
    AccessInfo a;
    a.waiter = s.seq;
    a.pc = s.pc;
    a.paddr = s.paddr;
    a.mask = s.mask;
    a.store_mask = s.store_mask;
    const AccessResult r = mem.access(id_, a, now);
    if (r.status == AccessStatus::Stall) {
      ++stats_.mshr_stall_cycles;
      break;
    }
    ready_heads_.pop_front();
    ++n;
    ++stats_.requests;
    s.issued = true;
    if (la_.enabled) {
      auto it = open_heads_.find(s.paddr >> kBlockShift);
      if (it != open_heads_.end() && it->second == s.seq) open_heads_.erase(it);
    }
    const Cycle load_done = r.status == AccessStatus::Hit ? r.done : kPending;
    s.done = s.kind == SlotKind::Store ? now : load_done;
    resolve(s.seq, now, load_done, true);
  }
}

void Core::complete(std::uint64_t waiter, Cycle t) {
  Slot& s = slot(waiter);
  if (s.seq == waiter && s.kind == SlotKind::Load && s.done == kPending) s.done = t;
  resolve(waiter, t, t, false);
}

void Core::tick(Cycle now, CacheHierarchy& mem) {
  if (finished_) return;
  for (unsigned r = 0; r < cfg_.retire_width && head_ < tail_; ++r) {
    Slot& s = slot(head_);
    if (s.done == kPending || s.done > now) break;
    ++head_;
    ++stats_.retired;
  }
  dispatch(now, mem);
  for (unsigned f = 0; f < cfg_.fetch_width; ++f)
    if (!fetch_one(now)) break;
  if (head_ == tail_ && (entry_ >= trace_.size() || fetched_insts_ >= limit_)) {
    finished_ = true;
    cycles_ = now + 1;
  }
}

}  // namespace sdram
