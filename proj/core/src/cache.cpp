#include "sdram/cache.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdram {

CacheLevel::CacheLevel(const CacheLevelConfig& cfg) : cfg_(cfg), sets_(cfg.sets()) {
  if (sets_ == 0) throw ConfigError("cache level with zero sets");
  lines_.resize(sets_ * cfg.ways);
}

CacheBlockMeta* CacheLevel::find(Addr block) {
  auto* base = &lines_[set_of(block) * cfg_.ways];
  for (unsigned w = 0; w < cfg_.ways; ++w)
    if (base[w].present && base[w].block == block) return &base[w];
  return nullptr;
}

const CacheBlockMeta* CacheLevel::find(Addr block) const {
  return const_cast<CacheLevel*>(this)->find(block);
}

CacheBlockMeta& CacheLevel::victim(Addr block) {
  auto* base = &lines_[set_of(block) * cfg_.ways];
  CacheBlockMeta* lru = base;
  for (unsigned w = 0; w < cfg_.ways; ++w) {
    if (!base[w].present) return base[w];
    if (base[w].stamp < lru->stamp) lru = &base[w];
  }
  return *lru;
}

LookupOutcome CacheLevel::classify(Addr block, SectorMask mask) const {
  const CacheBlockMeta* line = find(block);
  if (!line) return LookupOutcome::CacheMiss;
  return mask.is_subset_of(line->valid) ? LookupOutcome::SectorHit : LookupOutcome::SectorMiss;
}

CacheHierarchy::CacheHierarchy(const SimConfig& cfg, HierarchyOptions opt, MemoryPort& port)
    : cfg_(cfg), opt_(opt), port_(port), full_(cfg.full_mask()), l3_(cfg.l3) {
  for (unsigned c = 0; c < cfg.cores; ++c) {
    l1_.emplace_back(cfg.l1);
    l2_.emplace_back(cfg.l2);
    sht_.emplace_back(cfg.sht_entries, full_);
    mshrs_.emplace_back(cfg.mshrs_per_core);
  }
  if (cfg.prefetcher)
    prefetcher_.emplace(cfg.prefetch_table_entries, cfg.prefetch_degree, cfg.prefetch_distance);
}

void CacheHierarchy::schedule(Event e) {
  e.seq = event_seq_++;
  events_.push(e);
}

Cycle CacheHierarchy::next_event() const { return events_.empty() ? ~Cycle{0} : events_.top().t; }

unsigned CacheHierarchy::mshrs_in_use(unsigned core) const {
  return static_cast<unsigned>(
      std::count_if(mshrs_[core].begin(), mshrs_[core].end(), [](const Mshr& m) { return m.valid; }));
}

CacheHierarchy::Mshr* CacheHierarchy::mshr_for(unsigned core, Addr block) {
  for (auto& m : mshrs_[core])
    if (m.valid && m.block == block) return &m;
  return nullptr;
}

int CacheHierarchy::free_mshr(unsigned core) const {
  for (std::size_t i = 0; i < mshrs_[core].size(); ++i)
    if (!mshrs_[core][i].valid) return static_cast<int>(i);
  return -1;
}

// ---- fills and evictions -------------------------------------------------

void CacheHierarchy::write_back(Addr block, SectorMask dirty) {
  MemoryRequest req;
  req.id = next_req_id_++;
  req.paddr = block << kBlockShift;
  req.kind = AccessKind::Writeback;
  req.mask = opt_.sectored_fetch ? dirty : full_;
  ++dram_writes_;
  port_.send(req, now_);
}

void CacheHierarchy::evict_l1(unsigned core, CacheBlockMeta& line) {
  CacheLevel& l1 = l1_[core];
  ++l1.stats().evictions;
  if (line.dirty.any()) {
    ++l1.stats().writebacks;
    if (CacheBlockMeta* l2 = l2_[core].find(line.block)) {
      l2->dirty |= line.dirty;
      l2->valid |= line.dirty;
    } else if (CacheBlockMeta* l3 = l3_.find(line.block)) {
      l3->dirty |= line.dirty;
      l3->valid |= line.dirty;
    } else {
      write_back(line.block, line.dirty);
    }
  }
  if (opt_.predictor && line.sht_valid) {
    sht_[core].stage_update(line.sht_index, line.used, l1.set_of(line.block));
    sht_[core].stats().unused_predicted += line.predicted.without(line.used).popcount();
  }
  line.present = false;
}

void CacheHierarchy::evict_l2(unsigned core, CacheBlockMeta& line) {
  if (CacheBlockMeta* up = l1_[core].find(line.block)) evict_l1(core, *up);
  CacheLevel& l2 = l2_[core];
  ++l2.stats().evictions;
  if (line.dirty.any()) {
    ++l2.stats().writebacks;
    if (CacheBlockMeta* l3 = l3_.find(line.block)) {
      l3->dirty |= line.dirty;
      l3->valid |= line.dirty;
    } else {
      write_back(line.block, line.dirty);
    }
  }
  line.present = false;
}

void CacheHierarchy::evict_l3(CacheBlockMeta& line) {
  for (unsigned c = 0; c < cfg_.cores; ++c) {
    if (CacheBlockMeta* up = l2_[c].find(line.block)) evict_l2(c, *up);
    else if (CacheBlockMeta* top = l1_[c].find(line.block)) evict_l1(c, *top);
  }
  ++l3_.stats().evictions;
  if (line.prefetched) ++pf_stats_.useless;
  if (line.dirty.any()) {
    ++l3_.stats().writebacks;
    write_back(line.block, line.dirty);
  }
  line.present = false;
}

CacheBlockMeta& CacheHierarchy::ensure_l3(Addr block, SectorMask mask) {
  CacheBlockMeta* line = l3_.find(block);
  if (!line) {
    line = &l3_.victim(block);
    if (line->present) evict_l3(*line);
    *line = CacheBlockMeta{};
    line->present = true;
    line->block = block;
  }
  line->valid |= mask;
  l3_.touch(*line);
  return *line;
}

CacheBlockMeta& CacheHierarchy::ensure_l2(unsigned core, Addr block, SectorMask mask) {
  CacheLevel& l2 = l2_[core];
  CacheBlockMeta* line = l2.find(block);
  if (!line) {
    line = &l2.victim(block);
    if (line->present) evict_l2(core, *line);
    *line = CacheBlockMeta{};
    line->present = true;
    line->block = block;
  }
  line->valid |= mask;
  l2.touch(*line);
  return *line;
}

CacheBlockMeta& CacheHierarchy::ensure_l1(unsigned core, Addr block, SectorMask mask) {
  CacheLevel& l1 = l1_[core];
  CacheBlockMeta* line = l1.find(block);
  if (!line) {
    line = &l1.victim(block);
    if (line->present) evict_l1(core, *line);
    *line = CacheBlockMeta{};
    line->present = true;
    line->block = block;
  }
  line->valid |= mask;
  l1.touch(*line);
  return *line;
}

// ---- demand path ---------------------------------------------------------

AccessResult CacheHierarchy::access(unsigned core, const AccessInfo& a, Cycle now) {
  now_ = now;
  const Addr block = a.paddr >> kBlockShift;
  const unsigned word = static_cast<unsigned>((a.paddr >> 3) & (cfg_.sectors_per_block - 1));
  const SectorMask m = a.mask;
  const SectorMask s = a.store_mask;
  CacheLevel& l1 = l1_[core];
  CacheBlockMeta* line = l1.find(block);
  Mshr* inflight = mshr_for(core, block);
  const bool had_line = line != nullptr;
  const SectorMask valid_after = (line ? line->valid : SectorMask{}) | s;

  const std::uint32_t idx = sht_index(a.pc, word, cfg_.sht_entries);
  const bool sectored = opt_.sectored_fetch && (!gate_ || gate_(block));
  SectorMask fetch;
  SectorMask pred;
  if (!inflight && !m.is_subset_of(valid_after)) {
    if (!sectored) {
      fetch = full_.without(valid_after);
    } else {
      if (opt_.predictor) pred = sht_[core].peek(idx);
      fetch = (m | pred).without(valid_after);
    }
  }
  int slot = -1;
  if (fetch.any()) {
    slot = free_mshr(core);
    if (slot < 0) return AccessResult{AccessStatus::Stall, 0};
  }

  // Stores write-allocate at every level without fetching the stored words.
  if (s.any()) {
    if (!line) {
      ensure_l3(block, s);
      ensure_l2(core, block, s);
      line = &ensure_l1(core, block, s);
      if (opt_.predictor) {
        line->sht_index = idx;
        line->sht_valid = true;
      }
    } else {
      ensure_l3(block, s);
      ensure_l2(core, block, s);
      line->valid |= s;
    }
    line->dirty |= s;
  }

  if (inflight) {
    const SectorMask need = m.without(line ? line->valid : SectorMask{});
    const SectorMask extend = need.without(inflight->fetch);
    if (extend.empty()) {
      ++l1.stats().mshr_hits;
    } else {
      ++l1.stats().sector_misses;
      if (!inflight->issued) inflight->fetch |= extend;
    }
    if (need.empty()) {
      if (line) {
        line->used |= m & line->valid;
        l1.touch(*line);
      }
      return AccessResult{AccessStatus::Hit, now + cfg_.l1.latency};
    }
    inflight->waiters.push_back(Waiter{a.waiter, m, need});
    return AccessResult{AccessStatus::Miss, 0};
  }

  if (m.is_subset_of(valid_after)) {
    ++l1.stats().hits;
    line->used |= m;
    l1.touch(*line);
    return AccessResult{AccessStatus::Hit, now + cfg_.l1.latency};
  }

  ++(had_line ? l1.stats().sector_misses : l1.stats().misses);
  if (fetch.empty()) {
    // Every missing word is being written: nothing to fetch.
    line->used |= m & line->valid;
    return AccessResult{AccessStatus::Hit, now + cfg_.l1.latency};
  }

  Mshr& mshr = mshrs_[core][static_cast<std::size_t>(slot)];
  mshr = Mshr{};
  mshr.valid = true;
  mshr.gen = ++mshr_gen_;
  mshr.block = block;
  mshr.pc = a.pc;
  mshr.fetch = fetch;
  mshr.demand = m;
  if (opt_.predictor && sectored) {
    sht_[core].predict(idx);
    mshr.predicted = fetch.without(m);
    sht_[core].stats().predicted_sectors += mshr.predicted.popcount();
  }
  mshr.sht_valid = opt_.predictor;
  mshr.sht_index = idx;
  mshr.waiters.push_back(Waiter{a.waiter, m, m.without(valid_after)});

  Event e{};
  e.t = now + cfg_.l1.latency;
  e.kind = EventKind::L2Lookup;
  e.core = core;
  e.mshr = static_cast<unsigned>(slot);
  e.gen = mshr.gen;
  schedule(e);
  return AccessResult{AccessStatus::Miss, 0};
}

void CacheHierarchy::process(Cycle now) {
  while (!events_.empty() && events_.top().t <= now) {
    const Event e = events_.top();
    events_.pop();
    now_ = e.t;
    switch (e.kind) {
      case EventKind::L2Lookup: on_l2_lookup(e); break;
      case EventKind::L3Lookup: on_l3_lookup(e); break;
      case EventKind::FillUp: on_fill_up(e); break;
      case EventKind::DramFill: on_dram_fill(e); break;
    }
  }
  now_ = now;
}

void CacheHierarchy::on_l2_lookup(const Event& e) {
  Mshr& m = mshrs_[e.core][e.mshr];
  if (!m.valid || m.gen != e.gen) return;
  m.issued = true;
  if (fetch_obs_) fetch_obs_(e.core, m.block, m.demand, m.fetch);
  CacheLevel& l2 = l2_[e.core];
  CacheBlockMeta* line = l2.find(m.block);
  Event next = e;
  if (line && m.fetch.is_subset_of(line->valid)) {
    ++l2.stats().hits;
    l2.touch(*line);
    next.kind = EventKind::FillUp;
  } else {
    ++(line ? l2.stats().sector_misses : l2.stats().misses);
    next.kind = EventKind::L3Lookup;
  }
  next.t = e.t + cfg_.l2.latency;
  schedule(next);
}

void CacheHierarchy::on_l3_lookup(const Event& e) {
  Mshr& m = mshrs_[e.core][e.mshr];
  if (!m.valid || m.gen != e.gen) return;
  CacheBlockMeta* line = l3_.find(m.block);
  const bool hit = line && m.fetch.is_subset_of(line->valid);
  if (line && line->prefetched) {
    line->prefetched = false;
    ++pf_stats_.useful;
  }
  const Cycle ready = e.t + cfg_.l3.latency;
  if (hit) {
    ++l3_.stats().hits;
    l3_.touch(*line);
    Event next = e;
    next.kind = EventKind::FillUp;
    next.t = ready;
    schedule(next);
  } else {
    ++(line ? l3_.stats().sector_misses : l3_.stats().misses);
    const SectorMask need = m.fetch.without(line ? line->valid : SectorMask{});
    L3Pending& p = l3_pending_[m.block];
    p.waiters.push_back(L3Waiter{e.core, e.mshr, e.gen});
    const SectorMask residual = need.without(p.inflight);
    if (residual.any()) {
      p.inflight |= residual;
      ++p.outstanding;
      send_read(m.block, residual, AccessKind::Load, e.core, ready);
    }
  }
  if (prefetcher_) issue_prefetches(m.block, m.fetch, hit, ready);
}

void CacheHierarchy::send_read(Addr block, SectorMask mask, AccessKind kind, unsigned core, Cycle ready) {
  MemoryRequest req;
  req.id = next_req_id_++;
  req.core = core;
  req.paddr = block << kBlockShift;
  req.kind = kind;
  req.mask = opt_.sectored_fetch ? mask : full_;
  dram_pending_[req.id] = DramPending{block, req.mask, kind == AccessKind::Prefetch};
  ++dram_reads_;
  port_.send(req, ready);
}

void CacheHierarchy::issue_prefetches(Addr block, SectorMask mask, bool hit, Cycle ready) {
  for (Addr target : prefetcher_->observe(block, hit)) {
    const CacheBlockMeta* line = l3_.find(target);
    if (line && mask.is_subset_of(line->valid)) continue;
    if (l3_pending_.count(target)) continue;
    MemoryRequest req;
    req.id = next_req_id_++;
    req.paddr = target << kBlockShift;
    req.kind = AccessKind::Prefetch;
    req.mask = opt_.sectored_fetch ? mask : full_;
    if (!port_.try_prefetch(req, ready)) continue;
    ++pf_stats_.issued;
    ++dram_reads_;
    dram_pending_[req.id] = DramPending{target, req.mask, true};
    L3Pending& p = l3_pending_[target];
    p.inflight |= req.mask;
    ++p.outstanding;
  }
}

void CacheHierarchy::dram_fill(const MemoryRequest& req, Cycle t) {
  Event e{};
  e.t = t;
  e.kind = EventKind::DramFill;
  e.dram_id = req.id;
  e.extra = req.mask;
  schedule(e);
}

void CacheHierarchy::on_dram_fill(const Event& e) {
  auto it = dram_pending_.find(e.dram_id);
  if (it == dram_pending_.end()) return;
  const DramPending d = it->second;
  dram_pending_.erase(it);
  const SectorMask returned = e.extra;
  const bool was_present = l3_.find(d.block) != nullptr;
  CacheBlockMeta& line = ensure_l3(d.block, returned);
  if (d.prefetch && !was_present) line.prefetched = true;
  check_l3_waiters(d.block, returned, e.t);
}

void CacheHierarchy::check_l3_waiters(Addr block, SectorMask returned, Cycle t) {
  auto it = l3_pending_.find(block);
  if (it == l3_pending_.end()) return;
  L3Pending& p = it->second;
  if (p.outstanding) --p.outstanding;
  p.inflight = p.inflight.without(returned);
  if (p.outstanding == 0) p.inflight = SectorMask{};
  const CacheBlockMeta* line = l3_.find(block);
  std::vector<L3Waiter> keep;
  for (const L3Waiter& w : p.waiters) {
    Mshr& m = mshrs_[w.core][w.mshr];
    if (!m.valid || m.gen != w.gen) continue;
    if (line && m.fetch.is_subset_of(line->valid)) {
      Event f{};
      f.t = t;
      f.kind = EventKind::FillUp;
      f.core = w.core;
      f.mshr = w.mshr;
      f.gen = w.gen;
      f.extra = returned;
      schedule(f);
    } else {
      keep.push_back(w);
    }
  }
  p.waiters = std::move(keep);
  if (p.outstanding == 0 && !p.waiters.empty()) {
    // The block left the L3 while its fill was in flight: fetch what is still missing.
    SectorMask need;
    for (const L3Waiter& w : p.waiters) need |= mshrs_[w.core][w.mshr].fetch;
    if (line) need = need.without(line->valid);
    p.inflight = need;
    p.outstanding = 1;
    send_read(block, need, AccessKind::Load, p.waiters.front().core, t);
  }
  if (p.outstanding == 0 && p.waiters.empty()) l3_pending_.erase(it);
}

void CacheHierarchy::on_fill_up(const Event& e) {
  Mshr& m = mshrs_[e.core][e.mshr];
  if (!m.valid || m.gen != e.gen) return;
  const SectorMask mask = m.fetch | e.extra;
  ensure_l3(m.block, mask);
  ensure_l2(e.core, m.block, mask);
  CacheLevel& l1 = l1_[e.core];
  const bool allocate = l1.find(m.block) == nullptr;
  CacheBlockMeta& line = ensure_l1(e.core, m.block, mask);
  if (allocate) {
    line.used = SectorMask{};
    line.predicted = m.predicted;
    line.sht_valid = m.sht_valid;
    line.sht_index = m.sht_index;
  } else {
    line.predicted |= m.predicted.without(line.used);
  }
  m.predicted = SectorMask{};

  SectorMask residual;
  std::vector<Waiter> keep;
  for (const Waiter& w : m.waiters) {
    if (w.need.is_subset_of(line.valid)) {
      line.used |= w.demand & line.valid;
      if (complete_) complete_(e.core, w.id, e.t);
    } else {
      residual |= w.need.without(line.valid);
      keep.push_back(w);
    }
  }
  if (keep.empty()) {
    m.valid = false;
    return;
  }
  // Words requested after the fetch left L1 follow as a second fetch.
  m.waiters = std::move(keep);
  m.fetch = residual;
  m.demand = residual;
  m.issued = false;
  m.gen = ++mshr_gen_;
  Event next{};
  next.t = e.t;
  next.kind = EventKind::L2Lookup;
  next.core = e.core;
  next.mshr = e.mshr;
  next.gen = m.gen;
  schedule(next);
}

void CacheHierarchy::commit_predictors() {
  for (auto& t : sht_) t.commit();
}

}  // namespace sdram
