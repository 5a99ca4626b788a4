#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "sdram/config.hpp"
#include "sdram/predictor.hpp"
#include "sdram/prefetcher.hpp"
#include "sdram/types.hpp"

namespace sdram {

struct CacheBlockMeta {
  bool present = false;
  Addr block = 0;
  SectorMask valid;
  SectorMask dirty;
  SectorMask used;       ///< L1 only
  SectorMask predicted;  ///< sectors fetched only because of the predictor (L1 only)
  std::uint32_t sht_index = 0;
  bool sht_valid = false;
  bool prefetched = false;  ///< L3 only: filled by a prefetch and not yet demanded
  std::uint64_t stamp = 0;  ///< LRU age
};

enum class LookupOutcome : std::uint8_t { SectorHit, SectorMiss, CacheMiss };

struct LevelStats {
  std::uint64_t hits = 0;
  std::uint64_t sector_misses = 0;
  std::uint64_t misses = 0;
  std::uint64_t mshr_hits = 0;  ///< L1: merged into an in-flight fetch that already covers the request
  std::uint64_t evictions = 0;
  std::uint64_t writebacks = 0;

  std::uint64_t accesses() const { return hits + sector_misses + misses + mshr_hits; }
};

/// One set-associative, sectored, LRU cache level.
class CacheLevel {
 public:
  explicit CacheLevel(const CacheLevelConfig& cfg);

  CacheBlockMeta* find(Addr block);
  const CacheBlockMeta* find(Addr block) const;
  /// An empty way of the block's set, else its LRU way (still holding the old block).
  CacheBlockMeta& victim(Addr block);
  void touch(CacheBlockMeta& line) { line.stamp = ++clock_; }
  std::uint64_t set_of(Addr block) const { return block % sets_; }
  LookupOutcome classify(Addr block, SectorMask mask) const;

  const CacheLevelConfig& config() const { return cfg_; }
  LevelStats& stats() { return stats_; }
  const LevelStats& stats() const { return stats_; }

 private:
  CacheLevelConfig cfg_;
  std::uint64_t sets_;
  std::vector<CacheBlockMeta> lines_;
  std::uint64_t clock_ = 0;
  LevelStats stats_;
};

/// What a core hands to its L1 when a memory slot dispatches.
struct AccessInfo {
  std::uint64_t waiter = 0;  ///< reported back on completion
  Addr pc = 0;
  Addr paddr = 0;
  SectorMask mask;        ///< every word the slot (and the slots it subsumed) references
  SectorMask store_mask;  ///< words written
};

enum class AccessStatus : std::uint8_t { Hit, Miss, Stall };

struct AccessResult {
  AccessStatus status = AccessStatus::Hit;
  Cycle done = 0;  ///< valid for Hit
};

/// Where requests leave the cache hierarchy.
class MemoryPort {
 public:
  virtual ~MemoryPort() = default;
  /// Sends a demand read or writeback that becomes visible to the controller at `ready`.
  virtual void send(const MemoryRequest& req, Cycle ready) = 0;
  /// Sends a prefetch unless the target read queue is full; returns false if dropped.
  virtual bool try_prefetch(const MemoryRequest& req, Cycle ready) = 0;
};

struct HierarchyOptions {
  bool sectored_fetch = true;  ///< false: every fetch and writeback is a whole block
  bool predictor = true;
};

/// Private L1/L2 per core, shared L3, L1 MSHRs, per-core Sector History Tables,
/// and the LLC prefetcher. Times are CPU cycles.
class CacheHierarchy {
 public:
  using CompletionFn = std::function<void(unsigned core, std::uint64_t waiter, Cycle t)>;
  /// Observes every L1 fetch as it leaves for L2: demand mask and fetched mask.
  using FetchObserver = std::function<void(unsigned core, Addr block, SectorMask demand, SectorMask fetch)>;
  /// Dynamic mode: false while sectored operation is off for the block's channel.
  using SectorGate = std::function<bool(Addr block)>;

  CacheHierarchy(const SimConfig& cfg, HierarchyOptions opt, MemoryPort& port);

  AccessResult access(unsigned core, const AccessInfo& a, Cycle now);
  /// Runs every internal event due at or before `now`.
  void process(Cycle now);
  /// A DRAM read finished; its data reaches the L3 at `t`.
  void dram_fill(const MemoryRequest& req, Cycle t);
  /// Applies this cycle's surviving predictor updates.
  void commit_predictors();
  Cycle next_event() const;

  void set_completion(CompletionFn fn) { complete_ = std::move(fn); }
  void set_fetch_observer(FetchObserver fn) { fetch_obs_ = std::move(fn); }
  void set_sector_gate(SectorGate fn) { gate_ = std::move(fn); }

  const CacheLevel& l1(unsigned core) const { return l1_[core]; }
  const CacheLevel& l2(unsigned core) const { return l2_[core]; }
  const CacheLevel& l3() const { return l3_; }
  const SectorHistoryTable& sht(unsigned core) const { return sht_[core]; }
  const PrefetchStats& prefetch_stats() const { return pf_stats_; }
  unsigned mshrs_in_use(unsigned core) const;
  std::uint64_t dram_reads_sent() const { return dram_reads_; }
  std::uint64_t dram_writes_sent() const { return dram_writes_; }

 private:
  struct Waiter {
    std::uint64_t id;
    SectorMask demand;
    SectorMask need;
  };
  struct Mshr {
    bool valid = false;
    std::uint64_t gen = 0;
    Addr block = 0;
    Addr pc = 0;
    SectorMask fetch;
    SectorMask demand;  ///< demand words of the allocating access
    SectorMask predicted;
    bool issued = false;
    bool sht_valid = false;
    std::uint32_t sht_index = 0;
    std::vector<Waiter> waiters;
  };
  enum class EventKind : std::uint8_t { L2Lookup, L3Lookup, FillUp, DramFill };
  struct Event {
    Cycle t;
    std::uint64_t seq;
    EventKind kind;
    unsigned core;
    unsigned mshr;
    std::uint64_t gen;
    SectorMask extra;
    std::uint64_t dram_id;
    bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
  };
  struct L3Waiter {
    unsigned core;
    unsigned mshr;
    std::uint64_t gen;
  };
  struct L3Pending {
    SectorMask inflight;
    unsigned outstanding = 0;
    std::vector<L3Waiter> waiters;
  };
  struct DramPending {
    Addr block;
    SectorMask mask;
    bool prefetch;
  };

  void schedule(Event e);
  Mshr* mshr_for(unsigned core, Addr block);
  int free_mshr(unsigned core) const;

  void on_l2_lookup(const Event& e);
  void on_l3_lookup(const Event& e);
  void on_fill_up(const Event& e);
  void on_dram_fill(const Event& e);
  void issue_prefetches(Addr block, SectorMask mask, bool hit, Cycle t);
  void send_read(Addr block, SectorMask mask, AccessKind kind, unsigned core, Cycle ready);
  void check_l3_waiters(Addr block, SectorMask returned, Cycle t);

  CacheBlockMeta& ensure_l3(Addr block, SectorMask mask);
  CacheBlockMeta& ensure_l2(unsigned core, Addr block, SectorMask mask);
  CacheBlockMeta& ensure_l1(unsigned core, Addr block, SectorMask mask);
  void evict_l1(unsigned core, CacheBlockMeta& line);
  void evict_l2(unsigned core, CacheBlockMeta& line);
  void evict_l3(CacheBlockMeta& line);
  void write_back(Addr block, SectorMask dirty);

  const SimConfig cfg_;
  HierarchyOptions opt_;
  MemoryPort& port_;
  SectorMask full_;
  std::vector<CacheLevel> l1_;
  std::vector<CacheLevel> l2_;
  CacheLevel l3_;
  std::vector<SectorHistoryTable> sht_;
  std::vector<std::vector<Mshr>> mshrs_;
  std::optional<StridePrefetcher> prefetcher_;
  PrefetchStats pf_stats_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t event_seq_ = 0;
  std::uint64_t mshr_gen_ = 0;
  std::unordered_map<Addr, L3Pending> l3_pending_;
  std::unordered_map<std::uint64_t, DramPending> dram_pending_;
  std::uint64_t next_req_id_ = 1;
  std::uint64_t dram_reads_ = 0;
  std::uint64_t dram_writes_ = 0;
  Cycle now_ = 0;
  CompletionFn complete_;
  FetchObserver fetch_obs_;
  SectorGate gate_;
};

}  // namespace sdram
