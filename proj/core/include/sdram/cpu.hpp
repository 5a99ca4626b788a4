#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "sdram/cache.hpp"
#include "sdram/config.hpp"
#include "sdram/trace.hpp"
#include "sdram/types.hpp"

namespace sdram {

struct LookaheadConfig {
  bool enabled = false;
  unsigned depth = 128;  ///< memory entries compared against each new entry
};

struct CoreStats {
  std::uint64_t retired = 0;
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t requests = 0;  ///< memory slots dispatched to L1
  std::uint64_t subsumed = 0;  ///< memory slots merged into an older slot
  std::uint64_t mshr_stall_cycles = 0;
};

/// Trace-driven out-of-order window with in-order retire and LSQ Lookahead.
class Core {
 public:
  Core(unsigned id, const SimConfig& cfg, const Trace& trace, LookaheadConfig la);

  /// Retire, dispatch, then fetch for cycle `now`.
  void tick(Cycle now, CacheHierarchy& mem);
  /// The request dispatched by memory slot `waiter` has its data at `t`.
  void complete(std::uint64_t waiter, Cycle t);

  bool finished() const { return finished_; }
  Cycle cycles() const { return cycles_; }
  double ipc() const { return cycles_ ? static_cast<double>(stats_.retired) / cycles_ : 0.0; }
  const CoreStats& stats() const { return stats_; }
  unsigned id() const { return id_; }
  std::size_t window_occupancy() const { return static_cast<std::size_t>(tail_ - head_); }
  /// Physical address the core uses for a trace address.
  Addr translate(Addr vaddr) const;

 private:
  enum class SlotKind : std::uint8_t { NonMem, Load, Store };
  struct Slot {
    std::uint64_t seq = 0;
    SlotKind kind = SlotKind::NonMem;
    Cycle fetched = 0;
    Cycle done = 0;
    std::uint64_t mem_seq = 0;
    Addr pc = 0;
    Addr paddr = 0;
    SectorMask mask;
    SectorMask store_mask;
    bool issued = false;
  };
  struct Dependent {
    std::uint64_t seq;
    bool store;
  };
  struct VirtualHead {
    Cycle done = ~Cycle{0};
    bool dispatched = false;
    unsigned refs = 0;
  };

  Slot& slot(std::uint64_t seq) { return window_[seq % window_.size()]; }
  bool fetch_one(Cycle now);
  void dispatch(Cycle now, CacheHierarchy& mem);
  void decode_ahead(Slot& head);
  void resolve(std::uint64_t head_seq, Cycle store_done, Cycle load_done, bool at_dispatch);

  unsigned id_;
  const SimConfig& cfg_;
  const Trace& trace_;
  LookaheadConfig la_;
  Addr offset_;
  Addr capacity_;
  std::vector<Slot> window_;
  std::uint64_t head_ = 0;  ///< oldest in-flight instruction
  std::uint64_t tail_ = 0;  ///< next instruction sequence number
  std::size_t entry_ = 0;   ///< next trace entry
  std::uint32_t bubbles_done_ = 0;
  std::uint64_t fetched_insts_ = 0;
  std::uint64_t limit_;
  std::uint64_t mem_seq_ = 0;
  std::deque<std::uint64_t> ready_heads_;
  std::unordered_map<Addr, std::uint64_t> open_heads_;  ///< block -> unissued head seq
  std::unordered_map<std::uint64_t, std::vector<Dependent>> deps_;
  // Decode-ahead beyond the physical window (depth > window size).
  std::size_t ahead_entry_ = 0;
  std::uint64_t ahead_mem_seq_ = 0;
  std::unordered_map<std::size_t, std::uint64_t> claimed_;  ///< trace index -> head seq
  std::unordered_map<std::uint64_t, VirtualHead> virtual_heads_;
  bool finished_ = false;
  Cycle cycles_ = 0;
  CoreStats stats_;
};

}  // namespace sdram
