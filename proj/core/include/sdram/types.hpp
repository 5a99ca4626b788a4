#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdram {

using Cycle = std::uint64_t;
using Addr = std::uint64_t;

inline constexpr unsigned kBlockBytes = 64;
inline constexpr unsigned kBlockShift = 6;
inline constexpr unsigned kMaxSectors = 16;

/// Error raised for invalid configuration or out-of-range inputs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Set of sectors (words) of one cache block. Bit i selects sector i.
class SectorMask {
 public:
  constexpr SectorMask() = default;
  constexpr explicit SectorMask(std::uint16_t bits) : bits_(bits) {}

  static constexpr SectorMask full(unsigned sectors = 8) {
    return SectorMask(static_cast<std::uint16_t>(sectors >= 16 ? 0xFFFFu : ((1u << sectors) - 1u)));
  }
  static constexpr SectorMask single(unsigned sector) {
    return SectorMask(static_cast<std::uint16_t>(1u << sector));
  }

  constexpr std::uint16_t bits() const { return bits_; }
  constexpr unsigned popcount() const { return static_cast<unsigned>(std::popcount(bits_)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool any() const { return bits_ != 0; }
  constexpr bool test(unsigned sector) const { return (bits_ >> sector) & 1u; }
  constexpr bool is_subset_of(SectorMask other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool contains(SectorMask other) const { return other.is_subset_of(*this); }
  /// Sectors of *this that are not in `other`.
  constexpr SectorMask without(SectorMask other) const {
    return SectorMask(static_cast<std::uint16_t>(bits_ & ~other.bits_));
  }

  constexpr SectorMask& operator|=(SectorMask o) { bits_ |= o.bits_; return *this; }
  constexpr SectorMask& operator&=(SectorMask o) { bits_ &= o.bits_; return *this; }
  friend constexpr SectorMask operator|(SectorMask a, SectorMask b) {
    return SectorMask(static_cast<std::uint16_t>(a.bits_ | b.bits_));
  }
  friend constexpr SectorMask operator&(SectorMask a, SectorMask b) {
    return SectorMask(static_cast<std::uint16_t>(a.bits_ & b.bits_));
  }
  friend constexpr bool operator==(SectorMask, SectorMask) = default;

 private:
  std::uint16_t bits_ = 0;
};

constexpr unsigned mask_popcount(SectorMask m) { return m.popcount(); }

std::string to_hex(SectorMask m);

struct DramCoordinates {
  std::uint32_t channel = 0;
  std::uint32_t rank = 0;
  std::uint32_t bank = 0;
  std::uint32_t row = 0;
  std::uint32_t column = 0;  ///< cache-block index within the row
  std::uint32_t word = 0;    ///< sector within the block

  friend bool operator==(const DramCoordinates&, const DramCoordinates&) = default;
};

enum class AccessKind : std::uint8_t { Load, Store, Prefetch, Writeback };

constexpr std::string_view to_string(AccessKind k) {
  switch (k) {
    case AccessKind::Load: return "Load";
    case AccessKind::Store: return "Store";
    case AccessKind::Prefetch: return "Prefetch";
    case AccessKind::Writeback: return "Writeback";
  }
  return "?";
}

struct MemoryRequest {
  std::uint64_t id = 0;
  std::uint32_t core = 0;
  Addr pc = 0;
  Addr paddr = 0;
  AccessKind kind = AccessKind::Load;
  SectorMask mask;
  Cycle t_arrive = 0;
  Cycle t_depart = 0;

  Addr block() const { return paddr >> kBlockShift; }
  bool is_read() const { return kind != AccessKind::Writeback; }
};

enum class CommandKind : std::uint8_t { ACT, PRE, RD, RDA, WR, WRA };

constexpr std::string_view to_string(CommandKind k) {
  switch (k) {
    case CommandKind::ACT: return "ACT";
    case CommandKind::PRE: return "PRE";
    case CommandKind::RD: return "RD";
    case CommandKind::RDA: return "RDA";
    case CommandKind::WR: return "WR";
    case CommandKind::WRA: return "WRA";
  }
  return "?";
}

CommandKind command_from_string(std::string_view s);

constexpr bool is_read(CommandKind k) { return k == CommandKind::RD || k == CommandKind::RDA; }
constexpr bool is_write(CommandKind k) { return k == CommandKind::WR || k == CommandKind::WRA; }
constexpr bool is_column(CommandKind k) { return is_read(k) || is_write(k); }
constexpr bool is_auto_precharge(CommandKind k) {
  return k == CommandKind::RDA || k == CommandKind::WRA;
}

struct DramCommand {
  CommandKind kind = CommandKind::ACT;
  DramCoordinates coords;
  SectorMask mask;
  Cycle t_issue = 0;  ///< controller clock cycle

  friend bool operator==(const DramCommand&, const DramCommand&) = default;
};

enum class Mode : std::uint8_t { Baseline, SectoredBasic, SectoredLA, SectoredLASP, Dynamic };

std::string_view to_string(Mode m);
/// Accepts the CLI spellings (baseline|basic|la|lasp|dynamic).
Mode mode_from_string(std::string_view s);

constexpr bool is_sectored(Mode m) { return m != Mode::Baseline; }
constexpr bool uses_lookahead(Mode m) {
  return m == Mode::SectoredLA || m == Mode::SectoredLASP || m == Mode::Dynamic;
}
constexpr bool uses_predictor(Mode m) {
  return m == Mode::SectoredLASP || m == Mode::Dynamic;
}

}  // namespace sdram
