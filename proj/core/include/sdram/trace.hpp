#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdram/types.hpp"

namespace sdram {

/// One memory access preceded by `bubbles` non-memory instructions.
struct TraceEntry {
  std::uint32_t bubbles = 0;
  Addr pc = 0;
  Addr vaddr = 0;
  AccessKind kind = AccessKind::Load;  ///< Load (R) or Store (W)

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

using Trace = std::vector<TraceEntry>;

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads `<bubbles> <pc-hex> <vaddr-hex> <R|W>` lines; `#` lines are comments.
Trace parse_trace(std::istream& in);
Trace load_trace_file(const std::string& path);
void render_trace(const Trace& trace, std::ostream& out);

/// xorshift64* with splitmix64 seeding. Output sequence is part of the trace
/// format contract: generated traces are reproducible across implementations.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

inline constexpr Addr kGeneratorPc = 0x400000;

/// One load to a uniformly random word every five instructions.
Trace gen_random(std::uint64_t seed, std::uint64_t n_accesses, std::uint64_t footprint_bytes);
/// Every word of the region with a 64-byte stride, offset advancing by 8 per sweep.
Trace gen_stride(std::uint64_t n_passes, std::uint64_t region_bytes = 16ull << 20);
/// Eight back-to-back loads to words 0..7 of each consecutive block.
Trace gen_seqwords(std::uint64_t n_blocks);

}  // namespace sdram
