#include "sdram/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sdram {

namespace {

bool parse_hex(const std::string& tok, Addr& out) {
  std::string_view s = tok;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

Trace parse_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string b, pc, va, kind, extra;
    if (!(ls >> b >> pc >> va >> kind) || (ls >> extra))
      throw TraceParseError(lineno, "expected '<bubbles> <pc-hex> <vaddr-hex> <R|W>'");
    TraceEntry e;
    std::uint64_t bubbles = 0;
    const auto [p, ec] = std::from_chars(b.data(), b.data() + b.size(), bubbles, 10);
    if (ec != std::errc{} || p != b.data() + b.size() || bubbles > UINT32_MAX)
      throw TraceParseError(lineno, "bad bubble count '" + b + "'");
    e.bubbles = static_cast<std::uint32_t>(bubbles);
    if (!parse_hex(pc, e.pc)) throw TraceParseError(lineno, "bad pc '" + pc + "'");
    if (!parse_hex(va, e.vaddr)) throw TraceParseError(lineno, "bad address '" + va + "'");
    e.vaddr &= ~Addr{7};
    if (kind == "R") {
      e.kind = AccessKind::Load;
    } else if (kind == "W") {
      e.kind = AccessKind::Store;
    } else {
      throw TraceParseError(lineno, "bad access kind '" + kind + "'");
    }
    trace.push_back(e);
  }
  return trace;
}

Trace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return parse_trace(in);
}

void render_trace(const Trace& trace, std::ostream& out) {
  char buf[96];
  for (const auto& e : trace) {
    const int n = std::snprintf(buf, sizeof buf, "%u 0x%llx 0x%llx %c\n", e.bubbles,
                                static_cast<unsigned long long>(e.pc),
                                static_cast<unsigned long long>(e.vaddr),
                                e.kind == AccessKind::Store ? 'W' : 'R');
    out.write(buf, n);
  }
}

Xorshift64Star::Xorshift64Star(std::uint64_t seed) {
  // splitmix64 step; never yields a zero state for xorshift.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  state_ = z ? z : 0x9E3779B97F4A7C15ull;
}

std::uint64_t Xorshift64Star::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1Dull;
}

Trace gen_random(std::uint64_t seed, std::uint64_t n_accesses, std::uint64_t footprint_bytes) {
  if (footprint_bytes < 8 || footprint_bytes % 8 != 0)
    throw ConfigError("random footprint must be a positive multiple of 8");
  Xorshift64Star rng(seed);
  const std::uint64_t words = footprint_bytes / 8;
  Trace t;
  t.reserve(n_accesses);
  for (std::uint64_t i = 0; i < n_accesses; ++i)
    t.push_back({4, kGeneratorPc, (rng.next() % words) * 8, AccessKind::Load});
  return t;
}

Trace gen_stride(std::uint64_t n_passes, std::uint64_t region_bytes) {
  if (region_bytes < kBlockBytes || region_bytes % kBlockBytes != 0)
    throw ConfigError("stride region must be a positive multiple of 64");
  const std::uint64_t blocks = region_bytes / kBlockBytes;
  Trace t;
  t.reserve(n_passes * (region_bytes / 8));
  for (std::uint64_t p = 0; p < n_passes; ++p)
    for (std::uint64_t off = 0; off < kBlockBytes; off += 8)
      for (std::uint64_t b = 0; b < blocks; ++b)
        t.push_back({4, kGeneratorPc, b * kBlockBytes + off, AccessKind::Load});
  return t;
}

Trace gen_seqwords(std::uint64_t n_blocks) {
  Trace t;
  t.reserve(n_blocks * 8);
  for (std::uint64_t b = 0; b < n_blocks; ++b)
    for (std::uint64_t w = 0; w < 8; ++w)
      t.push_back({0, kGeneratorPc, b * kBlockBytes + w * 8, AccessKind::Load});
  return t;
}

}  // namespace sdram
