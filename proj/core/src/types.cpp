#include "sdram/types.hpp"

#include <cstdio>

namespace sdram {

std::string to_hex(SectorMask m) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02x", m.bits());
  return buf;
}

CommandKind command_from_string(std::string_view s) {
  for (auto k : {CommandKind::ACT, CommandKind::PRE, CommandKind::RD, CommandKind::RDA,
                 CommandKind::WR, CommandKind::WRA}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown DRAM command '" + std::string(s) + "'");
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Baseline: return "baseline";
    case Mode::SectoredBasic: return "basic";
    case Mode::SectoredLA: return "la";
    case Mode::SectoredLASP: return "lasp";
    case Mode::Dynamic: return "dynamic";
  }
  return "?";
}

Mode mode_from_string(std::string_view s) {
  for (auto m : {Mode::Baseline, Mode::SectoredBasic, Mode::SectoredLA, Mode::SectoredLASP,
                 Mode::Dynamic}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected baseline|basic|la|lasp|dynamic)");
}

}  // namespace sdram
