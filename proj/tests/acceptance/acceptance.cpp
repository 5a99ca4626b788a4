// Acceptance suite: prints PASS/FAIL for each headline criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sdram/address.hpp"
#include "sdram/audit.hpp"
#include "sdram/energy.hpp"
#include "sdram/system.hpp"
#include "sdram/trace.hpp"

using namespace sdram;

namespace {

struct AuditRecord {
  std::string run;
  std::uint64_t commands = 0;
  std::uint64_t violations = 0;
  std::string first_message;
};

std::vector<AuditRecord> g_audits;

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  std::printf("    ");
  std::vprintf(fmt, ap);
  std::printf("\n");
  va_end(ap);
  std::fflush(stdout);
}

SimConfig config(Mode m, unsigned cores) {
  SimConfig cfg;
  cfg.mode = m;
  cfg.cores = cores;
  return cfg;
}

void record_audit(const std::string& name, const AuditResult& a) {
  g_audits.push_back({name, a.commands, a.violations, a.messages.empty() ? "" : a.messages.front()});
}

/// Runs and records the in-line audit of every channel.
SimResult run(const std::string& name, const SimConfig& cfg, const Trace& t, RunOptions opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  SimResult r = simulate(cfg, {t}, opt);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (std::size_t c = 0; c < r.channels.size(); ++c)
    record_audit(name + (r.channels.size() > 1 ? ".ch" + std::to_string(c) : ""), r.channels[c].audit);
  note("%-28s %-8s cores=%u cycles=%llu ipc=%.4f bus_bytes=%llu (%.1fs)", name.c_str(),
       std::string(to_string(cfg.mode)).c_str(), cfg.cores, static_cast<unsigned long long>(r.cycles),
       r.ipc_total(), static_cast<unsigned long long>(r.bus_bytes()), s);
  return r;
}

/// Same as run(), and additionally re-audits the serialized command log.
SimResult run_logged(const std::string& name, const SimConfig& cfg, const Trace& t, AuditResult* log_audit = nullptr) {
  std::ostringstream log;
  RunOptions opt;
  opt.command_logs = {&log};
  SimResult r = run(name, cfg, t, opt);
  std::istringstream in(log.str());
  const AuditResult a = audit_commands(parse_command_log(in, cfg.tck_ns()), AuditRules::from(cfg));
  record_audit(name + ".log", a);
  if (log_audit) *log_audit = a;
  return r;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

bool rel_eq(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::fabs(b); }

// One-word loads that cycle through the 16 banks of rank 0, each to a random row,
// so every access is a row conflict.
Trace bank_thrash(std::uint64_t seed, std::size_t n) {
  SimConfig cfg;
  std::mt19937_64 rng(seed);
  Trace t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    DramCoordinates c;
    c.bank = static_cast<std::uint32_t>(i % cfg.banks_per_rank);
    c.row = static_cast<std::uint32_t>(rng() % 4096);
    c.column = static_cast<std::uint32_t>(rng() % cfg.blocks_per_row());
    c.word = static_cast<std::uint32_t>(rng() % cfg.sectors_per_block);
    t.push_back({0, kGeneratorPc, recompose_address(c, cfg), AccessKind::Load});
  }
  return t;
}

// ---------------------------------------------------------------------------

bool criterion1() {
  const double e = 2112.0;
  const EnergyConstants k;
  const double rd = scale(e, k.r_rd, 1) / e;
  const double wr = scale(e, k.r_wr, 1) / e;
  const double act = scale(e, k.r_act, 8);
  const double overhead = act * k.sa_overhead / act;
  note("rd %.15f  wr %.15f  act overhead %.15f", rd, wr, overhead);
  return rel_eq(rd, 0.300, 1e-12) && rel_eq(wr, 0.294, 1e-12) && rel_eq(overhead, 1.0026, 1e-12);
}

bool criterion2() {
  const Trace t = bank_thrash(11, 20000);
  AuditResult sect, base;
  run_logged("bank_thrash", config(Mode::SectoredBasic, 8), t, &sect);
  run_logged("bank_thrash", config(Mode::Baseline, 8), t, &base);
  note("basic: max ACTs/window %u, one-sector ACTs/window %u, sectors/window %u", sect.max_acts_in_window,
       sect.max_single_sector_acts_in_window, sect.max_sectors_in_window);
  note("baseline: max ACTs/window %u", base.max_acts_in_window);
  return sect.max_single_sector_acts_in_window == 10 && sect.max_acts_in_window <= 10 &&
         base.max_acts_in_window <= 4 && sect.clean() && base.clean();
}

// Random results are shared by criteria 3, 7 and 9.
struct RandomRuns {
  bool done = false;
  SimResult base1, sect1, base8, sect8;
};
RandomRuns g_random;

const Trace& random_trace() {
  static const Trace t = gen_random(1, 1'000'000, 1ull << 30);
  return t;
}

RandomRuns& random_runs(bool need_single) {
  if (!g_random.done) {
    g_random.base8 = run("random", config(Mode::Baseline, 8), random_trace());
    g_random.sect8 = run("random", config(Mode::SectoredLASP, 8), random_trace());
    g_random.done = true;
  }
  if (need_single && g_random.base1.cycles == 0) {
    g_random.base1 = run("random", config(Mode::Baseline, 1), random_trace());
    g_random.sect1 = run("random", config(Mode::SectoredLASP, 1), random_trace());
  }
  return g_random;
}

// Normalized parallel speedup: (B1 / S_n) / (B1 / B_n) = B_n / S_n.
double normalized(const SimResult& base, const SimResult& sect) {
  return static_cast<double>(base.cycles) / static_cast<double>(sect.cycles);
}

bool criterion3() {
  auto& r = random_runs(true);
  const double n1 = normalized(r.base1, r.sect1);
  const double n8 = normalized(r.base8, r.sect8);
  note("normalized speedup 1 core %.3f (want [0.95, 1.3]), 8 cores %.3f (want [1.4, 2.2])", n1, n8);
  return within(n1, 0.95, 1.3) && within(n8, 1.4, 2.2);
}

bool criterion4() {
  const Trace t = gen_stride(1);
  const auto b1 = run("stride", config(Mode::Baseline, 1), t);
  const auto s1 = run("stride", config(Mode::SectoredLASP, 1), t);
  const auto b8 = run("stride", config(Mode::Baseline, 8), t);
  const auto s8 = run("stride", config(Mode::SectoredLASP, 8), t);
  const double n1 = normalized(b1, s1);
  const double n8 = normalized(b8, s8);
  note("normalized speedup 1 core %.3f (want [0.55, 0.90]), 8 cores %.3f (want >= 0.90)", n1, n8);
  note("llc mpki baseline %.2f sectored %.2f", b1.llc_mpki(), s1.llc_mpki());
  return within(n1, 0.55, 0.90) && n8 >= 0.90;
}

bool criterion5() {
  const std::uint64_t blocks = 10000;
  const Trace t = gen_seqwords(blocks);
  // Basic: the first word of each block misses, the other seven are sector misses.
  // Lookahead merges the eight words into one request per block.
  const auto basic = run_logged("seqwords", config(Mode::SectoredBasic, 1), t);
  const auto la = run_logged("seqwords", config(Mode::SectoredLA, 1), t);
  const auto& bc = basic.cores[0];
  const auto& lc = la.cores[0];
  note("basic: misses %llu sector misses %llu; la: misses %llu sector misses %llu requests %llu",
       static_cast<unsigned long long>(bc.l1.misses), static_cast<unsigned long long>(bc.l1.sector_misses),
       static_cast<unsigned long long>(lc.l1.misses), static_cast<unsigned long long>(lc.l1.sector_misses),
       static_cast<unsigned long long>(lc.stats.requests));
  return bc.l1.misses == blocks && bc.l1.sector_misses == 7 * blocks && lc.l1.misses == blocks &&
         lc.l1.sector_misses == 0 && lc.stats.requests == blocks;
}

bool criterion6() {
  // Block i is read at word 1 by one PC; the same block is read again at word 5
  // by another PC 64 accesses later, beyond the lookahead reach. Blocks are only
  // revisited after they leave L1, so the predictor for (pc_a, word 1) learns {1, 5}.
  constexpr Addr kPcA = 0x401000, kPcB = 0x402000;
  constexpr std::uint64_t kBlocks = 32768, kLag = 64, kWarmup = 4096;
  Trace t;
  for (std::uint64_t i = 0; i < kBlocks + kLag; ++i) {
    if (i < kBlocks) t.push_back({4, kPcA, i * 64 + 8, AccessKind::Load});
    if (i >= kLag) t.push_back({4, kPcB, (i - kLag) * 64 + 40, AccessKind::Load});
  }
  const SectorMask want(0b100010);
  std::uint64_t checked = 0, matched = 0;
  RunOptions opt;
  opt.fetch_observer = [&](unsigned, Addr block, SectorMask, SectorMask fetch) {
    if (block < kWarmup) return;
    ++checked;
    if (fetch == want) ++matched;
  };
  std::ostringstream log;
  opt.command_logs = {&log};
  const SimConfig cfg = config(Mode::SectoredLASP, 1);
  run("sp_offset", cfg, t, opt);
  std::istringstream in(log.str());
  record_audit("sp_offset.log", audit_commands(parse_command_log(in, cfg.tck_ns()), AuditRules::from(cfg)));
  note("post-warmup L1 fetches %llu, equal to {1,5}: %llu", static_cast<unsigned long long>(checked),
       static_cast<unsigned long long>(matched));
  return checked >= kBlocks - kWarmup && matched == checked;
}

bool criterion7() {
  auto& r = random_runs(false);
  const double reduction = 1.0 - static_cast<double>(r.sect8.bus_bytes()) / static_cast<double>(r.base8.bus_bytes());
  note("bus bytes baseline %llu sectored %llu reduction %.1f%% (want >= 70%%)",
       static_cast<unsigned long long>(r.base8.bus_bytes()), static_cast<unsigned long long>(r.sect8.bus_bytes()),
       100.0 * reduction);
  return reduction >= 0.70;
}

bool criterion8() {
  Trace mixed = gen_random(5, 20000, 1ull << 30);
  for (std::size_t i = 0; i < mixed.size(); i += 3) mixed[i].kind = AccessKind::Store;
  struct Case {
    std::string name;
    Trace trace;
    unsigned cores;
  };
  const std::vector<Case> cases = {{"ff_random", gen_random(4, 20000, 1ull << 30), 4},
                                   {"ff_stride", gen_stride(1, 1 << 20), 1},
                                   {"ff_seqwords", gen_seqwords(5000), 2},
                                   {"ff_bank_thrash", bank_thrash(12, 5000), 8},
                                   {"ff_mixed", mixed, 4}};
  bool ok = true;
  for (const auto& c : cases) {
    SimConfig forced = config(Mode::SectoredLASP, c.cores);
    forced.force_full_masks = true;
    const auto b = run_logged(c.name, config(Mode::Baseline, c.cores), c.trace);
    const auto f = run_logged(c.name + ".forced", forced, c.trace);
    const long long diff = static_cast<long long>(f.cycles) - static_cast<long long>(b.cycles);
    note("%s: cycle difference %lld", c.name.c_str(), diff);
    ok = ok && diff == 0;
  }
  return ok;
}

bool criterion9() {
  // 2 MiB footprint: misses only while the L3 warms up.
  const Trace low = gen_random(9, 400'000, 2ull << 20);
  const auto b = run("low_mpki", config(Mode::Baseline, 1), low);
  const auto d = run("low_mpki", config(Mode::Dynamic, 1), low);
  const double low_diff = std::fabs(static_cast<double>(d.cycles) / static_cast<double>(b.cycles) - 1.0);
  note("low-MPKI (llc mpki %.2f): dynamic vs baseline %.3f%% (want <= 1%%)", b.llc_mpki(), 100.0 * low_diff);

  auto& r = random_runs(false);
  const auto d8 = run("random", config(Mode::Dynamic, 8), random_trace());
  const double hi_diff = std::fabs(static_cast<double>(d8.cycles) / static_cast<double>(r.sect8.cycles) - 1.0);
  note("random 8 cores: dynamic vs sectored %.3f%% (want <= 5%%), gate on %llu of %llu windows", 100.0 * hi_diff,
       static_cast<unsigned long long>(d8.channels[0].controller.gate_on_windows),
       static_cast<unsigned long long>(d8.channels[0].controller.gate_windows));
  return low_diff <= 0.01 && hi_diff <= 0.05;
}

bool criterion10() {
  bool ok = !g_audits.empty();
  std::uint64_t commands = 0;
  for (const auto& a : g_audits) {
    commands += a.commands;
    if (a.commands == 0 || a.violations != 0) {
      ok = false;
      note("%s: %llu commands, %llu violations %s", a.run.c_str(), static_cast<unsigned long long>(a.commands),
           static_cast<unsigned long long>(a.violations), a.first_message.c_str());
    }
  }
  note("%zu audited logs, %llu commands", g_audits.size(), static_cast<unsigned long long>(commands));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<bool()>>> criteria = {
      {"energy ratio exactness", criterion1},
      {"tFAW relaxation", criterion2},
      {"Random speedup", criterion3},
      {"Stride speedup", criterion4},
      {"SeqWords sector-miss oracle", criterion5},
      {"sector predictor convergence", criterion6},
      {"bus-byte reduction", criterion7},
      {"forced-full equivalence", criterion8},
      {"dynamic gate", criterion9},
      {"timing audit clean", criterion10},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    std::printf("[%2d] %s\n", id, criteria[i].first);
    std::fflush(stdout);
    bool ok = false;
    try {
      ok = criteria[i].second();
    } catch (const std::exception& e) {
      note("exception: %s", e.what());
    }
    std::printf("%s %d %s\n", ok ? "PASS" : "FAIL", id, criteria[i].first);
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
