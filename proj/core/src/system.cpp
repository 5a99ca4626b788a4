#include "sdram/system.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "sdram/address.hpp"

namespace sdram {

namespace {

struct Channel {
  MemoryController ctrl;
  std::deque<std::pair<Cycle, MemoryRequest>> reads;
  std::deque<std::pair<Cycle, MemoryRequest>> writes;
  Auditor auditor;
  std::optional<CommandLogWriter> log;
};

class Port : public MemoryPort {
 public:
  Port(const SimConfig& cfg, std::vector<std::unique_ptr<Channel>>& ch) : cfg_(cfg), ch_(ch) {}

  void send(const MemoryRequest& req, Cycle ready) override {
    Channel& c = *ch_[channel_of(req)];
    (req.kind == AccessKind::Writeback ? c.writes : c.reads).emplace_back(ready, req);
  }
  bool try_prefetch(const MemoryRequest& req, Cycle ready) override {
    Channel& c = *ch_[channel_of(req)];
    // Dropped when the staged demand reads would already fill the read queue.
    if (c.reads.size() + c.ctrl.read_queue_size() >= cfg_.read_queue) return false;
    c.reads.emplace_back(ready, req);
    return true;
  }

 private:
  unsigned channel_of(const MemoryRequest& req) const {
    return cfg_.channels == 1 ? 0 : decompose_address(req.paddr, cfg_).channel;
  }
  const SimConfig& cfg_;
  std::vector<std::unique_ptr<Channel>>& ch_;
};

}  // namespace

bool SimResult::audit_clean() const {
  return std::all_of(channels.begin(), channels.end(), [](const ChannelResult& c) { return c.audit.clean(); });
}

double SimResult::ipc_total() const {
  double s = 0.0;
  for (const auto& c : cores) s += c.ipc;
  return s;
}

double SimResult::llc_mpki() const {
  return instructions ? 1000.0 * static_cast<double>(l3.misses + l3.sector_misses) / instructions : 0.0;
}

std::uint64_t SimResult::l1_sector_misses() const {
  std::uint64_t s = 0;
  for (const auto& c : cores) s += c.l1.sector_misses;
  return s;
}

std::uint64_t SimResult::bus_bytes() const {
  std::uint64_t s = 0;
  for (const auto& c : channels) s += c.dram.bus_bytes();
  return s;
}

std::uint64_t SimResult::activations() const {
  std::uint64_t s = 0;
  for (const auto& c : channels) s += c.dram.count(CommandKind::ACT);
  return s;
}

double SimResult::avg_read_latency_ns() const {
  std::uint64_t n = 0, sum = 0;
  for (const auto& c : channels) {
    n += c.controller.reads_served;
    sum += c.controller.read_latency_sum;
  }
  return n ? static_cast<double>(sum) / n * config.tck_ns() : 0.0;
}

double SimResult::row_hit_rate() const {
  std::uint64_t cols = 0, acts = 0;
  for (const auto& c : channels) {
    cols += c.controller.column_commands;
    acts += c.controller.activations;
  }
  return cols ? 1.0 - static_cast<double>(acts) / cols : 0.0;
}

SimResult simulate(const SimConfig& cfg_in, const std::vector<Trace>& traces, const RunOptions& opt) {
  SimConfig cfg = cfg_in;
  cfg.validate();
  if (traces.empty()) throw ConfigError("no traces");
  if (traces.size() != 1 && traces.size() != cfg.cores)
    throw ConfigError("need one trace per core or a single trace");

  const bool sectored = is_sectored(cfg.mode) && !cfg.force_full_masks;
  std::vector<std::unique_ptr<Channel>> channels;
  const AuditRules rules = AuditRules::from(cfg);
  for (unsigned c = 0; c < cfg.channels; ++c) {
    channels.push_back(std::unique_ptr<Channel>(new Channel{MemoryController(cfg, c), {}, {}, Auditor(rules), {}}));
    if (c < opt.command_logs.size() && opt.command_logs[c])
      channels.back()->log.emplace(*opt.command_logs[c], cfg.tck_ns());
  }

  EnergyLedger ledger;
  const EnergyModel energy(cfg.energy, is_sectored(cfg.mode));
  for (auto& ch : channels) {
    Channel* raw = ch.get();
    raw->ctrl.set_command_hook([raw, &ledger, &energy, &opt](const DramCommand& cmd, unsigned channel) {
      raw->auditor.feed(cmd);
      energy.account_command(ledger, cmd);
      if (raw->log) raw->log->write(cmd);
      if (opt.command_hook) opt.command_hook(cmd, channel);
    });
  }

  Port port(cfg, channels);
  HierarchyOptions hopt;
  hopt.sectored_fetch = sectored;
  hopt.predictor = sectored && uses_predictor(cfg.mode);
  CacheHierarchy hier(cfg, hopt, port);
  if (opt.fetch_observer) hier.set_fetch_observer(opt.fetch_observer);
  if (cfg.mode == Mode::Dynamic && sectored) {
    hier.set_sector_gate([&](Addr block) {
      const unsigned ch = cfg.channels == 1 ? 0 : decompose_address(block << kBlockShift, cfg).channel;
      return channels[ch]->ctrl.sectored_active();
    });
  }

  LookaheadConfig la;
  la.enabled = sectored && uses_lookahead(cfg.mode);
  la.depth = cfg.lookahead_depth;
  std::vector<Core> cores;
  cores.reserve(cfg.cores);
  for (unsigned c = 0; c < cfg.cores; ++c)
    cores.emplace_back(c, cfg, traces.size() == 1 ? traces[0] : traces[c], la);
  hier.set_completion([&cores](unsigned core, std::uint64_t waiter, Cycle t) { cores[core].complete(waiter, t); });

  // CPU cycle c and controller cycle d coincide when d * num == c * den.
  const auto cpu_mhz = static_cast<std::uint64_t>(std::llround(cfg.cpu_ghz * 1000.0));
  const std::uint64_t dram_mhz = cfg.data_rate_mts / 2;
  const std::uint64_t g = std::gcd(cpu_mhz, dram_mhz);
  const std::uint64_t num = cpu_mhz / g, den = dram_mhz / g;

  std::vector<Completion> done;
  Cycle cpu = 0, d = 0;
  Cycle last_progress = 0;
  std::uint64_t last_retired = 0;
  auto all_finished = [&] {
    return std::all_of(cores.begin(), cores.end(), [](const Core& c) { return c.finished(); });
  };
  while (!all_finished()) {
    hier.process(cpu);
    std::uint64_t retired = 0;
    for (auto& core : cores) {
      core.tick(cpu, hier);
      retired += core.stats().retired;
    }
    hier.commit_predictors();
    while (d * num <= cpu * den) {
      for (auto& ch : channels) {
        while (!ch->writes.empty() && ch->writes.front().first <= cpu &&
               ch->ctrl.can_accept(AccessKind::Writeback)) {
          ch->ctrl.enqueue(ch->writes.front().second, d);
          ch->writes.pop_front();
        }
        while (!ch->reads.empty() && ch->reads.front().first <= cpu &&
               ch->ctrl.can_accept(ch->reads.front().second.kind)) {
          ch->ctrl.enqueue(ch->reads.front().second, d);
          ch->reads.pop_front();
        }
        if (d >= ch->ctrl.next_wakeup()) {
          done.clear();
          ch->ctrl.tick(d, done);
          for (const Completion& c : done) hier.dram_fill(c.req, (c.done * num + den - 1) / den);
        }
      }
      ++d;
    }
    if (retired != last_retired) {
      last_retired = retired;
      last_progress = cpu;
    } else if (cpu - last_progress > opt.deadlock_cycles) {
      throw std::runtime_error("simulation made no progress for " + std::to_string(opt.deadlock_cycles) +
                               " cycles at cycle " + std::to_string(cpu));
    }
    ++cpu;
  }

  SimResult res;
  res.config = cfg;
  res.dram_cycles = d;
  for (const auto& core : cores) {
    res.cycles = std::max(res.cycles, core.cycles());
    res.instructions += core.stats().retired;
  }
  for (unsigned c = 0; c < cfg.cores; ++c) {
    CoreResult cr;
    cr.stats = cores[c].stats();
    cr.cycles = cores[c].cycles();
    cr.ipc = cores[c].ipc();
    cr.l1 = hier.l1(c).stats();
    cr.l2 = hier.l2(c).stats();
    cr.predictor = hier.sht(c).stats();
    res.cores.push_back(cr);
  }
  res.l3 = hier.l3().stats();
  res.prefetch = hier.prefetch_stats();

  const double tck_s = cfg.tck_ns() * 1e-9;
  for (auto& ch : channels) {
    ch->ctrl.finish(d);
    ChannelResult cr;
    cr.controller = ch->ctrl.stats();
    cr.dram = ch->ctrl.device().stats();
    cr.audit = ch->auditor.finish(d);
    for (unsigned r = 0; r < cfg.ranks; ++r) {
      const RankActivity& a = ch->ctrl.device().activity(r);
      cr.rank_active.push_back(a.active_cycles());
      cr.rank_precharged.push_back(a.precharged_cycles());
      energy.account_background(ledger, static_cast<double>(a.active_cycles()) * tck_s,
                                static_cast<double>(a.precharged_cycles()) * tck_s);
    }
    res.channels.push_back(std::move(cr));
  }
  const double runtime_s = static_cast<double>(res.cycles) / (cfg.cpu_ghz * 1e9);
  ledger.e_processor = system_power(res.ipc_total(), cfg.cores, cfg.energy) * runtime_s;
  res.energy = ledger;
  return res;
}

}  // namespace sdram
