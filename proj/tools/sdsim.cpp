#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdram/audit.hpp"
#include "sdram/config.hpp"
#include "sdram/report.hpp"
#include "sdram/system.hpp"
#include "sdram/trace.hpp"

namespace {

using namespace sdram;

struct RunArgs {
  std::string config;
  std::vector<std::string> traces;
  std::string mode;
  unsigned channels = 0;
  unsigned cores = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string cmd_log;
  std::uint64_t max_insts = 0;
  bool max_insts_set = false;
};

SimConfig build_config(const std::string& path, const std::string& mode, unsigned channels) {
  SimConfig cfg = path.empty() ? SimConfig{} : load_config_file(path);
  if (!mode.empty()) cfg.mode = mode_from_string(mode);
  if (channels) cfg.channels = channels;
  return cfg;
}

int do_run(const RunArgs& a) {
  SimConfig cfg = build_config(a.config, a.mode, a.channels);
  if (a.max_insts_set) cfg.max_insts = a.max_insts;
  cfg.cores = a.cores ? a.cores : static_cast<unsigned>(a.traces.size());
  cfg.validate();

  std::vector<Trace> traces;
  std::vector<std::string> workload;
  for (const auto& p : a.traces) traces.push_back(load_trace_file(p));
  for (unsigned c = 0; c < cfg.cores; ++c) workload.push_back(a.traces.size() == 1 ? a.traces[0] : a.traces[c]);

  std::vector<std::unique_ptr<std::ofstream>> logs;
  RunOptions opt;
  if (!a.cmd_log.empty()) {
    for (unsigned ch = 0; ch < cfg.channels; ++ch) {
      const std::string p = ch == 0 ? a.cmd_log : a.cmd_log + ".ch" + std::to_string(ch);
      logs.push_back(std::make_unique<std::ofstream>(p));
      if (!*logs.back()) throw std::runtime_error("cannot write " + p);
      opt.command_logs.push_back(logs.back().get());
    }
  }

  const SimResult res = simulate(cfg, traces, opt);
  const std::string json = to_json(make_report(res, workload, a.seed));
  if (a.out.empty() || a.out == "-") {
    std::cout << json;
  } else {
    std::ofstream o(a.out);
    if (!(o << json)) throw std::runtime_error("cannot write " + a.out);
  }
  if (!res.audit_clean()) {
    for (const auto& ch : res.channels)
      for (const auto& m : ch.audit.messages) std::cerr << "audit: " << m << '\n';
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sector-granular DRAM system simulator"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "simulate traces and write a JSON report");
  run_cmd->add_option("--config", run.config, "configuration file (key = value)");
  run_cmd->add_option("--trace", run.traces, "trace file; repeat once per core")->required();
  run_cmd->add_option("--mode", run.mode, "baseline|basic|la|lasp|dynamic");
  run_cmd->add_option("--channels", run.channels, "number of memory channels");
  run_cmd->add_option("--cores", run.cores, "core count when a single trace is replicated");
  run_cmd->add_option("--seed", run.seed, "seed echoed in the report");
  run_cmd->add_option("--out", run.out, "report path (default stdout)");
  run_cmd->add_option("--cmd-log", run.cmd_log, "command log path (extra channels get .chN)");
  auto* mi = run_cmd->add_option("--max-insts", run.max_insts, "instruction cap per core (default: whole trace)");

  std::string gen_kind, gen_out;
  std::uint64_t gen_seed = 1, gen_n = 1000000, gen_footprint = 1ull << 30, gen_passes = 1,
                gen_region = 16ull << 20, gen_blocks = 1024;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic trace");
  gen_cmd->add_option("kind", gen_kind, "random|stride|seqwords")
      ->required()
      ->check(CLI::IsMember({"random", "stride", "seqwords"}));
  gen_cmd->add_option("--seed", gen_seed, "PRNG seed (random)");
  gen_cmd->add_option("--n", gen_n, "number of accesses (random)");
  gen_cmd->add_option("--footprint", gen_footprint, "bytes covered (random)");
  gen_cmd->add_option("--passes", gen_passes, "sweeps over the region (stride)");
  gen_cmd->add_option("--region", gen_region, "region bytes (stride)");
  gen_cmd->add_option("--blocks", gen_blocks, "blocks (seqwords)");
  gen_cmd->add_option("--out", gen_out, "output path (default stdout)");

  std::string audit_log, audit_config, audit_mode;
  auto* audit_cmd = app.add_subcommand("audit", "check a command log against every timing rule");
  audit_cmd->add_option("log", audit_log, "command log")->required();
  audit_cmd->add_option("--config", audit_config, "configuration file");
  audit_cmd->add_option("--mode", audit_mode, "mode the log was produced in");

  std::string cmp_a, cmp_b;
  auto* cmp_cmd = app.add_subcommand("compare", "ratio table of two reports (b over a)");
  cmp_cmd->add_option("a", cmp_a, "reference report")->required();
  cmp_cmd->add_option("b", cmp_b, "report to compare")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      run.max_insts_set = mi->count() > 0;
      return do_run(run);
    }
    if (*gen_cmd) {
      Trace t;
      if (gen_kind == "random") t = gen_random(gen_seed, gen_n, gen_footprint);
      else if (gen_kind == "stride") t = gen_stride(gen_passes, gen_region);
      else t = gen_seqwords(gen_blocks);
      if (gen_out.empty() || gen_out == "-") {
        render_trace(t, std::cout);
      } else {
        std::ofstream o(gen_out);
        render_trace(t, o);
        if (!o) throw std::runtime_error("cannot write " + gen_out);
      }
      return 0;
    }
    if (*audit_cmd) {
      const SimConfig cfg = build_config(audit_config, audit_mode, 0);
      std::ifstream in(audit_log);
      if (!in) throw std::runtime_error("cannot open " + audit_log);
      const AuditResult r = audit_commands(parse_command_log(in, cfg.tck_ns()), AuditRules::from(cfg));
      std::cout << "commands " << r.commands << "\nviolations " << r.violations << "\nmax_acts_in_window "
                << r.max_acts_in_window << "\nmax_sectors_in_window " << r.max_sectors_in_window << '\n';
      for (const auto& m : r.messages) std::cout << "  " << m << '\n';
      return r.clean() ? 0 : 3;
    }
    if (*cmp_cmd) {
      std::cout << compare_reports(load_report(cmp_a), load_report(cmp_b));
      return 0;
    }
  } catch (const TraceParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
