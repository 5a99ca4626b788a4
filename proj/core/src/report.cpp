#include "sdram/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sdram {

using nlohmann::json;

double RunReport::ipc_total() const {
  double s = 0.0;
  for (const auto& c : cores) s += c.ipc;
  return s;
}

RunReport make_report(const SimResult& r, const std::vector<std::string>& workload, std::uint64_t seed) {
  RunReport rep;
  rep.seed = seed;
  rep.workload = workload;
  rep.config = config_to_map(r.config);
  for (const auto& c : r.cores) {
    CoreReport cr;
    cr.ipc = c.ipc;
    cr.cycles = c.cycles;
    cr.instructions = c.stats.retired;
    cr.l1_hits = c.l1.hits;
    cr.l1_sector_misses = c.l1.sector_misses;
    cr.l1_misses = c.l1.misses;
    cr.requests = c.stats.requests;
    rep.cores.push_back(cr);
  }
  rep.cycles = r.cycles;
  rep.instructions = r.instructions;
  rep.llc_mpki = r.llc_mpki();
  rep.sector_misses = r.l1_sector_misses();
  rep.row_hit_rate = r.row_hit_rate();
  rep.avg_memory_latency_ns = r.avg_read_latency_ns();
  rep.bus_bytes = r.bus_bytes();
  rep.activations = r.activations();
  std::uint64_t gate = 0, gate_on = 0;
  for (const auto& ch : r.channels) {
    rep.mask_precharges += ch.controller.mask_precharges;
    rep.tfaw_stall_cycles += ch.controller.tfaw_stall_cycles;
    rep.audit_violations += ch.audit.violations;
    gate += ch.controller.gate_windows;
    gate_on += ch.controller.gate_on_windows;
  }
  rep.gate_on_fraction = gate ? static_cast<double>(gate_on) / gate : 0.0;
  rep.audit_clean = r.audit_clean();
  rep.e_act_j = r.energy.e_act;
  rep.e_rdwr_j = r.energy.e_rdwr;
  rep.e_background_j = r.energy.e_background;
  rep.e_processor_j = r.energy.e_processor;
  rep.prefetches_issued = r.prefetch.issued;
  rep.prefetches_useful = r.prefetch.useful;
  return rep;
}

std::string to_json(const RunReport& r) {
  json j;
  j["schema"] = r.schema;
  j["version"] = r.version;
  j["seed"] = r.seed;
  j["workload"] = r.workload;
  j["config"] = r.config;
  json cores = json::array();
  for (const auto& c : r.cores) {
    cores.push_back({{"ipc", c.ipc},
                     {"cycles", c.cycles},
                     {"instructions", c.instructions},
                     {"l1_hits", c.l1_hits},
                     {"l1_sector_misses", c.l1_sector_misses},
                     {"l1_misses", c.l1_misses},
                     {"requests", c.requests}});
  }
  j["cores"] = cores;
  j["cycles"] = r.cycles;
  j["instructions"] = r.instructions;
  j["llc_mpki"] = r.llc_mpki;
  j["sector_misses"] = r.sector_misses;
  j["row_hit_rate"] = r.row_hit_rate;
  j["avg_memory_latency_ns"] = r.avg_memory_latency_ns;
  j["bus_bytes"] = r.bus_bytes;
  j["activations"] = r.activations;
  j["mask_precharges"] = r.mask_precharges;
  j["tfaw_stall_cycles"] = r.tfaw_stall_cycles;
  j["energy"] = {{"act_j", r.e_act_j},
                 {"rdwr_j", r.e_rdwr_j},
                 {"background_j", r.e_background_j},
                 {"processor_j", r.e_processor_j},
                 {"dram_j", r.e_act_j + r.e_rdwr_j + r.e_background_j}};
  j["audit"] = {{"clean", r.audit_clean}, {"violations", r.audit_violations}};
  j["prefetch"] = {{"issued", r.prefetches_issued}, {"useful", r.prefetches_useful}};
  j["gate_on_fraction"] = r.gate_on_fraction;
  if (r.parallel_speedup) j["parallel_speedup"] = *r.parallel_speedup;
  if (r.weighted_speedup) j["weighted_speedup"] = *r.weighted_speedup;
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  RunReport r;
  try {
    const json j = json::parse(text);
    r.schema = j.at("schema").get<int>();
    if (r.schema != kReportSchema) throw ReportError("unsupported report schema " + std::to_string(r.schema));
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.workload = j.at("workload").get<std::vector<std::string>>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    for (const auto& c : j.at("cores")) {
      CoreReport cr;
      cr.ipc = c.at("ipc").get<double>();
      cr.cycles = c.at("cycles").get<std::uint64_t>();
      cr.instructions = c.at("instructions").get<std::uint64_t>();
      cr.l1_hits = c.at("l1_hits").get<std::uint64_t>();
      cr.l1_sector_misses = c.at("l1_sector_misses").get<std::uint64_t>();
      cr.l1_misses = c.at("l1_misses").get<std::uint64_t>();
      cr.requests = c.at("requests").get<std::uint64_t>();
      r.cores.push_back(cr);
    }
    r.cycles = j.at("cycles").get<std::uint64_t>();
    r.instructions = j.at("instructions").get<std::uint64_t>();
    r.llc_mpki = j.at("llc_mpki").get<double>();
    r.sector_misses = j.at("sector_misses").get<std::uint64_t>();
    r.row_hit_rate = j.at("row_hit_rate").get<double>();
    r.avg_memory_latency_ns = j.at("avg_memory_latency_ns").get<double>();
    r.bus_bytes = j.at("bus_bytes").get<std::uint64_t>();
    r.activations = j.at("activations").get<std::uint64_t>();
    r.mask_precharges = j.at("mask_precharges").get<std::uint64_t>();
    r.tfaw_stall_cycles = j.at("tfaw_stall_cycles").get<std::uint64_t>();
    const json& e = j.at("energy");
    r.e_act_j = e.at("act_j").get<double>();
    r.e_rdwr_j = e.at("rdwr_j").get<double>();
    r.e_background_j = e.at("background_j").get<double>();
    r.e_processor_j = e.at("processor_j").get<double>();
    r.audit_clean = j.at("audit").at("clean").get<bool>();
    r.audit_violations = j.at("audit").at("violations").get<std::uint64_t>();
    r.prefetches_issued = j.at("prefetch").at("issued").get<std::uint64_t>();
    r.prefetches_useful = j.at("prefetch").at("useful").get<std::uint64_t>();
    r.gate_on_fraction = j.at("gate_on_fraction").get<double>();
    if (j.contains("parallel_speedup")) r.parallel_speedup = j["parallel_speedup"].get<double>();
    if (j.contains("weighted_speedup")) r.weighted_speedup = j["weighted_speedup"].get<double>();
  } catch (const json::exception& e) {
    throw ReportError(std::string("bad report: ") + e.what());
  }
  return r;
}

RunReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot open report " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

double parallel_speedup(const RunReport& baseline_1core, const RunReport& target) {
  if (baseline_1core.workload.empty() || target.workload.empty())
    throw ReportError("report without a workload");
  const std::set<std::string> a(baseline_1core.workload.begin(), baseline_1core.workload.end());
  const std::set<std::string> b(target.workload.begin(), target.workload.end());
  if (a != b) throw ReportError("parallel speedup needs reports of the same workload");
  if (target.cycles == 0) throw ReportError("target report has zero cycles");
  return static_cast<double>(baseline_1core.cycles) / static_cast<double>(target.cycles);
}

double weighted_speedup(const std::vector<RunReport>& alone, const RunReport& mix) {
  if (mix.workload.size() != mix.cores.size()) throw ReportError("mix report lacks per-core workloads");
  double ws = 0.0;
  for (std::size_t i = 0; i < mix.cores.size(); ++i) {
    const RunReport* ref = nullptr;
    for (const auto& a : alone)
      if (a.workload.size() == 1 && a.workload[0] == mix.workload[i]) ref = &a;
    if (!ref) throw ReportError("no alone run for workload " + mix.workload[i]);
    const double ipc_alone = ref->ipc_total();
    if (ipc_alone <= 0.0) throw ReportError("alone run with zero IPC: " + mix.workload[i]);
    ws += mix.cores[i].ipc / ipc_alone;
  }
  return ws;
}

std::string compare_reports(const RunReport& a, const RunReport& b) {
  std::ostringstream os;
  auto num = [](double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  auto row = [&](const char* name, double x, double y) {
    os << name << ',' << num(x) << ',' << num(y) << ',';
    if (x != 0.0) os << num(y / x);
    else os << "nan";
    os << '\n';
  };
  os << "metric,a,b,b_over_a\n";
  row("cycles", static_cast<double>(a.cycles), static_cast<double>(b.cycles));
  row("speedup", 1.0, b.cycles ? static_cast<double>(a.cycles) / b.cycles : 0.0);
  row("ipc_total", a.ipc_total(), b.ipc_total());
  row("llc_mpki", a.llc_mpki, b.llc_mpki);
  row("bus_bytes", static_cast<double>(a.bus_bytes), static_cast<double>(b.bus_bytes));
  row("activations", static_cast<double>(a.activations), static_cast<double>(b.activations));
  row("avg_memory_latency_ns", a.avg_memory_latency_ns, b.avg_memory_latency_ns);
  row("row_hit_rate", a.row_hit_rate, b.row_hit_rate);
  row("dram_energy_j", a.e_act_j + a.e_rdwr_j + a.e_background_j, b.e_act_j + b.e_rdwr_j + b.e_background_j);
  row("act_energy_j", a.e_act_j, b.e_act_j);
  row("rdwr_energy_j", a.e_rdwr_j, b.e_rdwr_j);
  row("background_energy_j", a.e_background_j, b.e_background_j);
  row("system_energy_j", a.e_act_j + a.e_rdwr_j + a.e_background_j + a.e_processor_j,
      b.e_act_j + b.e_rdwr_j + b.e_background_j + b.e_processor_j);
  return os.str();
}

}  // namespace sdram
