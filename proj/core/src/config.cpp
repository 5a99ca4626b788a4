#include "sdram/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace sdram {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const auto x = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const auto x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
}

// Shortest text that parses back to the same double.
std::string fmt_double(double d) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, r.ptr);
}

struct Field {
  std::function<void(SimConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <typename T>
Field uint_field(T SimConfig::*member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            c.*member = static_cast<T>(parse_u64(k, v));
          },
          [member](const SimConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(double SimConfig::*member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_double(k, v);
          },
          [member](const SimConfig& c) { return fmt_double(c.*member); }};
}

Field bool_field(bool SimConfig::*member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_bool(k, v);
          },
          [member](const SimConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Field timing_field(double TimingNs::*member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            c.timing.*member = parse_double(k, v);
          },
          [member](const SimConfig& c) { return fmt_double(c.timing.*member); }};
}

Field energy_field(double EnergyConstants::*member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            c.energy.*member = parse_double(k, v);
          },
          [member](const SimConfig& c) { return fmt_double(c.energy.*member); }};
}

Field cache_capacity(CacheLevelConfig SimConfig::*level) {
  return {[level](SimConfig& c, const std::string& k, const std::string& v) {
            (c.*level).capacity = parse_u64(k, v);
          },
          [level](const SimConfig& c) { return std::to_string((c.*level).capacity); }};
}
Field cache_ways(CacheLevelConfig SimConfig::*level) {
  return {[level](SimConfig& c, const std::string& k, const std::string& v) {
            (c.*level).ways = static_cast<unsigned>(parse_u64(k, v));
          },
          [level](const SimConfig& c) { return std::to_string((c.*level).ways); }};
}
Field cache_latency(CacheLevelConfig SimConfig::*level) {
  return {[level](SimConfig& c, const std::string& k, const std::string& v) {
            (c.*level).latency = parse_u64(k, v);
          },
          [level](const SimConfig& c) { return std::to_string((c.*level).latency); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    f["channels"] = uint_field(&SimConfig::channels);
    f["ranks"] = uint_field(&SimConfig::ranks);
    f["banks_per_rank"] = uint_field(&SimConfig::banks_per_rank);
    f["bank_groups"] = uint_field(&SimConfig::bank_groups);
    f["rows_per_bank"] = uint_field(&SimConfig::rows_per_bank);
    f["row_bytes"] = uint_field(&SimConfig::row_bytes);
    f["sectors_per_block"] = uint_field(&SimConfig::sectors_per_block);
    f["data_rate_mts"] = uint_field(&SimConfig::data_rate_mts);

    f["tRCD"] = timing_field(&TimingNs::tRCD);
    f["tRAS"] = timing_field(&TimingNs::tRAS);
    f["tRC"] = timing_field(&TimingNs::tRC);
    f["tRP"] = timing_field(&TimingNs::tRP);
    f["tFAW"] = timing_field(&TimingNs::tFAW);
    f["tRRD_L"] = timing_field(&TimingNs::tRRD_L);
    f["tRRD_S"] = timing_field(&TimingNs::tRRD_S);
    f["tAA"] = timing_field(&TimingNs::tAA);
    f["tCWL"] = timing_field(&TimingNs::tCWL);
    f["tWR"] = timing_field(&TimingNs::tWR);
    f["tRTP"] = timing_field(&TimingNs::tRTP);
    f["tCCD_L"] = timing_field(&TimingNs::tCCD_L);
    f["tCCD_S"] = timing_field(&TimingNs::tCCD_S);
    f["tWTR_L"] = timing_field(&TimingNs::tWTR_L);
    f["tWTR_S"] = timing_field(&TimingNs::tWTR_S);

    f["cores"] = uint_field(&SimConfig::cores);
    f["cpu_ghz"] = double_field(&SimConfig::cpu_ghz);
    f["window_size"] = uint_field(&SimConfig::window_size);
    f["retire_width"] = uint_field(&SimConfig::retire_width);
    f["fetch_width"] = uint_field(&SimConfig::fetch_width);
    f["issue_latency"] = uint_field(&SimConfig::issue_latency);
    f["mshrs_per_core"] = uint_field(&SimConfig::mshrs_per_core);
    f["lookahead_depth"] = uint_field(&SimConfig::lookahead_depth);
    f["l1_bytes"] = cache_capacity(&SimConfig::l1);
    f["l1_ways"] = cache_ways(&SimConfig::l1);
    f["l1_latency"] = cache_latency(&SimConfig::l1);
    f["l2_bytes"] = cache_capacity(&SimConfig::l2);
    f["l2_ways"] = cache_ways(&SimConfig::l2);
    f["l2_latency"] = cache_latency(&SimConfig::l2);
    f["l3_bytes"] = cache_capacity(&SimConfig::l3);
    f["l3_ways"] = cache_ways(&SimConfig::l3);
    f["l3_latency"] = cache_latency(&SimConfig::l3);
    f["sht_entries"] = uint_field(&SimConfig::sht_entries);
    f["prefetcher"] = bool_field(&SimConfig::prefetcher);
    f["prefetch_table_entries"] = uint_field(&SimConfig::prefetch_table_entries);
    f["prefetch_degree"] = uint_field(&SimConfig::prefetch_degree);
    f["prefetch_distance"] = uint_field(&SimConfig::prefetch_distance);

    f["read_queue"] = uint_field(&SimConfig::read_queue);
    f["write_queue"] = uint_field(&SimConfig::write_queue);
    f["write_high_watermark"] = uint_field(&SimConfig::write_high_watermark);
    f["write_low_watermark"] = uint_field(&SimConfig::write_low_watermark);
    f["frfcfs_cap"] = uint_field(&SimConfig::frfcfs_cap);
    f["sector_budget"] = uint_field(&SimConfig::sector_budget);
    f["baseline_act_budget"] = uint_field(&SimConfig::baseline_act_budget);
    f["gate_window"] = uint_field(&SimConfig::gate_window);
    f["gate_threshold"] = double_field(&SimConfig::gate_threshold);

    f["e_act8_pj"] = energy_field(&EnergyConstants::e_act8_pj);
    f["e_rd8_pj"] = energy_field(&EnergyConstants::e_rd8_pj);
    f["e_wr8_pj"] = energy_field(&EnergyConstants::e_wr8_pj);
    f["r_act"] = energy_field(&EnergyConstants::r_act);
    f["r_rd"] = energy_field(&EnergyConstants::r_rd);
    f["r_wr"] = energy_field(&EnergyConstants::r_wr);
    f["sa_overhead"] = energy_field(&EnergyConstants::sa_overhead);
    f["p_bg_active_mw"] = energy_field(&EnergyConstants::p_bg_active_mw);
    f["p_bg_precharged_mw"] = energy_field(&EnergyConstants::p_bg_precharged_mw);
    f["cpu_dynamic_w"] = energy_field(&EnergyConstants::cpu_dynamic_w);
    f["cpu_static_w"] = energy_field(&EnergyConstants::cpu_static_w);

    f["mode"] = {[](SimConfig& c, const std::string& k, const std::string& v) {
                   try {
                     c.mode = mode_from_string(v);
                   } catch (const ConfigError& e) {
                     throw ConfigError("config key '" + k + "': " + e.what());
                   }
                 },
                 [](const SimConfig& c) { return std::string(to_string(c.mode)); }};
    f["force_full_masks"] = bool_field(&SimConfig::force_full_masks);
    f["max_insts"] = uint_field(&SimConfig::max_insts);
    f["core_offset_bytes"] = uint_field(&SimConfig::core_offset_bytes);
    return f;
  }();
  return table;
}

}  // namespace

Cycle ns_to_cycles(double ns, double tck_ns) {
  if (ns <= 0) return 0;
  return static_cast<Cycle>(std::ceil(ns / tck_ns - 1e-9));
}

TimingCycles SimConfig::timing_cycles() const {
  const double tck = tck_ns();
  const auto c = [tck](double ns) { return ns_to_cycles(ns, tck); };
  return TimingCycles{c(timing.tRCD),  c(timing.tRAS),   c(timing.tRC),    c(timing.tRP),
                      c(timing.tFAW),  c(timing.tRRD_L), c(timing.tRRD_S), c(timing.tAA),
                      c(timing.tCWL),  c(timing.tWR),    c(timing.tRTP),   c(timing.tCCD_L),
                      c(timing.tCCD_S), c(timing.tWTR_L), c(timing.tWTR_S)};
}

void SimConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid configuration: " + what);
  };
  require(channels >= 1 && is_pow2(channels), "channels must be a power of two");
  require(ranks >= 1 && is_pow2(ranks), "ranks must be a power of two");
  require(banks_per_rank >= 1 && is_pow2(banks_per_rank), "banks_per_rank must be a power of two");
  require(bank_groups >= 1 && banks_per_rank % bank_groups == 0,
          "bank_groups must divide banks_per_rank");
  require(is_pow2(rows_per_bank), "rows_per_bank must be a power of two");
  require(is_pow2(row_bytes) && row_bytes >= kBlockBytes, "row_bytes must be a power of two >= 64");
  require(is_pow2(sectors_per_block) && sectors_per_block <= kMaxSectors,
          "sectors_per_block must be a power of two in [1, 16]");
  require(data_rate_mts > 0, "data_rate_mts must be positive");
  require(cores >= 1, "cores must be >= 1");
  require(cpu_ghz > 0, "cpu_ghz must be positive");
  require(window_size >= 1 && retire_width >= 1 && fetch_width >= 1, "core widths must be >= 1");
  require(issue_latency >= 1, "issue_latency must be >= 1");
  require(mshrs_per_core >= 1, "mshrs_per_core must be >= 1");
  for (const auto* l : {&l1, &l2, &l3}) {
    require(l->ways >= 1 && l->capacity % (static_cast<std::uint64_t>(l->ways) * kBlockBytes) == 0 &&
                l->sets() >= 1,
            "cache capacity must equal sets x ways x 64");
  }
  require(is_pow2(sht_entries) && sht_entries >= 8, "sht_entries must be a power of two >= 8");
  require(is_pow2(prefetch_table_entries), "prefetch_table_entries must be a power of two");
  require(read_queue >= 1 && write_queue >= 1, "queues must be non-empty");
  require(write_low_watermark < write_high_watermark && write_high_watermark <= write_queue,
          "write watermarks must satisfy low < high <= write_queue");
  require(frfcfs_cap >= 1, "frfcfs_cap must be >= 1");
  require(sector_budget >= sectors_per_block, "sector_budget must admit one full activation");
  require(baseline_act_budget >= 1, "baseline_act_budget must be >= 1");
  require(gate_window >= 1, "gate_window must be >= 1");
  const auto tc = timing_cycles();
  require(tc.tRC == tc.tRAS + tc.tRP, "tRC must equal tRAS + tRP in whole cycles");
  const auto& e = energy;
  for (double r : {e.r_act, e.r_rd, e.r_wr}) require(r > 0 && r <= 1, "energy ratios must be in (0, 1]");
  for (double v : {e.e_act8_pj, e.e_rd8_pj, e.e_wr8_pj, e.sa_overhead, e.p_bg_active_mw,
                   e.p_bg_precharged_mw})
    require(v > 0, "energy constants must be positive");
}

void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value) {
  const auto& f = fields();
  const auto it = f.find(key);
  if (it == f.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

void load_config(std::istream& in, SimConfig& cfg) {
  std::string line;
  unsigned lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  SimConfig cfg;
  load_config(in, cfg);
  cfg.validate();
  return cfg;
}

std::map<std::string, std::string> config_to_map(const SimConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [k, f] : fields()) out[k] = f.get(cfg);
  return out;
}

}  // namespace sdram
