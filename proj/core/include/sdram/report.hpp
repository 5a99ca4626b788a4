#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdram/system.hpp"

namespace sdram {

inline constexpr int kReportSchema = 1;
inline constexpr const char* kSimulatorVersion = "0.1.0";

struct CoreReport {
  double ipc = 0.0;
  std::uint64_t cycles = 0;
  std::uint64_t instructions = 0;
  std::uint64_t l1_hits = 0;
  std::uint64_t l1_sector_misses = 0;
  std::uint64_t l1_misses = 0;
  std::uint64_t requests = 0;
};

/// Machine-readable summary of one run.
struct RunReport {
  int schema = kReportSchema;
  std::string version = kSimulatorVersion;
  std::uint64_t seed = 0;
  std::vector<std::string> workload;  ///< trace name per core
  std::map<std::string, std::string> config;
  std::vector<CoreReport> cores;
  std::uint64_t cycles = 0;
  std::uint64_t instructions = 0;
  double llc_mpki = 0.0;
  std::uint64_t sector_misses = 0;  ///< L1
  double row_hit_rate = 0.0;
  double avg_memory_latency_ns = 0.0;
  std::uint64_t bus_bytes = 0;
  std::uint64_t activations = 0;
  std::uint64_t mask_precharges = 0;
  std::uint64_t tfaw_stall_cycles = 0;
  double e_act_j = 0.0;
  double e_rdwr_j = 0.0;
  double e_background_j = 0.0;
  double e_processor_j = 0.0;
  bool audit_clean = true;
  std::uint64_t audit_violations = 0;
  std::uint64_t prefetches_issued = 0;
  std::uint64_t prefetches_useful = 0;
  double gate_on_fraction = 0.0;
  std::optional<double> parallel_speedup;
  std::optional<double> weighted_speedup;

  double ipc_total() const;
};

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunReport make_report(const SimResult& r, const std::vector<std::string>& workload, std::uint64_t seed);
/// Pretty JSON with sorted keys; identical inputs give identical text.
std::string to_json(const RunReport& r);
RunReport report_from_json(const std::string& text);
RunReport load_report(const std::string& path);

/// Single-core baseline cycles over target cycles. Throws ReportError if the
/// reports are not for the same workload.
double parallel_speedup(const RunReport& baseline_1core, const RunReport& target);
/// Sum over cores of IPC in the mix over IPC of that core's workload alone.
double weighted_speedup(const std::vector<RunReport>& alone, const RunReport& mix);

/// Ratio table (b / a) of the headline metrics as CSV.
std::string compare_reports(const RunReport& a, const RunReport& b);

}  // namespace sdram
