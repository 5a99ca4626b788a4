#include "sdram/energy.hpp"

#include <stdexcept>

namespace sdram {

double scale(double e8, double r, unsigned sectors) {
  if (sectors < 1 || sectors > 8) throw std::invalid_argument("sector count outside [1, 8]");
  return e8 * (r + (1.0 - r) * static_cast<double>(sectors - 1) / 7.0);
}

void EnergyModel::account_command(EnergyLedger& ledger, const DramCommand& cmd) const {
  const unsigned s = cmd.mask.popcount();
  switch (cmd.kind) {
    case CommandKind::ACT:
      ledger.e_act += scale(k_.e_act8_pj, k_.r_act, s) * (sectored_ ? k_.sa_overhead : 1.0) * 1e-12;
      break;
    case CommandKind::PRE:
      break;
    case CommandKind::RD:
    case CommandKind::RDA:
      ledger.e_rdwr += scale(k_.e_rd8_pj, k_.r_rd, s) * 1e-12;
      ledger.bytes_on_bus += 8ull * s;
      break;
    case CommandKind::WR:
    case CommandKind::WRA:
      ledger.e_rdwr += scale(k_.e_wr8_pj, k_.r_wr, s) * 1e-12;
      ledger.bytes_on_bus += 8ull * s;
      break;
  }
}

void EnergyModel::account_background(EnergyLedger& ledger, double active_s, double precharged_s) const {
  ledger.e_background += (k_.p_bg_active_mw * active_s + k_.p_bg_precharged_mw * precharged_s) * 1e-3;
}

double system_power(double ipc_total, unsigned n_cores, const EnergyConstants& k) {
  if (n_cores == 0) return 0.0;
  const double share = static_cast<double>(n_cores) / 8.0;
  return share * ((ipc_total / (4.0 * n_cores)) * k.cpu_dynamic_w + k.cpu_static_w);
}

}  // namespace sdram
