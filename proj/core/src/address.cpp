#include "sdram/address.hpp"

#include <bit>

namespace sdram {

namespace {
unsigned log2u(std::uint64_t v) { return static_cast<unsigned>(std::countr_zero(v)); }
}  // namespace

AddressLayout::AddressLayout(const SimConfig& cfg)
    : byte_bits(kBlockShift - log2u(cfg.sectors_per_block)),
      word_bits(log2u(cfg.sectors_per_block)),
      channel_bits(log2u(cfg.channels)),
      column_bits(log2u(cfg.blocks_per_row())),
      rank_bits(log2u(cfg.ranks)),
      bank_bits(log2u(cfg.banks_per_rank)),
      row_bits(log2u(cfg.rows_per_bank)) {}

DramCoordinates decompose_address(Addr paddr, const SimConfig& cfg) {
  const AddressLayout l(cfg);
  if (l.total_bits() < 64 && (paddr >> l.total_bits()) != 0)
    throw ConfigError("address " + std::to_string(paddr) + " exceeds configured capacity");
  auto take = [&paddr](unsigned bits) {
    const auto v = static_cast<std::uint32_t>(paddr & ((Addr{1} << bits) - 1));
    paddr >>= bits;
    return v;
  };
  DramCoordinates c;
  take(l.byte_bits);
  c.word = take(l.word_bits);
  c.channel = take(l.channel_bits);
  c.column = take(l.column_bits);
  c.rank = take(l.rank_bits);
  c.bank = take(l.bank_bits);
  c.row = take(l.row_bits);
  return c;
}

Addr recompose_address(const DramCoordinates& c, const SimConfig& cfg) {
  const AddressLayout l(cfg);
  Addr a = c.row;
  a = (a << l.bank_bits) | c.bank;
  a = (a << l.rank_bits) | c.rank;
  a = (a << l.column_bits) | c.column;
  a = (a << l.channel_bits) | c.channel;
  a = (a << l.word_bits) | c.word;
  a <<= l.byte_bits;
  return a;
}

}  // namespace sdram
