#pragma once

#include "sdram/config.hpp"
#include "sdram/types.hpp"

namespace sdram {

/// Bit-field layout of a physical address, LSB to MSB:
/// byte-in-word | word | channel | column | rank | bank | row.
struct AddressLayout {
  unsigned byte_bits, word_bits, channel_bits, column_bits, rank_bits, bank_bits, row_bits;

  explicit AddressLayout(const SimConfig& cfg);
  unsigned total_bits() const {
    return byte_bits + word_bits + channel_bits + column_bits + rank_bits + bank_bits + row_bits;
  }
};

/// Splits `paddr` into DRAM coordinates. Throws ConfigError if paddr is beyond capacity.
DramCoordinates decompose_address(Addr paddr, const SimConfig& cfg);
/// Inverse of decompose_address (byte-in-word bits are zero).
Addr recompose_address(const DramCoordinates& c, const SimConfig& cfg);

}  // namespace sdram
