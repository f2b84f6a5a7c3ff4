#pragma once

#include <array>
#include <bit>

#include "vampire/common.hpp"

namespace vampire {

/// Systematic current differences inside one module. Factors are
/// multipliers normalized to bank 0; the row slope is the fractional
/// activate/precharge increase per `1` bit in the row address.
struct StructuralVariation {
  std::array<double, kNumBanks> bank_idle_factor{1, 1, 1, 1, 1, 1, 1, 1};
  std::array<double, kNumBanks> bank_read_factor{1, 1, 1, 1, 1, 1, 1, 1};
  double row_ones_slope = 0.0;

  bool operator==(const StructuralVariation&) const = default;

  static StructuralVariation none() { return {}; }

  bool valid() const {
    if (bank_idle_factor[0] != 1.0 || bank_read_factor[0] != 1.0) return false;
    for (int b = 0; b < kNumBanks; ++b)
      if (!(bank_idle_factor[b] > 0.0) || !(bank_read_factor[b] > 0.0)) return false;
    return row_ones_slope >= 0.0;
  }
};

enum class BankContext { Idle, Read, Write };

inline double row_factor(const StructuralVariation& sv, int row) {
  return 1.0 + sv.row_ones_slope * std::popcount(static_cast<unsigned>(row));
}

/// Writes show no bank dependence, so the Write context is always 1.
inline double bank_factor(const StructuralVariation& sv, int bank, BankContext ctx) {
  switch (ctx) {
    case BankContext::Idle: return sv.bank_idle_factor[bank];
    case BankContext::Read: return sv.bank_read_factor[bank];
    case BankContext::Write: return 1.0;
  }
  return 1.0;
}

}  // namespace vampire
