#pragma once

#include <cmath>
#include <cstdint>

namespace vampire {

/// DRAM timing constraints in nanoseconds. Defaults are the DDR3L-800
/// parts characterized here: 13.75/13.75/35 ns tRCD/tRP/tRAS at a 400 MHz
/// command clock.
struct TimingParams {
  double trcd_ns = 13.75;
  double trp_ns = 13.75;
  double tras_ns = 35.0;
  double trc_ns = 48.75;
  double trfc_ns = 160.0;
  double tck_ns = 2.5;

  bool operator==(const TimingParams&) const = default;

  /// Smallest whole number of clock cycles covering `ns`.
  std::int64_t cycles(double ns) const {
    return static_cast<std::int64_t>(std::ceil(ns / tck_ns - 1e-9));
  }
  std::int64_t rcd() const { return cycles(trcd_ns); }
  std::int64_t rp() const { return cycles(trp_ns); }
  std::int64_t ras() const { return cycles(tras_ns); }
  std::int64_t rc() const { return cycles(trc_ns); }
  std::int64_t rfc() const { return cycles(trfc_ns); }
};

}  // namespace vampire
