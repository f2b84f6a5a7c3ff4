#pragma once

// Trace-driven energy accounting. Every interval contributes
// I[mA] * V[V] * t[ns] * 1e-3 nJ:
//
//   background   IDD2N with every bank precharged, IDD3N (times the mean
//                idle factor of the open banks) while any bank is open,
//                IDD2P1 in power-down
//   ACT/PRE      (IDD0 - (IDD3N*tRAS + IDD2N*(tRC - tRAS))/tRC) * V * tRC,
//                scaled by the row-address factor
//   RD / WR      (I_datadep - IDD3N) * V * burst, reads scaled by the bank
//                read factor
//   REF          (IDD5B - IDD2N) * V * tRFC on top of background
//
// tRAS/tRC/tRFC are taken in whole clock cycles, the way IDD loops run.

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vampire/datadep.hpp"
#include "vampire/dram_state.hpp"
#include "vampire/profiles.hpp"
#include "vampire/trace.hpp"
#include "vampire/variation.hpp"

namespace vampire {

struct EnergyOptions {
  bool variation = true;
  bool force = false;
  // Scale active standby between IDD2N and IDD3N by open-bank count.
  bool interpolate_background = false;
  // When set, expected counts replace payload statistics.
  std::optional<DataDistribution> distribution;
};

struct LedgerEntry {
  std::uint64_t cycle = 0;
  CommandKind kind = CommandKind::END;
  double energy_nj = 0.0;

  bool operator==(const LedgerEntry&) const = default;
};

struct EnergyBreakdown {
  double act_pre = 0.0;
  double read = 0.0;
  double write = 0.0;
  double refresh = 0.0;
  double background_active = 0.0;
  double background_precharged = 0.0;
  double power_down = 0.0;
  double encoding = 0.0;
  double total = 0.0;
  // Split of `read` when the profile carries an I/O-driver estimate.
  std::optional<double> read_core;
  std::optional<double> read_io;

  std::uint64_t duration_cycles = 0;
  double duration_ns = 0.0;
  std::vector<LedgerEntry> per_command;

  bool operator==(const EnergyBreakdown&) const = default;

  double category_sum() const {
    return act_pre + read + write + refresh + background_active + background_precharged +
           power_down + encoding;
  }
  void finalize() { total = category_sum(); }
};

inline constexpr double energy_nj(double current_ma, double vdd, double ns) {
  return current_ma * vdd * ns * 1e-3;
}

/// Average power in mW of `energy` spread over `duration_ns`.
inline double compute_power(const EnergyBreakdown& b, double duration_ns) {
  if (!(duration_ns > 0.0)) throw Error("duration must be positive");
  return b.total / duration_ns * 1e3;
}

inline double compute_power(const EnergyBreakdown& b) { return compute_power(b, b.duration_ns); }

/// END's cycle when present, otherwise the cycle at which the last
/// command's own activity (burst, refresh) completes.
inline std::uint64_t trace_end_cycle(const Trace& trace, const TimingParams& t) {
  std::uint64_t end = 0;
  for (const auto& c : trace) {
    if (c.kind == CommandKind::END) return c.cycle;
    std::uint64_t busy = 0;
    if (is_transfer(c.kind)) busy = kBurstCycles;
    if (c.kind == CommandKind::REF) busy = static_cast<std::uint64_t>(t.rfc());
    end = std::max(end, c.cycle + busy);
  }
  return end;
}

namespace detail {

class EnergyEngine {
 public:
  EnergyEngine(const VendorProfile& p, const EnergyOptions& opt)
      : p_(p),
        opt_(opt),
        sv_(opt.variation ? p.variation : StructuralVariation::none()),
        vdd_(p.vdd),
        tck_(p.timings.tck_ns),
        idd2n_(p.current(IddKey::IDD2N)),
        idd3n_(p.current(IddKey::IDD3N)),
        idd2p1_(p.current(IddKey::IDD2P1)) {
    const auto& t = p.timings;
    const double tras = static_cast<double>(t.ras()) * tck_;
    const double trc = static_cast<double>(t.rc()) * tck_;
    const double idd0 = p.current(IddKey::IDD0);
    const double act_current = idd0 - (idd3n_ * tras + idd2n_ * (trc - tras)) / trc;
    act_pre_nj_ = std::max(0.0, energy_nj(act_current, vdd_, trc));
    const double trfc = static_cast<double>(t.rfc()) * tck_;
    refresh_nj_ =
        std::max(0.0, energy_nj(p.current(IddKey::IDD5B) - idd2n_, vdd_, trfc));
    burst_ns_ = static_cast<double>(kBurstCycles) * tck_;
  }

  EnergyBreakdown run(const Trace& trace) {
    EnergyBreakdown b;
    ModuleState state;
    std::uint64_t now = 0;
    b.per_command.reserve(trace.size());
    if (p_.io_per_one_ma) {
      b.read_core = 0.0;
      b.read_io = 0.0;
    }

    for (const auto& cmd : trace) {
      integrate_background(b, state, now, cmd.cycle);
      now = std::max(now, cmd.cycle);
      const bool had_transfer = state.last_xfer.has_value();
      const StateEvent ev = apply_command_in_place(state, cmd);
      b.per_command.push_back({cmd.cycle, cmd.kind, command_energy(b, ev, had_transfer)});
    }
    const std::uint64_t end = trace_end_cycle(trace, p_.timings);
    integrate_background(b, state, now, end);
    b.duration_cycles = end;
    b.duration_ns = static_cast<double>(end) * tck_;
    b.finalize();
    return b;
  }

 private:
  void integrate_background(EnergyBreakdown& b, const ModuleState& s, std::uint64_t from,
                            std::uint64_t to) const {
    if (to <= from) return;
    const double ns = static_cast<double>(to - from) * tck_;
    if (s.power_mode == PowerMode::FastPowerDown) {
      b.power_down += energy_nj(idd2p1_, vdd_, ns);
      return;
    }
    const int open = s.active_banks();
    if (open == 0) {
      b.background_precharged += energy_nj(idd2n_, vdd_, ns);
      return;
    }
    double factor = 0.0;
    for (int bank = 0; bank < kNumBanks; ++bank)
      if (s.banks[bank].open) factor += bank_factor(sv_, bank, BankContext::Idle);
    factor /= open;
    double current = idd3n_;
    if (opt_.interpolate_background)
      current = idd2n_ + (idd3n_ - idd2n_) * static_cast<double>(open) / kNumBanks;
    b.background_active += energy_nj(current * factor, vdd_, ns);
  }

  double command_energy(EnergyBreakdown& b, const StateEvent& ev, bool had_transfer) const {
    const Command& c = ev.command;
    switch (c.kind) {
      case CommandKind::ACT: {
        const double e = act_pre_nj_ * row_factor(sv_, *c.row);
        b.act_pre += e;
        return e;
      }
      case CommandKind::RD:
      case CommandKind::WR:
        return transfer_energy(b, ev, had_transfer);
      case CommandKind::REF:
        b.refresh += refresh_nj_;
        return refresh_nj_;
      default:
        return 0.0;
    }
  }

  double transfer_energy(EnergyBreakdown& b, const StateEvent& ev, bool had_transfer) const {
    const Command& c = ev.command;
    const bool read = c.kind == CommandKind::RD;
    double ones = 0.0, toggles = 0.0;
    if (opt_.distribution) {
      ones = opt_.distribution->ones_fraction * kLineBits;
      toggles = had_transfer ? opt_.distribution->toggle_fraction * kLineBits : 0.0;
    } else {
      if (!ev.ones || !ev.toggles) {
        throw Error(std::string(to_string(c.kind)) + " at cycle " + std::to_string(c.cycle) +
                    " has no payload (or follows one without); use distribution mode");
      }
      ones = *ev.ones;
      toggles = *ev.toggles;
    }
    const auto& params = p_.datadep.at(read ? Operation::Read : Operation::Write, *ev.interleave);
    const double current = eval_current(params, ones, toggles);
    const double factor =
        bank_factor(sv_, *c.bank, read ? BankContext::Read : BankContext::Write);
    const double e = std::max(0.0, energy_nj(current - idd3n_, vdd_, burst_ns_)) * factor;
    if (read) {
      b.read += e;
      if (p_.io_per_one_ma) {
        const double io = std::min(e, energy_nj(*p_.io_per_one_ma * ones, vdd_, burst_ns_));
        *b.read_io += io;
        *b.read_core += e - io;
      }
    } else {
      b.write += e;
    }
    return e;
  }

  const VendorProfile& p_;
  const EnergyOptions& opt_;
  StructuralVariation sv_;
  double vdd_, tck_, idd2n_, idd3n_, idd2p1_;
  double act_pre_nj_ = 0.0, refresh_nj_ = 0.0, burst_ns_ = 0.0;
};

}  // namespace detail

/// Replays `trace` and integrates its energy. Throws TimingViolation when
/// the trace breaks timing (unless options.force) and IllegalCommand on
/// state-machine errors.
inline EnergyBreakdown compute_energy(const Trace& trace, const VendorProfile& profile,
                                      const EnergyOptions& options = {}) {
  if (!options.force) {
    auto violations = validate_timing(trace, profile.timings);
    if (!violations.empty()) {
      std::string msg = violations.front().describe();
      if (violations.size() > 1)
        msg += " (+" + std::to_string(violations.size() - 1) + " more)";
      throw TimingViolation(msg);
    }
  }
  if (options.distribution && !options.distribution->valid())
    throw Error("distribution fractions must lie in [0, 1]");
  return detail::EnergyEngine(profile, options).run(trace);
}

// ---------------------------------------------------------------------------
// CSV output

/// Rows in fixed order: act_pre, read, write, refresh, background_active,
/// background_precharged, power_down, encoding, total, then read_core and
/// read_io when the I/O split is present.
inline std::vector<std::pair<std::string, double>> breakdown_rows(const EnergyBreakdown& b) {
  std::vector<std::pair<std::string, double>> rows = {
      {"act_pre", b.act_pre},
      {"read", b.read},
      {"write", b.write},
      {"refresh", b.refresh},
      {"background_active", b.background_active},
      {"background_precharged", b.background_precharged},
      {"power_down", b.power_down},
      {"encoding", b.encoding},
      {"total", b.total},
  };
  if (b.read_core) rows.emplace_back("read_core", *b.read_core);
  if (b.read_io) rows.emplace_back("read_io", *b.read_io);
  return rows;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline void write_breakdown_csv(std::ostream& os, const EnergyBreakdown& b,
                                bool gnuplot = false) {
  const char sep = gnuplot ? ' ' : ',';
  os << (gnuplot ? "# " : "") << "category" << sep << "energy_nj\n";
  for (const auto& [name, value] : breakdown_rows(b)) os << name << sep << format_number(value) << "\n";
}

/// Per-command ledger: `cycle,kind,energy_nj`.
inline void write_ledger_csv(std::ostream& os, const EnergyBreakdown& b, bool gnuplot = false) {
  const char sep = gnuplot ? ' ' : ',';
  os << (gnuplot ? "# " : "") << "cycle" << sep << "kind" << sep << "energy_nj\n";
  for (const auto& e : b.per_command)
    os << e.cycle << sep << to_string(e.kind) << sep << format_number(e.energy_nj) << "\n";
}

}  // namespace vampire
