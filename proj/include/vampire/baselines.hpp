#pragma once

// Reference models, error metrics and JEDEC-style IDD loop generators.
//
// MicronStyle: datasheet IDDs, background at IDD3N for all powered-up
//   time (it cannot tell how many banks are open), per-command add-ons
//   over their nominal loop windows relative to IDD3N.
// DramPowerLite: the interval engine used for VAMPIRE but fed datasheet
//   IDDs, constant read/write currents (IDD4R/IDD4W) and no variation.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vampire/energy.hpp"

namespace vampire {

enum class ModelKind { Vampire, MicronStyle, DramPowerLite };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Vampire: return "vampire";
    case ModelKind::MicronStyle: return "micron";
    case ModelKind::DramPowerLite: return "drampower";
  }
  return "?";
}

inline std::optional<ModelKind> model_kind_from_string(std::string_view s) {
  if (s == "vampire") return ModelKind::Vampire;
  if (s == "micron" || s == "micron-style") return ModelKind::MicronStyle;
  if (s == "drampower" || s == "drampower-lite") return ModelKind::DramPowerLite;
  return std::nullopt;
}

/// Copy of `p` with datasheet IDDs as the working currents, constant
/// read/write currents and no structural variation.
inline VendorProfile datasheet_profile(const VendorProfile& p) {
  VendorProfile d = p;
  d.name = p.name + "-datasheet";
  d.idd = p.idd_datasheet;
  const DataDepParams read{d.datasheet(IddKey::IDD4R), 0.0, 0.0};
  const DataDepParams write{d.datasheet(IddKey::IDD4W), 0.0, 0.0};
  for (auto c : kInterleaveClasses) {
    d.datadep.at(Operation::Read, c) = read;
    d.datadep.at(Operation::Write, c) = write;
  }
  d.variation = StructuralVariation::none();
  d.io_per_one_ma.reset();
  return d;
}

namespace detail {

inline EnergyBreakdown micron_style_energy(const Trace& trace, const VendorProfile& p,
                                           const EnergyOptions& opt) {
  if (!opt.force) {
    auto v = validate_timing(trace, p.timings);
    if (!v.empty()) throw TimingViolation(v.front().describe());
  }
  const double vdd = p.vdd;
  const auto& t = p.timings;
  const double tck = t.tck_ns;
  const double idd3n = p.datasheet(IddKey::IDD3N);
  const double act = std::max(
      0.0, energy_nj(p.datasheet(IddKey::IDD0) - idd3n, vdd, static_cast<double>(t.rc()) * tck));
  const double burst = static_cast<double>(kBurstCycles) * tck;
  const double rd = std::max(0.0, energy_nj(p.datasheet(IddKey::IDD4R) - idd3n, vdd, burst));
  const double wr = std::max(0.0, energy_nj(p.datasheet(IddKey::IDD4W) - idd3n, vdd, burst));
  const double ref = std::max(
      0.0, energy_nj(p.datasheet(IddKey::IDD5B) - idd3n, vdd, static_cast<double>(t.rfc()) * tck));

  EnergyBreakdown b;
  ModuleState state;
  std::uint64_t now = 0;
  auto background = [&](std::uint64_t to) {
    if (to <= now) return;
    const double ns = static_cast<double>(to - now) * tck;
    if (state.power_mode == PowerMode::FastPowerDown)
      b.power_down += energy_nj(p.datasheet(IddKey::IDD2P1), vdd, ns);
    else
      b.background_active += energy_nj(idd3n, vdd, ns);
    now = to;
  };
  for (const auto& c : trace) {
    background(c.cycle);
    apply_command_in_place(state, c);
    double e = 0.0;
    switch (c.kind) {
      case CommandKind::ACT: b.act_pre += e = act; break;
      case CommandKind::RD: b.read += e = rd; break;
      case CommandKind::WR: b.write += e = wr; break;
      case CommandKind::REF: b.refresh += e = ref; break;
      default: break;
    }
    b.per_command.push_back({c.cycle, c.kind, e});
  }
  const auto end = trace_end_cycle(trace, t);
  background(end);
  b.duration_cycles = end;
  b.duration_ns = static_cast<double>(end) * tck;
  b.finalize();
  return b;
}

}  // namespace detail

inline EnergyBreakdown compute_baseline(const Trace& trace, const VendorProfile& profile,
                                        ModelKind kind, const EnergyOptions& options = {}) {
  switch (kind) {
    case ModelKind::Vampire:
      return compute_energy(trace, profile, options);
    case ModelKind::DramPowerLite: {
      EnergyOptions o = options;
      o.variation = false;
      // Constant read/write currents: the counts are irrelevant.
      o.distribution = DataDistribution{0.0, 0.0};
      return compute_energy(trace, datasheet_profile(profile), o);
    }
    case ModelKind::MicronStyle:
      return detail::micron_style_energy(trace, profile, options);
  }
  throw Error("unknown model");
}

/// (baseline - reference) / reference, in percent.
inline double relative_error_pct(double baseline, double reference) {
  if (!(reference > 0.0)) throw NonPositiveActual("reference must be positive");
  return (baseline - reference) / reference * 100.0;
}

/// Mean absolute percentage error of `predicted` against `actual`.
inline double mape(const std::vector<double>& predicted, const std::vector<double>& actual) {
  if (predicted.size() != actual.size() || actual.empty())
    throw LengthMismatch("mape needs two equal-length, non-empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!(actual[i] > 0.0)) throw NonPositiveActual("actual values must be positive");
    sum += std::abs(predicted[i] - actual[i]) / actual[i];
  }
  return sum / static_cast<double>(actual.size()) * 100.0;
}

// ---------------------------------------------------------------------------
// IDD loops

struct IddLoopOptions {
  int iterations = 100;
  std::uint8_t pattern = 0x33;
};

/// A timing-valid trace that runs the named JEDEC measurement loop.
inline Trace generate_idd_loop(IddKey kind, const TimingParams& t,
                               const IddLoopOptions& opt = {}) {
  const auto n = static_cast<std::uint64_t>(std::max(opt.iterations, 1));
  const auto rcd = static_cast<std::uint64_t>(t.rcd());
  const auto rp = static_cast<std::uint64_t>(t.rp());
  const auto ras = static_cast<std::uint64_t>(t.ras());
  const auto rc = static_cast<std::uint64_t>(t.rc());
  const auto rfc = static_cast<std::uint64_t>(t.rfc());
  const auto burst = static_cast<std::uint64_t>(kBurstCycles);
  const Payload data = filled_payload(opt.pattern);
  Trace tr;

  switch (kind) {
    case IddKey::IDD0:
      for (std::uint64_t i = 0; i < n; ++i) {
        tr.push_back(Command::act(i * rc, 0, 0));
        tr.push_back(Command::pre(i * rc + ras, 0));
      }
      tr.push_back(Command::simple(n * rc, CommandKind::END));
      break;
    case IddKey::IDD1: {
      const std::uint64_t pre_at = std::max(ras, rcd + burst);
      const std::uint64_t period = std::max(rc, pre_at + rp);
      for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t t0 = i * period;
        tr.push_back(Command::act(t0, 0, 0));
        tr.push_back(Command::rd(t0 + rcd, 0, 0, data));
        tr.push_back(Command::pre(t0 + pre_at, 0));
      }
      tr.push_back(Command::simple(n * period, CommandKind::END));
      break;
    }
    case IddKey::IDD2N:
      tr.push_back(Command::simple(n * rc, CommandKind::END));
      break;
    case IddKey::IDD3N:
      for (int b = 0; b < kNumBanks; ++b) tr.push_back(Command::act(b, b, 0));
      tr.push_back(Command::simple(kNumBanks + n * rc, CommandKind::END));
      break;
    case IddKey::IDD4R:
    case IddKey::IDD4W: {
      for (int b = 0; b < kNumBanks; ++b) tr.push_back(Command::act(b, b, 0));
      const std::uint64_t start = kNumBanks - 1 + rcd;
      const std::uint64_t bursts = n * kNumBanks;
      for (std::uint64_t i = 0; i < bursts; ++i) {
        const int bank = static_cast<int>(i % kNumBanks);
        const std::uint64_t at = start + i * burst;
        tr.push_back(kind == IddKey::IDD4R ? Command::rd(at, bank, 0, data)
                                           : Command::wr(at, bank, 0, data));
      }
      tr.push_back(Command::simple(start + bursts * burst, CommandKind::END));
      break;
    }
    case IddKey::IDD5B:
      for (std::uint64_t i = 0; i < n; ++i) tr.push_back(Command::simple(i * rfc, CommandKind::REF));
      tr.push_back(Command::simple(n * rfc, CommandKind::END));
      break;
    case IddKey::IDD7: {
      // ACT, RD, PRE (standing in for auto-precharge) per bank, banks
      // staggered so each bank's row cycle and the data bus both fit.
      const std::uint64_t pre_at = std::max(ras, rcd + burst);
      const std::uint64_t per_bank = std::max(rc, pre_at + rp);
      const std::uint64_t stagger =
          std::max<std::uint64_t>(burst, (per_bank + kNumBanks - 1) / kNumBanks);
      const std::uint64_t slots = n * kNumBanks;
      for (std::uint64_t j = 0; j < slots; ++j) {
        const int bank = static_cast<int>(j % kNumBanks);
        const std::uint64_t t0 = j * stagger;
        tr.push_back(Command::act(t0, bank, 0));
        tr.push_back(Command::rd(t0 + rcd, bank, 0, data));
        tr.push_back(Command::pre(t0 + pre_at, bank));
      }
      std::stable_sort(tr.begin(), tr.end(),
                       [](const Command& a, const Command& b) { return a.cycle < b.cycle; });
      tr.push_back(Command::simple((slots - 1) * stagger + pre_at + rp, CommandKind::END));
      break;
    }
    case IddKey::IDD2P1:
      tr.push_back(Command::simple(0, CommandKind::PDE));
      tr.push_back(Command::simple(n * rc, CommandKind::PDX));
      tr.push_back(Command::simple(n * rc, CommandKind::END));
      break;
  }
  return tr;
}

}  // namespace vampire
