#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>

#include "vampire/bits.hpp"
#include "vampire/trace.hpp"

namespace vampire {

enum class BankStatus { Precharged, Activating, Active, Precharging };

/// Relationship between a transfer and the one before it on the module.
enum class InterleaveClass { NoInterleave, ColumnOnly, BankOnly, BankAndColumn };

inline constexpr std::array<InterleaveClass, 4> kInterleaveClasses = {
    InterleaveClass::NoInterleave, InterleaveClass::ColumnOnly, InterleaveClass::BankOnly,
    InterleaveClass::BankAndColumn};

inline std::string_view to_string(InterleaveClass c) {
  switch (c) {
    case InterleaveClass::NoInterleave: return "no_interleave";
    case InterleaveClass::ColumnOnly: return "column_only";
    case InterleaveClass::BankOnly: return "bank_only";
    case InterleaveClass::BankAndColumn: return "bank_and_column";
  }
  return "?";
}

struct BankState {
  bool open = false;
  std::optional<int> open_row;
  // Survives precharge: the select wires keep their last driven value.
  std::optional<int> last_column;
  std::optional<std::uint64_t> act_cycle;
  std::optional<std::uint64_t> pre_cycle;

  bool operator==(const BankState&) const = default;

  /// Status as seen at `cycle`, resolving the in-flight windows with tRCD/tRP.
  BankStatus status_at(std::uint64_t cycle, const TimingParams& t) const {
    if (open) {
      return cycle < *act_cycle + static_cast<std::uint64_t>(t.rcd()) ? BankStatus::Activating
                                                                      : BankStatus::Active;
    }
    if (pre_cycle && cycle < *pre_cycle + static_cast<std::uint64_t>(t.rp()))
      return BankStatus::Precharging;
    return BankStatus::Precharged;
  }
};

enum class PowerMode { Normal, FastPowerDown };

struct LastTransfer {
  int bank = 0;
  int column = 0;
  std::optional<Payload> payload;

  bool operator==(const LastTransfer&) const = default;
};

struct ModuleState {
  std::array<BankState, kNumBanks> banks{};
  PowerMode power_mode = PowerMode::Normal;
  std::optional<LastTransfer> last_xfer;

  bool operator==(const ModuleState&) const = default;

  int active_banks() const {
    int n = 0;
    for (const auto& b : banks) n += b.open ? 1 : 0;
    return n;
  }
};

/// What the energy engine needs to know about one applied command.
struct StateEvent {
  Command command;
  int active_banks_after = 0;
  std::optional<InterleaveClass> interleave;
  std::optional<int> ones;
  std::optional<int> toggles;
  // Banks closed by this command (PREA may close several).
  int banks_closed = 0;
};

inline InterleaveClass classify_interleave(const ModuleState& state, const Command& cur) {
  if (!state.last_xfer) return InterleaveClass::NoInterleave;
  const auto& prev = *state.last_xfer;
  const int bank = *cur.bank;
  const int column = *cur.column;
  if (bank == prev.bank)
    return column == prev.column ? InterleaveClass::NoInterleave : InterleaveClass::ColumnOnly;
  const auto& history = state.banks[bank].last_column;
  if (!history || *history == column) return InterleaveClass::BankOnly;
  return InterleaveClass::BankAndColumn;
}

namespace detail {

inline void require(bool ok, const Command& c, std::string_view what) {
  if (!ok) throw IllegalCommand(c.cycle, c.bank.value_or(-1), std::string(what));
}

}  // namespace detail

/// Advances `state` by one command in place and describes what happened.
/// Throws IllegalCommand when the command is not legal in the current state.
inline StateEvent apply_command_in_place(ModuleState& state, const Command& cmd) {
  StateEvent ev;
  ev.command = cmd;
  const bool powered_down = state.power_mode == PowerMode::FastPowerDown;
  if (powered_down) {
    detail::require(cmd.kind == CommandKind::PDX || cmd.kind == CommandKind::END, cmd,
                    std::string(to_string(cmd.kind)) + " while in power-down");
  }

  switch (cmd.kind) {
    case CommandKind::ACT: {
      auto& b = state.banks[*cmd.bank];
      detail::require(!b.open, cmd, "ACT to a bank with an open row");
      b.open = true;
      b.open_row = cmd.row;
      b.act_cycle = cmd.cycle;
      break;
    }
    case CommandKind::PRE: {
      auto& b = state.banks[*cmd.bank];
      if (b.open) {
        ++ev.banks_closed;
        b.pre_cycle = cmd.cycle;
      }
      b.open = false;
      b.open_row.reset();
      break;
    }
    case CommandKind::PREA:
      for (auto& b : state.banks) {
        if (b.open) {
          ++ev.banks_closed;
          b.pre_cycle = cmd.cycle;
        }
        b.open = false;
        b.open_row.reset();
      }
      break;
    case CommandKind::RD:
    case CommandKind::WR: {
      auto& b = state.banks[*cmd.bank];
      detail::require(b.open, cmd, std::string(to_string(cmd.kind)) + " to a precharged bank");
      ev.interleave = classify_interleave(state, cmd);
      if (cmd.payload) {
        ev.ones = count_ones(*cmd.payload);
        if (!state.last_xfer) {
          ev.toggles = 0;
        } else if (state.last_xfer->payload) {
          ev.toggles = count_toggles(*state.last_xfer->payload, *cmd.payload);
        }
      }
      b.last_column = cmd.column;
      state.last_xfer = LastTransfer{*cmd.bank, *cmd.column, cmd.payload};
      break;
    }
    case CommandKind::REF:
      detail::require(state.active_banks() == 0, cmd, "REF with open banks");
      break;
    case CommandKind::PDE:
      detail::require(state.active_banks() == 0, cmd, "PDE with open banks");
      state.power_mode = PowerMode::FastPowerDown;
      break;
    case CommandKind::PDX:
      detail::require(powered_down, cmd, "PDX outside power-down");
      state.power_mode = PowerMode::Normal;
      break;
    case CommandKind::END:
      break;
  }
  ev.active_banks_after = state.active_banks();
  return ev;
}

inline std::pair<ModuleState, StateEvent> apply_command(ModuleState state, const Command& cmd) {
  StateEvent ev = apply_command_in_place(state, cmd);
  return {std::move(state), std::move(ev)};
}

}  // namespace vampire
