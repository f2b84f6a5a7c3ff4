#pragma once

// DRAM command traces: one command per line,
//
//   cycle,KIND[,bank[,row|column[,payload-hex]]]
//
// cycle counts DRAM clock cycles from trace start. '#' starts a comment.
// The payload is 128 hex digits (64 bytes, first byte first).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vampire/common.hpp"
#include "vampire/timing.hpp"

namespace vampire {

enum class CommandKind { ACT, PRE, PREA, RD, WR, REF, PDE, PDX, END };

inline std::string_view to_string(CommandKind k) {
  switch (k) {
    case CommandKind::ACT: return "ACT";
    case CommandKind::PRE: return "PRE";
    case CommandKind::PREA: return "PREA";
    case CommandKind::RD: return "RD";
    case CommandKind::WR: return "WR";
    case CommandKind::REF: return "REF";
    case CommandKind::PDE: return "PDE";
    case CommandKind::PDX: return "PDX";
    case CommandKind::END: return "END";
  }
  return "?";
}

inline std::optional<CommandKind> command_kind_from_string(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto k : {CommandKind::ACT, CommandKind::PRE, CommandKind::PREA, CommandKind::RD,
                 CommandKind::WR, CommandKind::REF, CommandKind::PDE, CommandKind::PDX,
                 CommandKind::END}) {
    if (up == to_string(k)) return k;
  }
  return std::nullopt;
}

inline bool is_transfer(CommandKind k) { return k == CommandKind::RD || k == CommandKind::WR; }
inline bool needs_bank(CommandKind k) {
  return k == CommandKind::ACT || k == CommandKind::PRE || is_transfer(k);
}

struct Command {
  std::uint64_t cycle = 0;
  CommandKind kind = CommandKind::END;
  std::optional<int> bank;
  std::optional<int> row;
  std::optional<int> column;
  std::optional<Payload> payload;

  bool operator==(const Command&) const = default;

  static Command act(std::uint64_t cycle, int bank, int row) {
    return {cycle, CommandKind::ACT, bank, row, std::nullopt, std::nullopt};
  }
  static Command pre(std::uint64_t cycle, int bank) {
    return {cycle, CommandKind::PRE, bank, std::nullopt, std::nullopt, std::nullopt};
  }
  static Command rd(std::uint64_t cycle, int bank, int column,
                    std::optional<Payload> data = std::nullopt) {
    return {cycle, CommandKind::RD, bank, std::nullopt, column, data};
  }
  static Command wr(std::uint64_t cycle, int bank, int column,
                    std::optional<Payload> data = std::nullopt) {
    return {cycle, CommandKind::WR, bank, std::nullopt, column, data};
  }
  static Command simple(std::uint64_t cycle, CommandKind kind) {
    return {cycle, kind, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  }
};

using Trace = std::vector<Command>;

/// Payload mode requires data on every RD/WR; distribution mode accepts
/// RD/WR lines without data.
enum class TraceMode { Payload, Distribution };

/// Expected data statistics used when a trace carries no payloads.
struct DataDistribution {
  double ones_fraction = 0.5;
  double toggle_fraction = 0.5;

  bool valid() const {
    return ones_fraction >= 0.0 && ones_fraction <= 1.0 && toggle_fraction >= 0.0 &&
           toggle_fraction <= 1.0;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_integer(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace detail

inline std::optional<Payload> parse_payload_hex(std::string_view hex) {
  if (hex.size() != 2 * kLineBytes) return std::nullopt;
  Payload p{};
  for (std::size_t i = 0; i < kLineBytes; ++i) {
    int hi = detail::hex_digit(hex[2 * i]);
    int lo = detail::hex_digit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    p[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return p;
}

inline std::string payload_to_hex(const Payload& p) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(2 * kLineBytes, '0');
  for (std::size_t i = 0; i < kLineBytes; ++i) {
    s[2 * i] = digits[p[i] >> 4];
    s[2 * i + 1] = digits[p[i] & 0xF];
  }
  return s;
}

/// Parses a whole trace. Throws ParseError naming the offending line.
inline Trace parse_trace(std::istream& in, TraceMode mode = TraceMode::Payload) {
  Trace trace;
  std::string raw;
  std::size_t line_no = 0;
  bool ended = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (ended) throw ParseError(line_no, "command after END");

    auto fields = detail::split(line, ',');
    auto cycle = detail::parse_integer<std::uint64_t>(fields[0]);
    if (!cycle || fields.size() < 2) throw ParseError(line_no, "malformed line");
    auto kind = command_kind_from_string(fields[1]);
    if (!kind) throw ParseError(line_no, "unknown command kind '" + std::string(fields[1]) + "'");

    Command cmd = Command::simple(*cycle, *kind);
    auto field_int = [&](std::size_t idx, int lo, int hi, const char* what) {
      if (idx >= fields.size()) throw ParseError(line_no, std::string("missing ") + what);
      auto v = detail::parse_integer<int>(fields[idx]);
      if (!v) throw ParseError(line_no, std::string("malformed ") + what);
      if (*v < lo || *v > hi) throw ParseError(line_no, std::string(what) + " out of range");
      return *v;
    };

    std::size_t expected = 2;
    switch (*kind) {
      case CommandKind::ACT:
        cmd.bank = field_int(2, 0, kNumBanks - 1, "bank");
        cmd.row = field_int(3, 0, kMaxRow, "row");
        expected = 4;
        break;
      case CommandKind::PRE:
        cmd.bank = field_int(2, 0, kNumBanks - 1, "bank");
        expected = 3;
        break;
      case CommandKind::RD:
      case CommandKind::WR:
        cmd.bank = field_int(2, 0, kNumBanks - 1, "bank");
        cmd.column = field_int(3, 0, kMaxColumn, "column");
        expected = 4;
        if (fields.size() >= 5) {
          auto p = parse_payload_hex(fields[4]);
          if (!p) {
            throw ParseError(line_no, fields[4].size() == 2 * kLineBytes
                                          ? "malformed payload"
                                          : "payload of wrong length");
          }
          cmd.payload = *p;
          expected = 5;
        } else if (mode == TraceMode::Payload) {
          throw ParseError(line_no, "missing payload");
        }
        break;
      default:
        break;
    }
    if (fields.size() != expected) throw ParseError(line_no, "malformed line");
    if (!trace.empty() && cmd.cycle < trace.back().cycle)
      throw ParseError(line_no, "decreasing cycle");
    if (cmd.kind == CommandKind::END) ended = true;
    trace.push_back(std::move(cmd));
  }
  return trace;
}

inline Trace parse_trace(std::string_view text, TraceMode mode = TraceMode::Payload) {
  std::istringstream in{std::string(text)};
  return parse_trace(in, mode);
}

/// Reads a trace file; a missing file throws Error naming the path.
inline Trace load_trace(const std::string& path, TraceMode mode = TraceMode::Payload) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file '" + path + "'");
  try {
    return parse_trace(in, mode);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.reason(), path);
  }
}

inline std::string serialize_command(const Command& c) {
  std::string s = std::to_string(c.cycle);
  s += ',';
  s += to_string(c.kind);
  if (c.bank) s += ',' + std::to_string(*c.bank);
  if (c.row) s += ',' + std::to_string(*c.row);
  if (c.column) s += ',' + std::to_string(*c.column);
  if (c.payload) s += ',' + payload_to_hex(*c.payload);
  return s;
}

/// Canonical text form: one command per line, no comments, lowercase hex.
inline std::string serialize_trace(const Trace& trace) {
  std::string out;
  for (const auto& c : trace) {
    out += serialize_command(c);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Timing validation

enum class TimingRule { tRCD, tRP, tRAS, tRC, tRFC, BankNotActive };

inline std::string_view to_string(TimingRule r) {
  switch (r) {
    case TimingRule::tRCD: return "tRCD";
    case TimingRule::tRP: return "tRP";
    case TimingRule::tRAS: return "tRAS";
    case TimingRule::tRC: return "tRC";
    case TimingRule::tRFC: return "tRFC";
    case TimingRule::BankNotActive: return "bank-not-active";
  }
  return "?";
}

struct Violation {
  std::uint64_t cycle = 0;
  int bank = -1;
  TimingRule rule = TimingRule::tRCD;
  double gap_ns = 0.0;
  double required_ns = 0.0;

  std::string describe() const {
    std::ostringstream os;
    os << "cycle " << cycle;
    if (bank >= 0) os << " bank " << bank;
    os << ": " << to_string(rule);
    if (rule == TimingRule::BankNotActive)
      os << " (access to a bank with no open row)";
    else
      os << " gap " << gap_ns << " ns < " << required_ns << " ns";
    return os.str();
  }
};

/// Checks every same-bank spacing constraint and the refresh window.
/// Violations are returned, never thrown.
inline std::vector<Violation> validate_timing(const Trace& trace, const TimingParams& t) {
  struct BankTrack {
    std::optional<std::uint64_t> last_act;
    std::optional<std::uint64_t> last_pre;
    bool open = false;
  };
  std::array<BankTrack, kNumBanks> banks{};
  std::optional<std::uint64_t> last_ref;
  std::vector<Violation> out;

  auto check = [&](std::uint64_t from, std::uint64_t to, double required, TimingRule rule,
                   int bank) {
    double gap = static_cast<double>(to - from) * t.tck_ns;
    if (gap + 1e-9 < required) out.push_back({to, bank, rule, gap, required});
  };
  auto precharge = [&](const Command& c, int b) {
    auto& bk = banks[b];
    if (bk.open && bk.last_act) check(*bk.last_act, c.cycle, t.tras_ns, TimingRule::tRAS, b);
    if (bk.open) bk.last_pre = c.cycle;
    bk.open = false;
  };

  for (const auto& c : trace) {
    if (c.kind == CommandKind::END) continue;
    if (last_ref) check(*last_ref, c.cycle, t.trfc_ns, TimingRule::tRFC, c.bank.value_or(-1));
    switch (c.kind) {
      case CommandKind::ACT: {
        auto& bk = banks[*c.bank];
        if (bk.last_pre) check(*bk.last_pre, c.cycle, t.trp_ns, TimingRule::tRP, *c.bank);
        if (bk.last_act) check(*bk.last_act, c.cycle, t.trc_ns, TimingRule::tRC, *c.bank);
        bk.last_act = c.cycle;
        bk.open = true;
        break;
      }
      case CommandKind::PRE:
        precharge(c, *c.bank);
        break;
      case CommandKind::PREA:
        for (int b = 0; b < kNumBanks; ++b) precharge(c, b);
        break;
      case CommandKind::RD:
      case CommandKind::WR: {
        auto& bk = banks[*c.bank];
        if (!bk.open) {
          out.push_back({c.cycle, *c.bank, TimingRule::BankNotActive, 0.0, 0.0});
        } else {
          check(*bk.last_act, c.cycle, t.trcd_ns, TimingRule::tRCD, *c.bank);
        }
        break;
      }
      case CommandKind::REF:
        last_ref = c.cycle;
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace vampire
