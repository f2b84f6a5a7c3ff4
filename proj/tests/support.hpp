#pragma once

// Fixed-seed generators shared by the property tests.

#include <cstdint>
#include <random>

#include "vampire/vampire.hpp"

namespace vampire::fixtures {

inline Payload random_payload(std::mt19937_64& rng) {
  Payload p;
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : p) b = static_cast<std::uint8_t>(byte(rng));
  return p;
}

// Bytes drawn mostly from a handful of values.
inline Payload skewed_payload(std::mt19937_64& rng) {
  static constexpr std::uint8_t common[] = {0xff, 0xfe, 0xef, 0x7f};
  Payload p;
  std::uniform_int_distribution<int> pick(0, 99);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : p) {
    const int r = pick(rng);
    b = r < 90 ? common[r % 4] : static_cast<std::uint8_t>(byte(rng));
  }
  return p;
}

/// Random timing-valid trace: sessions of ACT, a few bursts, PRE, then an
/// idle gap long enough for the next session (and optionally a REF).
template <typename PayloadFn>
Trace random_session_trace(std::mt19937_64& rng, const TimingParams& t, int sessions,
                           PayloadFn payload, bool reads = true, bool writes = true,
                           bool refresh = true) {
  const auto rcd = static_cast<std::uint64_t>(t.rcd());
  const auto ras = static_cast<std::uint64_t>(t.ras());
  const auto rc = static_cast<std::uint64_t>(t.rc());
  const auto rfc = static_cast<std::uint64_t>(t.rfc());
  std::uniform_int_distribution<int> bank(0, kNumBanks - 1);
  std::uniform_int_distribution<int> row(0, kMaxRow);
  std::uniform_int_distribution<int> col(0, 7);
  std::uniform_int_distribution<int> bursts(1, 6);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::uint64_t> gap(0, 200);
  Trace tr;
  std::uint64_t now = 0;
  for (int s = 0; s < sessions; ++s) {
    const int b = bank(rng);
    tr.push_back(Command::act(now, b, row(rng)));
    std::uint64_t at = now + rcd;
    const int n = (reads || writes) ? bursts(rng) : 0;
    for (int i = 0; i < n; ++i) {
      const bool rd = reads && (!writes || coin(rng));
      tr.push_back(rd ? Command::rd(at, b, col(rng), payload(rng))
                      : Command::wr(at, b, col(rng), payload(rng)));
      at += kBurstCycles;
    }
    const std::uint64_t pre_at = std::max(now + ras, at);
    tr.push_back(Command::pre(pre_at, b));
    now = pre_at + rc + rfc + gap(rng);
    if (refresh && coin(rng)) {
      tr.push_back(Command::simple(now, CommandKind::REF));
      now += rfc + gap(rng);
    }
  }
  tr.push_back(Command::simple(now, CommandKind::END));
  return tr;
}

}  // namespace vampire::fixtures
