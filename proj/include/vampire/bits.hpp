#pragma once

#include <bit>
#include <cstdint>
#include <span>

#include "vampire/common.hpp"

namespace vampire {

/// Population count over all 512 bits of a cache line.
inline int count_ones(std::span<const std::uint8_t, kLineBytes> line) {
  int n = 0;
  for (std::uint8_t b : line) n += std::popcount(static_cast<unsigned>(b));
  return n;
}

/// Hamming distance between two consecutive lines.
inline int count_toggles(std::span<const std::uint8_t, kLineBytes> prev,
                         std::span<const std::uint8_t, kLineBytes> cur) {
  int n = 0;
  for (std::size_t i = 0; i < kLineBytes; ++i)
    n += std::popcount(static_cast<unsigned>(prev[i] ^ cur[i]));
  return n;
}

inline int count_ones(const Payload& line) {
  return count_ones(std::span<const std::uint8_t, kLineBytes>(line));
}

inline int count_toggles(const Payload& prev, const Payload& cur) {
  return count_toggles(std::span<const std::uint8_t, kLineBytes>(prev),
                       std::span<const std::uint8_t, kLineBytes>(cur));
}

}  // namespace vampire
