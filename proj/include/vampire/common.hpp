#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vampire {

inline constexpr std::size_t kLineBytes = 64;
inline constexpr int kLineBits = 512;
inline constexpr int kNumBanks = 8;
inline constexpr int kMaxRow = 65535;
inline constexpr int kMaxColumn = 1023;
// BL8 at one transfer per clock edge.
inline constexpr std::int64_t kBurstCycles = 4;

using Payload = std::array<std::uint8_t, kLineBytes>;

inline Payload filled_payload(std::uint8_t byte) {
  Payload p;
  p.fill(byte);
  return p;
}

/// Base for every domain error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file that could not be opened.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason, const std::string& source = {})
      : Error((source.empty() ? std::string{} : source + ": ") + reason + " at line " +
              std::to_string(line)),
        line_(line),
        reason_(reason) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class IllegalCommand : public Error {
 public:
  IllegalCommand(std::uint64_t cycle, int bank, const std::string& what)
      : Error("illegal command at cycle " + std::to_string(cycle) +
              (bank >= 0 ? " (bank " + std::to_string(bank) + ")" : std::string{}) +
              ": " + what),
        cycle_(cycle),
        bank_(bank) {}
  std::uint64_t cycle() const noexcept { return cycle_; }
  int bank() const noexcept { return bank_; }

 private:
  std::uint64_t cycle_;
  int bank_;
};

class TimingViolation : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class MissingKey : public Error {
 public:
  using Error::Error;
};

class NoPayloads : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class NonPositiveActual : public Error {
 public:
  using Error::Error;
};

}  // namespace vampire
