#pragma once

// Cache-line encodings scored against data-dependent DRAM current.
//
//   Baseline   data as is
//   BDI        base-delta-immediate compression, zero padded to 64 bytes
//   Optimized  per-byte codebook: the k-th most frequent byte value maps to
//              the k-th codeword ordered by (popcount, value)
//   OWI        Optimized, with writes complemented on the wire and restored
//              by the device before reaching the cells

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <future>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include "vampire/energy.hpp"

namespace vampire {

enum class EncodingScheme { Baseline, BDI, Optimized, OWI };

inline constexpr std::array<EncodingScheme, 4> kEncodingSchemes = {
    EncodingScheme::Baseline, EncodingScheme::BDI, EncodingScheme::Optimized,
    EncodingScheme::OWI};

inline std::string_view to_string(EncodingScheme s) {
  switch (s) {
    case EncodingScheme::Baseline: return "baseline";
    case EncodingScheme::BDI: return "bdi";
    case EncodingScheme::Optimized: return "optimized";
    case EncodingScheme::OWI: return "owi";
  }
  return "?";
}

inline std::optional<EncodingScheme> encoding_scheme_from_string(std::string_view s) {
  for (auto e : kEncodingSchemes)
    if (s == to_string(e)) return e;
  return std::nullopt;
}

inline bool uses_codebook(EncodingScheme s) {
  return s == EncodingScheme::Optimized || s == EncodingScheme::OWI;
}

// ---------------------------------------------------------------------------
// Byte codebook

using ByteHistogram = std::array<std::uint64_t, 256>;

struct ByteCodebook {
  std::array<std::uint8_t, 256> encode{};
  std::array<std::uint8_t, 256> decode{};

  bool operator==(const ByteCodebook&) const = default;
};

/// All 256 byte values ordered by (popcount, value).
inline std::array<std::uint8_t, 256> codewords_by_weight() {
  std::array<std::uint8_t, 256> w{};
  std::iota(w.begin(), w.end(), std::uint8_t{0});
  std::stable_sort(w.begin(), w.end(), [](std::uint8_t a, std::uint8_t b) {
    const int pa = std::popcount(static_cast<unsigned>(a));
    const int pb = std::popcount(static_cast<unsigned>(b));
    return pa != pb ? pa < pb : a < b;
  });
  return w;
}

/// Descending frequency, ties by ascending byte value.
inline ByteCodebook build_codebook(const ByteHistogram& hist) {
  std::array<std::uint8_t, 256> ranked{};
  std::iota(ranked.begin(), ranked.end(), std::uint8_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::uint8_t a, std::uint8_t b) {
    return hist[a] != hist[b] ? hist[a] > hist[b] : a < b;
  });
  const auto words = codewords_by_weight();
  ByteCodebook cb;
  for (std::size_t k = 0; k < 256; ++k) {
    cb.encode[ranked[k]] = words[k];
    cb.decode[words[k]] = ranked[k];
  }
  return cb;
}

inline ByteHistogram payload_histogram(const Trace& trace) {
  ByteHistogram h{};
  for (const auto& c : trace) {
    if (!is_transfer(c.kind) || !c.payload) continue;
    for (std::uint8_t b : *c.payload) ++h[b];
  }
  return h;
}

/// Codebook over every RD/WR payload byte in the trace.
inline ByteCodebook build_codebook(const Trace& trace) {
  const auto h = payload_histogram(trace);
  if (std::accumulate(h.begin(), h.end(), std::uint64_t{0}) == 0)
    throw NoPayloads("trace has no RD/WR payloads to build a codebook from");
  return build_codebook(h);
}

// ---------------------------------------------------------------------------
// Base-delta-immediate

enum class BdiKind { Zeros, Repeated, B8D1, B8D2, B8D4, B4D1, B4D2, B2D1 };

struct BdiLayout {
  BdiKind kind;
  int base_bytes;
  int delta_bytes;
};

inline constexpr std::array<BdiLayout, 6> kBdiLayouts = {{
    {BdiKind::B8D1, 8, 1},
    {BdiKind::B8D2, 8, 2},
    {BdiKind::B8D4, 8, 4},
    {BdiKind::B4D1, 4, 1},
    {BdiKind::B4D2, 4, 2},
    {BdiKind::B2D1, 2, 1},
}};

struct BdiCompressed {
  BdiKind kind = BdiKind::Zeros;
  int base_bytes = 0;
  int delta_bytes = 0;
  // Layout for base+delta kinds: base | per-element base/immediate mask | deltas.
  std::vector<std::uint8_t> bytes;

  bool operator==(const BdiCompressed&) const = default;
};

namespace detail {

inline std::uint64_t load_le(const Payload& line, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = width - 1; i >= 0; --i) v = v << 8 | line[offset + static_cast<std::size_t>(i)];
  return v;
}

inline void store_le(std::uint8_t* out, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint64_t width_mask(int bytes) {
  return bytes >= 8 ? ~std::uint64_t{0} : (std::uint64_t{1} << (8 * bytes)) - 1;
}

// Sign-extends the low `bytes` bytes of v.
inline std::int64_t sign_extend(std::uint64_t v, int bytes) {
  if (bytes >= 8) return static_cast<std::int64_t>(v);
  const int shift = 64 - 8 * bytes;
  return static_cast<std::int64_t>(v << shift) >> shift;
}

// Whether (v mod 2^(8*width)) read as a signed width-byte number fits in
// delta_bytes signed bytes.
inline bool fits(std::uint64_t v, int width, int delta_bytes) {
  const std::int64_t s = sign_extend(v & width_mask(width), width);
  const std::int64_t lim = std::int64_t{1} << (8 * delta_bytes - 1);
  return s >= -lim && s < lim;
}

inline std::optional<BdiCompressed> try_layout(const Payload& line, const BdiLayout& l) {
  const int n = static_cast<int>(kLineBytes) / l.base_bytes;
  const int mask_bytes = (n + 7) / 8;
  std::vector<std::uint64_t> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    values[i] = load_le(line, static_cast<std::size_t>(i * l.base_bytes), l.base_bytes);

  std::uint64_t base = 0;
  for (auto v : values) {
    if (!fits(v, l.base_bytes, l.delta_bytes)) {
      base = v;
      break;
    }
  }
  BdiCompressed out{l.kind, l.base_bytes, l.delta_bytes, {}};
  out.bytes.assign(static_cast<std::size_t>(l.base_bytes + mask_bytes + n * l.delta_bytes), 0);
  store_le(out.bytes.data(), base, l.base_bytes);
  std::uint8_t* mask = out.bytes.data() + l.base_bytes;
  std::uint8_t* deltas = mask + mask_bytes;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = values[i];
    std::uint64_t d;
    if (fits(v - base, l.base_bytes, l.delta_bytes)) {
      d = v - base;
      mask[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    } else if (fits(v, l.base_bytes, l.delta_bytes)) {
      d = v;
    } else {
      return std::nullopt;
    }
    store_le(deltas + i * l.delta_bytes, d, l.delta_bytes);
  }
  return out;
}

}  // namespace detail

/// Smallest BDI representation of the line, or nothing if none fits.
inline std::optional<BdiCompressed> bdi_compress(const Payload& line) {
  if (std::all_of(line.begin(), line.end(), [](std::uint8_t b) { return b == 0; }))
    return BdiCompressed{BdiKind::Zeros, 0, 0, {}};
  const std::uint64_t first = detail::load_le(line, 0, 8);
  bool repeated = true;
  for (std::size_t off = 8; off < kLineBytes && repeated; off += 8)
    repeated = detail::load_le(line, off, 8) == first;
  if (repeated) {
    BdiCompressed r{BdiKind::Repeated, 8, 0, std::vector<std::uint8_t>(8)};
    detail::store_le(r.bytes.data(), first, 8);
    return r;
  }
  std::optional<BdiCompressed> best;
  for (const auto& layout : kBdiLayouts) {
    auto c = detail::try_layout(line, layout);
    if (c && (!best || c->bytes.size() < best->bytes.size())) best = std::move(c);
  }
  return best;
}

inline Payload bdi_decompress(const BdiCompressed& c) {
  Payload line{};
  switch (c.kind) {
    case BdiKind::Zeros:
      return line;
    case BdiKind::Repeated:
      for (std::size_t off = 0; off < kLineBytes; off += 8)
        std::copy_n(c.bytes.begin(), 8, line.begin() + static_cast<std::ptrdiff_t>(off));
      return line;
    default:
      break;
  }
  const int n = static_cast<int>(kLineBytes) / c.base_bytes;
  const int mask_bytes = (n + 7) / 8;
  std::uint64_t base = 0;
  for (int i = c.base_bytes - 1; i >= 0; --i) base = base << 8 | c.bytes[static_cast<std::size_t>(i)];
  const std::uint8_t* mask = c.bytes.data() + c.base_bytes;
  const std::uint8_t* deltas = mask + mask_bytes;
  for (int i = 0; i < n; ++i) {
    std::uint64_t raw = 0;
    for (int k = c.delta_bytes - 1; k >= 0; --k) raw = raw << 8 | deltas[i * c.delta_bytes + k];
    const auto d = static_cast<std::uint64_t>(detail::sign_extend(raw, c.delta_bytes));
    const bool from_base = mask[i / 8] >> (i % 8) & 1u;
    const std::uint64_t v = (from_base ? base + d : d) & detail::width_mask(c.base_bytes);
    detail::store_le(line.data() + i * c.base_bytes, v, c.base_bytes);
  }
  return line;
}

// ---------------------------------------------------------------------------
// Line encoding

struct EncodedLine {
  EncodingScheme scheme = EncodingScheme::Baseline;
  // The bit pattern as it crosses the peripheral circuitry.
  Payload stored{};
  // BDI only: the representation used, absent when incompressible.
  std::optional<BdiKind> bdi;

  bool operator==(const EncodedLine&) const = default;
};

namespace detail {

inline Payload map_bytes(const Payload& in, const std::array<std::uint8_t, 256>& table) {
  Payload out;
  for (std::size_t i = 0; i < kLineBytes; ++i) out[i] = table[in[i]];
  return out;
}

inline Payload complement(const Payload& in) {
  Payload out;
  for (std::size_t i = 0; i < kLineBytes; ++i) out[i] = static_cast<std::uint8_t>(~in[i]);
  return out;
}

inline const ByteCodebook& require_codebook(const ByteCodebook* cb, EncodingScheme s) {
  if (!cb) throw Error(std::string(to_string(s)) + " encoding needs a codebook");
  return *cb;
}

}  // namespace detail

inline EncodedLine encode_line(const Payload& line, EncodingScheme scheme,
                               const ByteCodebook* codebook, Operation direction) {
  EncodedLine e{scheme, line, std::nullopt};
  switch (scheme) {
    case EncodingScheme::Baseline:
      break;
    case EncodingScheme::BDI:
      if (auto c = bdi_compress(line)) {
        e.bdi = c->kind;
        e.stored.fill(0);
        std::copy(c->bytes.begin(), c->bytes.end(), e.stored.begin());
      }
      break;
    case EncodingScheme::Optimized:
      e.stored = detail::map_bytes(line, detail::require_codebook(codebook, scheme).encode);
      break;
    case EncodingScheme::OWI:
      e.stored = detail::map_bytes(line, detail::require_codebook(codebook, scheme).encode);
      if (direction == Operation::Write) e.stored = detail::complement(e.stored);
      break;
  }
  return e;
}

inline Payload decode_line(const EncodedLine& e, const ByteCodebook* codebook,
                           Operation direction) {
  switch (e.scheme) {
    case EncodingScheme::Baseline:
      return e.stored;
    case EncodingScheme::BDI: {
      if (!e.bdi) return e.stored;
      BdiCompressed c{*e.bdi, 0, 0, {}};
      for (const auto& l : kBdiLayouts)
        if (l.kind == *e.bdi) c = {l.kind, l.base_bytes, l.delta_bytes, {}};
      std::size_t size = 0;
      if (*e.bdi == BdiKind::Repeated) {
        size = 8;
      } else if (*e.bdi != BdiKind::Zeros) {
        const int n = static_cast<int>(kLineBytes) / c.base_bytes;
        size = static_cast<std::size_t>(c.base_bytes + (n + 7) / 8 + n * c.delta_bytes);
      }
      c.bytes.assign(e.stored.begin(), e.stored.begin() + static_cast<std::ptrdiff_t>(size));
      return bdi_decompress(c);
    }
    case EncodingScheme::Optimized:
      return detail::map_bytes(e.stored, detail::require_codebook(codebook, e.scheme).decode);
    case EncodingScheme::OWI: {
      const Payload optimized =
          direction == Operation::Write ? detail::complement(e.stored) : e.stored;
      return detail::map_bytes(optimized, detail::require_codebook(codebook, e.scheme).decode);
    }
  }
  return e.stored;
}

// ---------------------------------------------------------------------------
// Encoding study

struct StudyOptions {
  // Extra cycles per RD/WR for codebook lookups.
  std::uint64_t latency_cycles = 1;
  // Per-access encode/decode energy for codebook schemes.
  double encoding_energy_nj = 0.0;
  EnergyOptions energy;
};

/// Rewrites every RD/WR payload to its stored/wire pattern. Codebook
/// schemes delay every later command by `latency_cycles` per access.
inline Trace encode_trace(const Trace& trace, EncodingScheme scheme, const ByteCodebook* codebook,
                          std::uint64_t latency_cycles = 1) {
  Trace out;
  out.reserve(trace.size());
  std::uint64_t shift = 0;
  const std::uint64_t per_access = uses_codebook(scheme) ? latency_cycles : 0;
  for (const auto& c : trace) {
    Command e = c;
    e.cycle += shift;
    if (is_transfer(c.kind)) {
      if (!c.payload)
        throw Error("RD/WR at cycle " + std::to_string(c.cycle) + " has no payload to encode");
      const auto dir = c.kind == CommandKind::RD ? Operation::Read : Operation::Write;
      e.payload = encode_line(*c.payload, scheme, codebook, dir).stored;
      shift += per_access;
    }
    out.push_back(std::move(e));
  }
  return out;
}

struct SchemeResult {
  EncodingScheme scheme = EncodingScheme::Baseline;
  EnergyBreakdown breakdown;
  double ratio_to_baseline = 1.0;
};

inline EnergyBreakdown score_scheme(const Trace& trace, const VendorProfile& profile,
                                    EncodingScheme scheme, const ByteCodebook* codebook,
                                    const StudyOptions& opt) {
  const Trace encoded = encode_trace(trace, scheme, codebook, opt.latency_cycles);
  EnergyBreakdown b = compute_energy(encoded, profile, opt.energy);
  if (uses_codebook(scheme)) {
    const auto accesses = std::count_if(trace.begin(), trace.end(),
                                        [](const Command& c) { return is_transfer(c.kind); });
    b.encoding = opt.encoding_energy_nj * static_cast<double>(accesses);
    b.finalize();
  }
  return b;
}

/// Scores each scheme on `trace` (in parallel) and normalizes to Baseline.
inline std::vector<SchemeResult> run_encoding_study(const Trace& trace,
                                                    const VendorProfile& profile,
                                                    const std::vector<EncodingScheme>& schemes,
                                                    const StudyOptions& opt = {}) {
  std::optional<ByteCodebook> codebook;
  if (std::any_of(schemes.begin(), schemes.end(), uses_codebook))
    codebook = build_codebook(trace);
  const ByteCodebook* cb = codebook ? &*codebook : nullptr;

  auto baseline = std::async(std::launch::async, [&] {
    return score_scheme(trace, profile, EncodingScheme::Baseline, nullptr, opt);
  });
  std::vector<std::future<EnergyBreakdown>> jobs;
  for (auto s : schemes) {
    jobs.push_back(std::async(std::launch::async,
                              [&, s] { return score_scheme(trace, profile, s, cb, opt); }));
  }
  const EnergyBreakdown base = baseline.get();
  std::vector<SchemeResult> out;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    SchemeResult r{schemes[i], jobs[i].get(), 1.0};
    r.ratio_to_baseline = base.total > 0.0 ? r.breakdown.total / base.total : 1.0;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vampire
