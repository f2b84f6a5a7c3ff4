#pragma once

// Data-dependent read/write current:
//
//   I_total = I_zero + dI_one * N_ones + dI_toggle * N_toggles
//
// with one parameter triple per (operation, interleave class).

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "vampire/dram_state.hpp"
#include "vampire/regression.hpp"

namespace vampire {

enum class Operation { Read, Write };

inline std::string_view to_string(Operation op) {
  return op == Operation::Read ? "read" : "write";
}

struct DataDepParams {
  double i_zero = 0.0;    // mA with an all-zero line
  double d_one = 0.0;     // mA per one bit
  double d_toggle = 0.0;  // mA per toggled bit

  bool operator==(const DataDepParams&) const = default;
};

/// Counts may be fractional (expected values in distribution mode).
inline double eval_current(const DataDepParams& p, double n_ones, double n_toggles) {
  return p.i_zero + p.d_one * n_ones + p.d_toggle * n_toggles;
}

class DataDepTable {
 public:
  DataDepTable() = default;

  const DataDepParams& at(Operation op, InterleaveClass c) const {
    return params_[index(op, c)];
  }
  DataDepParams& at(Operation op, InterleaveClass c) { return params_[index(op, c)]; }

  bool operator==(const DataDepTable&) const = default;

 private:
  static std::size_t index(Operation op, InterleaveClass c) {
    return (op == Operation::Read ? 0 : 4) + static_cast<std::size_t>(c);
  }
  std::array<DataDepParams, 8> params_{};
};

/// Sign convention observed on every characterized part.
inline bool sign_conventions_hold(const DataDepTable& t) {
  for (auto c : kInterleaveClasses) {
    const auto& r = t.at(Operation::Read, c);
    const auto& w = t.at(Operation::Write, c);
    if (!(r.i_zero > 0.0) || !(w.i_zero > 0.0)) return false;
    if (r.d_one < 0.0 || w.d_one > 0.0) return false;
  }
  return true;
}

struct CurrentSample {
  double n_ones = 0.0;
  double n_toggles = 0.0;
  double current_ma = 0.0;
};

enum class FitMode { Full, OnesOnly, TogglesOnly };

struct FitResult {
  DataDepParams params;
  double r_squared = 0.0;
};

/// Least-squares calibration of one parameter triple. The reduced modes fix
/// the other slope at zero. Throws RankDeficient on a degenerate design.
inline FitResult fit_params(const std::vector<CurrentSample>& samples,
                            FitMode mode = FitMode::Full) {
  if (samples.size() < 3) throw RankDeficient("need at least three samples");
  std::vector<double> ones, toggles, current;
  for (const auto& s : samples) {
    ones.push_back(s.n_ones);
    toggles.push_back(s.n_toggles);
    current.push_back(s.current_ma);
  }

  DataDepParams p;
  switch (mode) {
    case FitMode::Full: {
      auto plane = regression::fit_plane(ones, toggles, current);
      p = {plane.intercept, plane.slope1, plane.slope2};
      break;
    }
    case FitMode::OnesOnly:
    case FitMode::TogglesOnly: {
      const auto& x = mode == FitMode::OnesOnly ? ones : toggles;
      regression::Line line;
      try {
        line = regression::fit_line(x, current);
      } catch (const DegenerateFit& e) {
        throw RankDeficient(e.what());
      }
      p.i_zero = line.intercept;
      (mode == FitMode::OnesOnly ? p.d_one : p.d_toggle) = line.slope;
      break;
    }
  }

  std::vector<double> fitted;
  fitted.reserve(samples.size());
  for (const auto& s : samples) fitted.push_back(eval_current(p, s.n_ones, s.n_toggles));
  return {p, regression::r_squared(current, fitted)};
}

struct PercentError {
  double max_pct = 0.0;
  double mean_pct = 0.0;
};

inline PercentError model_percent_error(const DataDepParams& p,
                                        const std::vector<CurrentSample>& samples) {
  if (samples.empty()) throw Error("no samples");
  PercentError e;
  for (const auto& s : samples) {
    if (!(s.current_ma > 0.0)) throw NonPositiveActual("measured current must be positive");
    const double pct =
        std::abs(eval_current(p, s.n_ones, s.n_toggles) - s.current_ma) / s.current_ma * 100.0;
    e.max_pct = std::max(e.max_pct, pct);
    e.mean_pct += pct;
  }
  e.mean_pct /= static_cast<double>(samples.size());
  return e;
}

namespace detail {

// Rows of a headed, all-numeric CSV. `#` lines and blank lines are skipped.
inline std::vector<std::vector<double>> read_numeric_csv(
    std::istream& in, const std::vector<std::string_view>& header) {
  std::string expected;
  for (auto h : header) expected += (expected.empty() ? "" : ",") + std::string(h);
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, ',');
    for (auto& f : fields) f = trim(f);
    if (!header_seen) {
      if (fields != header) throw ParseError(line_no, "expected header " + expected);
      header_seen = true;
      continue;
    }
    if (fields.size() != header.size()) throw ParseError(line_no, "malformed line");
    std::vector<double> row;
    for (auto f : fields) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(std::string(f), &used));
        if (used != f.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError(line_no, "malformed number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError(line_no, "empty file");
  return rows;
}

}  // namespace detail

/// Calibration CSV: header `n_ones,n_toggles,current_ma`, one sample per line.
inline std::vector<CurrentSample> parse_calibration_csv(std::istream& in) {
  std::vector<CurrentSample> out;
  for (const auto& r : detail::read_numeric_csv(in, {"n_ones", "n_toggles", "current_ma"}))
    out.push_back({r[0], r[1], r[2]});
  return out;
}

inline std::vector<CurrentSample> load_calibration_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open calibration file '" + path + "'");
  try {
    return parse_calibration_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.reason(), path);
  }
}

}  // namespace vampire
