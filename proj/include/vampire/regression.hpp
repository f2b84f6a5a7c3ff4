#pragma once

// Ordinary least squares for one or two regressors with an intercept,
// solved on centered data so the normal equations stay well conditioned.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "vampire/common.hpp"

namespace vampire::regression {

struct Line {
  double intercept = 0.0;
  double slope = 0.0;
};

struct Plane {
  double intercept = 0.0;
  double slope1 = 0.0;
  double slope2 = 0.0;
};

namespace detail {

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

/// Coefficient of determination of a least-squares fit. For OLS with an
/// intercept this equals the squared Pearson correlation between observed
/// and fitted responses. A constant response fitted exactly scores 1.
inline double r_squared(std::span<const double> observed, std::span<const double> fitted) {
  const double my = detail::mean(observed);
  double stot = 0.0, sres = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    stot += (observed[i] - my) * (observed[i] - my);
    sres += (observed[i] - fitted[i]) * (observed[i] - fitted[i]);
  }
  // rounding in the mean leaves stot slightly above zero for a constant
  const double floor = 1e-20 * static_cast<double>(observed.size()) * (1.0 + my * my);
  if (stot <= floor) return sres <= floor ? 1.0 : 0.0;
  return std::clamp(1.0 - sres / stot, 0.0, 1.0);
}

/// y = intercept + slope * x. Throws DegenerateFit when x is constant.
inline Line fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DegenerateFit("need at least two points");
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 1e-12 * (1.0 + mx * mx) * static_cast<double>(x.size()))
    throw DegenerateFit("regressor is constant");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

/// y = intercept + slope1 * x1 + slope2 * x2. Throws RankDeficient when the
/// regressors are constant or collinear.
inline Plane fit_plane(std::span<const double> x1, std::span<const double> x2,
                       std::span<const double> y) {
  if (x1.size() != y.size() || x2.size() != y.size() || y.size() < 3)
    throw RankDeficient("need at least three samples");
  const double m1 = detail::mean(x1), m2 = detail::mean(x2), my = detail::mean(y);
  double s11 = 0.0, s22 = 0.0, s12 = 0.0, s1y = 0.0, s2y = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d1 = x1[i] - m1, d2 = x2[i] - m2, dy = y[i] - my;
    s11 += d1 * d1;
    s22 += d2 * d2;
    s12 += d1 * d2;
    s1y += d1 * dy;
    s2y += d2 * dy;
  }
  const double det = s11 * s22 - s12 * s12;
  if (s11 <= 0.0 || s22 <= 0.0 || det <= 1e-10 * s11 * s22)
    throw RankDeficient("regressors are constant or collinear");
  const double b1 = (s22 * s1y - s12 * s2y) / det;
  const double b2 = (s11 * s2y - s12 * s1y) / det;
  return {my - b1 * m1 - b2 * m2, b1, b2};
}

}  // namespace vampire::regression
