#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "vampire/datadep.hpp"
#include "vampire/profiles.hpp"
#include "vampire/regression.hpp"

using namespace vampire;

namespace {

// Least squares via column-pivoted QR on the raw design matrix.
Eigen::VectorXd qr_solve(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd a(n, static_cast<Eigen::Index>(cols.size()) + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (std::size_t j = 0; j < cols.size(); ++j) a(i, Eigen::Index(j) + 1) = cols[j][std::size_t(i)];
    b(i) = y[std::size_t(i)];
  }
  return a.colPivHouseholderQr().solve(b);
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST(Regression, LineMatchesQr) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> x(-500.0, 2500.0), e(-5.0, 5.0), coef(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 40;
    const double a = coef(rng) * 10, b = coef(rng);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = x(rng);
      ys[i] = a + b * xs[i] + e(rng);
    }
    const auto line = regression::fit_line(xs, ys);
    const auto q = qr_solve({xs}, ys);
    EXPECT_LT(rel(line.intercept, q(0)), 1e-8);
    EXPECT_LT(rel(line.slope, q(1)), 1e-8);
  }
}

TEST(Regression, PlaneMatchesQr) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> ones(0, 512), toggles(0, 512);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 60;
    std::vector<double> x1(n), x2(n), y(n);
    for (int i = 0; i < n; ++i) {
      x1[i] = ones(rng);
      x2[i] = toggles(rng);
      y[i] = 250.0 + 0.4 * x1[i] + 0.1 * x2[i] + noise(rng);
    }
    regression::Plane pl;
    try {
      pl = regression::fit_plane(x1, x2, y);
    } catch (const RankDeficient&) {
      continue;  // tiny random designs can be collinear
    }
    const auto q = qr_solve({x1, x2}, y);
    EXPECT_LT(rel(pl.intercept, q(0)), 1e-7) << trial;
    EXPECT_LT(rel(pl.slope1, q(1)), 1e-7) << trial;
    EXPECT_LT(rel(pl.slope2, q(2)), 1e-7) << trial;
  }
}

TEST(Regression, FitParamsMatchesQrAndResiduals) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> bits(0, 512);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<CurrentSample> s;
  std::vector<double> x1, x2, y;
  for (int i = 0; i < 300; ++i) {
    const double o = bits(rng), t = bits(rng);
    const double c = 300.0 - 0.2 * o + 0.05 * t + noise(rng);
    s.push_back({o, t, c});
    x1.push_back(o);
    x2.push_back(t);
    y.push_back(c);
  }
  const auto fit = fit_params(s);
  const auto q = qr_solve({x1, x2}, y);
  EXPECT_LT(rel(fit.params.i_zero, q(0)), 1e-9);
  EXPECT_LT(rel(fit.params.d_one, q(1)), 1e-9);
  EXPECT_LT(rel(fit.params.d_toggle, q(2)), 1e-9);

  // r_squared from the QR residual vector
  Eigen::VectorXd yy = Eigen::Map<Eigen::VectorXd>(y.data(), Eigen::Index(y.size()));
  Eigen::VectorXd fitted(yy.size());
  for (Eigen::Index i = 0; i < yy.size(); ++i)
    fitted(i) = q(0) + q(1) * x1[std::size_t(i)] + q(2) * x2[std::size_t(i)];
  const double sres = (yy - fitted).squaredNorm();
  const double stot = (yy.array() - yy.mean()).matrix().squaredNorm();
  EXPECT_NEAR(fit.r_squared, 1.0 - sres / stot, 1e-10);
}

TEST(Regression, ReducedModesMatchQr) {
  std::mt19937_64 rng(44);
  std::uniform_int_distribution<int> bits(0, 512);
  std::vector<CurrentSample> s;
  std::vector<double> x1, x2, y;
  for (int i = 0; i < 50; ++i) {
    const double o = bits(rng), t = bits(rng);
    const double c = 200.0 + 0.3 * o + 0.2 * t;
    s.push_back({o, t, c});
    x1.push_back(o);
    x2.push_back(t);
    y.push_back(c);
  }
  const auto qo = qr_solve({x1}, y);
  const auto fo = fit_params(s, FitMode::OnesOnly);
  EXPECT_LT(rel(fo.params.i_zero, qo(0)), 1e-9);
  EXPECT_LT(rel(fo.params.d_one, qo(1)), 1e-9);
  EXPECT_EQ(fo.params.d_toggle, 0.0);
  const auto qt = qr_solve({x2}, y);
  const auto ft = fit_params(s, FitMode::TogglesOnly);
  EXPECT_LT(rel(ft.params.i_zero, qt(0)), 1e-9);
  EXPECT_LT(rel(ft.params.d_toggle, qt(1)), 1e-9);
  EXPECT_EQ(ft.params.d_one, 0.0);
}

TEST(Regression, ExtrapolationMatchesQr) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> noise(0.0, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FrequencyPoint> pts;
    std::vector<double> f, c;
    for (double mts : {1066.0, 1333.0, 1600.0, 1866.0}) {
      pts.push_back({mts, 30.0 + 0.04 * mts + noise(rng)});
      f.push_back(mts);
      c.push_back(pts.back().current_ma);
    }
    const auto q = qr_solve({f}, c);
    EXPECT_LT(rel(extrapolate_idd(pts, 800).current_ma, q(0) + q(1) * 800), 1e-9);
  }
}

TEST(Regression, RSquaredIsSquaredCorrelation) {
  std::mt19937_64 rng(46);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) {
      x[i] = n(rng);
      y[i] = 2.0 * x[i] + n(rng);
    }
    const auto l = regression::fit_line(x, y);
    std::vector<double> fit(30);
    for (int i = 0; i < 30; ++i) fit[i] = l.intercept + l.slope * x[i];
    Eigen::Map<Eigen::VectorXd> ex(x.data(), 30), ey(y.data(), 30);
    const Eigen::VectorXd dx = ex.array() - ex.mean(), dy = ey.array() - ey.mean();
    const double r = dx.dot(dy) / (dx.norm() * dy.norm());
    EXPECT_NEAR(regression::r_squared(y, fit), r * r, 1e-12);
  }
}

TEST(Regression, ConstantResponse) {
  const std::vector<double> y{5, 5, 5};
  EXPECT_EQ(regression::r_squared(y, y), 1.0);
  EXPECT_EQ(regression::r_squared(y, std::vector<double>{4, 5, 6}), 0.0);
}
