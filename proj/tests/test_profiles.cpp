#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "vampire/profiles.hpp"

using namespace vampire;

namespace {

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
  std::istringstream in(text);
  std::string out, raw;
  while (std::getline(in, raw)) {
    if (raw.rfind(key + " =", 0) == 0) {
      if (!line.empty()) out += line + "\n";
    } else {
      out += raw + "\n";
    }
  }
  return out;
}

}  // namespace

TEST(Profiles, BuiltinLookup) {
  EXPECT_EQ(builtin_profile("vendorA")->name, "vendorA");
  EXPECT_EQ(builtin_profile("B")->name, "vendorB");
  EXPECT_EQ(builtin_profile("VENDORC")->name, "vendorC");
  EXPECT_FALSE(builtin_profile("vendorD"));
}

TEST(Profiles, PublishedMeasuredMeans) {
  const auto a = vendor_a_profile(), b = vendor_b_profile(), c = vendor_c_profile();
  EXPECT_EQ(a.current(IddKey::IDD0), 72.2);
  EXPECT_EQ(b.current(IddKey::IDD0), 70.4);
  EXPECT_EQ(c.current(IddKey::IDD0), 58.1);
  EXPECT_EQ(a.current(IddKey::IDD1), 107.4);
  EXPECT_EQ(b.current(IddKey::IDD1), 114.9);
  EXPECT_EQ(c.current(IddKey::IDD1), 87.9);
  EXPECT_EQ(c.current(IddKey::IDD4R), 343.5);
  // published values are not flagged as placeholders
  for (const auto& p : default_profiles()) {
    EXPECT_FALSE(p.synthetic.count("idd0_ma"));
    EXPECT_FALSE(p.synthetic.count("idd1_ma"));
    EXPECT_TRUE(p.synthetic.count("idd2n_ma"));
  }
  EXPECT_FALSE(c.synthetic.count("idd4r_ma"));
}

TEST(Profiles, ShippedDefaultsAreClean) {
  for (const auto& p : default_profiles()) {
    EXPECT_TRUE(lint_profile(p).empty()) << p.name;
    EXPECT_GE(p.current(IddKey::IDD3N), p.current(IddKey::IDD2N));
    EXPECT_TRUE(p.variation.valid());
    EXPECT_EQ(p.vdd, 1.35);
    EXPECT_EQ(p.timings.trcd_ns, 13.75);
    EXPECT_EQ(p.timings.trp_ns, 13.75);
    EXPECT_EQ(p.timings.tras_ns, 35.0);
  }
}

TEST(Profiles, MeasuredBelowDatasheetWherePublished) {
  for (const auto& p : default_profiles())
    for (auto k : {IddKey::IDD0, IddKey::IDD2N, IddKey::IDD3N, IddKey::IDD4W, IddKey::IDD5B})
      EXPECT_LT(p.current(k), p.datasheet(k)) << p.name << " " << to_string(k);
}

TEST(Profiles, MissingKeyAccessors) {
  auto p = vendor_a_profile();
  p.idd.erase(IddKey::IDD7);
  EXPECT_THROW(p.current(IddKey::IDD7), MissingKey);
  p.idd_datasheet.clear();
  EXPECT_THROW(p.datasheet(IddKey::IDD0), MissingKey);
}

// ---------------------------------------------------------------------------

TEST(ProfileFile, RoundTripShipped) {
  for (const auto& p : default_profiles()) EXPECT_EQ(parse_profile(save_profile(p)), p) << p.name;
}

TEST(ProfileFile, RoundTripRandomValues) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.001, 1000.0);
  for (int i = 0; i < 200; ++i) {
    auto p = vendor_b_profile();
    p.name = "rand" + std::to_string(i);
    p.vdd = u(rng);
    p.timings.trfc_ns = u(rng);
    for (auto& [k, v] : p.idd) v = u(rng);
    for (auto& [k, v] : p.idd_datasheet) v = u(rng);
    for (auto c : kInterleaveClasses) p.datadep.at(Operation::Read, c).d_toggle = u(rng) / 1e4;
    p.variation.bank_read_factor[3] = u(rng);
    p.variation.row_ones_slope = u(rng) / 1e5;
    if (i % 2) p.io_per_one_ma = u(rng) / 100;
    if (i % 3 == 0) p.synthetic.clear();
    EXPECT_EQ(parse_profile(save_profile(p)), p);
  }
}

TEST(ProfileFile, UnitsInKeyNames) {
  const auto text = save_profile(vendor_a_profile());
  for (const char* key : {"vdd_v = 1.35", "trcd_ns = 13.75", "idd0_ma = 72.2",
                          "idd0_datasheet_ma = ", "read.column_only.i_zero_ma = 246.44",
                          "write.no_interleave.d_one_ma = -0.217", "row_ones_slope = 0.00973"})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(ProfileFile, Errors) {
  const auto good = save_profile(vendor_a_profile());
  EXPECT_THROW(parse_profile(replace_line(good, "idd3n_ma", "")), MissingKey);
  EXPECT_THROW(parse_profile(good + "bogus_key = 1\n"), ParseError);
  EXPECT_THROW(parse_profile(good + "idd0_ma = 5\n"), ParseError);
  EXPECT_THROW(parse_profile(replace_line(good, "vdd_v", "vdd_v = 1.3x")), ParseError);
  EXPECT_THROW(parse_profile(replace_line(good, "bank_idle_factor", "bank_idle_factor = 1,1")),
               ParseError);
  EXPECT_THROW(parse_profile(good + "just words\n"), ParseError);
  EXPECT_THROW(load_profile("/nonexistent/x.prof"), IoError);
}

TEST(ProfileFile, LoadNamesSource) {
  auto path = std::filesystem::temp_directory_path() / "vampire_bad.prof";
  std::ofstream(path) << save_profile(vendor_a_profile()) << "nonsense_key = 3\n";
  try {
    load_profile(path.string());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST(ProfileLint, FlagsBrokenInvariants) {
  auto p = vendor_a_profile();
  p.idd[IddKey::IDD3N] = 10.0;
  p.datadep.at(Operation::Write, InterleaveClass::ColumnOnly).d_one = 0.3;
  p.variation.bank_idle_factor[0] = 1.1;
  p.timings.trc_ns = 20.0;
  p.vdd = 0.0;
  const auto msgs = lint_profile(p);
  auto has = [&](const std::string& s) {
    for (const auto& m : msgs)
      if (m.find(s) != std::string::npos) return true;
    return false;
  };
  EXPECT_TRUE(has("idd3n_ma must be >= idd2n_ma"));
  EXPECT_TRUE(has("write.column_only.d_one_ma"));
  EXPECT_TRUE(has("bank_idle_factor for bank 0"));
  EXPECT_TRUE(has("trc_ns"));
  EXPECT_TRUE(has("vdd_v"));
}

// ---------------------------------------------------------------------------

TEST(ExtrapolateIdd, ExactLine) {
  const auto r = extrapolate_idd({{1066, 100}, {1333, 120}, {1600, 140}}, 800);
  // line through the three points, by hand: slope 20/267 per MT/s
  const double expected = 100.0 - 266.0 * 20.0 / 267.0;
  EXPECT_NEAR(r.current_ma, expected, 1e-9);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-12);
}

TEST(ExtrapolateIdd, Degenerate) {
  EXPECT_THROW(extrapolate_idd({{1333, 100}, {1333, 110}, {1333, 120}}, 800), DegenerateFit);
  EXPECT_THROW(extrapolate_idd({{1333, 100}}, 800), DegenerateFit);
}

TEST(ExtrapolateIdd, NoisySixPoints) {
  std::mt19937_64 rng(1783);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FrequencyPoint> pts;
    for (double f : {1066.0, 1333.0, 1600.0, 1866.0, 2133.0, 2400.0})
      pts.push_back({f, 20.0 + 0.05 * f + noise(rng)});
    const auto r = extrapolate_idd(pts, 800);
    EXPECT_GE(r.r_squared, 0.97);
    EXPECT_NEAR(r.current_ma, 60.0, 5.0);
  }
}

TEST(FrequencyCsv, Parses) {
  std::istringstream in("mts,current_ma\n1066,100\n1333,120\n");
  auto pts = parse_frequency_csv(in);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].mts, 1333.0);
  std::istringstream bad("freq,ma\n");
  EXPECT_THROW(parse_frequency_csv(bad), ParseError);
}

TEST(Guardband, PublishedRatios) {
  const auto a = guardband_report(vendor_a_profile(), {IddKey::IDD2N});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(a[0].ratio, 0.383, 5e-4);
  EXPECT_NEAR(guardband_report(vendor_b_profile(), {IddKey::IDD2N})[0].ratio, 0.766, 5e-4);
  EXPECT_NEAR(guardband_report(vendor_c_profile(), {IddKey::IDD2N})[0].ratio, 0.549, 5e-4);
  EXPECT_NEAR(guardband_report(vendor_c_profile(), {IddKey::IDD4R})[0].ratio, 1.114, 5e-4);
}

TEST(Guardband, EqualValuesGiveOne) {
  auto p = vendor_a_profile();
  p.idd_datasheet = p.idd;
  for (const auto& row : guardband_report(p)) EXPECT_EQ(row.ratio, 1.0);
  EXPECT_EQ(guardband_report(p).size(), kIddKeys.size());
}

TEST(Guardband, MissingKey) {
  auto p = vendor_a_profile();
  p.idd_datasheet.erase(IddKey::IDD5B);
  EXPECT_THROW(guardband_report(p), MissingKey);
}
