#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <vector>

#include "crlab/analysis.hpp"
#include "crlab/errors.hpp"
#include "crlab/pixel_model.hpp"

using namespace crlab::analysis;
namespace rd = crlab::rd;

namespace {

QualityCurve scaled(const std::vector<QualityPoint>& pts, double factor) {
  std::vector<QualityPoint> out = pts;
  for (auto& p : out) p.rate *= factor;
  return QualityCurve(out);
}

const std::vector<QualityPoint> kRef{{1, 30}, {2, 33}, {4, 36}, {8, 39}};
const std::vector<QualityPoint> kRefLong{{0.7, 28}, {1.1, 30.5}, {2, 33}, {3.1, 35}, {5, 37.5}, {8, 39}};

}  // namespace

TEST(BdRate, IdentityIsExactlyZero) {
  EXPECT_EQ(bd_rate(QualityCurve(kRef), QualityCurve(kRef)), 0.0);
  EXPECT_EQ(bd_rate(QualityCurve(kRefLong), QualityCurve(kRefLong)), 0.0);
}

TEST(BdRate, ConstantRateFactor) {
  EXPECT_NEAR(bd_rate(QualityCurve(kRef), scaled(kRef, 2.0)), 100.0, 1e-6);
  EXPECT_NEAR(bd_rate(QualityCurve(kRef), scaled(kRef, 0.5)), -50.0, 1e-6);
  EXPECT_NEAR(bd_rate(QualityCurve(kRefLong), scaled(kRefLong, 2.0)), 100.0, 1e-6);
}

TEST(BdRate, ShiftedQualityMatchesHandIntegral) {
  // log10(rate) is exactly linear in quality on kRef: log10 r = (q - 30) log10(2) / 3.
  // Shifting quality by +3 dB at equal rate halves the rate needed over the overlap.
  std::vector<QualityPoint> test = kRef;
  for (auto& p : test) p.quality += 3.0;
  EXPECT_NEAR(bd_rate(QualityCurve(kRef), QualityCurve(test)), -50.0, 1e-9);
}

TEST(BdRate, NoOverlapThrows) {
  std::vector<QualityPoint> far = kRef;
  for (auto& p : far) p.quality += 100.0;
  EXPECT_THROW((void)bd_rate(QualityCurve(kRef), QualityCurve(far)), crlab::InputError);
}

TEST(QualityCurve, Validation) {
  EXPECT_THROW(QualityCurve({{1, 30}, {2, 33}, {4, 36}}), crlab::InputError);
  EXPECT_THROW(QualityCurve({{1, 30}, {0, 33}, {4, 36}, {8, 39}}), crlab::InputError);
  EXPECT_THROW(QualityCurve({{1, 30}, {2, 30}, {4, 36}, {8, 39}}), crlab::InputError);
  EXPECT_THROW(QualityCurve({{3, 30}, {2, 33}, {4, 36}, {8, 39}}), crlab::InputError);
  const QualityCurve sorted({{8, 39}, {1, 30}, {4, 36}, {2, 33}});
  EXPECT_EQ(sorted.min_quality(), 30.0);
  EXPECT_EQ(sorted.max_quality(), 39.0);
}

TEST(QualityCurve, FromRdDropsDegeneratePoints) {
  rd::RDCurve c;
  c.points = {{5.0, 0.0, 0, true, 0},  {3.0, 0.5, 0, true, 0}, {2.0, 1.0, 0, true, 0},
              {1.0, 2.0, 0, true, 0},  {0.5, 3.0, 0, true, 0}, {1e-5, 4.0, 0, true, 0},
              {0.0, 5.0, 0, true, 0}};
  const auto q = QualityCurve::from_rd(c, 15.0);
  ASSERT_EQ(q.points().size(), 4u);
  EXPECT_NEAR(q.points().front().rate, 0.5, 0.0);
  EXPECT_NEAR(q.max_quality(), mse_to_psnr(0.5, 15.0), 1e-12);
}

TEST(Psnr, Examples) {
  EXPECT_NEAR(mse_to_psnr(255.0 * 255.0, 255.0), 0.0, 1e-12);
  EXPECT_NEAR(mse_to_psnr(255.0 * 255.0 / 100.0, 255.0), 20.0, 1e-12);
  EXPECT_EQ(mse_to_psnr(0.0, 255.0), std::numeric_limits<double>::infinity());
  EXPECT_THROW((void)mse_to_psnr(-1.0, 255.0), crlab::InputError);
}

TEST(SweepCsv, EmptyTableIsHeaderOnly) {
  std::ostringstream os;
  write_sweep_csv(os, {});
  EXPECT_EQ(os.str(), std::string(kSweepHeader) + "\n");
  std::istringstream is(os.str());
  EXPECT_TRUE(parse_sweep_csv(is).empty());
}

TEST(SweepCsv, RoundTrip) {
  const std::array<double, 2> ps{0.25, 0.5};
  const std::array<crlab::Rational, 2> qs{crlab::Rational(1), crlab::Rational(7, 5)};
  const auto rows = crlab::sweep_p(ps, qs, 32);
  std::ostringstream os;
  write_sweep_csv(os, rows, "unit test");
  EXPECT_EQ(os.str().rfind("# unit test\n", 0), 0u);
  std::istringstream is(os.str());
  const auto back = parse_sweep_csv(is);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].quant_step, rows[i].quant_step);
    EXPECT_EQ(back[i].occlusion_prob, rows[i].occlusion_prob);
    EXPECT_NEAR(back[i].H_R.value(), rows[i].H_R.value(), 1e-8);
    EXPECT_NEAR(back[i].I_R_Xphat.value(), rows[i].I_R_Xphat.value(), 1e-8);
  }
}

TEST(SweepCsv, MalformedRowsReportLine) {
  std::istringstream is(std::string(kSweepHeader) + "\n1,0.5,1,2\n");
  try {
    (void)parse_sweep_csv(is);
    FAIL() << "expected InputError";
  } catch (const crlab::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  std::istringstream wrong_header("a,b,c\n");
  EXPECT_THROW((void)parse_sweep_csv(wrong_header), crlab::InputError);
}

TEST(RdCsv, RoundTripKeepsLabelsInOrder) {
  rd::RDCurve a{"R_Res", {{2.0, 0.1, 8.0, true, 3}, {1.0, 0.4, 1.0, true, 5}}};
  rd::RDCurve b{"R_Cond", {{1.5, 0.1, 8.0, true, 3}}};
  const std::array<rd::RDCurve, 2> curves{a, b};
  std::ostringstream os;
  write_rd_csv(os, curves);
  std::istringstream is(os.str());
  const auto back = parse_rd_csv(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].label, "R_Res");
  EXPECT_EQ(back[1].label, "R_Cond");
  ASSERT_EQ(back[0].points.size(), 2u);
  EXPECT_DOUBLE_EQ(back[0].points[1].distortion, 0.4);
  EXPECT_DOUBLE_EQ(back[1].points[0].rate, 1.5);
}

TEST(CsvFiles, MissingFileIsIoError) {
  EXPECT_THROW((void)read_sweep_csv("/nonexistent/dir/sweep.csv"), crlab::IoError);
  EXPECT_THROW(write_rd_csv("/nonexistent/dir/rd.csv", {}), crlab::IoError);
}

TEST(CsvFiles, WriteThenRead) {
  const auto path = std::filesystem::temp_directory_path() / "crlab_unit_sweep.csv";
  const std::array<double, 1> ps{1.0};
  const std::array<crlab::Rational, 1> qs{crlab::Rational(1)};
  write_sweep_csv(path.string(), crlab::sweep_p(ps, qs));
  const auto back = read_sweep_csv(path.string());
  std::filesystem::remove(path);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_NEAR(back[0].H_X_given_Xp.value(), 8.0, 1e-8);
}

TEST(Format, NineSignificantDigits) {
  EXPECT_EQ(format_g9(8.72131579123), "8.72131579");
  EXPECT_EQ(format_g9(0.5), "0.5");
}
