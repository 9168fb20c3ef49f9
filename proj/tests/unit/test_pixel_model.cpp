#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "crlab/errors.hpp"
#include "crlab/info_measures.hpp"
#include "crlab/pixel_model.hpp"
#include "oracles.hpp"

using crlab::PixelModelParams;
using crlab::Rational;

namespace {

PixelModelParams params(double p, Rational q = 1, int m = 256) {
  PixelModelParams out;
  out.alphabet_size = m;
  out.occlusion_prob = p;
  out.quant_step = q;
  return out;
}

double prob2(const crlab::JointPMF& j, int x, int xp) {
  const std::array<std::pair<std::string, Rational>, 2> a{{{"X", x}, {"X_p", xp}}};
  return j.probability(a);
}

}  // namespace

TEST(PixelModel, ValidateRejectsBadParameters) {
  EXPECT_THROW(params(-0.1).validate(), crlab::InputError);
  EXPECT_THROW(params(1.5).validate(), crlab::InputError);
  EXPECT_THROW(params(0.5, 1, 1).validate(), crlab::InputError);
  EXPECT_THROW(params(0.5, Rational(1, 2)).validate(), crlab::InputError);
  EXPECT_NO_THROW(params(0.5, Rational(7, 5)).validate());
}

TEST(PixelModel, QuantizeIsExactFloor) {
  EXPECT_EQ(crlab::quantize(5, 2), Rational(4));
  EXPECT_EQ(crlab::quantize(3, Rational(7, 5)), Rational(14, 5));
  EXPECT_EQ(crlab::quantize(255, 64), Rational(192));
  EXPECT_EQ(crlab::quantize(7, 1), Rational(7));
}

TEST(PixelModel, PerfectPredictionIsDiagonal) {
  const auto j = crlab::build_joint(params(0.0, 64));
  EXPECT_NEAR(prob2(j, 17, 17), 1.0 / 256, 1e-18);
  EXPECT_EQ(prob2(j, 17, 18), 0.0);
  EXPECT_NEAR(crlab::entropy(j, {"R"}).value(), 0.0, 1e-12);
}

TEST(PixelModel, FullOcclusionIsUniformOverPairs) {
  const auto j = crlab::build_joint(params(1.0));
  EXPECT_NEAR(prob2(j, 3, 200), 1.0 / 65536, 1e-20);
  EXPECT_NEAR(prob2(j, 9, 9), 1.0 / 65536, 1e-20);
  EXPECT_NEAR(crlab::mutual_information(j, {"X"}, {"X_p"}).value(), 0.0, 1e-12);
}

TEST(PixelModel, DiagonalMassAtHalfOcclusion) {
  const auto j = crlab::build_joint(params(0.5));
  EXPECT_NEAR(prob2(j, 40, 40), 0.5 / 256 + 0.5 / 65536, 1e-18);
}

TEST(EntropyReport, FullOcclusion) {
  const auto r = crlab::entropy_report(params(1.0));
  EXPECT_NEAR(r.H_R.value(), oracle::pixel_h_r(256, 1.0), 1e-10);
  EXPECT_NEAR(r.H_R.value(), 8.72, 0.01);
  EXPECT_NEAR(r.H_X_given_Xp.value(), 8.0, 1e-9);
}

TEST(EntropyReport, PerfectPredictionCoarseQuantizer) {
  const auto r = crlab::entropy_report(params(0.0, 64));
  EXPECT_NEAR(r.H_X_given_Xphat.value(), 6.0, 1e-9);
  EXPECT_NEAR(r.H_R_given_Xphat.value(), 0.0, 1e-9);
}

TEST(EntropyReport, HalfOcclusionMatchesOracle) {
  const auto r = crlab::entropy_report(params(0.5));
  const double h = oracle::pixel_h_x_given_xp(256, 0.5);
  EXPECT_NEAR(h, 4.981551739955419, 1e-12);
  EXPECT_NEAR(r.H_X_given_Xp.value(), h, 1e-10);
  EXPECT_NEAR(r.H_R.value(), oracle::pixel_h_r(256, 0.5), 1e-10);
  EXPECT_NEAR(r.H_R_given_Xp.value(), h, 1e-10);
  EXPECT_NEAR(r.I_X_Xp.value(), 8.0 - h, 1e-10);
}

TEST(EntropyReport, QuantizerLossAtQ2) {
  const auto r = crlab::entropy_report(params(0.5, 2));
  EXPECT_NEAR(r.H_Xp.value() - r.H_Xphat.value(), 1.0, 1e-9);
  EXPECT_NEAR(r.H_Xphat.value(), 7.0, 1e-9);
}

TEST(EntropyReport, OrderingAcrossQuantizers) {
  for (double p : {0.1, 0.5, 0.9}) {
    for (int q : {1, 2, 64}) {
      const auto r = crlab::entropy_report(params(p, q));
      EXPECT_LE(r.H_R_given_Xphat.value(), r.H_R.value() + 1e-9);
      EXPECT_LE(r.H_X_given_Xp.value(), r.H_X_given_Xphat.value() + 1e-9);
      EXPECT_LE(r.H_R_given_Xp.value(), r.H_R_given_Xphat.value() + 1e-9);
    }
  }
}

TEST(SweepP, SinglePointMatchesReport) {
  const std::array<double, 1> grid{0.37};
  const std::array<Rational, 1> qs{Rational(2)};
  const auto rows = crlab::sweep_p(grid, qs);
  ASSERT_EQ(rows.size(), 1u);
  const auto r = crlab::entropy_report(params(0.37, 2));
  EXPECT_EQ(rows[0].H_R.value(), r.H_R.value());
  EXPECT_EQ(rows[0].H_X_given_Xphat.value(), r.H_X_given_Xphat.value());
}

TEST(SweepP, OrderedByQThenP) {
  const std::array<double, 2> grid{0.9, 0.1};
  const std::array<Rational, 2> qs{Rational(64), Rational(1)};
  const auto rows = crlab::sweep_p(grid, qs);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].quant_step, Rational(1));
  EXPECT_EQ(rows[0].occlusion_prob, 0.1);
  EXPECT_EQ(rows[3].quant_step, Rational(64));
  EXPECT_EQ(rows[3].occlusion_prob, 0.9);
}

TEST(SweepP, ConditionalCoderLosesAtLowOcclusionForQ2) {
  const auto grid = crlab::default_p_grid();
  ASSERT_EQ(grid.size(), 100u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.01);
  EXPECT_DOUBLE_EQ(grid.back(), 1.0);
  const std::array<Rational, 1> qs{Rational(2)};
  const auto rows = crlab::sweep_p(grid, qs);
  bool worse_somewhere = false;
  for (const auto& r : rows) {
    if (r.H_X_given_Xphat.value() > r.H_R.value()) worse_somewhere = true;
  }
  EXPECT_TRUE(worse_somewhere);
}

TEST(SweepP, DefaultQuantizerList) {
  const auto qs = crlab::default_q_list();
  ASSERT_EQ(qs.size(), 4u);
  EXPECT_EQ(qs[1], Rational(7, 5));
}
