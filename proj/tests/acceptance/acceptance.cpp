// Acceptance suite: one PASS/FAIL line per criterion.
//
//   crlab_acceptance            run all
//   crlab_acceptance --only 6   run one (exit status reflects it)
//
// Tolerances and time limits are fixed here and never read from the
// environment.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "crlab/analysis.hpp"
#include "crlab/codec.hpp"
#include "crlab/info_measures.hpp"
#include "crlab/pixel_model.hpp"
#include "crlab/rd_solver.hpp"
#include "crlab/theorem_suite.hpp"

using namespace crlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double h2(double d) { return -d * std::log2(d) - (1 - d) * std::log2(1 - d); }

PixelModelParams pixel(double p, Rational q, int m = 256) {
  PixelModelParams out;
  out.alphabet_size = m;
  out.occlusion_prob = p;
  out.quant_step = q;
  return out;
}

// ------------------------------------------------------------------ 1

Outcome criterion1() {
  constexpr double kRateTol = 0.01;
  constexpr double kExactTol = 1e-9;
  std::ostringstream out, err;
  const int code = cli::run({"crlab", "--format", "csv", "sweep", "--p", "1.0", "--M", "256", "--Q", "1"}, out, err);
  if (code != 0) return {false, "sweep exited " + std::to_string(code) + ": " + err.str()};
  std::istringstream is(out.str());
  const auto rows = analysis::parse_sweep_csv(is);
  if (rows.size() != 1) return {false, "expected one row, got " + std::to_string(rows.size())};
  // The CSV carries 9 significant digits; recompute at full precision too.
  const auto full = entropy_report(pixel(1.0, 1));
  const double hr = rows[0].H_R.value();
  const double hc = full.H_X_given_Xp.value();
  const bool ok = std::abs(hr - 8.72) <= kRateTol && std::abs(hc - 8.0) <= kExactTol &&
                  std::abs(rows[0].H_X_given_Xp.value() - 8.0) <= 1e-8;
  return {ok, "H(R)=" + fmt("%.6f", hr) + " H(X|X_p)=" + fmt("%.12f", hc)};
}

// ------------------------------------------------------------------ 2

Outcome criterion2() {
  const auto r2 = entropy_report(pixel(0.5, 2));
  const auto r14 = entropy_report(pixel(0.5, Rational(7, 5)));
  const double loss2 = r2.H_Xp.value() - r2.H_Xphat.value();
  const double loss14 = r14.H_Xp.value() - r14.H_Xphat.value();
  const bool ok2 = std::abs(loss2 - 1.0) <= 1e-9;
  const bool ok14 = std::abs(loss14 - 0.5) <= 0.05;
  return {ok2 && ok14, "loss(Q=2)=" + fmt("%.12f", loss2) + (ok2 ? " ok" : " out of 1.000+/-1e-9") +
                           ", loss(Q=7/5)=" + fmt("%.7f", loss14) + (ok14 ? " ok" : " out of 0.50+/-0.05")};
}

// ------------------------------------------------------------------ 3

Outcome criterion3() {
  const auto rows = sweep_p(default_p_grid(), default_q_list());
  if (rows.size() != 400) return {false, "expected 400 rows"};

  bool a = false;
  double a_p = 0.0;
  bool b = true;
  double b_worst = -std::numeric_limits<double>::infinity();
  bool c = true;
  double c_worst = 0.0;
  for (const auto& r : rows) {
    const double excess = r.H_R_given_Xphat.value() - r.H_R.value();
    b_worst = std::max(b_worst, excess);
    if (excess > 1e-9) b = false;
    if (r.quant_step == Rational(2)) {
      if (!a && r.occlusion_prob < 0.2 && r.H_X_given_Xphat.value() > r.H_R.value()) {
        a = true;
        a_p = r.occlusion_prob;
      }
      const double gap = std::abs(r.H_R_given_Xphat.value() - r.H_X_given_Xp.value());
      c_worst = std::max(c_worst, gap);
      if (gap > 0.02) c = false;
    }
  }
  std::string d = std::string("(a) ") + (a ? "p=" + fmt("%.2f", a_p) : "none") +
                  "; (b) max H(R|X_hat_p)-H(R)=" + fmt("%.3e", b_worst) +
                  "; (c) max |H(R|X_hat_p)-H(X|X_p)|@Q=2=" + fmt("%.4f", c_worst);
  return {a && b && c, d};
}

// ------------------------------------------------------------------ 4

Outcome criterion4() {
  std::ostringstream out, err;
  const int code = cli::run({"crlab", "--seed", "7", "verify", "--trials", "1000", "--shape", "8x8"}, out, err);

  SuiteConfig cfg;
  cfg.trials = 1000;
  cfg.x_size = 8;
  cfg.xp_size = 8;
  cfg.seed = 7;
  const auto report = run_randomized_suite(cfg);

  const char* identities[] = {"lossless/eq12",          "lossless/eq20",          "lossless/eq22",
                              "lossless/eq28",          "lossless/eq37",          "lossy-residual/eq13",
                              "lossy-residual/eq40",    "lossy-residual/eq41",    "lossy-residual/app_chain",
                              "lossy-free/eq13",        "lossy-free/eq40",        "lossy-free/eq41",
                              "lossy-free/app_chain"};
  const char* inequalities[] = {"lossless/eq15",       "lossless/eq16",         "lossless/eq27a",
                                "lossless/eq27b",      "lossy-residual/app_d", "lossy-residual/eq39"};
  std::string missing;
  for (const char* id : identities) {
    const auto* e = report.find(id);
    if (e == nullptr || e->kind != CheckKind::kIdentity || e->evaluated != cfg.trials) missing += std::string(" ") + id;
  }
  for (const char* id : inequalities) {
    const auto* e = report.find(id);
    if (e == nullptr || e->kind != CheckKind::kInequality || e->evaluated != cfg.trials) missing += std::string(" ") + id;
  }
  const double resid = report.max_identity_residual();
  const double margin = report.min_inequality_margin();
  const bool ok = code == 0 && report.all_passed() && missing.empty() && resid < 1e-9 && margin >= -1e-9;
  std::string d = "exit=" + std::to_string(code) + " max|residual|=" + fmt("%.3e", resid) +
                  " min margin=" + fmt("%.3e", margin);
  if (!missing.empty()) d += " missing:" + missing;
  return {ok, d};
}

// ------------------------------------------------------------------ 5

Outcome criterion5() {
  const Alphabet bin = Alphabet::range(0, 1);
  const JointPMF source({{"S", bin}}, {0.5, 0.5});
  const auto hamming = [](const Rational& a, const Rational& b) { return a == b ? 0.0 : 1.0; };
  const rd::ConditionalRDProblem prob(source, "S", "", bin, hamming);

  double worst_binary = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double d = 0.49 * k / 20.0;
    const auto pt = prob.solve_at_distortion(d);
    worst_binary = std::max({worst_binary, std::abs(pt.rate - (1.0 - h2(d))), std::abs(pt.distortion - d)});
  }

  // Four-level source, squared error, side information independent of it.
  const std::vector<double> ps{0.1, 0.4, 0.3, 0.2};
  const std::vector<double> pc{0.5, 0.2, 0.3};
  std::vector<double> table;
  for (double a : ps) {
    for (double c : pc) table.push_back(a * c);
  }
  const JointPMF joint({{"S", Alphabet::range(0, 3)}, {"C", Alphabet::range(0, 2)}}, table);
  const auto slopes = rd::log_slope_grid();
  const auto cond = rd::conditional_rd_curve(joint, "S", "C", slopes);
  const auto plain = rd::conditional_rd_curve(joint.marginalize({"S"}), "S", "", slopes);
  double worst_side = 0.0;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    worst_side = std::max({worst_side, std::abs(cond.points[i].rate - plain.points[i].rate),
                           std::abs(cond.points[i].distortion - plain.points[i].distortion)});
  }
  const bool ok = worst_binary <= 1e-6 && worst_side <= 1e-9 && cond.all_converged() && plain.all_converged();
  return {ok, "binary max err=" + fmt("%.3e", worst_binary) + " bits; independent side info max diff=" +
                  fmt("%.3e", worst_side)};
}

// ------------------------------------------------------------------ 6

Outcome criterion6() {
  constexpr double kTol = 1e-6;
  bool ok = true;
  double worst_condres = -std::numeric_limits<double>::infinity();
  double worst_ideal = -std::numeric_limits<double>::infinity();
  double worst_eq18 = -std::numeric_limits<double>::infinity();
  std::string failures;
  for (double p : {0.1, 0.3, 0.7}) {
    for (int q : {1, 2, 4}) {
      const auto probs = rd::paradigm_problems(pixel(p, q, 16));
      const double dmax = std::max({probs.residual.zero_rate_distortion(), probs.conditional.zero_rate_distortion(),
                                    probs.conditional_ideal.zero_rate_distortion(),
                                    probs.conditional_residual.zero_rate_distortion()});
      std::vector<double> ds;
      for (int k = 1; k <= 16; ++k) ds.push_back(dmax * k / 17.0);
      for (int k = 0; k < 8; ++k) ds.push_back(dmax / 17.0 * std::pow(10.0, -3.0 + 3.0 * k / 8.0));

      double cfg_worst = -std::numeric_limits<double>::infinity();
      double cfg_at = 0.0;
      for (double d : ds) {
        const auto res = probs.residual.solve_at_distortion(d);
        const auto ideal = probs.conditional_ideal.solve_at_distortion(d);
        const auto cond = probs.conditional.solve_at_distortion(d);
        const auto cres = probs.conditional_residual.solve_at_distortion(d);
        if (!(res.converged && ideal.converged && cond.converged && cres.converged)) {
          ok = false;
          failures += " [p=" + fmt("%g", p) + " Q=" + std::to_string(q) + " D=" + fmt("%.4g", d) + " unconverged]";
        }
        const double ex_cr = cres.rate - std::min(cond.rate, res.rate);
        const double ex_id = ideal.rate - res.rate;
        worst_condres = std::max(worst_condres, ex_cr);
        worst_ideal = std::max(worst_ideal, ex_id);
        worst_eq18 = std::max(worst_eq18, ideal.rate - cond.rate);
        const double ex = std::max(ex_cr, ex_id);
        if (ex > cfg_worst) {
          cfg_worst = ex;
          cfg_at = d;
        }
      }
      if (cfg_worst > kTol) {
        ok = false;
        failures += " [p=" + fmt("%g", p) + " Q=" + std::to_string(q) + ": excess " + fmt("%.3e", cfg_worst) +
                    " bit at D=" + fmt("%.4g", cfg_at) + "]";
      }
    }
  }
  std::string d = "max R_CondRes-min(R_Cond,R_Res)=" + fmt("%.3e", worst_condres) +
                  " max R_Cond,ideal-R_Res=" + fmt("%.3e", worst_ideal) +
                  " (info: max R_Cond,ideal-R_Cond=" + fmt("%.3e", worst_eq18) + ")";
  if (!failures.empty()) d += "; violations:" + failures;
  return {ok, d};
}

// ------------------------------------------------------------------ 7

Outcome criterion7() {
  constexpr std::size_t kN = 100000;
  bool ok = true;
  double worst_ratio = 0.0;
  double rate_cond = 0.0;
  double rate_res = 0.0;
  std::string failures;
  std::uint64_t seed = 7;
  for (double p : {0.25, 0.5, 1.0}) {
    for (int q : {1, 2, 64}) {
      const auto params = pixel(p, q);
      const auto report = entropy_report(params);
      const auto seq = codec::sample_pixels(params, kN, seed++);
      std::vector<int> xp;
      std::vector<int> x;
      for (const auto& s : seq) {
        xp.push_back(s.x_p);
        x.push_back(s.x);
      }
      for (auto par : {codec::Paradigm::kResidual, codec::Paradigm::kConditional,
                       codec::Paradigm::kConditionalResidual}) {
        const auto model = codec::ProbabilityModel::for_paradigm(params, par);
        const auto bytes = codec::encode(seq, par, model).serialize();
        const auto decoded = codec::decode(bytes, xp, model);
        const auto bs = codec::Bitstream::parse(bytes);
        const double rate = codec::measure_rate(bs, kN);
        const double h = par == codec::Paradigm::kResidual      ? report.H_R.value()
                         : par == codec::Paradigm::kConditional ? report.H_X_given_Xphat.value()
                                                                : report.H_R_given_Xphat.value();
        const double tol = 0.02 * h + 64.0 / static_cast<double>(kN);
        worst_ratio = std::max(worst_ratio, std::abs(rate - h) / tol);
        if (decoded != x || std::abs(rate - h) > tol) {
          ok = false;
          failures += " [" + std::string(codec::to_string(par)) + " p=" + fmt("%g", p) + " Q=" + std::to_string(q) +
                      (decoded != x ? " round trip" : " rate " + fmt("%.4f", rate) + " vs " + fmt("%.4f", h)) + "]";
        }
        if (p == 0.25 && q == 2) {
          if (par == codec::Paradigm::kConditional) rate_cond = rate;
          if (par == codec::Paradigm::kResidual) rate_res = rate;
        }
      }
    }
  }
  const bool bottleneck = rate_cond > rate_res;
  std::string d = "27 round trips, worst |rate-H|/tol=" + fmt("%.3f", worst_ratio) + "; (p=0.25,Q=2) conditional " +
                  fmt("%.4f", rate_cond) + " vs residual " + fmt("%.4f", rate_res);
  if (!failures.empty()) d += "; failures:" + failures;
  return {ok && bottleneck, d};
}

// ------------------------------------------------------------------ 8

Outcome criterion8() {
  using analysis::QualityCurve;
  using analysis::QualityPoint;
  const auto curves = rd::compare_paradigms(pixel(0.3, 4, 16), rd::log_slope_grid());
  const auto ref = QualityCurve::from_rd(curves.residual, 15.0);
  std::vector<QualityPoint> doubled(ref.points().begin(), ref.points().end());
  for (auto& pt : doubled) pt.rate *= 2.0;

  const std::vector<QualityPoint> simple{{1, 30}, {2, 33}, {4, 36}, {8, 39}};
  std::vector<QualityPoint> simple2 = simple;
  for (auto& pt : simple2) pt.rate *= 2.0;

  const double id_rd = analysis::bd_rate(ref, ref);
  const double id_simple = analysis::bd_rate(QualityCurve(simple), QualityCurve(simple));
  const double dbl_rd = analysis::bd_rate(ref, QualityCurve(doubled));
  const double dbl_simple = analysis::bd_rate(QualityCurve(simple), QualityCurve(simple2));
  const bool ok = id_rd == 0.0 && id_simple == 0.0 && std::abs(dbl_rd - 100.0) <= 1e-6 &&
                  std::abs(dbl_simple - 100.0) <= 1e-6;
  return {ok, "identity " + fmt("%g", id_rd) + "/" + fmt("%g", id_simple) + "; doubled " + fmt("%.9f", dbl_rd) +
                  "/" + fmt("%.9f", dbl_simple)};
}

struct Criterion {
  int number;
  double time_limit;  // seconds; 0 = none
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 64;
    }
  }

  const std::vector<Criterion> criteria{
      {1, 1.0, criterion1},  {2, 0.0, criterion2},   {3, 30.0, criterion3}, {4, 60.0, criterion4},
      {5, 0.0, criterion5},  {6, 300.0, criterion6}, {7, 120.0, criterion7}, {8, 0.0, criterion8},
  };

  int failed = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass;
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      pass = false;
      o.detail += "; over time limit " + fmt("%g", c.time_limit) + " s";
    }
    std::printf("criterion %d: %s %s (%.2f s)\n", c.number, pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 64;
  }
  return failed == 0 ? 0 : 1;
}
