#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "crlab/analysis.hpp"
#include "crlab/codec.hpp"
#include "crlab/errors.hpp"
#include "crlab/pixel_model.hpp"
#include "crlab/rd_solver.hpp"
#include "crlab/theorem_suite.hpp"
#include "crlab/version.hpp"

namespace crlab::cli {
namespace {

namespace fs = std::filesystem;

struct Global {
  std::uint64_t seed = 7;
  std::string out_dir;
  std::string format = "plain";
  std::string command_line;

  [[nodiscard]] bool csv() const { return format == "csv"; }

  [[nodiscard]] std::string provenance() const {
    return std::string("crlab ") + kVersion + "; cmd=" + command_line + "; seed=" + std::to_string(seed);
  }

  // Relative paths land in --out-dir, else $CRLAB_OUT_DIR, else the cwd.
  [[nodiscard]] std::string resolve(const std::string& name) const {
    fs::path p(name);
    if (p.is_absolute()) return p.string();
    std::string dir = out_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("CRLAB_OUT_DIR")) dir = env;
    }
    if (!dir.empty()) p = fs::path(dir) / p;
    if (p.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(p.parent_path(), ec);
      if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
    }
    return p.string();
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw InputError("empty list '" + text + "'");
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("bad number '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw InputError("bad number '" + s + "'");
  return v;
}

// "0.5", "0.1,0.2,0.3" or "lo:step:hi".
std::vector<double> parse_p_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw InputError("range must be lo:step:hi");
    const double lo = parse_double(parts[0]), step = parse_double(parts[1]), hi = parse_double(parts[2]);
    if (!(step > 0.0) || hi < lo) throw InputError("bad range '" + text + "'");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
  } else {
    for (const auto& s : split_list(text)) out.push_back(parse_double(s));
  }
  for (const double p : out) {
    if (p < 0.0 || p > 1.0) throw InputError("p must lie in [0, 1]");
  }
  return out;
}

std::vector<Rational> parse_q_list(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& s : split_list(text)) {
    try {
      out.push_back(Rational::parse(s));
    } catch (const std::exception&) {
      throw InputError("bad quantizer step '" + s + "'");
    }
    if (!(out.back() > Rational(0))) throw InputError("quantizer step must be positive");
  }
  return out;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write to '" + path + "' failed");
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
  std::string p = "0.01:0.01:1.0";
  std::string q = "1,1.4,2,64";
  int m = 256;
  std::string out;
};

int cmd_sweep(const Global& g, const SweepArgs& a, std::ostream& out) {
  const auto ps = parse_p_grid(a.p);
  const auto qs = parse_q_list(a.q);
  const auto rows = sweep_p(ps, qs, a.m);

  if (!a.out.empty()) {
    const auto path = g.resolve(a.out);
    analysis::write_sweep_csv(path, rows, g.provenance());
    out << (g.csv() ? "# " : "") << "wrote " << rows.size() << " rows to " << path << '\n';
  } else if (g.csv()) {
    analysis::write_sweep_csv(out, rows, g.provenance());
  } else {
    out << "# " << g.provenance() << '\n';
    char line[256];
    std::snprintf(line, sizeof line, "%8s %6s %10s %12s %14s %14s\n", "Q", "p", "H(R)", "H(X|X_p)", "H(X|X_hat_p)",
                  "H(R|X_hat_p)");
    out << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%8s %6.3f %10.6f %12.6f %14.6f %14.6f\n",
                    analysis::format_g9(r.quant_step.to_double()).c_str(), r.occlusion_prob, r.H_R.value(),
                    r.H_X_given_Xp.value(), r.H_X_given_Xphat.value(), r.H_R_given_Xphat.value());
      out << line;
    }
  }

  // Rows come ordered by (Q, p): look for sign changes of H(X|X_hat_p) - H(R).
  std::size_t crossings = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a0 = rows[i - 1];
    const auto& a1 = rows[i];
    if (!(a0.quant_step == a1.quant_step)) continue;
    const double d0 = a0.H_X_given_Xphat.value() - a0.H_R.value();
    const double d1 = a1.H_X_given_Xphat.value() - a1.H_R.value();
    if ((d0 > 0.0) == (d1 > 0.0)) continue;
    ++crossings;
    const double t = d0 / (d0 - d1);
    const double p_star = a0.occlusion_prob + t * (a1.occlusion_prob - a0.occlusion_prob);
    out << (g.csv() ? "# " : "") << "crossover Q=" << analysis::format_g9(a0.quant_step.to_double())
        << ": H(X|X_hat_p) - H(R) changes sign between p=" << analysis::format_g9(a0.occlusion_prob)
        << " and p=" << analysis::format_g9(a1.occlusion_prob) << " (p*~" << fmt("%.4f", p_star) << ")\n";
  }
  if (crossings == 0) out << (g.csv() ? "# " : "") << "no crossover on this grid\n";
  return kOk;
}

// ----------------------------------------------------------------- verify

struct VerifyArgs {
  std::size_t trials = 1000;
  std::string shape = "8x8";
  double concentration = 1.0;
  double inject_fault = 0.0;
  std::string report;
};

int cmd_verify(const Global& g, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  SuiteConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = g.seed;
  cfg.concentration = a.concentration;
  cfg.options.identity_fault = a.inject_fault;
  const auto x = a.shape.find('x');
  if (x == std::string::npos) throw InputError("shape must look like AxB");
  try {
    cfg.x_size = std::stoul(a.shape.substr(0, x));
    cfg.xp_size = std::stoul(a.shape.substr(x + 1));
  } catch (const std::exception&) {
    throw InputError("shape must look like AxB");
  }
  if (cfg.trials < 1 || cfg.x_size < 1 || cfg.xp_size < 1) throw InputError("trials and shape must be >= 1");
  if (!(cfg.concentration > 0.0)) throw InputError("concentration must be positive");

  const auto report = run_randomized_suite(cfg);
  out << "# " << g.provenance() << '\n';
  if (g.csv()) {
    report.write_csv(out);
  } else {
    report.write_text(out);
    out << "max |identity residual| = " << fmt("%.3e", report.max_identity_residual())
        << ", min inequality margin = " << fmt("%.3e", report.min_inequality_margin()) << '\n';
  }
  if (!a.report.empty()) {
    const auto path = g.resolve(a.report);
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << "# " << g.provenance() << '\n';
    report.write_csv(f);
  }
  if (report.all_passed()) return kOk;

  std::optional<std::size_t> first;
  for (const auto& e : report.entries()) {
    if (e.first_failure_trial && (!first || *e.first_failure_trial < *first)) first = e.first_failure_trial;
  }
  err << "verification FAILED; replay with: crlab verify --trials " << a.trials << " --shape " << a.shape
      << " --seed " << g.seed << '\n';
  if (first) {
    err << "first failing trial " << *first << " (trial seed " << trial_seed(g.seed, *first) << ")\n";
  }
  return kVerifyFailed;
}

// --------------------------------------------------------------------- rd

struct RdArgs {
  int m = 16;
  double p = 0.3;
  std::string q = "1";
  std::size_t slopes = 64;
  double slope_min = 1e-3;
  double slope_max = 1e3;
  bool force = false;
  std::string out;
  std::string bd_out;
};

int cmd_rd(const Global& g, const RdArgs& a, std::ostream& out) {
  if (a.slopes < 2 || !(a.slope_min > 0.0) || !(a.slope_max > a.slope_min)) {
    throw InputError("need >= 2 slopes and 0 < slope-min < slope-max");
  }
  PixelModelParams params;
  params.alphabet_size = a.m;
  params.occlusion_prob = a.p;
  const auto qs = parse_q_list(a.q);
  if (qs.size() != 1) throw InputError("rd takes a single quantizer step");
  params.quant_step = qs.front();
  params.validate();

  const auto slopes = rd::log_slope_grid(a.slopes, a.slope_min, a.slope_max);
  const auto curves = rd::compare_paradigms(params, slopes, {}, a.force);
  std::vector<rd::RDCurve> all;
  for (const auto* c : curves.all()) all.push_back(*c);

  const std::string prov = g.provenance() + "; bd_method=" + analysis::kBdMethod;
  if (!a.out.empty()) {
    const auto path = g.resolve(a.out);
    analysis::write_rd_csv(path, all, prov);
    out << "# wrote " << all.size() << " curves to " << path << '\n';
  } else if (g.csv()) {
    analysis::write_rd_csv(out, all, prov);
  }
  if (!g.csv()) out << "# " << prov << '\n';

  for (const auto& c : all) {
    std::size_t bad = 0;
    for (const auto& p : c.points) bad += p.converged ? 0 : 1;
    if (bad > 0 || !g.csv()) {
      out << (g.csv() ? "# " : "") << c.label << ": " << c.points.size() << " points, rate "
          << fmt("%.6f", c.points.empty() ? 0.0 : c.points.front().rate) << " .. "
          << fmt("%.6f", c.points.empty() ? 0.0 : c.points.back().rate) << " bits";
      if (bad > 0) out << ", WARNING " << bad << " points did not converge";
      out << '\n';
    }
  }

  // BD matrix after mapping distortion to PSNR with peak M - 1.
  const double peak = static_cast<double>(a.m - 1);
  std::vector<std::optional<analysis::QualityCurve>> qc;
  for (const auto& c : all) {
    try {
      qc.emplace_back(analysis::QualityCurve::from_rd(c, peak));
    } catch (const InputError&) {
      qc.emplace_back(std::nullopt);
    }
  }
  std::ostringstream table;
  table << "reference,test,bd_rate_percent\n";
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (i == j) continue;
      std::string cell = "undefined";
      if (qc[i] && qc[j]) {
        try {
          cell = fmt("%.4f", analysis::bd_rate(*qc[i], *qc[j]));
        } catch (const InputError&) {
        }
      }
      table << all[i].label << ',' << all[j].label << ',' << cell << '\n';
    }
  }
  if (g.csv()) {
    out << "# bd-rate matrix (" << analysis::kBdMethod << ", peak=" << a.m - 1 << ")\n" << table.str();
  } else {
    out << "BD-rate % (row = reference, column = test; " << analysis::kBdMethod << ", PSNR peak " << a.m - 1
        << ")\n";
    char line[128];
    std::snprintf(line, sizeof line, "%-14s", "");
    out << line;
    for (const auto& c : all) {
      std::snprintf(line, sizeof line, "%14s", c.label.c_str());
      out << line;
    }
    out << '\n';
    std::istringstream rows(table.str());
    std::string row;
    std::getline(rows, row);
    for (std::size_t i = 0; i < all.size(); ++i) {
      std::snprintf(line, sizeof line, "%-14s", all[i].label.c_str());
      out << line;
      for (std::size_t j = 0; j < all.size(); ++j) {
        std::string cell = "-";
        if (i != j) {
          std::getline(rows, row);
          cell = row.substr(row.rfind(',') + 1);
        }
        std::snprintf(line, sizeof line, "%14s", cell.c_str());
        out << line;
      }
      out << '\n';
    }
  }
  if (!a.bd_out.empty()) {
    const auto path = g.resolve(a.bd_out);
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << "# " << prov << '\n' << table.str();
    if (!f) throw IoError("write to '" + path + "' failed");
  }
  return kOk;
}

// ------------------------------------------------------------------ codec

struct CodecArgs {
  double p = 0.5;
  std::string q = "1";
  int m = 256;
  std::size_t n = 100000;
  std::string paradigm = "residual";
  std::string out;
};

int cmd_codec(const Global& g, const CodecArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n < 1) throw InputError("n must be >= 1");
  PixelModelParams params;
  params.alphabet_size = a.m;
  params.occlusion_prob = a.p;
  const auto qs = parse_q_list(a.q);
  if (qs.size() != 1) throw InputError("codec takes a single quantizer step");
  params.quant_step = qs.front();
  params.validate();
  const auto paradigm = codec::parse_paradigm(a.paradigm);

  const auto model = codec::ProbabilityModel::for_paradigm(params, paradigm);
  const auto pixels = codec::sample_pixels(params, a.n, g.seed);
  const auto bs = codec::encode(pixels, paradigm, model);
  const auto bytes = bs.serialize();
  if (!a.out.empty()) write_file(g.resolve(a.out), bytes);

  std::vector<int> xp(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) xp[i] = pixels[i].x_p;
  bool ok = false;
  std::string why;
  try {
    const auto decoded = codec::decode(std::span<const std::uint8_t>(bytes), xp, model);
    ok = decoded.size() == pixels.size();
    for (std::size_t i = 0; ok && i < pixels.size(); ++i) ok = decoded[i] == pixels[i].x;
    if (!ok) why = "decoded symbols differ from the input";
  } catch (const std::exception& e) {
    why = e.what();
  }

  const auto report = entropy_report(params);
  double bound = report.H_R.value();
  const char* bound_name = "H(R)";
  if (paradigm == codec::Paradigm::kConditional) {
    bound = report.H_X_given_Xphat.value();
    bound_name = "H(X|X_hat_p)";
  } else if (paradigm == codec::Paradigm::kConditionalResidual) {
    bound = report.H_R_given_Xphat.value();
    bound_name = "H(R|X_hat_p)";
  }
  const double rate = codec::measure_rate(bs, a.n);

  if (g.csv()) {
    out << "# " << g.provenance() << '\n'
        << "paradigm,p,Q,M,n,payload_bytes,rate_bits,entropy_bits,model_cross_entropy_bits,round_trip\n"
        << codec::to_string(paradigm) << ',' << analysis::format_g9(a.p) << ','
        << analysis::format_g9(params.quant_step.to_double()) << ',' << a.m << ',' << a.n << ','
        << bs.payload.size() << ',' << analysis::format_g9(rate) << ',' << analysis::format_g9(bound) << ','
        << analysis::format_g9(model.cross_entropy(params)) << ',' << (ok ? "ok" : "FAIL") << '\n';
  } else {
    out << "# " << g.provenance() << '\n'
        << "paradigm      " << codec::to_string(paradigm) << '\n'
        << "symbols       " << a.n << '\n'
        << "payload       " << bs.payload.size() << " bytes (+" << codec::Bitstream::kHeaderSize << " header)\n"
        << "rate          " << fmt("%.6f", rate) << " bits/pixel\n"
        << "entropy       " << fmt("%.6f", bound) << " bits/pixel  " << bound_name << '\n'
        << "model x-ent   " << fmt("%.6f", model.cross_entropy(params)) << " bits/pixel\n"
        << "round trip    " << (ok ? "ok" : "FAILED") << '\n';
  }
  if (!ok) {
    err << "codec round trip failed: " << why << '\n';
    return kCodecFailed;
  }
  return kOk;
}

// --------------------------------------------------------------------- bd

struct BdArgs {
  std::string ref;
  std::string test;
  std::string ref_label;
  std::string test_label;
  double peak = 255.0;
};

// Either a "rate,quality" table or an RD curve CSV (distortion mapped to
// PSNR with `peak`).
analysis::QualityCurve load_quality(const Global& g, const std::string& file, const std::string& label,
                                    double peak) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file + "' for reading");
  std::string line;
  while (std::getline(in, line) && (line.empty() || line.front() == '#')) {
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line == "rate,quality") {
    std::vector<analysis::QualityPoint> pts;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#') continue;
      const auto f = split_list(line);
      if (f.size() != 2) throw InputError(file + ": expected rate,quality rows");
      pts.push_back({parse_double(f[0]), parse_double(f[1])});
    }
    return analysis::QualityCurve(std::move(pts));
  }
  (void)g;
  const auto curves = analysis::read_rd_csv(file);
  if (curves.empty()) throw InputError(file + ": no curves");
  const rd::RDCurve* pick = nullptr;
  if (label.empty()) {
    if (curves.size() != 1) throw InputError(file + ": several curves, choose one with a label");
    pick = &curves.front();
  } else {
    for (const auto& c : curves) {
      if (c.label == label) pick = &c;
    }
    if (pick == nullptr) throw InputError(file + ": no curve labelled '" + label + "'");
  }
  return analysis::QualityCurve::from_rd(*pick, peak);
}

int cmd_bd(const Global& g, const BdArgs& a, std::ostream& out) {
  const auto ref = load_quality(g, a.ref, a.ref_label, a.peak);
  const auto test = load_quality(g, a.test, a.test_label, a.peak);
  const double bd = analysis::bd_rate(ref, test);
  if (g.csv()) {
    out << "# " << g.provenance() << "; bd_method=" << analysis::kBdMethod << '\n'
        << "bd_rate_percent\n"
        << fmt("%.4f", bd) << '\n';
  } else {
    out << "BD-rate " << fmt("%.4f", bd) << " %  (" << analysis::kBdMethod << ")\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Global g;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) g.command_line += ' ';
    g.command_line += i == 0 ? std::string("crlab") : args[i];
  }

  CLI::App app{"Residual vs conditional coding laboratory", "crlab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "Seed for randomized commands")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for relative output paths (else $CRLAB_OUT_DIR)");
  app.add_option("--format", g.format, "Console format")->check(CLI::IsMember({"plain", "csv"}))->capture_default_str();

  SweepArgs sweep;
  auto* sc = app.add_subcommand("sweep", "Entropy sweep over (p, Q)")->fallthrough();
  sc->add_option("--p", sweep.p, "p values: list or lo:step:hi")->capture_default_str();
  sc->add_option("--Q", sweep.q, "Quantizer steps (decimals or fractions)")->capture_default_str();
  sc->add_option("--M", sweep.m, "Alphabet size")->capture_default_str();
  sc->add_option("--out", sweep.out, "Sweep CSV file");

  VerifyArgs verify;
  auto* vc = app.add_subcommand("verify", "Randomized identity/inequality checks")->fallthrough();
  vc->add_option("--trials", verify.trials)->capture_default_str();
  vc->add_option("--shape", verify.shape, "|X| x |X_p| of the random joints")->capture_default_str();
  vc->add_option("--concentration", verify.concentration, "Dirichlet concentration")->capture_default_str();
  vc->add_option("--inject-fault", verify.inject_fault, "Offset added to every identity residual");
  vc->add_option("--report", verify.report, "Report CSV file");

  RdArgs rda;
  auto* rc = app.add_subcommand("rd", "Rate-distortion curves of the four paradigms")->fallthrough();
  rc->add_option("--M", rda.m)->capture_default_str();
  rc->add_option("--p", rda.p)->capture_default_str();
  rc->add_option("--Q", rda.q)->capture_default_str();
  rc->add_option("--slopes", rda.slopes, "Number of log-spaced slopes")->capture_default_str();
  rc->add_option("--slope-min", rda.slope_min)->capture_default_str();
  rc->add_option("--slope-max", rda.slope_max)->capture_default_str();
  rc->add_flag("--force", rda.force, "Allow M > 64");
  rc->add_option("--out", rda.out, "Curve CSV file");
  rc->add_option("--bd-out", rda.bd_out, "BD-rate matrix CSV file");

  CodecArgs codec_args;
  auto* cc = app.add_subcommand("codec", "Range-coder round trip on sampled pixels")->fallthrough();
  cc->add_option("--p", codec_args.p)->capture_default_str();
  cc->add_option("--Q", codec_args.q)->capture_default_str();
  cc->add_option("--M", codec_args.m)->capture_default_str();
  cc->add_option("--n", codec_args.n)->capture_default_str();
  cc->add_option("--paradigm", codec_args.paradigm, "residual | conditional | condres")->capture_default_str();
  cc->add_option("--out", codec_args.out, ".crlb output file");

  BdArgs bd;
  auto* bc = app.add_subcommand("bd", "BD-rate between two curves")->fallthrough();
  bc->add_option("--ref", bd.ref, "Reference CSV (rate,quality or RD curve)")->required();
  bc->add_option("--test", bd.test, "Test CSV")->required();
  bc->add_option("--ref-label", bd.ref_label);
  bc->add_option("--test-label", bd.test_label);
  bc->add_option("--peak", bd.peak, "PSNR peak for RD curve input")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (sc->parsed()) return cmd_sweep(g, sweep, out);
    if (vc->parsed()) return cmd_verify(g, verify, out, err);
    if (rc->parsed()) return cmd_rd(g, rda, out);
    if (cc->parsed()) return cmd_codec(g, codec_args, out, err);
    if (bc->parsed()) return cmd_bd(g, bd, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kCodecFailed;
  } catch (const IntegrityError& e) {
    err << "error: " << e.what() << '\n';
    return kCodecFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}

}  // namespace crlab::cli
