#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crlab/analysis.hpp"
#include "crlab/errors.hpp"

namespace crlab::analysis {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

// Yields data lines (header checked, '#' and blank lines skipped).
template <typename F>
void for_each_row(std::istream& in, const char* header, std::size_t columns, F&& f) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header) throw InputError("csv: unexpected header '" + line + "'");
      seen_header = true;
      continue;
    }
    auto fields = split(line);
    if (fields.size() != columns) {
      throw InputError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " fields");
    }
    f(fields, line_no);
  }
  if (!seen_header) throw InputError("csv: missing header");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace

std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_sweep_csv(std::ostream& out, std::span<const EntropyReport> rows, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_g9(r.quant_step.to_double()) << ',' << format_g9(r.occlusion_prob);
    for (const Bits b : {r.H_R, r.H_X_given_Xp, r.H_X_given_Xphat, r.H_R_given_Xphat, r.H_R_given_Xp, r.I_X_Xp,
                         r.I_X_Xphat, r.I_R_Xp, r.I_R_Xphat}) {
      out << ',' << format_g9(b.value());
    }
    out << '\n';
  }
}

void write_sweep_csv(const std::string& path, std::span<const EntropyReport> rows, const std::string& provenance) {
  auto out = open_out(path);
  write_sweep_csv(out, rows, provenance);
  finish(out, path);
}

std::vector<EntropyReport> parse_sweep_csv(std::istream& in) {
  std::vector<EntropyReport> rows;
  for_each_row(in, kSweepHeader, 11, [&](const std::vector<std::string>& f, std::size_t line_no) {
    EntropyReport r;
    try {
      r.quant_step = Rational::parse(f[0]);
    } catch (const std::exception&) {
      throw InputError("csv line " + std::to_string(line_no) + ": bad Q '" + f[0] + "'");
    }
    r.occlusion_prob = to_double(f[1], line_no);
    Bits* fields[] = {&r.H_R, &r.H_X_given_Xp, &r.H_X_given_Xphat, &r.H_R_given_Xphat, &r.H_R_given_Xp,
                      &r.I_X_Xp, &r.I_X_Xphat, &r.I_R_Xp, &r.I_R_Xphat};
    for (std::size_t i = 0; i < 9; ++i) *fields[i] = Bits(to_double(f[i + 2], line_no));
    rows.push_back(r);
  });
  return rows;
}

std::vector<EntropyReport> read_sweep_csv(const std::string& path) {
  auto in = open_in(path);
  try {
    return parse_sweep_csv(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_rd_csv(std::ostream& out, std::span<const rd::RDCurve> curves, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << kRdHeader << '\n';
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << c.label << ',' << format_g9(p.slope) << ',' << format_g9(p.rate) << ',' << format_g9(p.distortion)
          << '\n';
    }
  }
}

void write_rd_csv(const std::string& path, std::span<const rd::RDCurve> curves, const std::string& provenance) {
  auto out = open_out(path);
  write_rd_csv(out, curves, provenance);
  finish(out, path);
}

std::vector<rd::RDCurve> parse_rd_csv(std::istream& in) {
  std::vector<rd::RDCurve> curves;
  for_each_row(in, kRdHeader, 4, [&](const std::vector<std::string>& f, std::size_t line_no) {
    auto it = std::find_if(curves.begin(), curves.end(), [&](const rd::RDCurve& c) { return c.label == f[0]; });
    if (it == curves.end()) {
      curves.push_back(rd::RDCurve{f[0], {}});
      it = curves.end() - 1;
    }
    rd::RDPoint p;
    p.slope = to_double(f[1], line_no);
    p.rate = to_double(f[2], line_no);
    p.distortion = to_double(f[3], line_no);
    p.converged = true;
    it->points.push_back(p);
  });
  return curves;
}

std::vector<rd::RDCurve> read_rd_csv(const std::string& path) {
  auto in = open_in(path);
  try {
    return parse_rd_csv(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace crlab::analysis
