#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "crlab/pixel_model.hpp"
#include "crlab/rd_solver.hpp"

namespace crlab::analysis {

struct QualityPoint {
  double rate = 0.0;     // > 0
  double quality = 0.0;  // dB
};

/// Rate/quality operating points, sorted by quality on construction.
/// Needs at least 4 points, positive finite rates, finite qualities, and
/// both coordinates strictly increasing after the sort.
class QualityCurve {
 public:
  explicit QualityCurve(std::vector<QualityPoint> points);

  /// Maps an RD curve through mse_to_psnr(peak). Points below `min_rate`
  /// bits (log-rate blows up there and would dominate the fit) or with zero
  /// distortion (infinite PSNR) are dropped, as are points that do not
  /// improve both coordinates over the previous kept point.
  [[nodiscard]] static QualityCurve from_rd(const rd::RDCurve& curve, double peak, double min_rate = kMinRate);

  static constexpr double kMinRate = 1e-3;

  [[nodiscard]] std::span<const QualityPoint> points() const { return points_; }
  [[nodiscard]] double min_quality() const { return points_.front().quality; }
  [[nodiscard]] double max_quality() const { return points_.back().quality; }

 private:
  std::vector<QualityPoint> points_;
};

/// Bjontegaard delta rate in percent: cubic fit of log10(rate) against
/// quality (exact on 4 points, least squares on more), difference integrated
/// over the common quality range. Negative means `test` saves rate.
[[nodiscard]] double bd_rate(const QualityCurve& reference, const QualityCurve& test);

inline constexpr const char* kBdMethod = "polynomial-cubic-log10rate";

/// 10 log10(peak^2 / mse); +infinity when mse == 0.
[[nodiscard]] double mse_to_psnr(double mse, double peak);

// CSV emission and parsing. Writers put `provenance` (if non-empty) on a
// leading '#' line; parsers skip '#' lines.

void write_sweep_csv(std::ostream& out, std::span<const EntropyReport> rows, const std::string& provenance = {});
void write_sweep_csv(const std::string& path, std::span<const EntropyReport> rows,
                     const std::string& provenance = {});
/// Only the columns of the sweep schema are restored; H_X, H_Xp and
/// H_Xphat stay zero.
[[nodiscard]] std::vector<EntropyReport> parse_sweep_csv(std::istream& in);
[[nodiscard]] std::vector<EntropyReport> read_sweep_csv(const std::string& path);

void write_rd_csv(std::ostream& out, std::span<const rd::RDCurve> curves, const std::string& provenance = {});
void write_rd_csv(const std::string& path, std::span<const rd::RDCurve> curves, const std::string& provenance = {});
/// Curves in order of first appearance of their label.
[[nodiscard]] std::vector<rd::RDCurve> parse_rd_csv(std::istream& in);
[[nodiscard]] std::vector<rd::RDCurve> read_rd_csv(const std::string& path);

inline constexpr const char* kSweepHeader =
    "Q,p,H_R,H_X_given_Xp,H_X_given_Xphat,H_R_given_Xphat,H_R_given_Xp,I_X_Xp,I_X_Xphat,I_R_Xp,I_R_Xphat";
inline constexpr const char* kRdHeader = "label,slope,rate_bits,distortion_mse";

/// "%.9g".
[[nodiscard]] std::string format_g9(double v);

}  // namespace crlab::analysis
