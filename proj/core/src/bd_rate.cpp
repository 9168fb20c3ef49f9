#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "crlab/analysis.hpp"
#include "crlab/errors.hpp"

namespace crlab::analysis {
namespace {

// Coefficients c0..c3 of log10(rate) as a cubic in t = (quality - center) / scale.
Eigen::Vector4d fit_cubic(const QualityCurve& curve, double center, double scale) {
  const auto pts = curve.points();
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (pts[static_cast<std::size_t>(i)].quality - center) / scale;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    a(i, 3) = t * t * t;
    b(i) = std::log10(pts[static_cast<std::size_t>(i)].rate);
  }
  if (n == 4) return a.fullPivLu().solve(b);
  return a.colPivHouseholderQr().solve(b);
}

}  // namespace

QualityCurve::QualityCurve(std::vector<QualityPoint> points) : points_(std::move(points)) {
  if (points_.size() < 4) throw InputError("quality curve needs at least 4 points");
  std::sort(points_.begin(), points_.end(),
            [](const QualityPoint& a, const QualityPoint& b) { return a.quality < b.quality; });
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.rate) || !(p.rate > 0.0) || !std::isfinite(p.quality)) {
      throw InputError("quality curve needs positive finite rates and finite qualities");
    }
    if (i > 0 && (!(p.quality > points_[i - 1].quality) || !(p.rate > points_[i - 1].rate))) {
      throw InputError("quality curve must be strictly increasing in rate and quality");
    }
  }
}

QualityCurve QualityCurve::from_rd(const rd::RDCurve& curve, double peak, double min_rate) {
  std::vector<QualityPoint> pts;
  for (const auto& p : curve.points) {
    const double q = mse_to_psnr(p.distortion, peak);
    if (!(p.rate >= min_rate) || !std::isfinite(q)) continue;
    pts.push_back({p.rate, q});
  }
  std::sort(pts.begin(), pts.end(), [](const QualityPoint& a, const QualityPoint& b) { return a.quality < b.quality; });
  std::vector<QualityPoint> kept;
  for (const auto& p : pts) {
    if (kept.empty() || (p.quality > kept.back().quality + 1e-9 && p.rate > kept.back().rate * (1.0 + 1e-9))) {
      kept.push_back(p);
    }
  }
  return QualityCurve(std::move(kept));
}

double bd_rate(const QualityCurve& reference, const QualityCurve& test) {
  const double lo = std::max(reference.min_quality(), test.min_quality());
  const double hi = std::min(reference.max_quality(), test.max_quality());
  if (!(hi > lo)) throw InputError("bd_rate: quality ranges do not overlap");

  // Shared affine map of [lo, hi] onto [-1, 1] keeps the Vandermonde
  // systems well conditioned and makes the integral trivial.
  const double center = 0.5 * (lo + hi);
  const double scale = 0.5 * (hi - lo);
  const Eigen::Vector4d diff = fit_cubic(test, center, scale) - fit_cubic(reference, center, scale);
  // mean over [-1, 1] of d0 + d1 t + d2 t^2 + d3 t^3
  const double mean = diff(0) + diff(2) / 3.0;
  return 100.0 * (std::pow(10.0, mean) - 1.0);
}

double mse_to_psnr(double mse, double peak) {
  if (!(peak > 0.0) || !std::isfinite(peak)) throw InputError("mse_to_psnr: peak must be positive");
  if (std::isnan(mse) || mse < 0.0) throw InputError("mse_to_psnr: mse must be >= 0");
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace crlab::analysis
