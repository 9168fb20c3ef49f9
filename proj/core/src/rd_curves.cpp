#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crlab/errors.hpp"
#include "crlab/info_measures.hpp"
#include "crlab/rd_solver.hpp"

namespace crlab::rd {
namespace {

constexpr double kMinSlope = 1e-9;
constexpr double kMaxSlope = 1e9;

double chord_excess(const RDPoint& a, const RDPoint& b, const RDPoint& mid) {
  const double t = (mid.distortion - a.distortion) / (b.distortion - a.distortion);
  return mid.rate - (a.rate + t * (b.rate - a.rate));
}

}  // namespace

// ------------------------------------------------------------------ RDCurve

bool RDCurve::all_converged() const {
  return std::all_of(points.begin(), points.end(), [](const RDPoint& p) { return p.converged; });
}

std::vector<RDPoint> RDCurve::envelope() const {
  std::vector<RDPoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const RDPoint& a, const RDPoint& b) {
    return a.distortion < b.distortion || (a.distortion == b.distortion && a.rate < b.rate);
  });
  std::vector<RDPoint> hull;
  for (const auto& p : sorted) {
    if (!hull.empty() && hull.back().distortion == p.distortion) continue;  // lower rate already kept
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      // Drop b when it lies on or above the chord a -> p.
      const double cross = (b.distortion - a.distortion) * (p.rate - a.rate) -
                           (b.rate - a.rate) * (p.distortion - a.distortion);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return hull;
}

std::optional<double> RDCurve::rate_at(double distortion) const {
  const auto hull = envelope();
  if (hull.empty() || distortion < hull.front().distortion) return std::nullopt;
  // Beyond the last point the envelope is flat (R(D) is nonincreasing).
  double best_tail = hull.front().rate;
  for (const auto& p : hull) best_tail = std::min(best_tail, p.rate);
  if (distortion >= hull.back().distortion) return std::min(hull.back().rate, best_tail);
  for (std::size_t i = 1; i < hull.size(); ++i) {
    if (distortion <= hull[i].distortion) {
      const auto& a = hull[i - 1];
      const auto& b = hull[i];
      const double t = (distortion - a.distortion) / (b.distortion - a.distortion);
      return a.rate + t * (b.rate - a.rate);
    }
  }
  return hull.back().rate;
}

bool RDCurve::is_nonincreasing(double tol) const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].rate > points[i - 1].rate + tol) return false;
  }
  return true;
}

bool RDCurve::is_convex(double tol) const {
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i + 1];
    if (!(b.distortion > a.distortion)) continue;
    if (chord_excess(a, b, points[i]) > tol) return false;
  }
  return true;
}

// ----------------------------------------------------- ConditionalRDProblem

ConditionalRDProblem::ConditionalRDProblem(const JointPMF& joint, const std::string& source_var,
                                           const std::string& cond_var, std::optional<Alphabet> recon,
                                           DistortionFn dist) {
  const Alphabet& source_alphabet = joint.variable(source_var).alphabet;
  const auto source_cells = joint.cell_symbols(source_var);
  std::size_t n_cond = 1;
  std::vector<std::uint32_t> cond_cells;
  if (!cond_var.empty()) {
    if (cond_var == source_var) throw InputError("conditional rd: source and condition must differ");
    n_cond = joint.variable(cond_var).alphabet.size();
    cond_cells = joint.cell_symbols(cond_var);
  }
  const std::size_t n_src = source_alphabet.size();
  std::vector<double> mass(n_cond * n_src, 0.0);
  const auto table = joint.table();
  for (std::size_t c = 0; c < table.size(); ++c) {
    const std::size_t k = cond_cells.empty() ? 0 : cond_cells[c];
    mass[k * n_src + source_cells[c]] += table[c];
  }

  for (std::size_t k = 0; k < n_cond; ++k) {
    const double w = std::accumulate(mass.begin() + static_cast<std::ptrdiff_t>(k * n_src),
                                     mass.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_src), 0.0);
    if (!(w > 0.0)) continue;  // zero-probability condition cell
    std::vector<std::size_t> support;
    for (std::size_t s = 0; s < n_src; ++s) {
      if (mass[k * n_src + s] > 0.0) support.push_back(s);
    }
    std::vector<Rational> recon_symbols;
    if (recon) {
      recon_symbols.assign(recon->symbols().begin(), recon->symbols().end());
    } else {
      for (std::size_t s = support.front(); s <= support.back(); ++s) recon_symbols.push_back(source_alphabet[s]);
    }
    std::vector<double> probs;
    std::vector<double> d;
    d.reserve(support.size() * recon_symbols.size());
    for (const auto s : support) {
      probs.push_back(mass[k * n_src + s] / w);
      for (const auto& y : recon_symbols) d.push_back(dist(source_alphabet[s], y));
    }
    components_.push_back(Component{w, std::move(probs),
                                    DistortionMatrix(support.size(), recon_symbols.size(), std::move(d))});
  }
  if (components_.empty()) throw InputError("conditional rd: joint has no mass");
}

RDPoint ConditionalRDProblem::solve_with(double slope, const SolverConfig& config,
                                         std::vector<std::vector<double>>* warm) const {
  RDPoint agg;
  agg.slope = slope;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& comp = components_[i];
    std::vector<double>* ws = warm ? &(*warm)[i] : nullptr;
    const RDPoint p = blahut_arimoto(comp.probs, comp.dist, slope, config, ws);
    agg.rate += comp.weight * p.rate;
    agg.distortion += comp.weight * p.distortion;
    agg.converged = agg.converged && p.converged;
    agg.iterations = std::max(agg.iterations, p.iterations);
  }
  return agg;
}

RDPoint ConditionalRDProblem::solve(double slope, const SolverConfig& config) const {
  return solve_with(slope, config, nullptr);
}

double ConditionalRDProblem::zero_rate_distortion() const {
  double total = 0.0;
  for (const auto& comp : components_) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < comp.dist.cols(); ++y) {
      double d = 0.0;
      for (std::size_t x = 0; x < comp.probs.size(); ++x) d += comp.probs[x] * comp.dist(x, y);
      best = std::min(best, d);
    }
    total += comp.weight * best;
  }
  return total;
}

double ConditionalRDProblem::conditional_entropy() const {
  double h = 0.0;
  for (const auto& comp : components_) {
    double hc = 0.0;
    for (const double p : comp.probs) {
      if (p > 0.0) hc -= p * std::log2(p);
    }
    h += comp.weight * hc;
  }
  return h;
}

RDPoint ConditionalRDProblem::solve_at_distortion(double target, const SolverConfig& config) const {
  const double d_max = zero_rate_distortion();
  if (target >= d_max) return RDPoint{0.0, target, 0.0, true, 0};
  std::vector<std::vector<double>> warm(components_.size());

  // Bracket: D(s) is nonincreasing in s.
  double s_lo = 1.0;
  RDPoint p_lo = solve_with(s_lo, config, &warm);
  double s_hi = s_lo;
  RDPoint p_hi = p_lo;
  if (p_lo.distortion > target) {
    while (p_hi.distortion > target && s_hi < kMaxSlope) {
      s_lo = s_hi;
      p_lo = p_hi;
      s_hi *= 4.0;
      p_hi = solve_with(s_hi, config, &warm);
    }
    if (p_hi.distortion > target) {
      throw DomainError("solve_at_distortion: target below the achievable distortion range");
    }
  } else {
    while (p_lo.distortion < target && s_lo > kMinSlope) {
      s_hi = s_lo;
      p_hi = p_lo;
      s_lo /= 4.0;
      p_lo = solve_with(s_lo, config, &warm);
    }
  }
  if (p_lo.distortion == target) return p_lo;
  if (p_hi.distortion == target) return p_hi;

  // Illinois regula falsi on u = log s, f(u) = D(e^u) - target (decreasing).
  double u_lo = std::log(s_lo), u_hi = std::log(s_hi);
  double f_lo = p_lo.distortion - target, f_hi = p_hi.distortion - target;
  int side = 0;
  const double f_tol = 1e-13 * std::max(1.0, target);
  bool converged = p_lo.converged && p_hi.converged;
  for (int it = 0; it < 200; ++it) {
    if (u_hi - u_lo < 1e-13) break;
    double u = (u_lo * f_hi - u_hi * f_lo) / (f_hi - f_lo);
    if (!(u > u_lo && u < u_hi)) u = 0.5 * (u_lo + u_hi);
    const RDPoint p = solve_with(std::exp(u), config, &warm);
    converged = converged && p.converged;
    const double f = p.distortion - target;
    if (std::abs(f) <= f_tol) return p;
    if (f > 0.0) {
      u_lo = u;
      f_lo = f;
      p_lo = p;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      u_hi = u;
      f_hi = f;
      p_hi = p;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
  }
  // Target sits on a straight segment between the bracket points (a jump of
  // D(s)); the curve is linear there.
  const double t = (target - p_lo.distortion) / (p_hi.distortion - p_lo.distortion);
  RDPoint out;
  out.rate = p_lo.rate + t * (p_hi.rate - p_lo.rate);
  out.distortion = target;
  out.slope = std::exp(0.5 * (u_lo + u_hi));
  out.converged = converged;
  out.iterations = std::max(p_lo.iterations, p_hi.iterations);
  return out;
}

RDCurve ConditionalRDProblem::curve(std::span<const double> slopes, std::string label,
                                    const SolverConfig& config) const {
  std::vector<double> order(slopes.begin(), slopes.end());
  std::sort(order.begin(), order.end());
  std::vector<std::vector<double>> warm(components_.size());
  RDCurve out;
  out.label = std::move(label);
  for (const double s : order) out.points.push_back(solve_with(s, config, &warm));
  std::stable_sort(out.points.begin(), out.points.end(), [](const RDPoint& a, const RDPoint& b) {
    return a.distortion < b.distortion || (a.distortion == b.distortion && a.rate < b.rate);
  });
  return out;
}

RDCurve conditional_rd_curve(const JointPMF& joint, const std::string& source_var, const std::string& cond_var,
                             std::span<const double> slopes, const SolverConfig& config,
                             std::optional<Alphabet> recon, DistortionFn dist) {
  if (slopes.empty()) throw InputError("conditional_rd_curve: slope grid must be nonempty");
  const ConditionalRDProblem problem(joint, source_var, cond_var, std::move(recon), std::move(dist));
  return problem.curve(slopes, cond_var.empty() ? source_var : source_var + "|" + cond_var, config);
}

std::vector<double> log_slope_grid(std::size_t count, double lo, double hi) {
  if (count == 0 || !(lo > 0.0) || !(hi >= lo)) throw InputError("slope grid: need count >= 1 and 0 < lo <= hi");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(std::log(lo) + step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

ParadigmProblems paradigm_problems(const PixelModelParams& params, bool force) {
  params.validate();
  if (params.alphabet_size > kMaxDeskAlphabet && !force) {
    throw InputError("rd: alphabet size above 64 needs force (complexity guard)");
  }
  const JointPMF joint = build_joint(params);
  return ParadigmProblems{
      ConditionalRDProblem(joint, kVarR, ""),
      ConditionalRDProblem(joint, kVarX, kVarXp),
      ConditionalRDProblem(joint, kVarX, kVarXhat),
      ConditionalRDProblem(joint, kVarR, kVarXhat),
  };
}

ParadigmCurves compare_paradigms(const PixelModelParams& params, std::span<const double> slopes,
                                 const SolverConfig& config, bool force) {
  if (slopes.empty()) throw InputError("compare_paradigms: slope grid must be nonempty");
  const auto problems = paradigm_problems(params, force);
  return ParadigmCurves{
      problems.residual.curve(slopes, kLabelRes, config),
      problems.conditional_ideal.curve(slopes, kLabelCondIdeal, config),
      problems.conditional.curve(slopes, kLabelCond, config),
      problems.conditional_residual.curve(slopes, kLabelCondRes, config),
  };
}

}  // namespace crlab::rd
