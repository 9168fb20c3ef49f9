#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crlab/joint_pmf.hpp"
#include "crlab/pixel_model.hpp"

namespace crlab::rd {

/// d(source symbol, reconstruction symbol), row-major.
class DistortionMatrix {
 public:
  DistortionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DistortionMatrix squared_error(const Alphabet& source, const Alphabet& recon);
  static DistortionMatrix hamming(const Alphabet& source, const Alphabet& recon);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] double operator()(std::size_t x, std::size_t y) const { return values_[x * cols_ + y]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

using DistortionFn = std::function<double(const Rational& source, const Rational& recon)>;
[[nodiscard]] double squared_error(const Rational& a, const Rational& b);

struct SolverConfig {
  int max_iters = 5000;
  /// Stop once the Blahut upper/lower bound gap on the Lagrangian falls
  /// below this many bits.
  double tol = 1e-10;
};

/// One point of R(D). The slope is the Lagrange multiplier s in
/// Q(y|x) ~ q(y) exp(-s d(x, y)), i.e. the curve's slope is -s / ln 2 bits
/// per unit distortion.
struct RDPoint {
  double rate = 0.0;        // bits
  double distortion = 0.0;  // mean distortion
  double slope = 0.0;
  bool converged = true;
  int iterations = 0;
};

struct RDCurve {
  std::string label;
  std::vector<RDPoint> points;  // distortion ascending

  [[nodiscard]] bool all_converged() const;
  /// Lower convex envelope of the points; at equal distortion the lower
  /// rate wins.
  [[nodiscard]] std::vector<RDPoint> envelope() const;
  /// Linear interpolation on the envelope. Distortions beyond the largest
  /// point map to that point's rate; below the smallest, nullopt.
  [[nodiscard]] std::optional<double> rate_at(double distortion) const;
  [[nodiscard]] bool is_nonincreasing(double tol = 1e-6) const;
  [[nodiscard]] bool is_convex(double tol = 1e-6) const;
};

/// Blahut-Arimoto at a fixed slope for a source distribution `probs` over
/// the rows of `dist`. The uniform output distribution is the starting
/// point unless `warm_start` holds a previous output distribution, which is
/// updated in place. A rate-zero solution is detected exactly through the
/// Kuhn-Tucker condition before iterating.
[[nodiscard]] RDPoint blahut_arimoto(std::span<const double> probs, const DistortionMatrix& dist,
                                     double slope, const SolverConfig& config = {},
                                     std::vector<double>* warm_start = nullptr);

/// Same, for a single-variable joint and an explicit reconstruction alphabet.
[[nodiscard]] RDPoint blahut_arimoto(const JointPMF& source, const Alphabet& recon,
                                     const DistortionMatrix& dist, double slope,
                                     const SolverConfig& config = {});

/// Conditional rate-distortion problem R(D) = min I(S; S~ | C) s.t.
/// E d <= D. At a fixed slope it decomposes into one unconditional problem
/// per condition value, weighted by Pr(C = c).
class ConditionalRDProblem {
 public:
  /// `cond_var` empty means unconditional. Without `recon`, each condition
  /// cell reconstructs on the source symbols lying between the smallest and
  /// largest symbol of its support.
  ConditionalRDProblem(const JointPMF& joint, const std::string& source_var, const std::string& cond_var,
                       std::optional<Alphabet> recon = std::nullopt, DistortionFn dist = squared_error);

  [[nodiscard]] RDPoint solve(double slope, const SolverConfig& config = {}) const;
  /// Exact point at the requested distortion, found by a search over the
  /// slope. Distortions at or above the zero-rate distortion give rate 0.
  [[nodiscard]] RDPoint solve_at_distortion(double distortion, const SolverConfig& config = {}) const;
  [[nodiscard]] RDCurve curve(std::span<const double> slopes, std::string label,
                              const SolverConfig& config = {}) const;

  /// Distortion of the best rate-zero reconstruction.
  [[nodiscard]] double zero_rate_distortion() const;
  /// H(source | cond) in bits.
  [[nodiscard]] double conditional_entropy() const;
  [[nodiscard]] std::size_t component_count() const { return components_.size(); }

 private:
  struct Component {
    double weight;
    std::vector<double> probs;
    DistortionMatrix dist;
  };
  RDPoint solve_with(double slope, const SolverConfig& config,
                     std::vector<std::vector<double>>* warm) const;

  std::vector<Component> components_;
};

[[nodiscard]] RDCurve conditional_rd_curve(const JointPMF& joint, const std::string& source_var,
                                           const std::string& cond_var, std::span<const double> slopes,
                                           const SolverConfig& config = {},
                                           std::optional<Alphabet> recon = std::nullopt,
                                           DistortionFn dist = squared_error);

/// `count` log-spaced slopes from lo to hi inclusive. Default: 64 values
/// spanning 1e-3 .. 1e3.
[[nodiscard]] std::vector<double> log_slope_grid(std::size_t count = 64, double lo = 1e-3, double hi = 1e3);

inline constexpr const char* kLabelRes = "R_Res";
inline constexpr const char* kLabelCondIdeal = "R_Cond_ideal";
inline constexpr const char* kLabelCond = "R_Cond";
inline constexpr const char* kLabelCondRes = "R_CondRes";

struct ParadigmProblems {
  ConditionalRDProblem residual;         // R
  ConditionalRDProblem conditional_ideal;  // X | X_p
  ConditionalRDProblem conditional;      // X | X_hat_p
  ConditionalRDProblem conditional_residual;  // R | X_hat_p
};

struct ParadigmCurves {
  RDCurve residual;
  RDCurve conditional_ideal;
  RDCurve conditional;
  RDCurve conditional_residual;

  [[nodiscard]] std::vector<const RDCurve*> all() const {
    return {&residual, &conditional_ideal, &conditional, &conditional_residual};
  }
};

inline constexpr int kMaxDeskAlphabet = 64;

/// Squared-error problems of the four paradigms on the pixel model. The
/// residual problems measure distortion on r vs r~, equal to the frame
/// distortion since x - (x_p + r~) = r - r~. Throws InputError for
/// M > 64 unless `force`.
[[nodiscard]] ParadigmProblems paradigm_problems(const PixelModelParams& params, bool force = false);
[[nodiscard]] ParadigmCurves compare_paradigms(const PixelModelParams& params, std::span<const double> slopes,
                                               const SolverConfig& config = {}, bool force = false);

}  // namespace crlab::rd
