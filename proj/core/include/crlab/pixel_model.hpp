#pragma once

#include <span>
#include <vector>

#include "crlab/info_measures.hpp"
#include "crlab/joint_pmf.hpp"
#include "crlab/rational.hpp"

namespace crlab {

// Variable names used by the pixel model joint and everything built on it.
inline constexpr const char* kVarX = "X";
inline constexpr const char* kVarXp = "X_p";
inline constexpr const char* kVarXhat = "X_hat_p";
inline constexpr const char* kVarR = "R";
inline constexpr const char* kVarXtilde = "X_tilde";
inline constexpr const char* kVarRtilde = "R_tilde";

/// Single-pixel temporal prediction model. With probability 1-p the
/// predictor hits the true value; with probability p (occlusion) it is a
/// uniform draw over 0..M-1. The prediction reaching the decoder side of a
/// conditional coder is the quantized x_hat_p = floor(x_p / Q) * Q.
struct PixelModelParams {
  int alphabet_size = 256;
  double occlusion_prob = 0.5;
  Rational quant_step = Rational(1);

  /// Throws InputError unless M >= 2, 0 <= p <= 1 and Q >= 1.
  void validate() const;
};

/// floor(x_p / step) * step, exact.
[[nodiscard]] Rational quantize(const Rational& x_p, const Rational& step);
[[nodiscard]] DeterministicMap quantizer_map(const Alphabet& domain, const Rational& step);

/// Joint over axes (X, X_p) with derived X_hat_p = quantize(X_p) and
/// R = X - X_p. X is uniform over 0..M-1.
[[nodiscard]] JointPMF build_joint(const PixelModelParams& params);

struct EntropyReport {
  double occlusion_prob = 0.0;
  Rational quant_step;
  Bits H_R;
  Bits H_X_given_Xp;
  Bits H_X_given_Xphat;
  Bits H_R_given_Xphat;
  Bits H_R_given_Xp;
  Bits I_X_Xp;
  Bits I_X_Xphat;
  Bits I_R_Xp;
  Bits I_R_Xphat;
  // Marginal entropies, used for bottleneck-loss checks.
  Bits H_X;
  Bits H_Xp;
  Bits H_Xphat;
};

[[nodiscard]] EntropyReport entropy_report(const PixelModelParams& params);
[[nodiscard]] EntropyReport entropy_report(const JointPMF& joint, double occlusion_prob,
                                           const Rational& quant_step);

/// One report per (Q, p) pair, ordered by Q then p (both ascending).
[[nodiscard]] std::vector<EntropyReport> sweep_p(std::span<const double> p_grid,
                                                 std::span<const Rational> q_list,
                                                 int alphabet_size = 256);

/// 0.01, 0.02, ..., 1.00.
[[nodiscard]] std::vector<double> default_p_grid();
/// 1, 1.4, 2, 64.
[[nodiscard]] std::vector<Rational> default_q_list();

}  // namespace crlab
