#include "crlab/pixel_model.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "crlab/errors.hpp"

namespace crlab {

void PixelModelParams::validate() const {
  if (alphabet_size < 2) throw InputError("pixel model: alphabet size M must be >= 2");
  if (alphabet_size > 65535) throw InputError("pixel model: alphabet size M must fit in 16 bits");
  if (!(occlusion_prob >= 0.0 && occlusion_prob <= 1.0)) {
    throw InputError("pixel model: occlusion probability p must lie in [0, 1]");
  }
  if (quant_step < Rational(1)) throw InputError("pixel model: quantization step Q must be >= 1");
}

Rational quantize(const Rational& x_p, const Rational& step) {
  return Rational((x_p / step).floor()) * step;
}

DeterministicMap quantizer_map(const Alphabet& domain, const Rational& step) {
  return DeterministicMap::from_function(domain, [&](const Rational& v) { return quantize(v, step); });
}

JointPMF build_joint(const PixelModelParams& params) {
  params.validate();
  const auto m = static_cast<std::size_t>(params.alphabet_size);
  const double p = params.occlusion_prob;
  const double md = static_cast<double>(m);
  const double off = p / (md * md);
  const double diag = off + (1.0 - p) / md;

  std::vector<double> table(m * m, off);
  for (std::size_t x = 0; x < m; ++x) table[x * m + x] = diag;

  const Alphabet pixels = Alphabet::range(0, params.alphabet_size - 1);
  JointPMF joint({Variable{kVarX, pixels}, Variable{kVarXp, pixels}}, std::move(table));
  joint = joint.adjoin_map(kVarXp, quantizer_map(pixels, params.quant_step), kVarXhat);
  return joint.adjoin_difference(kVarX, kVarXp, kVarR);
}

EntropyReport entropy_report(const JointPMF& joint, double occlusion_prob, const Rational& quant_step) {
  const std::string x = kVarX, xp = kVarXp, xh = kVarXhat, r = kVarR;
  const auto H = [&](std::initializer_list<std::string> v) { return entropy_kernel(joint, VarList(v.begin(), v.size())); };

  const double h_x = H({x});
  const double h_xp = H({xp});
  const double h_xh = H({xh});
  const double h_r = H({r});
  const double h_x_xp = H({x, xp});
  const double h_x_xh = H({x, xh});
  const double h_r_xp = H({r, xp});
  const double h_r_xh = H({r, xh});

  EntropyReport rep;
  rep.occlusion_prob = occlusion_prob;
  rep.quant_step = quant_step;
  rep.H_R = Bits(h_r);
  rep.H_X_given_Xp = Bits(h_x_xp - h_xp);
  rep.H_X_given_Xphat = Bits(h_x_xh - h_xh);
  rep.H_R_given_Xphat = Bits(h_r_xh - h_xh);
  rep.H_R_given_Xp = Bits(h_r_xp - h_xp);
  rep.I_X_Xp = Bits(h_x + h_xp - h_x_xp);
  rep.I_X_Xphat = Bits(h_x + h_xh - h_x_xh);
  rep.I_R_Xp = Bits(h_r + h_xp - h_r_xp);
  rep.I_R_Xphat = Bits(h_r + h_xh - h_r_xh);
  rep.H_X = Bits(h_x);
  rep.H_Xp = Bits(h_xp);
  rep.H_Xphat = Bits(h_xh);
  return rep;
}

EntropyReport entropy_report(const PixelModelParams& params) {
  return entropy_report(build_joint(params), params.occlusion_prob, params.quant_step);
}

std::vector<EntropyReport> sweep_p(std::span<const double> p_grid, std::span<const Rational> q_list,
                                   int alphabet_size) {
  if (p_grid.empty() || q_list.empty()) throw InputError("sweep: grids must be nonempty");
  std::vector<double> ps(p_grid.begin(), p_grid.end());
  std::vector<Rational> qs(q_list.begin(), q_list.end());
  std::stable_sort(ps.begin(), ps.end());
  std::stable_sort(qs.begin(), qs.end());

  std::vector<EntropyReport> rows;
  rows.reserve(ps.size() * qs.size());
  for (const auto& q : qs) {
    for (const double p : ps) {
      rows.push_back(entropy_report(PixelModelParams{alphabet_size, p, q}));
    }
  }
  return rows;
}

std::vector<double> default_p_grid() {
  std::vector<double> grid(100);
  for (int i = 0; i < 100; ++i) grid[static_cast<std::size_t>(i)] = (i + 1) / 100.0;
  return grid;
}

std::vector<Rational> default_q_list() { return {Rational(1), Rational(7, 5), Rational(2), Rational(64)}; }

}  // namespace crlab
