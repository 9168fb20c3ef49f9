#include <algorithm>
#include <cmath>
#include <numeric>

#include "crlab/codec.hpp"
#include "crlab/errors.hpp"

namespace crlab::codec {

std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::kResidual:
      return "residual";
    case Paradigm::kConditional:
      return "conditional";
    case Paradigm::kConditionalResidual:
      return "condres";
  }
  return "?";
}

Paradigm parse_paradigm(std::string_view text) {
  if (text == "residual" || text == "res") return Paradigm::kResidual;
  if (text == "conditional" || text == "cond") return Paradigm::kConditional;
  if (text == "condres" || text == "conditional-residual" || text == "conditional_residual") {
    return Paradigm::kConditionalResidual;
  }
  throw InputError("unknown paradigm '" + std::string(text) + "'");
}

std::vector<std::uint32_t> ProbabilityModel::quantize_counts(std::span<const double> probs) {
  double sum = 0.0;
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) throw InputError("quantize_counts: invalid probability");
    if (probs[i] > 0.0) support.push_back(i);
    sum += probs[i];
  }
  std::vector<std::uint32_t> counts(probs.size(), 0);
  if (support.empty()) return counts;
  if (support.size() > kTotal) throw InputError("quantize_counts: support exceeds frequency total");

  std::vector<double> remainder(probs.size(), 0.0);
  std::int64_t assigned = 0;
  for (const auto i : support) {
    const double scaled = probs[i] / sum * kTotal;
    const auto floor_count = static_cast<std::uint32_t>(std::floor(scaled));
    counts[i] = std::max<std::uint32_t>(1, floor_count);
    remainder[i] = scaled - counts[i];
    assigned += counts[i];
  }
  std::int64_t diff = static_cast<std::int64_t>(kTotal) - assigned;
  if (diff > 0) {
    std::vector<std::size_t> order = support;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; diff > 0; k = (k + 1) % order.size(), --diff) ++counts[order[k]];
  }
  while (diff < 0) {
    std::size_t victim = support.front();
    for (const auto i : support) {
      if (counts[i] > counts[victim]) victim = i;
    }
    if (counts[victim] <= 1) throw InputError("quantize_counts: cannot repair counts");
    --counts[victim];
    ++diff;
  }
  return counts;
}

ProbabilityModel ProbabilityModel::for_paradigm(const PixelModelParams& params, Paradigm paradigm) {
  params.validate();
  const JointPMF joint = build_joint(params);
  const int m = params.alphabet_size;

  ProbabilityModel model;
  model.paradigm_ = paradigm;
  model.alphabet_size_ = m;
  model.quant_step_ = params.quant_step;

  const Alphabet& cells = joint.variable(kVarXhat).alphabet;
  model.xp_context_.resize(static_cast<std::size_t>(m));
  for (int xp = 0; xp < m; ++xp) {
    model.xp_context_[static_cast<std::size_t>(xp)] =
        static_cast<std::uint32_t>(*cells.index_of(quantize(Rational(xp), params.quant_step)));
  }

  const bool residual_symbols = paradigm != Paradigm::kConditional;
  model.symbols_ = residual_symbols ? static_cast<std::size_t>(2 * m - 1) : static_cast<std::size_t>(m);
  model.symbol_offset_ = residual_symbols ? -(m - 1) : 0;
  model.contexts_ = paradigm == Paradigm::kResidual ? 1 : cells.size();

  std::vector<double> mass(model.contexts_ * model.symbols_, 0.0);
  const auto table = joint.table();
  const auto um = static_cast<std::size_t>(m);
  for (std::size_t x = 0; x < um; ++x) {
    for (std::size_t xp = 0; xp < um; ++xp) {
      const std::size_t ctx = paradigm == Paradigm::kResidual ? 0 : model.xp_context_[xp];
      const std::int64_t value = residual_symbols ? static_cast<std::int64_t>(x) - static_cast<std::int64_t>(xp)
                                                  : static_cast<std::int64_t>(x);
      const auto sym = static_cast<std::size_t>(value - model.symbol_offset_);
      mass[ctx * model.symbols_ + sym] += table[x * um + xp];
    }
  }

  model.cum_.assign(model.contexts_ * (model.symbols_ + 1), 0);
  for (std::size_t ctx = 0; ctx < model.contexts_; ++ctx) {
    const std::span<const double> row(mass.data() + ctx * model.symbols_, model.symbols_);
    const auto counts = quantize_counts(row);
    std::uint32_t* cum = model.cum_.data() + ctx * (model.symbols_ + 1);
    for (std::size_t s = 0; s < model.symbols_; ++s) cum[s + 1] = cum[s] + counts[s];
  }
  return model;
}

std::size_t ProbabilityModel::find(std::size_t ctx, std::uint32_t target) const {
  const auto* first = cum_.data() + ctx * (symbols_ + 1);
  const auto* last = first + symbols_ + 1;
  if (target >= *(last - 1)) throw IntegrityError("decoded target outside context frequency range");
  const auto* it = std::upper_bound(first, last, target);
  return static_cast<std::size_t>(it - first) - 1;
}

std::size_t ProbabilityModel::context_of(int x_p) const {
  if (x_p < 0 || x_p >= alphabet_size_) throw InputError("prediction value out of range");
  return paradigm_ == Paradigm::kResidual ? 0 : xp_context_[static_cast<std::size_t>(x_p)];
}

double ProbabilityModel::cross_entropy(const PixelModelParams& params) const {
  if (params.alphabet_size != alphabet_size_) throw InputError("cross_entropy: alphabet size mismatch");
  const JointPMF joint = build_joint(params);
  const auto table = joint.table();
  const auto um = static_cast<std::size_t>(alphabet_size_);
  const bool residual_symbols = paradigm_ != Paradigm::kConditional;
  double bits = 0.0;
  for (std::size_t x = 0; x < um; ++x) {
    for (std::size_t xp = 0; xp < um; ++xp) {
      const double p = table[x * um + xp];
      if (!(p > 0.0)) continue;
      const std::size_t ctx = context_of(static_cast<int>(xp));
      const std::int64_t value = residual_symbols ? static_cast<std::int64_t>(x) - static_cast<std::int64_t>(xp)
                                                  : static_cast<std::int64_t>(x);
      const std::uint32_t f = freq(ctx, static_cast<std::size_t>(value - symbol_offset_));
      if (f == 0) return std::numeric_limits<double>::infinity();
      bits -= p * std::log2(static_cast<double>(f) / kTotal);
    }
  }
  return bits;
}

}  // namespace crlab::codec
