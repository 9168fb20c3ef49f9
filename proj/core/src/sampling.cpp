#include <algorithm>
#include <random>
#include <string>

#include "crlab/errors.hpp"
#include "crlab/joint_pmf.hpp"

namespace crlab {
namespace {

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

SampleSet sample(const JointPMF& pmf, std::size_t n, std::uint64_t seed) {
  SampleSet out;
  out.variables = pmf.variable_names();
  for (const auto& name : out.variables) out.alphabets.push_back(pmf.variable(name).alphabet);
  out.rows = n;
  if (n == 0) return out;

  const auto table = pmf.table();
  std::vector<double> cdf(table.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < table.size(); ++c) {
    acc += table[c];
    cdf[c] = acc;
  }
  // Last positive cell absorbs the rounding slack of the running sum.
  std::size_t last_positive = 0;
  for (std::size_t c = 0; c < table.size(); ++c) {
    if (table[c] > 0.0) last_positive = c;
  }

  std::vector<std::vector<std::uint32_t>> columns;
  columns.reserve(out.variables.size());
  for (const auto& name : out.variables) columns.push_back(pmf.cell_symbols(name));

  std::mt19937_64 gen(seed);
  const std::size_t k = out.variables.size();
  out.indices.resize(n * k);
  for (std::size_t row = 0; row < n; ++row) {
    const double u = uniform01(gen) * acc;
    auto cell = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    cell = std::min(cell, last_positive);
    for (std::size_t col = 0; col < k; ++col) out.indices[row * k + col] = columns[col][cell];
  }
  return out;
}

JointPMF random_pmf(std::span<const std::size_t> shape, double concentration, std::uint64_t seed,
                    std::span<const std::string> names) {
  if (shape.empty()) throw InputError("random_pmf: shape must be nonempty");
  if (!(concentration > 0.0)) throw InputError("random_pmf: concentration must be > 0");
  if (!names.empty() && names.size() != shape.size()) {
    throw InputError("random_pmf: need one name per dimension");
  }
  std::vector<Variable> axes;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] < 1) throw InputError("random_pmf: alphabet sizes must be >= 1");
    axes.push_back(Variable{names.empty() ? "V" + std::to_string(i) : names[i],
                            Alphabet::range(0, static_cast<std::int64_t>(shape[i]) - 1)});
    cells *= shape[i];
  }
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> table(cells);
  double sum = 0.0;
  for (auto& p : table) {
    p = gamma(gen);
    sum += p;
  }
  if (!(sum > 0.0)) {
    // Every draw underflowed (tiny concentration); fall back to a point mass.
    std::fill(table.begin(), table.end(), 0.0);
    table[0] = 1.0;
    sum = 1.0;
  }
  for (auto& p : table) p /= sum;
  return JointPMF(std::move(axes), std::move(table));
}

}  // namespace crlab
