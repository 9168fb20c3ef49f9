#include "crlab/info_measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "crlab/errors.hpp"

namespace crlab {
namespace {

// Neumaier-compensated accumulation of -p log2 p.
class EntropySum {
 public:
  void add(double p) {
    if (!(p > 0.0)) return;
    const double term = -p * std::log2(p);
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      comp_ += (sum_ - t) + term;
    } else {
      comp_ += (term - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<std::string> dedupe(VarList vars) {
  std::vector<std::string> out;
  for (const auto& v : vars) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

void require_disjoint(VarList a, VarList b, const char* what) {
  for (const auto& x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) {
      throw InputError(std::string(what) + ": variable '" + x + "' appears in both argument sets");
    }
  }
}

void require_nonempty(VarList v, const char* what) {
  if (v.empty()) throw InputError(std::string(what) + ": variable list must be nonempty");
}

std::vector<std::string> concat(VarList a, VarList b) {
  std::vector<std::string> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<std::string> concat(VarList a, VarList b, VarList c) {
  auto out = concat(a, b);
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

}  // namespace

Bits::Bits(double value) {
  if (std::isnan(value)) throw InternalConsistencyError("information measure is NaN");
  if (value < 0.0) {
    if (value < -kClampTolerance) {
      throw InternalConsistencyError("information measure negative beyond tolerance: " +
                                     std::to_string(value));
    }
    value = 0.0;
  }
  value_ = value;
}

double entropy_kernel(const JointPMF& pmf, VarList vars_in) {
  const auto vars = dedupe(vars_in);
  if (vars.empty()) return 0.0;
  for (const auto& v : vars) (void)pmf.variable(v);  // validates names

  // Variables that are functions of other listed axes add no entropy.
  std::set<std::string> listed_axes;
  for (const auto& v : vars) {
    if (pmf.is_axis(v)) listed_axes.insert(v);
  }
  std::vector<std::string> effective;
  for (const auto& v : vars) {
    if (pmf.is_axis(v)) {
      effective.push_back(v);
      continue;
    }
    const auto deps = pmf.dependency_axes(v);
    const bool covered = std::all_of(deps.begin(), deps.end(),
                                     [&](const std::string& a) { return listed_axes.count(a) != 0; });
    if (!covered) effective.push_back(v);
  }

  const auto table = pmf.table();
  EntropySum h;
  if (effective.size() == pmf.axes().size() &&
      std::all_of(effective.begin(), effective.end(), [&](const std::string& v) { return pmf.is_axis(v); })) {
    for (const double p : table) h.add(p);
    return h.value();
  }

  // Mixed-radix key per cell.
  std::vector<std::vector<std::uint32_t>> columns;
  std::vector<std::uint64_t> radix;
  std::uint64_t key_space = 1;
  bool overflow = false;
  for (const auto& v : effective) {
    columns.push_back(pmf.cell_symbols(v));
    const auto size = static_cast<std::uint64_t>(pmf.variable(v).alphabet.size());
    radix.push_back(size);
    if (key_space > (std::uint64_t{1} << 62) / size) overflow = true;
    key_space *= size;
  }
  auto key_of = [&](std::size_t cell) {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < columns.size(); ++k) key = key * radix[k] + columns[k][cell];
    return key;
  };

  const std::uint64_t dense_limit = std::max<std::uint64_t>(std::uint64_t{1} << 16, 4 * table.size());
  if (!overflow && key_space <= dense_limit) {
    std::vector<double> mass(key_space, 0.0);
    for (std::size_t c = 0; c < table.size(); ++c) {
      if (table[c] > 0.0) mass[key_of(c)] += table[c];
    }
    for (const double p : mass) h.add(p);
    return h.value();
  }

  if (overflow) throw InputError("entropy: variable set too large");
  std::vector<std::pair<std::uint64_t, double>> cells;
  cells.reserve(table.size());
  for (std::size_t c = 0; c < table.size(); ++c) {
    if (table[c] > 0.0) cells.emplace_back(key_of(c), table[c]);
  }
  std::sort(cells.begin(), cells.end());
  for (std::size_t i = 0; i < cells.size();) {
    double p = 0.0;
    std::size_t j = i;
    for (; j < cells.size() && cells[j].first == cells[i].first; ++j) p += cells[j].second;
    h.add(p);
    i = j;
  }
  return h.value();
}

Bits entropy(const JointPMF& pmf, VarList vars) {
  require_nonempty(vars, "entropy");
  return Bits(entropy_kernel(pmf, vars));
}

Bits conditional_entropy(const JointPMF& pmf, VarList target, VarList given) {
  require_nonempty(target, "conditional_entropy");
  require_disjoint(target, given, "conditional_entropy");
  const auto joint = concat(target, given);
  return Bits(entropy_kernel(pmf, joint) - entropy_kernel(pmf, given));
}

Bits mutual_information(const JointPMF& pmf, VarList a, VarList b) {
  require_nonempty(a, "mutual_information");
  require_nonempty(b, "mutual_information");
  require_disjoint(a, b, "mutual_information");
  const auto ab = concat(a, b);
  return Bits(entropy_kernel(pmf, a) + entropy_kernel(pmf, b) - entropy_kernel(pmf, ab));
}

Bits conditional_mutual_information(const JointPMF& pmf, VarList a, VarList b, VarList given) {
  require_nonempty(a, "conditional_mutual_information");
  require_nonempty(b, "conditional_mutual_information");
  require_disjoint(a, b, "conditional_mutual_information");
  require_disjoint(a, given, "conditional_mutual_information");
  require_disjoint(b, given, "conditional_mutual_information");
  const auto ag = concat(a, given);
  const auto bg = concat(b, given);
  const auto abg = concat(a, b, given);
  return Bits(entropy_kernel(pmf, ag) + entropy_kernel(pmf, bg) - entropy_kernel(pmf, abg) -
              entropy_kernel(pmf, given));
}

}  // namespace crlab
