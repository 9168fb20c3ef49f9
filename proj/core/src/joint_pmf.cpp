#include "crlab/joint_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "crlab/errors.hpp"

namespace crlab {
namespace {

constexpr double kSumTolerance = 1e-12;
constexpr std::size_t kMaxDenseCells = std::size_t{1} << 27;

std::size_t checked_product(const std::vector<Variable>& axes) {
  std::size_t total = 1;
  for (const auto& v : axes) {
    if (v.alphabet.size() > kMaxDenseCells / total) {
      throw InputError("joint table too large for dense storage");
    }
    total *= v.alphabet.size();
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<Rational> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw InputError("alphabet must contain at least one symbol");
  for (std::size_t i = 1; i < symbols_.size(); ++i) {
    if (!(symbols_[i - 1] < symbols_[i])) {
      throw InputError("alphabet symbols must be distinct and ascending");
    }
  }
}

Alphabet Alphabet::range(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw InputError("empty alphabet range");
  std::vector<Rational> s;
  s.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t v = lo; v <= hi; ++v) s.emplace_back(v);
  return Alphabet(std::move(s));
}

std::optional<std::size_t> Alphabet::index_of(const Rational& value) const {
  const auto it = std::lower_bound(symbols_.begin(), symbols_.end(), value);
  if (it == symbols_.end() || !(*it == value)) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

bool Alphabet::is_integer_range() const {
  if (!symbols_.front().is_integer()) return false;
  const auto first = symbols_.front().num();
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!(symbols_[i] == Rational(first + static_cast<std::int64_t>(i)))) return false;
  }
  return true;
}

// -------------------------------------------------------- DeterministicMap

DeterministicMap::DeterministicMap(Alphabet domain, Alphabet codomain, std::vector<std::size_t> image)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), image_(std::move(image)) {
  if (image_.size() != domain_.size()) {
    throw InputError("deterministic map must assign exactly one image per domain symbol");
  }
  for (const auto idx : image_) {
    if (idx >= codomain_.size()) throw InputError("deterministic map image outside codomain");
  }
}

DeterministicMap DeterministicMap::from_function(Alphabet domain,
                                                 const std::function<Rational(const Rational&)>& fn) {
  std::vector<Rational> images;
  images.reserve(domain.size());
  for (const auto& s : domain.symbols()) images.push_back(fn(s));
  std::vector<Rational> sorted = images;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Alphabet codomain(std::move(sorted));
  std::vector<std::size_t> image;
  image.reserve(images.size());
  for (const auto& v : images) image.push_back(*codomain.index_of(v));
  return DeterministicMap(std::move(domain), std::move(codomain), std::move(image));
}

DeterministicMap DeterministicMap::identity(const Alphabet& domain) {
  std::vector<std::size_t> image(domain.size());
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = i;
  return DeterministicMap(domain, domain, std::move(image));
}

DeterministicMap DeterministicMap::constant(const Alphabet& domain, const Rational& value) {
  return DeterministicMap(domain, Alphabet({value}), std::vector<std::size_t>(domain.size(), 0));
}

// ---------------------------------------------------------------- JointPMF

JointPMF::JointPMF(std::vector<Variable> axes, std::vector<double> table)
    : axes_(std::move(axes)), table_(std::move(table)) {
  if (axes_.empty()) throw InputError("joint pmf needs at least one variable");
  std::set<std::string> names;
  for (const auto& v : axes_) {
    if (!names.insert(v.name).second) throw InputError("duplicate variable name '" + v.name + "'");
  }
  if (checked_product(axes_) != table_.size()) {
    throw InputError("table size does not match the product of alphabet sizes");
  }
  // Neumaier summation: a plain sum over ~10^5 cells drifts past 1e-12.
  double sum = 0.0, comp = 0.0;
  for (const double p : table_) {
    if (!std::isfinite(p) || p < 0.0) throw InputError("probabilities must be finite and >= 0");
    const double t = sum + p;
    comp += std::abs(sum) >= p ? (sum - t) + p : (p - t) + sum;
    sum = t;
  }
  sum += comp;
  if (std::abs(sum - 1.0) > kSumTolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", sum);
    throw InputError(std::string("probabilities must sum to 1 (got ") + buf + ")");
  }
  init_strides();
}

void JointPMF::init_strides() {
  strides_.assign(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * axes_[i].alphabet.size();
  }
}

std::optional<std::size_t> JointPMF::find(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name == name) return i;
  }
  for (std::size_t i = 0; i < derived_.size(); ++i) {
    if (derived_[i].var.name == name) return axes_.size() + i;
  }
  return std::nullopt;
}

std::size_t JointPMF::require(std::string_view name) const {
  const auto id = find(name);
  if (!id) throw InputError("unknown variable '" + std::string(name) + "'");
  return *id;
}

const Variable& JointPMF::var_by_id(std::size_t id) const {
  return id < axes_.size() ? axes_[id] : derived_[id - axes_.size()].var;
}

std::uint32_t JointPMF::symbol_at(std::size_t var_id, std::size_t cell) const {
  if (var_id < axes_.size()) return axis_symbol(var_id, cell);
  return derived_[var_id - axes_.size()].column[cell];
}

std::vector<std::size_t> JointPMF::deps_of(std::size_t id) const {
  if (id < axes_.size()) return {id};
  return derived_[id - axes_.size()].deps;
}

void JointPMF::check_new_name(const std::string& name) const {
  if (name.empty()) throw InputError("variable name must be nonempty");
  if (find(name)) throw InputError("variable name '" + name + "' already in use");
}

std::vector<std::string> JointPMF::variable_names() const {
  std::vector<std::string> out;
  for (const auto& v : axes_) out.push_back(v.name);
  for (const auto& d : derived_) out.push_back(d.var.name);
  return out;
}

bool JointPMF::has_variable(std::string_view name) const { return find(name).has_value(); }

const Variable& JointPMF::variable(std::string_view name) const { return var_by_id(require(name)); }

bool JointPMF::is_axis(std::string_view name) const { return require(name) < axes_.size(); }

std::vector<std::uint32_t> JointPMF::cell_symbols(std::string_view name) const {
  const auto id = require(name);
  if (id >= axes_.size()) return derived_[id - axes_.size()].column;
  std::vector<std::uint32_t> out(table_.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = axis_symbol(id, c);
  return out;
}

std::vector<std::string> JointPMF::dependency_axes(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto a : deps_of(require(name))) out.push_back(axes_[a].name);
  return out;
}

double JointPMF::probability(std::span<const std::pair<std::string, Rational>> assignment) const {
  std::vector<std::pair<std::size_t, std::uint32_t>> want;
  for (const auto& [name, value] : assignment) {
    const auto id = require(name);
    const auto idx = var_by_id(id).alphabet.index_of(value);
    if (!idx) return 0.0;
    want.emplace_back(id, static_cast<std::uint32_t>(*idx));
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < table_.size(); ++c) {
    bool match = true;
    for (const auto& [id, idx] : want) {
      if (symbol_at(id, c) != idx) {
        match = false;
        break;
      }
    }
    if (match) sum += table_[c];
  }
  return sum;
}

JointPMF JointPMF::marginalize(std::span<const std::string> keep) const {
  if (keep.empty()) throw InputError("marginalize: keep list must be nonempty");
  std::vector<std::size_t> ids;
  for (const auto& name : keep) {
    const auto id = require(name);
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  std::set<std::size_t> kept_axes;
  for (const auto id : ids) {
    if (id < axes_.size()) kept_axes.insert(id);
  }

  // A kept derived variable stays derived when every axis it depends on is
  // kept; otherwise it becomes an axis of the marginal.
  std::vector<std::size_t> new_axis_ids;
  std::vector<std::size_t> new_derived_ids;
  for (const auto id : ids) {
    if (id < axes_.size()) {
      new_axis_ids.push_back(id);
      continue;
    }
    const auto& deps = derived_[id - axes_.size()].deps;
    const bool covered = std::all_of(deps.begin(), deps.end(),
                                     [&](std::size_t a) { return kept_axes.count(a) != 0; });
    (covered ? new_derived_ids : new_axis_ids).push_back(id);
  }

  JointPMF out;
  for (const auto id : new_axis_ids) out.axes_.push_back(var_by_id(id));
  out.table_.assign(checked_product(out.axes_), 0.0);
  out.init_strides();

  for (std::size_t c = 0; c < table_.size(); ++c) {
    std::size_t nc = 0;
    for (std::size_t k = 0; k < new_axis_ids.size(); ++k) {
      nc += symbol_at(new_axis_ids[k], c) * out.strides_[k];
    }
    out.table_[nc] += table_[c];
  }

  for (const auto id : new_derived_ids) {
    const auto& d = derived_[id - axes_.size()];
    Derived nd{d.var, std::vector<std::uint32_t>(out.table_.size()), {}};
    // Map old dependency axes to their position in the marginal.
    std::vector<std::pair<std::size_t, std::size_t>> dep_pos;
    for (const auto a : d.deps) {
      const auto pos = static_cast<std::size_t>(
          std::find(new_axis_ids.begin(), new_axis_ids.end(), a) - new_axis_ids.begin());
      dep_pos.emplace_back(a, pos);
      nd.deps.push_back(pos);
    }
    std::sort(nd.deps.begin(), nd.deps.end());
    for (std::size_t nc = 0; nc < out.table_.size(); ++nc) {
      std::size_t old_cell = 0;
      for (const auto& [a, pos] : dep_pos) old_cell += out.axis_symbol(pos, nc) * strides_[a];
      nd.column[nc] = d.column[old_cell];
    }
    out.derived_.push_back(std::move(nd));
  }
  return out;
}

JointPMF JointPMF::condition(std::string_view var, const Rational& value) const {
  const auto id = require(var);
  const auto idx = var_by_id(id).alphabet.index_of(value);
  if (!idx) {
    throw DomainError("condition: value " + value.to_string() + " not in alphabet of '" +
                      std::string(var) + "'");
  }
  const auto target = static_cast<std::uint32_t>(*idx);
  double mass = 0.0;
  for (std::size_t c = 0; c < table_.size(); ++c) {
    if (symbol_at(id, c) == target) mass += table_[c];
  }
  if (!(mass > 0.0)) {
    throw DomainError("condition: Pr(" + std::string(var) + "=" + value.to_string() + ") is zero");
  }

  if (id >= axes_.size()) {
    JointPMF out = *this;
    for (std::size_t c = 0; c < table_.size(); ++c) {
      out.table_[c] = symbol_at(id, c) == target ? table_[c] / mass : 0.0;
    }
    out.derived_.erase(out.derived_.begin() + static_cast<std::ptrdiff_t>(id - axes_.size()));
    return out;
  }

  if (axes_.size() == 1) {
    throw InputError("condition: cannot condition away the only axis of a joint");
  }
  JointPMF out;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (a != id) out.axes_.push_back(axes_[a]);
  }
  out.table_.assign(checked_product(out.axes_), 0.0);
  out.init_strides();
  auto old_cell_of = [&](std::size_t nc) {
    std::size_t old_cell = target * strides_[id];
    for (std::size_t a = 0, k = 0; a < axes_.size(); ++a) {
      if (a == id) continue;
      old_cell += out.axis_symbol(k++, nc) * strides_[a];
    }
    return old_cell;
  };
  for (std::size_t nc = 0; nc < out.table_.size(); ++nc) out.table_[nc] = table_[old_cell_of(nc)] / mass;
  for (const auto& d : derived_) {
    Derived nd{d.var, std::vector<std::uint32_t>(out.table_.size()), {}};
    for (const auto a : d.deps) {
      if (a != id) nd.deps.push_back(a < id ? a : a - 1);
    }
    for (std::size_t nc = 0; nc < out.table_.size(); ++nc) nd.column[nc] = d.column[old_cell_of(nc)];
    out.derived_.push_back(std::move(nd));
  }
  return out;
}

JointPMF JointPMF::adjoin_map(std::string_view source_var, const DeterministicMap& map,
                              std::string new_var) const {
  const auto id = require(source_var);
  if (!(map.domain() == var_by_id(id).alphabet)) {
    throw InputError("adjoin_map: map domain does not match alphabet of '" + std::string(source_var) + "'");
  }
  check_new_name(new_var);
  JointPMF out = *this;
  Derived d{Variable{std::move(new_var), map.codomain()}, std::vector<std::uint32_t>(table_.size()),
            deps_of(id)};
  for (std::size_t c = 0; c < table_.size(); ++c) {
    d.column[c] = static_cast<std::uint32_t>(map(symbol_at(id, c)));
  }
  out.derived_.push_back(std::move(d));
  return out;
}

JointPMF JointPMF::adjoin_difference(std::string_view minuend, std::string_view subtrahend,
                                     std::string new_var) const {
  const auto a = require(minuend);
  const auto b = require(subtrahend);
  check_new_name(new_var);
  const auto& sa = var_by_id(a).alphabet;
  const auto& sb = var_by_id(b).alphabet;

  std::vector<Rational> diffs;
  diffs.reserve(sa.size() * sb.size());
  for (const auto& x : sa.symbols()) {
    for (const auto& y : sb.symbols()) diffs.push_back(x - y);
  }
  std::vector<Rational> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Alphabet alphabet(std::move(sorted));
  std::vector<std::uint32_t> lookup(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    lookup[i] = static_cast<std::uint32_t>(*alphabet.index_of(diffs[i]));
  }

  std::vector<std::size_t> deps = deps_of(a);
  for (const auto dep : deps_of(b)) deps.push_back(dep);
  std::sort(deps.begin(), deps.end());
  deps.erase(std::unique(deps.begin(), deps.end()), deps.end());

  JointPMF out = *this;
  Derived d{Variable{std::move(new_var), std::move(alphabet)}, std::vector<std::uint32_t>(table_.size()),
            std::move(deps)};
  for (std::size_t c = 0; c < table_.size(); ++c) {
    d.column[c] = lookup[symbol_at(a, c) * sb.size() + symbol_at(b, c)];
  }
  out.derived_.push_back(std::move(d));
  return out;
}

// --------------------------------------------------------------- SampleSet

std::size_t SampleSet::column(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == name) return i;
  }
  throw InputError("sample set has no variable '" + std::string(name) + "'");
}

}  // namespace crlab
