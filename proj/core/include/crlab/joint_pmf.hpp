#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crlab/rational.hpp"

namespace crlab {

/// Ordered set of distinct symbol values.
class Alphabet {
 public:
  explicit Alphabet(std::vector<Rational> symbols);
  /// Integers lo..hi inclusive.
  static Alphabet range(std::int64_t lo, std::int64_t hi);

  [[nodiscard]] std::size_t size() const { return symbols_.size(); }
  [[nodiscard]] const Rational& operator[](std::size_t i) const { return symbols_[i]; }
  [[nodiscard]] std::span<const Rational> symbols() const { return symbols_; }
  [[nodiscard]] std::optional<std::size_t> index_of(const Rational& value) const;
  [[nodiscard]] bool is_integer_range() const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<Rational> symbols_;
};

struct Variable {
  std::string name;
  Alphabet alphabet;
};

/// Total function between two alphabets, stored as one codomain index per
/// domain symbol.
class DeterministicMap {
 public:
  DeterministicMap(Alphabet domain, Alphabet codomain, std::vector<std::size_t> image);

  /// Codomain is the sorted set of images of `fn` over the domain.
  static DeterministicMap from_function(Alphabet domain,
                                        const std::function<Rational(const Rational&)>& fn);
  static DeterministicMap identity(const Alphabet& domain);
  static DeterministicMap constant(const Alphabet& domain, const Rational& value);

  [[nodiscard]] const Alphabet& domain() const { return domain_; }
  [[nodiscard]] const Alphabet& codomain() const { return codomain_; }
  [[nodiscard]] std::size_t operator()(std::size_t domain_index) const { return image_[domain_index]; }
  [[nodiscard]] std::span<const std::size_t> image() const { return image_; }

 private:
  Alphabet domain_;
  Alphabet codomain_;
  std::vector<std::size_t> image_;
};

/// Finite joint distribution over named variables.
///
/// Storage is a dense row-major table over the "axis" variables (last axis
/// fastest). Variables adjoined through deterministic maps or differences
/// are kept as derived columns holding one symbol index per table cell, so
/// a joint over (X, X_p, X_hat_p, R) costs |X|*|X_p| cells rather than the
/// full four-dimensional product. Values are immutable after construction.
class JointPMF {
 public:
  /// Validates nonnegativity, finiteness, unique names and normalisation
  /// within 1e-12.
  JointPMF(std::vector<Variable> axes, std::vector<double> table);

  [[nodiscard]] std::vector<std::string> variable_names() const;
  [[nodiscard]] bool has_variable(std::string_view name) const;
  [[nodiscard]] const Variable& variable(std::string_view name) const;
  [[nodiscard]] bool is_axis(std::string_view name) const;

  [[nodiscard]] std::size_t cell_count() const { return table_.size(); }
  [[nodiscard]] std::span<const double> table() const { return table_; }
  [[nodiscard]] std::span<const Variable> axes() const { return axes_; }

  /// Symbol index of `name` in every table cell.
  [[nodiscard]] std::vector<std::uint32_t> cell_symbols(std::string_view name) const;
  /// Names of the axes a variable is a function of (itself, for an axis).
  [[nodiscard]] std::vector<std::string> dependency_axes(std::string_view name) const;

  /// Probability of a full or partial assignment given as (name, value) pairs.
  [[nodiscard]] double probability(
      std::span<const std::pair<std::string, Rational>> assignment) const;

  [[nodiscard]] JointPMF marginalize(std::span<const std::string> keep) const;
  [[nodiscard]] JointPMF marginalize(std::initializer_list<std::string> keep) const {
    return marginalize(std::span<const std::string>(keep.begin(), keep.size()));
  }
  [[nodiscard]] JointPMF condition(std::string_view var, const Rational& value) const;
  [[nodiscard]] JointPMF adjoin_map(std::string_view source_var, const DeterministicMap& map,
                                    std::string new_var) const;
  [[nodiscard]] JointPMF adjoin_difference(std::string_view minuend, std::string_view subtrahend,
                                           std::string new_var) const;

 private:
  struct Derived {
    Variable var;
    std::vector<std::uint32_t> column;
    std::vector<std::size_t> deps;  // sorted axis indices
  };

  JointPMF() = default;
  void init_strides();
  [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const;
  [[nodiscard]] std::size_t require(std::string_view name) const;
  [[nodiscard]] std::uint32_t axis_symbol(std::size_t axis, std::size_t cell) const {
    return static_cast<std::uint32_t>((cell / strides_[axis]) % axes_[axis].alphabet.size());
  }
  [[nodiscard]] std::uint32_t symbol_at(std::size_t var_id, std::size_t cell) const;
  [[nodiscard]] const Variable& var_by_id(std::size_t id) const;
  [[nodiscard]] std::vector<std::size_t> deps_of(std::size_t id) const;
  void check_new_name(const std::string& name) const;

  std::vector<Variable> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> table_;
  std::vector<Derived> derived_;
};

/// Flat table of sampled symbol indices, one row per draw and one column
/// per variable of the source joint (axes first, then derived).
struct SampleSet {
  std::vector<std::string> variables;
  std::vector<Alphabet> alphabets;
  std::size_t rows = 0;
  std::vector<std::uint32_t> indices;

  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] std::uint32_t index(std::size_t row, std::size_t col) const {
    return indices[row * variables.size() + col];
  }
  [[nodiscard]] const Rational& value(std::size_t row, std::size_t col) const {
    return alphabets[col][index(row, col)];
  }
};

/// `n` iid draws from `pmf`. Reproducible for a fixed seed on every platform:
/// uses mt19937_64 with 53-bit uniform conversion and inverse-CDF lookup.
[[nodiscard]] SampleSet sample(const JointPMF& pmf, std::size_t n, std::uint64_t seed);

/// Dirichlet(concentration) table over integer alphabets 0..shape[i]-1.
/// Variables are named `names[i]` or "V<i>" when names are not supplied.
[[nodiscard]] JointPMF random_pmf(std::span<const std::size_t> shape, double concentration,
                                  std::uint64_t seed, std::span<const std::string> names = {});

}  // namespace crlab
