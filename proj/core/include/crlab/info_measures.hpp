#pragma once

#include <initializer_list>
#include <span>
#include <string>

#include "crlab/joint_pmf.hpp"

namespace crlab {

/// Information quantity in bits. Never negative: values in [-1e-12, 0) are
/// clamped to zero, anything lower raises InternalConsistencyError.
class Bits {
 public:
  static constexpr double kClampTolerance = 1e-12;

  constexpr Bits() = default;
  explicit Bits(double value);

  [[nodiscard]] constexpr double value() const { return value_; }
  constexpr explicit operator double() const { return value_; }

 private:
  double value_ = 0.0;
};

using VarList = std::span<const std::string>;

/// Joint entropy H(vars) in bits; 0 log 0 := 0.
[[nodiscard]] Bits entropy(const JointPMF& pmf, VarList vars);
/// H(target | given) = H(target, given) - H(given).
[[nodiscard]] Bits conditional_entropy(const JointPMF& pmf, VarList target, VarList given);
/// I(a; b) = H(a) + H(b) - H(a, b).
[[nodiscard]] Bits mutual_information(const JointPMF& pmf, VarList a, VarList b);
/// I(a; b | given) = H(a, given) + H(b, given) - H(a, b, given) - H(given).
[[nodiscard]] Bits conditional_mutual_information(const JointPMF& pmf, VarList a, VarList b,
                                                  VarList given);

// Brace-list conveniences: entropy(pmf, {"X", "X_p"}).
using Names = std::initializer_list<std::string>;
[[nodiscard]] inline Bits entropy(const JointPMF& pmf, Names vars) {
  return entropy(pmf, VarList(vars.begin(), vars.size()));
}
[[nodiscard]] inline Bits conditional_entropy(const JointPMF& pmf, Names target, Names given) {
  return conditional_entropy(pmf, VarList(target.begin(), target.size()),
                             VarList(given.begin(), given.size()));
}
[[nodiscard]] inline Bits mutual_information(const JointPMF& pmf, Names a, Names b) {
  return mutual_information(pmf, VarList(a.begin(), a.size()), VarList(b.begin(), b.size()));
}
[[nodiscard]] inline Bits conditional_mutual_information(const JointPMF& pmf, Names a, Names b,
                                                         Names given) {
  return conditional_mutual_information(pmf, VarList(a.begin(), a.size()),
                                        VarList(b.begin(), b.size()),
                                        VarList(given.begin(), given.size()));
}

/// Unclamped joint entropy kernel shared by every measure above. An empty
/// variable list has entropy 0.
[[nodiscard]] double entropy_kernel(const JointPMF& pmf, VarList vars);

}  // namespace crlab
