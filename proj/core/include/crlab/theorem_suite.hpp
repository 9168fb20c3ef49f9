#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "crlab/joint_pmf.hpp"
#include "crlab/rational.hpp"

namespace crlab {

inline constexpr double kIdentityTolerance = 1e-9;
inline constexpr double kInequalityTolerance = 1e-9;

enum class CheckKind { kIdentity, kInequality, kObserved };

[[nodiscard]] const char* to_string(CheckKind kind);

/// One evaluated identity residual (lhs - rhs), inequality margin
/// (should be >= 0) or observed quantity (recorded, never failing).
struct CheckResult {
  std::string id;
  CheckKind kind = CheckKind::kIdentity;
  double value = 0.0;
  bool pass = true;
};

struct CheckOptions {
  /// Assert the coder inequalities I(X_p;R) >= I(X_p;R|R_tilde) and
  /// I(R;R_tilde|X_hat_p) <= I(R;R_tilde). They are theorems only when
  /// R_tilde is produced from R alone (a residual test channel); for other
  /// joints they are recorded as observed quantities.
  bool assert_coder_inequalities = true;
  /// Added to every identity residual. Used to exercise failure paths.
  double identity_fault = 0.0;
};

/// Aggregated view over many trials.
class TheoremReport {
 public:
  struct Entry {
    std::string id;
    CheckKind kind = CheckKind::kIdentity;
    double worst = 0.0;  // max |residual|, min margin, or min observed value
    double observed_max = 0.0;
    std::size_t evaluated = 0;
    std::size_t passed = 0;
    std::optional<std::size_t> first_failure_trial;
  };

  TheoremReport() = default;
  explicit TheoremReport(std::uint64_t seed) : seed_(seed) {}

  void add_trial(std::span<const CheckResult> results, std::size_t trial_index);
  void merge(const TheoremReport& other);

  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
  [[nodiscard]] const Entry* find(std::string_view id) const;
  [[nodiscard]] std::size_t trial_count() const { return trial_count_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] bool all_passed() const;
  /// Largest |residual| over identity checks.
  [[nodiscard]] double max_identity_residual() const;
  /// Smallest margin over asserted inequality checks.
  [[nodiscard]] double min_inequality_margin() const;

  void write_text(std::ostream& os) const;
  void write_csv(std::ostream& os) const;

 private:
  std::vector<Entry> entries_;
  std::size_t trial_count_ = 0;
  std::uint64_t seed_ = 0;
};

/// Lossless identities and inequalities on a joint carrying X, X_p,
/// X_hat_p = f(X_p) and R = X - X_p. Throws PreconditionError when
/// H(R | X, X_p) or H(X_hat_p | X_p) exceeds 1e-9.
[[nodiscard]] std::vector<CheckResult> lossless_checks(const JointPMF& pmf,
                                                       const CheckOptions& options = {});
[[nodiscard]] TheoremReport check_lossless(const JointPMF& pmf, const CheckOptions& options = {});

/// Lossy identities on a joint that additionally carries X_tilde and
/// R_tilde = X_tilde - X_p.
[[nodiscard]] std::vector<CheckResult> lossy_checks(const JointPMF& pmf,
                                                    const CheckOptions& options = {});
[[nodiscard]] TheoremReport check_lossy(const JointPMF& pmf, const CheckOptions& options = {});

struct SuiteConfig {
  std::size_t trials = 1000;
  std::size_t x_size = 8;
  std::size_t xp_size = 8;
  double concentration = 1.0;
  std::uint64_t seed = 7;
  CheckOptions options;
};

/// splitmix64 finaliser applied to seed + trial index.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial_index);

/// Joints drawn for one randomized trial.
struct TrialJoints {
  JointPMF lossless;            // X, X_p, X_hat_p, R
  JointPMF lossy_free;          // + X_tilde drawn jointly with full support
  JointPMF lossy_residual;      // + X_tilde = X_p + R_tilde, R_tilde ~ W(. | R)
};

[[nodiscard]] TrialJoints draw_trial(const SuiteConfig& config, std::size_t trial_index);
/// All checks of one trial, with ids prefixed "lossless/", "lossy-residual/"
/// and "lossy-free/". Deterministic in (config, trial_index).
[[nodiscard]] std::vector<CheckResult> run_trial(const SuiteConfig& config, std::size_t trial_index);
[[nodiscard]] TheoremReport run_randomized_suite(const SuiteConfig& config);

/// Lossless checks over every (p, Q) of the pixel model.
[[nodiscard]] TheoremReport check_pixel_grid(std::span<const double> p_grid,
                                             std::span<const Rational> q_list, int alphabet_size,
                                             const CheckOptions& options = {});

}  // namespace crlab
