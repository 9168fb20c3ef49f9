#include "crlab/theorem_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "crlab/errors.hpp"
#include "crlab/info_measures.hpp"
#include "crlab/pixel_model.hpp"

namespace crlab {
namespace {

// Unclamped entropy of a brace list, in bits.
class Measures {
 public:
  explicit Measures(const JointPMF& pmf) : pmf_(pmf) {}

  double H(std::initializer_list<std::string> v) const {
    return entropy_kernel(pmf_, VarList(v.begin(), v.size()));
  }
  double Hc(std::initializer_list<std::string> t, std::initializer_list<std::string> g) const {
    std::vector<std::string> tg(t);
    tg.insert(tg.end(), g.begin(), g.end());
    return entropy_kernel(pmf_, tg) - H(g);
  }
  double I(std::initializer_list<std::string> a, std::initializer_list<std::string> b) const {
    std::vector<std::string> ab(a);
    ab.insert(ab.end(), b.begin(), b.end());
    return H(a) + H(b) - entropy_kernel(pmf_, ab);
  }
  double Ic(std::initializer_list<std::string> a, std::initializer_list<std::string> b,
            std::initializer_list<std::string> g) const {
    std::vector<std::string> ag(a), bg(b), abg(a);
    ag.insert(ag.end(), g.begin(), g.end());
    bg.insert(bg.end(), g.begin(), g.end());
    abg.insert(abg.end(), b.begin(), b.end());
    abg.insert(abg.end(), g.begin(), g.end());
    return entropy_kernel(pmf_, ag) + entropy_kernel(pmf_, bg) - entropy_kernel(pmf_, abg) - H(g);
  }

 private:
  const JointPMF& pmf_;
};

class Collector {
 public:
  explicit Collector(const CheckOptions& options) : options_(options) {}

  void identity(std::string id, double residual) {
    residual += options_.identity_fault;
    out_.push_back({std::move(id), CheckKind::kIdentity, residual, std::abs(residual) < kIdentityTolerance});
  }
  void inequality(std::string id, double margin) {
    out_.push_back({std::move(id), CheckKind::kInequality, margin, margin >= -kInequalityTolerance});
  }
  void observed(std::string id, double value) {
    out_.push_back({std::move(id), CheckKind::kObserved, value, true});
  }
  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  const CheckOptions& options_;
  std::vector<CheckResult> out_;
};

void require_vars(const JointPMF& pmf, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (!pmf.has_variable(n)) throw PreconditionError(std::string("joint lacks variable '") + n + "'");
  }
}

void require_function(const Measures& m, std::initializer_list<std::string> target,
                      std::initializer_list<std::string> given, const char* what) {
  if (m.Hc(target, given) > kIdentityTolerance) {
    throw PreconditionError(std::string("missing deterministic relation: ") + what);
  }
}

void prefix_ids(std::vector<CheckResult>& results, const std::string& prefix) {
  for (auto& r : results) r.id = prefix + r.id;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

const char* to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::kIdentity:
      return "identity";
    case CheckKind::kInequality:
      return "inequality";
    case CheckKind::kObserved:
      return "observed";
  }
  return "?";
}

// ------------------------------------------------------------ TheoremReport

void TheoremReport::add_trial(std::span<const CheckResult> results, std::size_t trial_index) {
  ++trial_count_;
  for (const auto& r : results) {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.id == r.id; });
    if (it == entries_.end()) {
      Entry e;
      e.id = r.id;
      e.kind = r.kind;
      e.worst = r.kind == CheckKind::kIdentity ? std::abs(r.value) : r.value;
      e.observed_max = r.value;
      entries_.push_back(e);
      it = entries_.end() - 1;
    } else if (r.kind == CheckKind::kIdentity) {
      it->worst = std::max(it->worst, std::abs(r.value));
    } else {
      it->worst = std::min(it->worst, r.value);
    }
    it->observed_max = std::max(it->observed_max, r.value);
    ++it->evaluated;
    if (r.pass) {
      ++it->passed;
    } else if (!it->first_failure_trial) {
      it->first_failure_trial = trial_index;
    }
  }
}

void TheoremReport::merge(const TheoremReport& other) {
  trial_count_ += other.trial_count_;
  for (const auto& o : other.entries_) {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.id == o.id; });
    if (it == entries_.end()) {
      entries_.push_back(o);
      continue;
    }
    it->worst = o.kind == CheckKind::kIdentity ? std::max(it->worst, o.worst) : std::min(it->worst, o.worst);
    it->observed_max = std::max(it->observed_max, o.observed_max);
    it->evaluated += o.evaluated;
    it->passed += o.passed;
    if (o.first_failure_trial &&
        (!it->first_failure_trial || *o.first_failure_trial < *it->first_failure_trial)) {
      it->first_failure_trial = o.first_failure_trial;
    }
  }
}

const TheoremReport::Entry* TheoremReport::find(std::string_view id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

bool TheoremReport::all_passed() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.passed == e.evaluated; });
}

double TheoremReport::max_identity_residual() const {
  double worst = 0.0;
  for (const auto& e : entries_) {
    if (e.kind == CheckKind::kIdentity) worst = std::max(worst, e.worst);
  }
  return worst;
}

double TheoremReport::min_inequality_margin() const {
  double worst = 0.0;
  bool any = false;
  for (const auto& e : entries_) {
    if (e.kind != CheckKind::kInequality) continue;
    worst = any ? std::min(worst, e.worst) : e.worst;
    any = true;
  }
  return worst;
}

void TheoremReport::write_text(std::ostream& os) const {
  char line[256];
  for (const auto& e : entries_) {
    std::snprintf(line, sizeof line, "%-34s %-10s worst=% .3e  pass=%zu/%zu", e.id.c_str(),
                  to_string(e.kind), e.worst, e.passed, e.evaluated);
    os << line;
    if (e.first_failure_trial) os << "  first_failure_trial=" << *e.first_failure_trial;
    os << '\n';
  }
  os << "trials=" << trial_count_ << " seed=" << seed_ << " result=" << (all_passed() ? "PASS" : "FAIL")
     << '\n';
}

void TheoremReport::write_csv(std::ostream& os) const {
  os << "check_id,kind,worst,pass_count,evaluated,first_failure_trial\n";
  char buf[64];
  for (const auto& e : entries_) {
    std::snprintf(buf, sizeof buf, "%.9g", e.worst);
    os << e.id << ',' << to_string(e.kind) << ',' << buf << ',' << e.passed << ',' << e.evaluated << ',';
    if (e.first_failure_trial) os << *e.first_failure_trial;
    os << '\n';
  }
}

// ----------------------------------------------------------------- checks

std::vector<CheckResult> lossless_checks(const JointPMF& pmf, const CheckOptions& options) {
  require_vars(pmf, {kVarX, kVarXp, kVarXhat, kVarR});
  const std::string X = kVarX, Xp = kVarXp, Xh = kVarXhat, R = kVarR;
  const Measures m(pmf);
  require_function(m, {R}, {X, Xp}, "H(R|X,X_p) > 1e-9");
  require_function(m, {Xh}, {Xp}, "H(X_hat_p|X_p) > 1e-9");

  const double h_x = m.H({X});
  const double h_r = m.H({R});
  const double h_x_xp = m.Hc({X}, {Xp});
  const double h_x_xh = m.Hc({X}, {Xh});
  const double h_r_xp = m.Hc({R}, {Xp});
  const double h_r_xh = m.Hc({R}, {Xh});
  const double i_xp_r = m.I({Xp}, {R});
  const double i_x_xp = m.I({X}, {Xp});
  const double i_x_xh = m.I({X}, {Xh});
  const double i_r_xh = m.I({R}, {Xh});
  const double i_x_xp_g_xh = m.Ic({X}, {Xp}, {Xh});

  Collector c(options);
  c.identity("eq12", h_r - (h_x_xp + i_xp_r));
  c.identity("eq20", h_x_xp - (h_x_xh - i_x_xp_g_xh));
  c.identity("eq22", h_r - (h_x_xh - i_x_xp_g_xh + i_xp_r));
  c.inequality("eq27a", h_r - h_r_xh);
  c.inequality("eq27b", h_r_xh - h_r_xp);
  c.identity("eq28", h_r_xp - h_x_xp);
  c.identity("eq30a", m.Hc({R}, {X, Xp}));
  c.identity("eq30b", m.Hc({X}, {R, Xp}));
  c.identity("eq33", (h_x - h_r) - (i_x_xp - i_xp_r));
  c.identity("eq37", (h_x_xh - h_r_xh) - ((i_x_xp - i_xp_r) - (i_x_xh - i_r_xh)));
  c.inequality("eq15", i_x_xp - i_x_xh);
  c.inequality("eq16", h_x_xh - h_x_xp);
  if (h_r < h_x) c.observed("case_gain_sign", h_x_xh - h_r_xh);
  return c.take();
}

TheoremReport check_lossless(const JointPMF& pmf, const CheckOptions& options) {
  TheoremReport report;
  const auto results = lossless_checks(pmf, options);
  report.add_trial(results, 0);
  return report;
}

std::vector<CheckResult> lossy_checks(const JointPMF& pmf, const CheckOptions& options) {
  require_vars(pmf, {kVarX, kVarXp, kVarXhat, kVarR, kVarXtilde, kVarRtilde});
  const std::string X = kVarX, Xp = kVarXp, Xh = kVarXhat, R = kVarR, Xt = kVarXtilde, Rt = kVarRtilde;
  const Measures m(pmf);
  require_function(m, {R}, {X, Xp}, "H(R|X,X_p) > 1e-9");
  require_function(m, {Xh}, {Xp}, "H(X_hat_p|X_p) > 1e-9");
  require_function(m, {Rt}, {Xt, Xp}, "H(R_tilde|X_tilde,X_p) > 1e-9");

  const double i_r_rt = m.I({R}, {Rt});
  const double i_x_xt_g_xp = m.Ic({X}, {Xt}, {Xp});
  const double i_xp_r = m.I({Xp}, {R});
  const double i_xp_r_g_rt = m.Ic({Xp}, {R}, {Rt});

  Collector c(options);
  c.identity("eq13", i_r_rt - (i_x_xt_g_xp + i_xp_r - i_xp_r_g_rt));
  c.identity("eq40", m.Ic({R}, {Rt}, {Xp}) - i_x_xt_g_xp);
  c.identity("eq41", (m.I({Xt}, {Xp}) - m.I({Rt}, {Xp})) - (m.H({Xt}) - m.H({Rt})));
  // Bayes expansion: H(R,Rt) + H(X,Xt,Xp|R,Rt) = H(X,Xt,Xp) + H(R,Rt|X,Xt,Xp).
  c.identity("app_bayes", m.H({R, Rt}) + m.Hc({X, Xt, Xp}, {R, Rt}) - m.H({X, Xt, Xp}) -
                              m.Hc({R, Rt}, {X, Xt, Xp}));
  c.identity("app_determined", m.Hc({R, Rt}, {X, Xt, Xp}));
  c.identity("app_symmetry", m.Hc({X}, {Xt, Xp}) - m.Hc({R}, {Xt, Xp, Rt}));
  c.identity("app_chain", i_r_rt - (i_x_xt_g_xp + i_xp_r + m.Hc({R}, {Xt, Xp, Rt}) - m.Hc({R}, {Rt})));
  const double margin_d = i_xp_r - i_xp_r_g_rt;
  const double margin_e = i_r_rt - m.Ic({R}, {Rt}, {Xh});
  if (options.assert_coder_inequalities) {
    c.inequality("app_d", margin_d);
    c.inequality("eq39", margin_e);
  } else {
    c.observed("app_d", margin_d);
    c.observed("eq39", margin_e);
  }
  c.observed("optimal_coder_excess", m.Ic({Xt}, {Xp}, {X, Xh}));
  return c.take();
}

TheoremReport check_lossy(const JointPMF& pmf, const CheckOptions& options) {
  TheoremReport report;
  const auto results = lossy_checks(pmf, options);
  report.add_trial(results, 0);
  return report;
}

// ------------------------------------------------------- randomized suite

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial_index) {
  return splitmix64(seed + static_cast<std::uint64_t>(trial_index));
}

TrialJoints draw_trial(const SuiteConfig& config, std::size_t trial_index) {
  if (config.x_size < 1 || config.xp_size < 1) throw InputError("suite: alphabet sizes must be >= 1");
  std::mt19937_64 gen(trial_seed(config.seed, trial_index));
  const std::uint64_t source_seed = gen();
  const std::uint64_t free_seed = gen();

  const std::size_t nx = config.x_size;
  const std::size_t np = config.xp_size;
  const std::vector<std::string> names2{kVarX, kVarXp};
  const std::size_t shape2[] = {nx, np};
  JointPMF source = random_pmf(shape2, config.concentration, source_seed, names2);

  // Random deterministic bottleneck f: X_p -> {0..k-1}.
  std::uniform_int_distribution<std::size_t> codomain_size(1, np);
  const std::size_t k = codomain_size(gen);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::vector<std::size_t> image(np);
  for (auto& v : image) v = pick(gen);
  const Alphabet xp_alphabet = source.variable(kVarXp).alphabet;
  const DeterministicMap f(xp_alphabet, Alphabet::range(0, static_cast<std::int64_t>(k) - 1), image);

  auto with_lossless_vars = [&](const JointPMF& j) {
    return j.adjoin_map(kVarXp, f, kVarXhat).adjoin_difference(kVarX, kVarXp, kVarR);
  };
  JointPMF lossless = with_lossless_vars(source);

  const std::vector<std::string> names3{kVarX, kVarXp, kVarXtilde};
  const std::size_t shape3[] = {nx, np, nx};
  JointPMF lossy_free = with_lossless_vars(random_pmf(shape3, config.concentration, free_seed, names3))
                            .adjoin_difference(kVarXtilde, kVarXp, kVarRtilde);

  // Residual test channel W(r_tilde | r) with full support on the residual
  // range, and X_tilde = X_p + R_tilde.
  const auto r_lo = -static_cast<std::int64_t>(np - 1);
  const auto r_hi = static_cast<std::int64_t>(nx - 1);
  const auto nr = static_cast<std::size_t>(r_hi - r_lo + 1);
  std::gamma_distribution<double> gamma(config.concentration, 1.0);
  std::vector<double> channel(nr * nr);
  for (std::size_t r = 0; r < nr; ++r) {
    double row = 0.0;
    for (std::size_t t = 0; t < nr; ++t) row += channel[r * nr + t] = gamma(gen);
    for (std::size_t t = 0; t < nr; ++t) channel[r * nr + t] /= row;
  }
  const auto xt_lo = r_lo;
  const auto xt_hi = static_cast<std::int64_t>(np - 1) + r_hi;
  const auto nxt = static_cast<std::size_t>(xt_hi - xt_lo + 1);
  std::vector<double> table(nx * np * nxt, 0.0);
  const auto base = source.table();
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t xp = 0; xp < np; ++xp) {
      const auto r_idx = static_cast<std::size_t>(static_cast<std::int64_t>(x) - static_cast<std::int64_t>(xp) - r_lo);
      for (std::size_t t = 0; t < nr; ++t) {
        // x_tilde = xp + (t + r_lo), stored at offset from xt_lo.
        const auto xt_idx = static_cast<std::size_t>(static_cast<std::int64_t>(xp) + static_cast<std::int64_t>(t) + r_lo - xt_lo);
        table[(x * np + xp) * nxt + xt_idx] += base[x * np + xp] * channel[r_idx * nr + t];
      }
    }
  }
  const Alphabet pixel_x = source.variable(kVarX).alphabet;
  JointPMF residual_joint({Variable{kVarX, pixel_x}, Variable{kVarXp, xp_alphabet},
                           Variable{kVarXtilde, Alphabet::range(xt_lo, xt_hi)}},
                          std::move(table));
  JointPMF lossy_residual =
      with_lossless_vars(residual_joint).adjoin_difference(kVarXtilde, kVarXp, kVarRtilde);

  return TrialJoints{std::move(lossless), std::move(lossy_free), std::move(lossy_residual)};
}

std::vector<CheckResult> run_trial(const SuiteConfig& config, std::size_t trial_index) {
  const TrialJoints joints = draw_trial(config, trial_index);
  std::vector<CheckResult> all;

  auto lossless = lossless_checks(joints.lossless, config.options);
  prefix_ids(lossless, "lossless/");
  all.insert(all.end(), lossless.begin(), lossless.end());

  auto residual = lossy_checks(joints.lossy_residual, config.options);
  prefix_ids(residual, "lossy-residual/");
  all.insert(all.end(), residual.begin(), residual.end());

  CheckOptions free_options = config.options;
  free_options.assert_coder_inequalities = false;
  auto free = lossy_checks(joints.lossy_free, free_options);
  prefix_ids(free, "lossy-free/");
  all.insert(all.end(), free.begin(), free.end());
  return all;
}

TheoremReport run_randomized_suite(const SuiteConfig& config) {
  if (config.trials < 1) throw InputError("suite: trials must be >= 1");
  TheoremReport report(config.seed);
  for (std::size_t t = 0; t < config.trials; ++t) {
    const auto results = run_trial(config, t);
    report.add_trial(results, t);
  }
  return report;
}

TheoremReport check_pixel_grid(std::span<const double> p_grid, std::span<const Rational> q_list,
                               int alphabet_size, const CheckOptions& options) {
  TheoremReport report;
  std::size_t index = 0;
  for (const auto& q : q_list) {
    for (const double p : p_grid) {
      const auto results = lossless_checks(build_joint({alphabet_size, p, q}), options);
      report.add_trial(results, index++);
    }
  }
  return report;
}

}  // namespace crlab
