#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "crlab/errors.hpp"
#include "crlab/rd_solver.hpp"

namespace crlab::rd {
namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kKktSlack = 1e-12;
constexpr double kWarmFloor = 1e-9;
constexpr int kPolishEvery = 20;

// Row-scaled kernel K(x, y) = exp(-s (d(x, y) - min_y d(x, y))) over the
// source symbols with positive mass. The row scaling cancels in every
// quantity the iteration uses and keeps each row's largest entry at 1.
class Kernel {
 public:
  Kernel(std::span<const double> probs, const DistortionMatrix& dist, double slope)
      : m_(dist.cols()), slope_(slope), dist_(dist) {
    for (std::size_t x = 0; x < dist.rows(); ++x) {
      if (!(probs[x] > 0.0)) continue;
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t y = 0; y < m_; ++y) dmin = std::min(dmin, dist(x, y));
      rows_.push_back(x);
      p_.push_back(probs[x]);
      dmin_.push_back(dmin);
      for (std::size_t y = 0; y < m_; ++y) k_.push_back(std::exp(-slope * (dist(x, y) - dmin)));
    }
  }

  // c(y) = sum_x p(x) K(x, y) / Z(x) with Z(x) = sum_y q(y) K(x, y).
  // Returns the dual objective -sum_x p(x) log Z(x) (row scaling dropped).
  double eval(std::span<const double> q, std::vector<double>& c) const {
    std::fill(c.begin(), c.end(), 0.0);
    double lag = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const double* k = &k_[i * m_];
      double z = 0.0;
      for (std::size_t y = 0; y < m_; ++y) z += q[y] * k[y];
      if (!(z > 0.0)) {
        eval_row_logdomain(i, q, c, lag);
        continue;
      }
      lag -= p_[i] * std::log(z);
      const double w = p_[i] / z;
      for (std::size_t y = 0; y < m_; ++y) c[y] += w * k[y];
    }
    return lag;
  }

  // Blahut-Arimoto map q'(y) = q(y) c(y), renormalised against rounding.
  static void step(std::span<const double> q, std::span<const double> c, std::vector<double>& out) {
    double sum = 0.0;
    for (std::size_t y = 0; y < q.size(); ++y) sum += out[y] = q[y] * c[y];
    for (auto& v : out) v /= sum;
  }

  // Rate and distortion of the test channel Q(y|x) ~ q(y) K(x, y).
  void finish(std::span<const double> q, RDPoint& point) const {
    std::vector<double> cond(rows_.size() * m_);
    std::vector<double> out(m_, 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const double* k = &k_[i * m_];
      double* row = &cond[i * m_];
      double z = 0.0;
      for (std::size_t y = 0; y < m_; ++y) z += row[y] = q[y] * k[y];
      if (!(z > 0.0)) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < m_; ++y) mx = std::max(mx, log_weight(i, y, q));
        z = 0.0;
        for (std::size_t y = 0; y < m_; ++y) z += row[y] = std::exp(log_weight(i, y, q) - mx);
      }
      for (std::size_t y = 0; y < m_; ++y) {
        row[y] /= z;
        out[y] += p_[i] * row[y];
      }
    }
    double rate = 0.0;
    double distortion = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const double* row = &cond[i * m_];
      double rx = 0.0;
      for (std::size_t y = 0; y < m_; ++y) {
        if (row[y] > 0.0 && out[y] > 0.0) rx += row[y] * std::log(row[y] / out[y]);
        distortion += p_[i] * row[y] * dist_(rows_[i], y);
      }
      rate += p_[i] * rx;
    }
    point.rate = std::max(0.0, rate / kLn2);
    point.distortion = distortion;
  }

  // Newton's method on the dual restricted to the live support
  // {y : q(y) > kLive or c(y) > 1}, with the simplex constraint handled through the KKT
  // system. BA alone crawls when reconstruction points are about to enter
  // or leave the support; this closes the last digits quadratically.
  // Updates (q, c, lag) only when the objective improves.
  bool newton_polish(std::vector<double>& q, std::vector<double>& c, double& lag) const {
    constexpr double kLive = 1e-13;
    constexpr double kSignificant = 1e-8;
    std::vector<std::size_t> live;
    for (std::size_t y = 0; y < m_; ++y) {
      // c(y) > 1 marks a point that wants to enter the support.
      if (q[y] > kLive || c[y] > 1.0) live.push_back(y);
    }
    const auto s = static_cast<Eigen::Index>(live.size());
    if (s < 2) return false;

    std::vector<double> cur = q, trial(m_), c_trial(m_);
    std::vector<double> cur_c = c;
    double cur_lag = lag;
    bool improved = false;
    Eigen::MatrixXd kkt(s + 1, s + 1);
    Eigen::VectorXd rhs(s + 1);
    for (int step = 0; step < 40; ++step) {
      kkt.setZero();
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double* k = &k_[i * m_];
        double z = 0.0;
        for (std::size_t y = 0; y < m_; ++y) z += cur[y] * k[y];
        if (!(z > 0.0)) return improved && commit(cur, cur_c, cur_lag, q, c, lag);
        const double w = p_[i] / (z * z);
        for (Eigen::Index a = 0; a < s; ++a) {
          const double ka = w * k[live[static_cast<std::size_t>(a)]];
          for (Eigen::Index b = 0; b <= a; ++b) kkt(a, b) += ka * k[live[static_cast<std::size_t>(b)]];
        }
      }
      for (Eigen::Index a = 0; a < s; ++a) {
        for (Eigen::Index b = 0; b < a; ++b) kkt(b, a) = kkt(a, b);
        kkt(a, s) = kkt(s, a) = 1.0;
        rhs(a) = cur_c[live[static_cast<std::size_t>(a)]];
      }
      kkt(s, s) = 0.0;
      rhs(s) = 0.0;
      const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
      if (!sol.allFinite()) break;

      double decrement = 0.0;  // -g'd = c'd
      double t = 1.0;
      for (Eigen::Index a = 0; a < s; ++a) {
        const std::size_t y = live[static_cast<std::size_t>(a)];
        decrement += cur_c[y] * sol(a);
        // Only significant points limit the step; negligible ones are
        // clamped below instead, or they would freeze the iteration.
        if (sol(a) < 0.0 && cur[y] > kSignificant) t = std::min(t, 0.5 * cur[y] / -sol(a));
      }
      if (!(decrement > 1e-16)) break;

      bool accepted = false;
      for (int ls = 0; ls < 40 && !accepted; ++ls, t *= 0.5) {
        trial = cur;
        double sum = 0.0;
        for (Eigen::Index a = 0; a < s; ++a) {
          const std::size_t y = live[static_cast<std::size_t>(a)];
          trial[y] = std::max(cur[y] + t * sol(a), 1e-3 * cur[y]);
        }
        for (const double v : trial) sum += v;
        for (auto& v : trial) v /= sum;
        const double l = eval(trial, c_trial);
        if (l <= cur_lag - 1e-4 * t * decrement) {
          cur.swap(trial);
          cur_c.swap(c_trial);
          cur_lag = l;
          accepted = improved = true;
        }
      }
      if (!accepted) break;
    }
    return improved && commit(cur, cur_c, cur_lag, q, c, lag);
  }

 private:
  static bool commit(std::vector<double>& cur, std::vector<double>& cur_c, double cur_lag, std::vector<double>& q,
                     std::vector<double>& c, double& lag) {
    q.swap(cur);
    c.swap(cur_c);
    lag = cur_lag;
    return true;
  }

  double log_weight(std::size_t i, std::size_t y, std::span<const double> q) const {
    if (!(q[y] > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(q[y]) - slope_ * (dist_(rows_[i], y) - dmin_[i]);
  }

  // Z(x) underflowed: redo the row with a log-sum-exp.
  void eval_row_logdomain(std::size_t i, std::span<const double> q, std::vector<double>& c, double& lag) const {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < m_; ++y) mx = std::max(mx, log_weight(i, y, q));
    double z = 0.0;
    for (std::size_t y = 0; y < m_; ++y) z += std::exp(log_weight(i, y, q) - mx);
    const double log_z = mx + std::log(z);
    lag -= p_[i] * log_z;
    for (std::size_t y = 0; y < m_; ++y) {
      c[y] += p_[i] * std::exp(-slope_ * (dist_(rows_[i], y) - dmin_[i]) - log_z);
    }
  }

  std::size_t m_;
  double slope_;
  const DistortionMatrix& dist_;
  std::vector<std::size_t> rows_;
  std::vector<double> p_;
  std::vector<double> dmin_;
  std::vector<double> k_;
};

}  // namespace

DistortionMatrix::DistortionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0) throw InputError("distortion matrix must be nonempty");
  if (values_.size() != rows_ * cols_) throw InputError("distortion matrix size mismatch");
  for (const double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("distortions must be finite and >= 0");
  }
}

double squared_error(const Rational& a, const Rational& b) {
  const double diff = (a - b).to_double();
  return diff * diff;
}

DistortionMatrix DistortionMatrix::squared_error(const Alphabet& source, const Alphabet& recon) {
  std::vector<double> v(source.size() * recon.size());
  for (std::size_t x = 0; x < source.size(); ++x) {
    for (std::size_t y = 0; y < recon.size(); ++y) v[x * recon.size() + y] = rd::squared_error(source[x], recon[y]);
  }
  return {source.size(), recon.size(), std::move(v)};
}

DistortionMatrix DistortionMatrix::hamming(const Alphabet& source, const Alphabet& recon) {
  std::vector<double> v(source.size() * recon.size());
  for (std::size_t x = 0; x < source.size(); ++x) {
    for (std::size_t y = 0; y < recon.size(); ++y) v[x * recon.size() + y] = source[x] == recon[y] ? 0.0 : 1.0;
  }
  return {source.size(), recon.size(), std::move(v)};
}

RDPoint blahut_arimoto(std::span<const double> probs, const DistortionMatrix& dist, double slope,
                       const SolverConfig& config, std::vector<double>* warm_start) {
  if (!(slope > 0.0) || !std::isfinite(slope)) throw InputError("blahut_arimoto: slope must be > 0");
  if (probs.size() != dist.rows()) throw InputError("blahut_arimoto: source size does not match distortion rows");
  const std::size_t n = dist.rows();
  const std::size_t m = dist.cols();

  // Best rate-zero reconstruction and its Kuhn-Tucker test.
  std::size_t best_y = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < m; ++y) {
    double d = 0.0;
    for (std::size_t x = 0; x < n; ++x) d += probs[x] * dist(x, y);
    if (d < best_d) {
      best_d = d;
      best_y = y;
    }
  }
  bool rate_zero = true;
  for (std::size_t y = 0; y < m && rate_zero; ++y) {
    double c = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (probs[x] > 0.0) c += probs[x] * std::exp(-slope * (dist(x, y) - dist(x, best_y)));
    }
    rate_zero = c <= 1.0 + kKktSlack;
  }
  if (rate_zero) {
    if (warm_start) {
      warm_start->assign(m, 0.0);
      (*warm_start)[best_y] = 1.0;
    }
    return RDPoint{0.0, best_d, slope, true, 0};
  }

  std::vector<double> q(m, 1.0 / static_cast<double>(m));
  if (warm_start && warm_start->size() == m) {
    double sum = 0.0;
    for (std::size_t y = 0; y < m; ++y) sum += q[y] = (*warm_start)[y] + kWarmFloor;
    for (auto& v : q) v /= sum;
  }

  const Kernel kernel(probs, dist, slope);
  std::vector<double> c(m), c1(m), c2(m), ca(m);
  std::vector<double> q1(m), q2(m), qa(m);
  double lag = kernel.eval(q, c);

  RDPoint point;
  point.slope = slope;
  point.converged = false;
  int it = 0;
  while (it < config.max_iters) {
    if (it > 0 && it % kPolishEvery == 0) kernel.newton_polish(q, c, lag);
    // Blahut: L(q) - log max c <= L* <= L(q); the gap bounds the
    // Lagrangian error in nats.
    const double gap_bits = std::log(*std::max_element(c.begin(), c.end())) / kLn2;
    if (gap_bits < config.tol) {
      point.converged = true;
      break;
    }

    // Two plain steps q -> q1 -> q2, then a squared extrapolation (SQUAREM)
    // kept only when it does not increase the dual objective.
    Kernel::step(q, c, q1);
    kernel.eval(q1, c1);
    Kernel::step(q1, c1, q2);
    const double lag2 = kernel.eval(q2, c2);
    it += 2;

    double rr = 0.0, vv = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
      const double r = q1[y] - q[y];
      const double v = q2[y] - 2.0 * q1[y] + q[y];
      rr += r * r;
      vv += v * v;
    }
    bool extrapolated = false;
    if (vv > 0.0) {
      const double alpha = -std::sqrt(rr / vv);
      if (alpha < -1.0) {
        double sum = 0.0;
        for (std::size_t y = 0; y < m; ++y) {
          const double r = q1[y] - q[y];
          const double v = q2[y] - 2.0 * q1[y] + q[y];
          // A floor relative to q2 keeps every live point alive, so an
          // overshoot can never delete part of the optimal support.
          qa[y] = std::max(q[y] - 2.0 * alpha * r + alpha * alpha * v, 1e-2 * q2[y]);
          sum += qa[y];
        }
        for (auto& v : qa) v /= sum;
        const double lag_a = kernel.eval(qa, ca);
        if (lag_a <= lag2) {
          q.swap(qa);
          c.swap(ca);
          lag = lag_a;
          extrapolated = true;
        }
      }
    }
    if (!extrapolated) {
      q.swap(q2);
      c.swap(c2);
      lag = lag2;
    }
  }
  (void)lag;

  kernel.finish(q, point);
  point.iterations = it;
  if (warm_start) *warm_start = q;
  return point;
}

RDPoint blahut_arimoto(const JointPMF& source, const Alphabet& recon, const DistortionMatrix& dist, double slope,
                       const SolverConfig& config) {
  if (source.axes().size() != 1 || source.variable_names().size() != 1) {
    throw InputError("blahut_arimoto: source must be a single-variable joint");
  }
  if (dist.cols() != recon.size()) throw InputError("blahut_arimoto: distortion columns do not match recon alphabet");
  return blahut_arimoto(source.table(), dist, slope, config);
}

}  // namespace crlab::rd
