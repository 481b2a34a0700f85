#ifndef GAMELAB_METRICS_HPP
#define GAMELAB_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "game.hpp"
#include "learners.hpp"
#include "regularizers.hpp"

namespace gamelab {

/// Regret of one player; prefix[T] is the regret over steps 1..T (prefix[0] = 0).
struct RegretReport {
  std::vector<double> prefix;
  std::vector<int> best_action;  // hindsight-best pure action per prefix
  double final() const { return prefix.back(); }
  double max() const { return *std::max_element(prefix.begin(), prefix.end()); }
};

inline RegretReport external_regret(const std::vector<Vec>& u, const std::vector<Vec>& x) {
  if (u.size() != x.size() || u.empty()) throw DimensionError("histories must align");
  RegretReport r;
  r.prefix.assign(u.size(), 0.0);
  r.best_action.assign(u.size(), 0);
  Vec cum = Vec::Zero(u[0].size());
  double realized = 0.0;
  for (std::size_t t = 1; t < u.size(); ++t) {
    cum += u[t];
    realized += x[t].dot(u[t]);
    Eigen::Index arg = 0;
    const double best = cum.maxCoeff(&arg);
    r.prefix[t] = best - realized;
    r.best_action[t] = static_cast<int>(arg);
  }
  return r;
}

inline std::vector<RegretReport> regret_reports(const RunLog& log) {
  std::vector<RegretReport> out;
  for (int i = 0; i < log.num_players(); ++i) out.push_back(external_regret(log.u[i], log.x[i]));
  return out;
}

/// Weighted sum of regrets per prefix; weights default to one.
inline std::vector<double> regret_sum(const std::vector<RegretReport>& reps,
                                      std::vector<double> weights = {}) {
  if (weights.empty()) weights.assign(reps.size(), 1.0);
  std::vector<double> s(reps.at(0).prefix.size(), 0.0);
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t t = 0; t < s.size(); ++t) s[t] += weights[i] * reps[i].prefix[t];
  return s;
}

enum class PathNorm { l1, l2 };

inline double step_norm(const Vec& d, PathNorm p) {
  return p == PathNorm::l1 ? d.lpNorm<1>() : d.norm();
}

/// prefix[T] = sum_{t=1..T} ||x(t) - x(t-1)||^2.
inline std::vector<double> path_length_sq(const std::vector<Vec>& x, PathNorm p) {
  std::vector<double> s(x.size(), 0.0);
  for (std::size_t t = 1; t < x.size(); ++t) {
    const double n = step_norm(x[t] - x[t - 1], p);
    s[t] = s[t - 1] + n * n;
  }
  return s;
}

/// Sum over players of path_length_sq.
inline std::vector<double> total_path_length_sq(const RunLog& log, PathNorm p) {
  std::vector<double> s(log.horizon() + 1, 0.0);
  for (int i = 0; i < log.num_players(); ++i) {
    const auto pi = path_length_sq(log.x[i], p);
    for (std::size_t t = 0; t < s.size(); ++t) s[t] += pi[t];
  }
  return s;
}

struct RvuParams {
  double alpha;
  double beta;
  double gamma;
  NormPair norms;

  static RvuParams declared(const LearnerConfig& c, int d) {
    const double omega = c.regularizer.range_from_center(d);
    const double eta = c.eta;
    const NormPair np = c.regularizer.norm_pair();
    using K = PredictionMechanism::Kind;
    const auto& pm = c.prediction;
    if (c.algorithm == Algorithm::oftrl) {
      if (pm.kind == K::one_step) return {omega / eta, eta, 1.0 / (4.0 * eta), np};
      if (pm.kind == K::h_step)
        return {omega / eta, eta * pm.horizon * pm.horizon, 1.0 / (4.0 * eta), np};
      if (pm.kind == K::discounted)
        return {omega / eta, eta / std::pow(1.0 - pm.discount, 3), 1.0 / (8.0 * eta), np};
    }
    if (c.algorithm == Algorithm::omd && pm.kind == K::one_step)
      return {omega / eta, eta, 1.0 / (8.0 * eta), np};
    throw ConfigError("no declared RVU parameters for " + c.describe());
  }
};

inline std::string to_string(NormPair p) { return p == NormPair::l1_linf ? "l1/linf" : "l2/l2"; }

/// gamma_i >= 2(n-1) sum_{j != i} beta_j for every player.
inline bool rvu_condition(const std::vector<RvuParams>& ps) {
  const int n = static_cast<int>(ps.size());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) s += ps[j].beta;
    if (ps[i].gamma < 2.0 * (n - 1) * s) return false;
  }
  return true;
}

struct AuditReport {
  std::string check;
  bool pass = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  long prefix = 0;
};

/**
 * Checks Reg(T) <= alpha + beta sum ||du||_*^2 - gamma sum ||dx||^2 for every
 * prefix T >= 1, with dual norms picked by params.norms.
 */
inline AuditReport rvu_audit(const RvuParams& p, const std::vector<Vec>& u,
                             const std::vector<Vec>& x, double tol = 1e-9) {
  const RegretReport reg = external_regret(u, x);
  AuditReport a{"rvu", true, std::numeric_limits<double>::infinity(), 0};
  double du = 0.0, dx = 0.0;
  for (std::size_t t = 1; t < u.size(); ++t) {
    const Vec vu = u[t] - u[t - 1];
    const Vec vx = x[t] - x[t - 1];
    const double nu = p.norms == NormPair::l1_linf ? norm_linf(vu) : vu.norm();
    const double nx = p.norms == NormPair::l1_linf ? vx.lpNorm<1>() : vx.norm();
    du += nu * nu;
    dx += nx * nx;
    const double slack = p.alpha + p.beta * du - p.gamma * dx - reg.prefix[t];
    if (slack < a.worst_slack) {
      a.worst_slack = slack;
      a.prefix = static_cast<long>(t);
    }
  }
  if (u.size() < 2) a.worst_slack = p.alpha;
  a.pass = a.worst_slack >= -tol;
  return a;
}

/// alpha + 2n(n-1) alpha beta / gamma: individual regret bound on games with
/// nonnegative regret sum.
inline double individual_regret_bound(const RvuParams& p, int n) {
  return p.alpha + 2.0 * n * (n - 1) * p.alpha * p.beta / p.gamma;
}

/// ||du_i||_inf <= sum_{j != i} ||dx_j||_1 at every step; returns worst slack.
inline double utility_variation_slack(const RunLog& log) {
  double worst = std::numeric_limits<double>::infinity();
  const int n = log.num_players();
  for (long t = 1; t <= log.horizon(); ++t) {
    std::vector<double> moves(n);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      moves[j] = (log.x[j][t] - log.x[j][t - 1]).lpNorm<1>();
      total += moves[j];
    }
    for (int i = 0; i < n; ++i) {
      const double lhs = norm_linf(log.u[i][t] - log.u[i][t - 1]);
      worst = std::min(worst, total - moves[i] - lhs);
    }
  }
  return worst;
}

/// sum_i ||x(t) - x_hat(t)||^2 + ||x(t) - x_hat(t-1)||^2 for t >= 1 (entry 0 is
/// zero since both iterates start at the same point).
inline std::vector<double> proximal_residual_sq(const RunLog& log) {
  std::vector<double> r(log.horizon() + 1, 0.0);
  for (long t = 1; t <= log.horizon(); ++t)
    for (int i = 0; i < log.num_players(); ++i)
      r[t] += (log.x[i][t] - log.x_hat[i][t]).squaredNorm() +
              (log.x[i][t] - log.x_hat[i][t - 1]).squaredNorm();
  return r;
}

struct LastIterateCertificate {
  bool found = false;
  long iteration = -1;
  long budget = 0;          // ceil(8 sum Omega_i / eps^2)
  double residual = 0.0;    // sqrt of the proximal residual at the iterate
  double gap_bound = 0.0;   // eps (C* + 2 max_i G_i Omega'_i / eta_i)
  double measured_gap = 0.0;
};

/// Budget of iterations within which some OMD iterate has proximal residual
/// at most eps, for smooth regularizers with divergence diameters omegas.
inline long last_iterate_budget(const std::vector<double>& omegas, double eps) {
  double s = 0.0;
  for (double o : omegas) s += o;
  return static_cast<long>(std::ceil(8.0 * s / (eps * eps)));
}

inline LastIterateCertificate last_iterate_certificate(const NormalFormGame& g,
                                                       const RunLog& log, double eps) {
  LastIterateCertificate c;
  std::vector<double> omegas;
  double worst_ratio = 0.0;
  int dmax = 1;
  for (int i = 0; i < log.num_players(); ++i) {
    const auto& cfg = log.configs[i];
    if (cfg.algorithm != Algorithm::omd || cfg.regularizer.kind != RegularizerKind::euclidean)
      throw ConfigError("last-iterate certificate needs OMD with a smooth regularizer");
    const int d = g.action_count(i);
    dmax = std::max(dmax, d);
    omegas.push_back(cfg.regularizer.divergence_diameter(d));
    worst_ratio = std::max(worst_ratio, cfg.regularizer.gradient_lipschitz() *
                                            simplex_l2_diameter() / cfg.eta);
  }
  c.budget = last_iterate_budget(omegas, eps);
  c.gap_bound = eps * (l2_norm_constants(dmax).upper + 2.0 * worst_ratio);
  const auto res = proximal_residual_sq(log);
  const long limit = std::min<long>(c.budget, log.horizon());
  for (long t = 1; t <= limit; ++t) {
    if (res[t] <= eps * eps) {
      c.found = true;
      c.iteration = t;
      c.residual = std::sqrt(res[t]);
      MixedProfile x;
      for (int i = 0; i < log.num_players(); ++i) x.push_back(log.x[i][t]);
      c.measured_gap = nash_gap(g, x);
      break;
    }
  }
  return c;
}

/// max_y' x^T A y' - min_x' x'^T A y over simplices.
inline double saddle_point_gap(const Mat& A, const Vec& x, const Vec& y, double tol = 1e-9) {
  if (A.rows() != x.size() || A.cols() != y.size()) throw DimensionError("gap shape mismatch");
  if (!on_simplex(x, tol) || !on_simplex(y, tol)) throw DomainError("gap needs feasible points");
  return (A.transpose() * x).maxCoeff() - (A * y).minCoeff();
}

struct DichotomyReport {
  bool branch1 = false;
  long branch1_iteration = -1;
  bool branch2 = false;
  double average_welfare = 0.0;
  double branch2_bound = 0.0;
  double branch2_slack = 0.0;
  long required_horizon = 0;
};

/**
 * Either some iterate has proximal residual <= gamma^2 (near equilibrium), or
 * the average welfare exceeds the robust bound by gamma^2/(16 eta(1+mu)).
 */
inline DichotomyReport welfare_dichotomy_check(const NormalFormGame& g, const RunLog& log,
                                               SmoothnessParams sp, double gamma, double eta,
                                               double tol = 1e-12) {
  DichotomyReport r;
  double omega_sum = 0.0;
  for (int i = 0; i < log.num_players(); ++i) {
    const auto& cfg = log.configs[i];
    if (cfg.algorithm != Algorithm::omd)
      throw ConfigError("welfare dichotomy needs OMD learners");
    omega_sum += cfg.regularizer.divergence_diameter(g.action_count(i));
  }
  r.required_horizon = static_cast<long>(std::ceil(16.0 * omega_sum / (gamma * gamma)));
  if (log.horizon() < r.required_horizon)
    throw ConfigError("welfare dichotomy needs T >= " + std::to_string(r.required_horizon));
  const auto res = proximal_residual_sq(log);
  const long T = log.horizon();
  for (long t = 1; t <= T; ++t)
    if (res[t] <= gamma * gamma) {
      r.branch1 = true;
      r.branch1_iteration = t;
      break;
    }
  double sw = 0.0;
  for (long t = 1; t <= T; ++t) sw += log.welfare[t];
  r.average_welfare = sw / T;
  const double opt = optimal_welfare(g).value;
  r.branch2_bound = sp.lambda / (1.0 + sp.mu) * opt +
                    gamma * gamma / (16.0 * eta * (1.0 + sp.mu));
  r.branch2_slack = r.average_welfare - r.branch2_bound;
  r.branch2 = r.branch2_slack >= -tol;
  return r;
}

/// Worst slack over prefixes of (1/T) sum sw >= rho opt - (1/(1+mu)) (1/T) sum_i Reg_i.
inline AuditReport smooth_welfare_audit(const NormalFormGame& g, const RunLog& log,
                                        SmoothnessParams sp, double tol = 1e-9) {
  const auto reps = regret_reports(log);
  const auto rsum = regret_sum(reps);
  const double opt = optimal_welfare(g).value;
  AuditReport a{"smooth_welfare", true, std::numeric_limits<double>::infinity(), 0};
  double sw = 0.0;
  for (long t = 1; t <= log.horizon(); ++t) {
    sw += log.welfare[t];
    const double lhs = sw / t;
    const double rhs = robust_poa_bound(sp) * opt - rsum[t] / (t * (1.0 + sp.mu));
    if (lhs - rhs < a.worst_slack) {
      a.worst_slack = lhs - rhs;
      a.prefix = t;
    }
  }
  a.pass = a.worst_slack >= -tol;
  return a;
}

/// Whether squared step lengths in the last quarter of the run stay away from
/// zero, i.e. the path length is not summable.
inline bool path_unstable(const RunLog& log, double threshold = 1e-8) {
  const long T = log.horizon();
  const long from = std::max<long>(1, T - T / 4);
  double mean = 0.0;
  for (long t = from; t <= T; ++t)
    for (int i = 0; i < log.num_players(); ++i)
      mean += (log.x[i][t] - log.x[i][t - 1]).squaredNorm();
  mean /= static_cast<double>(T - from + 1);
  return mean > threshold;
}

}  // namespace gamelab

#endif  // GAMELAB_METRICS_HPP
