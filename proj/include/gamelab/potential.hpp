#ifndef GAMELAB_POTENTIAL_HPP
#define GAMELAB_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "game.hpp"
#include "game_classes.hpp"
#include "learners.hpp"
#include "metrics.hpp"

namespace gamelab {

/**
 * \brief Weighted potential game: phi(a) - phi(b, a_-i) = w_i (u_i(a) - u_i(b, a_-i)).
 *
 * Learners observe w_i u_i, which is the partial gradient of the mixed
 * potential up to a constant that does not depend on player i's action.
 */
struct PotentialGame {
  NormalFormGame game;
  std::vector<double> phi;
  std::vector<double> weights;
  double phi_max = 0.0;

  double lipschitz() const {
    double s = 0.0;
    for (int c : game.action_counts()) s += c;
    return 0.5 * phi_max * s;
  }
  double default_eta() const { return 1.0 / (2.0 * lipschitz()); }
};

/// Largest violation of the weighted-potential identity over all deviations.
inline double potential_violation(const NormalFormGame& g, const std::vector<double>& phi,
                                  const std::vector<double>& w) {
  double worst = 0.0;
  for (std::size_t k = 0; k < g.num_profiles(); ++k) {
    const PureProfile a = g.profile_of(k);
    for (int i = 0; i < g.num_players(); ++i)
      for (int b = 0; b < g.action_count(i); ++b) {
        const std::size_t kb = k + g.stride(i) * static_cast<std::size_t>(b) -
                               g.stride(i) * static_cast<std::size_t>(a[i]);
        const double lhs = phi[k] - phi[kb];
        const double rhs = w[i] * (g.utility(i, k) - g.utility(i, kb));
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  }
  return worst;
}

inline PotentialGame make_potential_game(NormalFormGame g, std::vector<double> phi,
                                         std::vector<double> weights = {}, double tol = 1e-9) {
  if (weights.empty()) weights.assign(g.num_players(), 1.0);
  if (static_cast<int>(weights.size()) != g.num_players())
    throw DimensionError("one weight per player expected");
  for (double w : weights)
    if (!(w > 0.0)) throw DomainError("potential weights must be positive");
  if (phi.size() != g.num_profiles()) throw DimensionError("potential table has wrong size");
  // the game may have been rescaled at ingestion; weights follow the stored utilities
  for (int i = 0; i < g.num_players(); ++i) weights[i] /= g.scale(i);
  const double err = potential_violation(g, phi, weights);
  if (err > tol)
    throw DomainError("potential identity violated by " + fmt17(err));
  PotentialGame pg{std::move(g), std::move(phi), std::move(weights), 0.0};
  for (double v : pg.phi) pg.phi_max = std::max(pg.phi_max, std::abs(v));
  return pg;
}

/// E_{a ~ x} phi(a) for any profile of real vectors (the multilinear extension).
inline double mixed_potential(const PotentialGame& pg, const MixedProfile& x) {
  const auto& g = pg.game;
  const int n = g.num_players();
  double s = 0.0;
  PureProfile a(n, 0);
  for (std::size_t k = 0; k < g.num_profiles(); ++k) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= x[j](a[j]);
    s += w * pg.phi[k];
    for (int j = n - 1; j >= 0; --j) {
      if (++a[j] < g.action_count(j)) break;
      a[j] = 0;
    }
  }
  return s;
}

/// Component (i, a_i) is E_{a_-i} phi(a_i, a_-i).
inline MixedProfile mixed_potential_gradient(const PotentialGame& pg, const MixedProfile& x) {
  const auto& g = pg.game;
  const int n = g.num_players();
  MixedProfile grad;
  for (int i = 0; i < n; ++i) grad.push_back(Vec::Zero(g.action_count(i)));
  PureProfile a(n, 0);
  for (std::size_t k = 0; k < g.num_profiles(); ++k) {
    for (int i = 0; i < n; ++i) {
      double w = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) w *= x[j](a[j]);
      grad[i](a[i]) += w * pg.phi[k];
    }
    for (int j = n - 1; j >= 0; --j) {
      if (++a[j] < g.action_count(j)) break;
      a[j] = 0;
    }
  }
  return grad;
}

inline double lipschitz_constant(const PotentialGame& pg) { return pg.lipschitz(); }

inline double joint_sq_distance(const MixedProfile& x, const MixedProfile& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]).squaredNorm();
  return s;
}

inline double joint_dot(const MixedProfile& g, const MixedProfile& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i].dot(d[i]);
  return s;
}

struct SmoothnessAudit {
  double worst_upper;  // min over pairs of upper-bound slack
  double worst_lower;  // min over pairs of lower-bound slack
};

/// |phi(y) - phi(x) - <grad phi(x), y - x>| <= L ||y - x||^2 on sampled pairs.
inline SmoothnessAudit one_sided_smoothness_audit(const PotentialGame& pg, int pairs,
                                                  std::mt19937_64& rng) {
  const double L = pg.lipschitz();
  SmoothnessAudit a{std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  for (int s = 0; s < pairs; ++s) {
    const MixedProfile x = random_interior_profile(pg.game.action_counts(), rng);
    const MixedProfile y = random_interior_profile(pg.game.action_counts(), rng);
    MixedProfile d;
    for (std::size_t i = 0; i < x.size(); ++i) d.push_back(y[i] - x[i]);
    const double lin = mixed_potential(pg, x) + joint_dot(mixed_potential_gradient(pg, x), d);
    const double q = L * joint_sq_distance(x, y);
    const double py = mixed_potential(pg, y);
    a.worst_upper = std::min(a.worst_upper, lin + q - py);
    a.worst_lower = std::min(a.worst_lower, py - lin + q);
  }
  return a;
}

struct PotentialRunOptions {
  double eta = 0.0;  // 0 selects 1/(2L)
  std::optional<MixedProfile> init;
  double tol = 1e-9;
  long sign_bug_at = -1;  // test hook: negate the feedback at this step
};

struct PotentialRun {
  RunLog log;
  double eta = 0.0;
  std::vector<double> phi;         // [t]
  std::vector<double> step_slack;  // [t], t >= 1: dphi - (1/2eta) ||dx||^2
  std::vector<double> cumulative;  // [t]: (1/2eta) sum_{s<=t} ||dx||^2
};

inline std::vector<Vec> weighted_feedback(const PotentialGame& pg, const std::vector<Vec>& u) {
  std::vector<Vec> f;
  for (std::size_t i = 0; i < u.size(); ++i) f.push_back(pg.weights[i] * u[i]);
  return f;
}

/**
 * Mirror descent for every player on a potential game, certifying at each step
 * phi(x(t+1)) - phi(x(t)) >= (1/2eta) ||x(t+1) - x(t)||^2 and, cumulatively,
 * (1/2eta) sum ||dx||^2 <= 2 phi_max.
 */
inline PotentialRun run_md_potential(const PotentialGame& pg,
                                     const std::vector<Regularizer>& regs, long T,
                                     const PotentialRunOptions& opt = {}) {
  const auto& g = pg.game;
  const int n = g.num_players();
  if (static_cast<int>(regs.size()) != n) throw ConfigError("one regularizer per player");
  if (T < 1) throw ConfigError("horizon T must be at least 1");
  PotentialRun run;
  run.eta = opt.eta > 0.0 ? opt.eta : pg.default_eta();
  std::vector<LearnerConfig> cfgs;
  for (const auto& r : regs) cfgs.push_back({Algorithm::md, r, run.eta, {}, Transform::identity});

  const MixedProfile x0 = opt.init ? *opt.init : uniform_profile(g);
  check_profile(g, x0);
  std::vector<Learner> learners;
  for (int i = 0; i < n; ++i) learners.emplace_back(cfgs[i], g.action_count(i), x0[i]);

  RunLog& log = run.log;
  log.configs = cfgs;
  log.x.assign(n, {});
  log.x_hat.assign(n, {});
  log.u.assign(n, {});
  auto record = [&](const MixedProfile& x, const std::vector<Vec>& u) {
    double gap = 0.0, sw = 0.0;
    for (int i = 0; i < n; ++i) {
      log.x[i].push_back(x[i]);
      log.x_hat[i].push_back(x[i]);
      log.u[i].push_back(u[i]);
      const double v = x[i].dot(u[i]);
      gap = std::max(gap, u[i].maxCoeff() - v);
      sw += v;
    }
    log.nash_gap.push_back(gap);
    log.welfare.push_back(sw);
    run.phi.push_back(mixed_potential(pg, x));
  };

  std::vector<Vec> u = utility_vectors(g, x0);
  auto fb = weighted_feedback(pg, u);
  for (int i = 0; i < n; ++i) learners[i].begin(fb[i]);
  record(x0, u);
  run.step_slack.push_back(0.0);
  run.cumulative.push_back(0.0);

  MixedProfile prev = x0, x(n);
  const double bound = 2.0 * pg.phi_max;
  for (long t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) learners[i].step();
    for (int i = 0; i < n; ++i) x[i] = learners[i].strategy();
    u = utility_vectors(g, x);
    fb = weighted_feedback(pg, u);
    if (t + 1 == opt.sign_bug_at)
      for (auto& f : fb) f = -f;
    for (int i = 0; i < n; ++i) learners[i].observe(fb[i]);
    record(x, u);
    const double move = joint_sq_distance(x, prev) / (2.0 * run.eta);
    const double slack = (run.phi[t + 1] - run.phi[t]) - move;
    run.step_slack.push_back(slack);
    run.cumulative.push_back(run.cumulative.back() + move);
    if (slack < -opt.tol) {
      std::ostringstream os;
      os << "potential monotonicity violated: phi " << fmt17(run.phi[t]) << " -> "
         << fmt17(run.phi[t + 1]) << ", required increase " << fmt17(move);
      throw CertificateViolation(os.str(), t + 1);
    }
    if (run.cumulative.back() > bound + opt.tol)
      throw CertificateViolation("cumulative path bound exceeded: " +
                                     fmt17(run.cumulative.back()) + " > " + fmt17(bound),
                                 t + 1);
    prev = x;
  }
  return run;
}

struct RateCertificate {
  bool found = false;
  long iteration = -1;
  long budget = 0;          // ceil(4 eta phi_max / eps^2) + 1
  double step = 0.0;        // ||x(t+1) - x(t)||_2
  std::optional<double> gap_bound;  // eps (G Omega / eta + sqrt|A|), smooth regularizers only
  double measured_gap = 0.0;        // Nash gap of the weighted feedback game at x(t)
};

inline RateCertificate md_rate_certificate(const PotentialGame& pg, const PotentialRun& run,
                                           double eps) {
  RateCertificate c;
  c.budget = static_cast<long>(std::ceil(4.0 * run.eta * pg.phi_max / (eps * eps))) + 1;
  const RunLog& log = run.log;
  const int n = log.num_players();
  const long limit = std::min<long>(c.budget, log.horizon() - 1);
  for (long t = 0; t <= limit; ++t) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (log.x[i][t + 1] - log.x[i][t]).squaredNorm();
    if (std::sqrt(s) <= eps) {
      c.found = true;
      c.iteration = t;
      c.step = std::sqrt(s);
      break;
    }
  }
  if (!c.found) {
    if (log.horizon() - 1 >= c.budget)
      throw CertificateViolation("no small step within " + std::to_string(c.budget) + " steps",
                                 c.budget);
    return c;
  }
  double G = 0.0;
  int amax = 0;
  for (int i = 0; i < n; ++i) {
    G = std::max(G, log.configs[i].regularizer.gradient_lipschitz());
    amax = std::max(amax, pg.game.action_count(i));
  }
  if (std::isfinite(G))
    c.gap_bound = eps * (G * simplex_l2_diameter() / run.eta + std::sqrt(double(amax)));
  for (int i = 0; i < n; ++i) {
    const Vec f = pg.weights[i] * log.u[i][c.iteration];
    c.measured_gap = std::max(c.measured_gap, f.maxCoeff() - log.x[i][c.iteration].dot(f));
  }
  return c;
}

/// Randomized midpoint test of concavity for the mixed potential.
inline bool certify_concavity(const PotentialGame& pg, int pairs, std::mt19937_64& rng,
                              double tol = 1e-9) {
  for (int s = 0; s < pairs; ++s) {
    const MixedProfile x = random_interior_profile(pg.game.action_counts(), rng);
    const MixedProfile y = random_interior_profile(pg.game.action_counts(), rng);
    MixedProfile mid;
    for (std::size_t i = 0; i < x.size(); ++i) mid.push_back(0.5 * (x[i] + y[i]));
    const double lhs = mixed_potential(pg, mid);
    const double rhs = 0.5 * (mixed_potential(pg, x) + mixed_potential(pg, y));
    if (lhs < rhs - tol) return false;
  }
  return true;
}

/// Maximizer of the mixed potential; a multilinear function peaks at a vertex.
inline MixedProfile potential_maximizer(const PotentialGame& pg) {
  const auto it = std::max_element(pg.phi.begin(), pg.phi.end());
  return pure_to_mixed(pg.game, pg.game.profile_of(std::distance(pg.phi.begin(), it)));
}

/**
 * Slack of phi(x*) - phi(x(T)) <= (2L/T) sum_i D_i(x*_i, x_i(0)) for every
 * T >= 1, where x(0) is the first iterate of the run.
 */
inline std::vector<double> concave_rate_check(const PotentialGame& pg, const PotentialRun& run,
                                              const MixedProfile& x_star) {
  const RunLog& log = run.log;
  const double L = 1.0 / (2.0 * run.eta);
  double div = 0.0;
  for (int i = 0; i < log.num_players(); ++i)
    div += log.configs[i].regularizer.bregman(x_star[i], log.x[i][0]);
  const double target = mixed_potential(pg, x_star);
  std::vector<double> slack(log.horizon() + 1, 0.0);
  for (long t = 1; t <= log.horizon(); ++t)
    slack[t] = 2.0 * L * div / t - (target - run.phi[t]);
  return slack;
}

/// eta <= min over i of {1/(2L), 1/(2 sqrt|A_i| (n-1)), 1/(4 sum_{j != i} sqrt|A_j|)}.
inline double omwu_potential_eta(const PotentialGame& pg) {
  const auto& c = pg.game.action_counts();
  const int n = static_cast<int>(c.size());
  double eta = 1.0 / (2.0 * pg.lipschitz());
  double roots = 0.0;
  for (int a : c) roots += std::sqrt(double(a));
  for (int i = 0; i < n; ++i) {
    if (n > 1) eta = std::min(eta, 1.0 / (2.0 * std::sqrt(double(c[i])) * (n - 1)));
    const double others = roots - std::sqrt(double(c[i]));
    if (others > 0.0) eta = std::min(eta, 1.0 / (4.0 * others));
  }
  return eta;
}

struct OmwuPotentialRun {
  RunLog log;
  double eta = 0.0;
  std::vector<double> phi;
  std::vector<double> path;            // [t]: (1/8eta) sum_{s=1}^{t-1} ||x(s+1) - x(s)||^2
  std::vector<double> regret_constant;  // per player, horizon-free bound
};

/**
 * OMWU on a potential game with unit weights. Certifies the optimistic path
 * bound at every prefix and records, per player, the regret constant
 * Omega_i/eta + eta (n-1) max|A| 16 eta phi_max obtained from the RVU bound.
 */
inline OmwuPotentialRun omwu_potential_run(const PotentialGame& pg, long T, double tol = 1e-9) {
  for (double w : pg.weights)
    if (std::abs(w - 1.0) > 1e-12)
      throw ConfigError("optimistic potential run needs unit weights");
  const auto& g = pg.game;
  const int n = g.num_players();
  OmwuPotentialRun r;
  r.eta = omwu_potential_eta(pg);
  Regularizer ent{RegularizerKind::negative_entropy};
  std::vector<LearnerConfig> cfgs(n, LearnerConfig{Algorithm::omwu, ent, r.eta, {}, {}});
  r.log = run_dynamics(g, cfgs, T);
  const RunLog& log = r.log;
  int amax = 0;
  for (int a : g.action_counts()) amax = std::max(amax, a);
  for (int i = 0; i < n; ++i) {
    // OMWU equals entropic OMD whose secondary start is proportional to exp(-eta u(0))
    const Vec logits = -r.eta * log.u[i][0];
    const Vec start = softmax(logits);
    const double omega = -std::log(start.minCoeff());
    r.regret_constant.push_back(omega / r.eta +
                                r.eta * (n - 1) * amax * 16.0 * r.eta * pg.phi_max);
  }
  const double bound = 2.0 * pg.phi_max;
  r.path.assign(log.horizon() + 1, 0.0);
  for (long t = 0; t <= log.horizon(); ++t) {
    MixedProfile x;
    for (int i = 0; i < n; ++i) x.push_back(log.x[i][t]);
    r.phi.push_back(mixed_potential(pg, x));
  }
  for (long t = 2; t <= log.horizon(); ++t) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (log.x[i][t] - log.x[i][t - 1]).squaredNorm();
    r.path[t] = r.path[t - 1] + s / (8.0 * r.eta);
    if (r.path[t] > r.phi[t] - r.phi[1] + tol || r.path[t] > bound + tol)
      throw CertificateViolation("optimistic path bound violated", t);
  }
  return r;
}

struct NearPotentialSpec {
  NormalFormGame game;
  PotentialGame reference;
  double delta = 0.0;
  double C = 0.0;  // measured: C delta bounds the centered gradient error
};

inline NearPotentialSpec make_near_potential_spec(NormalFormGame game, PotentialGame ref) {
  for (double w : ref.weights)
    if (std::abs(w - 1.0) > 1e-12) throw ConfigError("reference potential needs unit weights");
  NearPotentialSpec s{game, ref, mpd_distance(game, ref.game), 0.0};
  // e_i = grad_i phi - u_i; its half-range over a_i at pure a_-i bounds the
  // centered error for every mixed a_-i
  double half_range = 0.0;
  const auto& g = s.game;
  for (int i = 0; i < g.num_players(); ++i)
    for (std::size_t k = 0; k < g.num_profiles(); ++k) {
      const PureProfile a = g.profile_of(k);
      if (a[i] != 0) continue;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int b = 0; b < g.action_count(i); ++b) {
        const std::size_t kb = k + g.stride(i) * static_cast<std::size_t>(b);
        const double e = ref.phi[kb] - g.utility(i, kb);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
      half_range = std::max(half_range, 0.5 * (hi - lo));
    }
  s.C = s.delta > 0.0 ? half_range / s.delta : 0.0;
  return s;
}

struct NearPotentialRun {
  RunLog log;
  double eta = 0.0;
  double threshold = 0.0;    // 2 sqrt(eta C n delta)
  std::vector<double> phi;
  std::vector<long> events;  // steps t where ||x(t+1) - x(t)|| >= threshold
};

inline NearPotentialRun near_potential_run(const NearPotentialSpec& spec,
                                           const std::vector<Regularizer>& regs, long T,
                                           double tol = 1e-9) {
  const auto& g = spec.game;
  const int n = g.num_players();
  NearPotentialRun r;
  r.eta = spec.reference.default_eta();
  r.threshold = 2.0 * std::sqrt(r.eta * spec.C * n * spec.delta);
  std::vector<LearnerConfig> cfgs;
  for (const auto& reg : regs) cfgs.push_back({Algorithm::md, reg, r.eta, {}, {}});
  r.log = run_dynamics(g, cfgs, T);
  for (long t = 0; t <= r.log.horizon(); ++t) {
    MixedProfile x;
    for (int i = 0; i < n; ++i) x.push_back(r.log.x[i][t]);
    r.phi.push_back(mixed_potential(spec.reference, x));
  }
  const double err = 2.0 * spec.C * n * spec.delta;
  for (long t = 0; t < r.log.horizon(); ++t) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (r.log.x[i][t + 1] - r.log.x[i][t]).squaredNorm();
    const double dphi = r.phi[t + 1] - r.phi[t];
    if (dphi < s / (2.0 * r.eta) - err - tol)
      throw CertificateViolation("near-potential increase bound violated", t);
    if (std::sqrt(s) >= r.threshold) {
      r.events.push_back(t);
      if (dphi < -tol) throw CertificateViolation("potential decreased above threshold", t);
    }
  }
  return r;
}

/// Regret bound chain for mirror descent on a potential game:
/// Omega_i/eta + ||u_i||_2 sqrt(T) sqrt(2 phi_max / L).
inline double md_potential_regret_bound(const PotentialGame& pg, double omega, int actions,
                                        double eta, long T) {
  return omega / eta + std::sqrt(double(actions)) * std::sqrt(double(T)) *
                           std::sqrt(2.0 * pg.phi_max / pg.lipschitz());
}

/// Random weighted potential game: u_i = phi / w_i + h_i(a_-i), entries in [-1, 1].
inline PotentialGame random_weighted_potential_game(std::mt19937_64& rng,
                                                    const std::vector<int>& counts) {
  std::uniform_real_distribution<double> U(-1.0, 1.0), W(1.0, 2.0);
  const int n = static_cast<int>(counts.size());
  std::vector<double> w(n);
  for (auto& v : w) v = W(rng);
  std::size_t total = 1;
  for (int c : counts) total *= c;
  std::vector<double> phi(total);
  for (auto& v : phi) v = 0.4 * U(rng);
  // dummy terms h_i indexed by the profile with a_i zeroed
  std::vector<std::vector<double>> h(n, std::vector<double>(total));
  for (auto& hv : h)
    for (auto& v : hv) v = 0.5 * U(rng);
  std::vector<std::size_t> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * counts[i + 1];
  NormalFormGame g = NormalFormGame::from_function(counts, [&](int i, const PureProfile& a) {
    std::size_t k = 0;
    for (int j = 0; j < n; ++j) k += stride[j] * a[j];
    const std::size_t k0 = k - stride[i] * a[i];
    return phi[k] / w[i] + h[i][k0];
  });
  return make_potential_game(std::move(g), phi, w);
}

}  // namespace gamelab

#endif  // GAMELAB_POTENTIAL_HPP
