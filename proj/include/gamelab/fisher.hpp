#ifndef GAMELAB_FISHER_HPP
#define GAMELAB_FISHER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "common.hpp"
#include "learners.hpp"
#include "regularizers.hpp"

namespace gamelab {

/// Linear Fisher market with unit supply: rows are buyers, columns goods.
struct FisherMarket {
  Mat utilities;
  Vec budgets;

  int buyers() const { return static_cast<int>(utilities.rows()); }
  int goods() const { return static_cast<int>(utilities.cols()); }

  void validate() const {
    if (utilities.rows() == 0 || utilities.cols() == 0) throw DimensionError("empty market");
    if (budgets.size() != utilities.rows()) throw DimensionError("one budget per buyer");
    if (!utilities.allFinite() || utilities.minCoeff() <= 0.0)
      throw DomainError("market utilities must be positive");
    if (budgets.minCoeff() <= 0.0) throw DomainError("budgets must be positive");
  }
};

inline FisherMarket make_market(Mat u, std::optional<Vec> budgets = std::nullopt) {
  FisherMarket m{std::move(u), Vec()};
  m.budgets = budgets ? *budgets : Vec::Ones(m.utilities.rows());
  m.validate();
  return m;
}

/// Every buyer spreads the budget evenly.
inline Mat uniform_spend(const FisherMarket& m) {
  Mat b(m.buyers(), m.goods());
  for (int i = 0; i < m.buyers(); ++i) b.row(i).setConstant(m.budgets(i) / m.goods());
  return b;
}

inline Vec market_prices(const Mat& b) { return b.colwise().sum().transpose(); }

inline void check_spend(const FisherMarket& m, const Mat& b, double tol = 1e-9) {
  if (b.rows() != m.utilities.rows() || b.cols() != m.utilities.cols())
    throw DimensionError("spend matrix shape differs from the market");
  if (b.minCoeff() < 0.0) throw DomainError("negative spend");
  for (int i = 0; i < m.buyers(); ++i)
    if (std::abs(b.row(i).sum() - m.budgets(i)) > tol * std::max(1.0, m.budgets(i)))
      throw DomainError("spend row does not exhaust the budget");
}

/// sum_ij b_ij log(u_ij / p_j) with 0 log 0 = 0.
inline double shmyrev_objective(const FisherMarket& m, const Mat& b) {
  const Vec p = market_prices(b);
  double s = 0.0;
  for (int i = 0; i < m.buyers(); ++i)
    for (int j = 0; j < m.goods(); ++j)
      if (b(i, j) > 0.0) s += b(i, j) * std::log(m.utilities(i, j) / p(j));
  return s;
}

/// b'_ij = B_i u_ij x_ij / sum_k u_ik x_ik with allocation x_ij = b_ij / p_j.
inline Mat pr_step(const FisherMarket& m, const Mat& b) {
  const Vec p = market_prices(b);
  Mat out(b.rows(), b.cols());
  for (int i = 0; i < m.buyers(); ++i) {
    double total = 0.0;
    for (int j = 0; j < m.goods(); ++j) {
      out(i, j) = p(j) > 0.0 ? m.utilities(i, j) * b(i, j) / p(j) : 0.0;
      total += out(i, j);
    }
    if (!(total > 0.0)) throw DomainError("buyer receives no utility");
    out.row(i) *= m.budgets(i) / total;
  }
  return out;
}

/// The same step written as entropic mirror descent with a log transform on
/// the per-unit-budget utilities u_ij / p_j, step size one.
inline Mat pr_step_via_md(const FisherMarket& m, const Mat& b) {
  const Vec p = market_prices(b);
  const Regularizer ent{RegularizerKind::negative_entropy};
  Mat out(b.rows(), b.cols());
  for (int i = 0; i < m.buyers(); ++i) {
    const Vec share = b.row(i).transpose() / m.budgets(i);
    const Vec per_dollar = m.utilities.row(i).transpose().cwiseQuotient(p);
    out.row(i) = m.budgets(i) * md_step(ent, 1.0, share, per_dollar, Transform::log_shift).transpose();
  }
  return out;
}

/// max over buyers of (best bang-per-buck minus realized bang per dollar spent).
inline double equilibrium_residual(const FisherMarket& m, const Mat& b) {
  const Vec p = market_prices(b);
  double worst = 0.0;
  for (int i = 0; i < m.buyers(); ++i) {
    double best = 0.0, realized = 0.0;
    for (int j = 0; j < m.goods(); ++j) {
      if (!(p(j) > 0.0)) return std::numeric_limits<double>::infinity();
      const double bang = m.utilities(i, j) / p(j);
      best = std::max(best, bang);
      realized += b(i, j) * bang;
    }
    worst = std::max(worst, best - realized / m.budgets(i));
  }
  return worst;
}

/// Generalized KL between spend rows; zeros in q are clamped.
inline double spend_divergence(const Vec& p, const Vec& q) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p(k) > 0.0) s += p(k) * std::log(p(k) / std::max(q(k), kEntropyFloor));
    s += q(k) - p(k);
  }
  return std::max(s, 0.0);
}

struct FisherRun {
  std::vector<Mat> spend;        // [t], t = 0..T
  std::vector<double> phi;       // [t]
  std::vector<double> residual;  // [t]
  double worst_increase = 0.0;   // min over steps of phi(t+1) - phi(t)
};

inline FisherRun run_pr(const FisherMarket& m, long T, std::optional<Mat> start = std::nullopt,
                        double tol = 1e-10) {
  m.validate();
  if (T < 1) throw ConfigError("horizon T must be at least 1");
  FisherRun r;
  Mat b = start ? *start : uniform_spend(m);
  check_spend(m, b);
  r.spend.reserve(T + 1);
  r.spend.push_back(b);
  r.phi.push_back(shmyrev_objective(m, b));
  r.residual.push_back(equilibrium_residual(m, b));
  r.worst_increase = std::numeric_limits<double>::infinity();
  for (long t = 0; t < T; ++t) {
    b = pr_step(m, b);
    r.spend.push_back(b);
    r.phi.push_back(shmyrev_objective(m, b));
    r.residual.push_back(equilibrium_residual(m, b));
    const double inc = r.phi[t + 1] - r.phi[t];
    r.worst_increase = std::min(r.worst_increase, inc);
    if (inc < -tol)
      throw CertificateViolation("Shmyrev objective decreased by " + fmt17(-inc), t + 1);
  }
  return r;
}

/// Long proportional-response run used as the equilibrium reference.
inline Mat pr_oracle(const FisherMarket& m, long iterations = 1'000'000,
                     std::optional<Mat> start = std::nullopt) {
  Mat b = start ? *start : uniform_spend(m);
  for (long t = 0; t < iterations; ++t) b = pr_step(m, b);
  return b;
}

struct FisherRateReport {
  std::vector<double> slack;  // [T], T >= 1: envelope minus optimality gap
  double worst_slack = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;     // largest gap / envelope, the empirical smoothness constant
  double phi_star = 0.0;
};

/// phi* - phi(b(T)) <= (2 L / T) sum_i KL(b*_i, b_i(0)) with L = 1.
inline FisherRateReport pr_rate_certificate(const FisherMarket& m, const FisherRun& run,
                                            const Mat& b_star, double L = 1.0) {
  FisherRateReport rep;
  rep.phi_star = shmyrev_objective(m, b_star);
  double div = 0.0;
  for (int i = 0; i < m.buyers(); ++i)
    div += spend_divergence(b_star.row(i).transpose(), run.spend[0].row(i).transpose());
  const long T = static_cast<long>(run.spend.size()) - 1;
  rep.slack.assign(T + 1, 0.0);
  for (long t = 1; t <= T; ++t) {
    const double env = 2.0 * L * div / t;
    const double gap = rep.phi_star - run.phi[t];
    rep.slack[t] = env - gap;
    rep.worst_slack = std::min(rep.worst_slack, rep.slack[t]);
    if (env > 0.0) rep.max_ratio = std::max(rep.max_ratio, gap / env);
  }
  return rep;
}

/// Utilities drawn from (lo, 1], unit budgets.
inline FisherMarket random_market(std::mt19937_64& rng, int buyers, int goods, double lo = 0.1) {
  std::uniform_real_distribution<double> V(0.0, 1.0);
  Mat u(buyers, goods);
  for (int i = 0; i < buyers; ++i)
    for (int j = 0; j < goods; ++j) u(i, j) = 1.0 - (1.0 - lo) * V(rng);
  return make_market(std::move(u));
}

/// Random feasible spend with strictly positive entries.
inline Mat random_spend(const FisherMarket& m, std::mt19937_64& rng) {
  std::exponential_distribution<double> E(1.0);
  Mat b(m.buyers(), m.goods());
  for (int i = 0; i < m.buyers(); ++i) {
    for (int j = 0; j < m.goods(); ++j) b(i, j) = E(rng) + 1e-6;
    b.row(i) *= m.budgets(i) / b.row(i).sum();
  }
  return b;
}

}  // namespace gamelab

#endif  // GAMELAB_FISHER_HPP
