#ifndef GAMELAB_LEARNERS_HPP
#define GAMELAB_LEARNERS_HPP

#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "game.hpp"
#include "regularizers.hpp"

namespace gamelab {

struct PredictionMechanism {
  enum class Kind { one_step, h_step, discounted, h_order };
  Kind kind = Kind::one_step;
  int horizon = 1;       // H for h_step and h_order
  double discount = 0.5;  // delta for discounted

  static PredictionMechanism one_step() { return {}; }
  static PredictionMechanism h_step(int h) {
    if (h < 1) throw ConfigError("h_step needs H >= 1");
    return {Kind::h_step, h, 0.5};
  }
  static PredictionMechanism discounted(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("discount must lie in (0,1)");
    return {Kind::discounted, 1, delta};
  }
  static PredictionMechanism h_order(int h) {
    if (h < 1 || h > 4) throw ConfigError("h_order supports H in 1..4");
    return {Kind::h_order, h, 0.5};
  }

  /// Weights on u(t-1), u(t-2), ... for the finite-window mechanisms.
  std::vector<double> coefficients() const {
    switch (kind) {
      case Kind::one_step: return {1.0};
      case Kind::h_step: return std::vector<double>(horizon, 1.0 / horizon);
      case Kind::h_order: {
        static const std::vector<std::vector<double>> table = {
            {1}, {2, -1}, {3, -3, 1}, {4, -6, 4, -1}};
        return table[horizon - 1];
      }
      case Kind::discounted: break;
    }
    throw ConfigError("discounted prediction has no finite coefficient list");
  }

  int window() const {
    return kind == Kind::discounted ? 1 : static_cast<int>(coefficients().size());
  }

  std::string describe() const {
    switch (kind) {
      case Kind::one_step: return "one_step";
      case Kind::h_step: return "h_step(" + std::to_string(horizon) + ")";
      case Kind::h_order: return "h_order(" + std::to_string(horizon) + ")";
      case Kind::discounted: return "discounted(" + fmt17(discount) + ")";
    }
    return "?";
  }
};

/**
 * Prediction from a full history u(0..t-1), oldest first. Entries before
 * time 0 count as u(0).
 */
inline Vec predict(const PredictionMechanism& mech, const std::vector<Vec>& history) {
  if (history.empty()) throw DimensionError("prediction needs a nonempty history");
  const int t = static_cast<int>(history.size());
  if (mech.kind == PredictionMechanism::Kind::discounted) {
    // weight delta^{-tau} on u(tau), tau = 0..t-1, normalized
    Vec num = Vec::Zero(history[0].size());
    double den = 0.0;
    for (int tau = 0; tau < t; ++tau) {
      const double w = std::pow(mech.discount, t - 1 - tau);
      num += w * history[tau];
      den += w;
    }
    return num / den;
  }
  const auto coef = mech.coefficients();
  Vec m = Vec::Zero(history[0].size());
  for (std::size_t k = 0; k < coef.size(); ++k) {
    const int tau = t - 1 - static_cast<int>(k);
    m += coef[k] * history[std::max(tau, 0)];
  }
  return m;
}

enum class Algorithm { omd, oftrl, omwu, md };
enum class Transform { identity, log_shift };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::omd: return "omd";
    case Algorithm::oftrl: return "oftrl";
    case Algorithm::omwu: return "omwu";
    case Algorithm::md: return "md";
  }
  return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "omd") return Algorithm::omd;
  if (s == "oftrl") return Algorithm::oftrl;
  if (s == "omwu") return Algorithm::omwu;
  if (s == "md") return Algorithm::md;
  throw ConfigError("unknown algorithm '" + s + "'");
}

struct LearnerConfig {
  Algorithm algorithm = Algorithm::omd;
  Regularizer regularizer{};
  double eta = 0.1;
  PredictionMechanism prediction{};
  Transform transform = Transform::identity;

  void validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive");
    if (algorithm == Algorithm::omwu &&
        regularizer.kind != RegularizerKind::negative_entropy)
      throw ConfigError("omwu requires the entropy regularizer");
    if (transform == Transform::log_shift && algorithm != Algorithm::md)
      throw ConfigError("log_shift transform is only defined for md");
  }

  std::string describe() const {
    return to_string(algorithm) + "/" + to_string(regularizer.kind) + "/eta=" + fmt17(eta) +
           "/" + prediction.describe();
  }
};

inline Vec apply_transform(Transform g, const Vec& u) {
  if (g == Transform::identity) return u;
  if (u.minCoeff() <= 0.0) throw DomainError("log_shift needs positive utilities");
  return (u.array().log() - 1.0).matrix();
}

// Single-step update rules, usable without a Learner.

struct OmdIterates {
  Vec x;
  Vec x_hat;
};

inline OmdIterates omd_step(const Regularizer& reg, double eta, const Vec& x_hat,
                            const Vec& prediction, const Vec& utility) {
  return {reg.prox(x_hat, prediction, eta), reg.prox(x_hat, utility, eta)};
}

inline Vec oftrl_step(const Regularizer& reg, double eta, const Vec& cumulative,
                      const Vec& prediction) {
  return reg.leader(cumulative + prediction, eta);
}

inline Vec omwu_step(double eta, const Vec& x, const Vec& u_now, const Vec& u_prev) {
  const Vec logits =
      x.cwiseMax(kEntropyFloor).array().log().matrix() + 2.0 * eta * u_now - eta * u_prev;
  return softmax(logits);
}

inline Vec md_step(const Regularizer& reg, double eta, const Vec& x, const Vec& u,
                   Transform g = Transform::identity) {
  return reg.prox(x, apply_transform(g, u), eta);
}

/**
 * \brief One player's online learner.
 *
 * Protocol: construct, begin(u0) with the utility at the initial profile, then
 * alternate step() (produces the next iterate) and observe(u) (utility of that
 * iterate).
 */
class Learner {
 public:
  Learner(LearnerConfig cfg, int d, std::optional<Vec> init = std::nullopt)
      : cfg_(cfg), d_(d) {
    cfg_.validate();
    x_ = init ? *init : uniform_point(d);
    if (x_.size() != d || !on_simplex(x_)) throw DomainError("initial strategy not on simplex");
    x_hat_ = x_;
    cumulative_ = Vec::Zero(d);
  }

  const LearnerConfig& config() const { return cfg_; }
  const Vec& strategy() const { return x_; }
  const Vec& secondary() const { return x_hat_; }
  long time() const { return t_; }

  void begin(const Vec& u0) {
    check_utility(u0);
    window_.clear();
    window_.push_front(u0);
    disc_num_ = u0;
    disc_den_ = 1.0;
    last_ = prev_ = u0;
    started_ = true;
  }

  void step() {
    if (!started_) throw Error("learner stepped before begin()");
    switch (cfg_.algorithm) {
      case Algorithm::omd:
        x_ = cfg_.regularizer.prox(x_hat_, prediction(), cfg_.eta);
        break;
      case Algorithm::oftrl:
        x_ = oftrl_step(cfg_.regularizer, cfg_.eta, cumulative_, prediction());
        break;
      case Algorithm::omwu:
        // the first move repeats the uniform start
        if (t_ > 0) x_ = omwu_step(cfg_.eta, x_, last_, prev_);
        break;
      case Algorithm::md:
        x_ = md_step(cfg_.regularizer, cfg_.eta, x_, last_, cfg_.transform);
        break;
    }
    ++t_;
  }

  void observe(const Vec& u) {
    check_utility(u);
    if (cfg_.algorithm == Algorithm::omd) x_hat_ = cfg_.regularizer.prox(x_hat_, u, cfg_.eta);
    cumulative_ += u;
    prev_ = last_;
    last_ = u;
    window_.push_front(u);
    while (static_cast<int>(window_.size()) > cfg_.prediction.window()) window_.pop_back();
    disc_num_ = cfg_.prediction.discount * disc_num_ + u;
    disc_den_ = cfg_.prediction.discount * disc_den_ + 1.0;
  }

  /// Current prediction for the next utility.
  Vec prediction() const {
    if (cfg_.prediction.kind == PredictionMechanism::Kind::discounted)
      return disc_num_ / disc_den_;
    const auto coef = cfg_.prediction.coefficients();
    Vec m = Vec::Zero(d_);
    for (std::size_t k = 0; k < coef.size(); ++k)
      m += coef[k] * window_[std::min(k, window_.size() - 1)];
    return m;
  }

 private:
  void check_utility(const Vec& u) const {
    if (u.size() != d_) throw DimensionError("utility vector has wrong length");
    if (!u.allFinite()) throw DomainError("non-finite utility");
  }

  LearnerConfig cfg_;
  int d_;
  Vec x_, x_hat_, cumulative_, last_, prev_, disc_num_;
  double disc_den_ = 1.0;
  std::deque<Vec> window_;  // newest first; the oldest slot doubles as u(0)
  long t_ = 0;
  bool started_ = false;
};

/// Complete trajectory of a multi-player run; index t runs over 0..T.
struct RunLog {
  std::vector<LearnerConfig> configs;
  std::vector<std::vector<Vec>> x;      // [player][t]
  std::vector<std::vector<Vec>> x_hat;  // [player][t]; equals x for non-OMD players
  std::vector<std::vector<Vec>> u;      // [player][t]
  std::vector<double> nash_gap;         // [t]
  std::vector<double> welfare;          // [t]

  int num_players() const { return static_cast<int>(x.size()); }
  long horizon() const { return x.empty() ? 0 : static_cast<long>(x[0].size()) - 1; }
};

struct RunOptions {
  bool random_init = false;
  unsigned long long seed = 0;
  /// Optional per-player multiplier on observed utilities (weighted games).
  std::vector<double> feedback_scale;
};

inline MixedProfile random_interior_profile(const std::vector<int>& counts, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  MixedProfile x;
  for (int c : counts) {
    Vec v(c);
    for (int k = 0; k < c; ++k) v(k) = expo(rng) + 1e-3;
    x.push_back(v / v.sum());
  }
  return x;
}

inline RunLog run_dynamics(const NormalFormGame& game, const std::vector<LearnerConfig>& configs,
                           long T, const RunOptions& opt = {}) {
  const int n = game.num_players();
  if (static_cast<int>(configs.size()) != n)
    throw ConfigError("one learner configuration per player expected");
  if (T < 1) throw ConfigError("horizon T must be at least 1");
  std::vector<double> fb = opt.feedback_scale;
  if (fb.empty()) fb.assign(n, 1.0);
  if (static_cast<int>(fb.size()) != n) throw ConfigError("feedback_scale has wrong length");

  MixedProfile x0 = uniform_profile(game);
  if (opt.random_init) {
    std::mt19937_64 rng(opt.seed);
    x0 = random_interior_profile(game.action_counts(), rng);
  }
  std::vector<Learner> learners;
  for (int i = 0; i < n; ++i) learners.emplace_back(configs[i], game.action_count(i), x0[i]);

  RunLog log;
  log.configs = configs;
  log.x.assign(n, {});
  log.x_hat.assign(n, {});
  log.u.assign(n, {});
  for (int i = 0; i < n; ++i) {
    log.x[i].reserve(T + 1);
    log.x_hat[i].reserve(T + 1);
    log.u[i].reserve(T + 1);
  }
  log.nash_gap.reserve(T + 1);
  log.welfare.reserve(T + 1);

  auto record = [&](const MixedProfile& x, const std::vector<Vec>& u) {
    double gap = 0.0, sw = 0.0;
    for (int i = 0; i < n; ++i) {
      log.x[i].push_back(x[i]);
      log.x_hat[i].push_back(configs[i].algorithm == Algorithm::omd ? learners[i].secondary()
                                                                    : x[i]);
      log.u[i].push_back(u[i]);
      const double v = x[i].dot(u[i]);
      gap = std::max(gap, u[i].maxCoeff() - v);
      sw += v;
    }
    log.nash_gap.push_back(gap);
    log.welfare.push_back(sw);
  };

  std::vector<Vec> u = utility_vectors(game, x0);
  for (int i = 0; i < n; ++i) learners[i].begin(fb[i] * u[i]);
  record(x0, u);

  MixedProfile x(n);
  for (long t = 0; t < T; ++t) {
    try {
      for (int i = 0; i < n; ++i) learners[i].step();
      for (int i = 0; i < n; ++i) x[i] = learners[i].strategy();
      u = utility_vectors(game, x);
      for (int i = 0; i < n; ++i) learners[i].observe(fb[i] * u[i]);
    } catch (const CertificateViolation&) {
      throw;
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " at iteration " + std::to_string(t + 1));
    }
    record(x, u);
  }
  return log;
}

/// eta = 1/(4(n-1)), the default step for optimistic learners in n-player games.
inline double default_optimistic_eta(int n) { return n > 1 ? 1.0 / (4.0 * (n - 1)) : 0.25; }

}  // namespace gamelab

#endif  // GAMELAB_LEARNERS_HPP
