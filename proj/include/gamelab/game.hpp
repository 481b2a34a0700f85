#ifndef GAMELAB_GAME_HPP
#define GAMELAB_GAME_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "common.hpp"

namespace gamelab {

enum class Orientation { maximize, minimize };

using MixedProfile = std::vector<Vec>;
using PureProfile = std::vector<int>;

inline constexpr std::size_t kDefaultProfileCap = 10'000'000;

/**
 * \brief Finite n-player game stored as one dense utility table per player.
 *
 * Tables are row-major over pure profiles with player 0 most significant.
 * Internally every player maximizes and every utility lies in [-1, 1]:
 * cost tables are negated and out-of-range tables are scaled down on
 * construction. scale(i) records the factor that was applied.
 */
class NormalFormGame {
 public:
  NormalFormGame() = default;

  NormalFormGame(std::vector<int> action_counts,
                 std::vector<std::vector<double>> tables,
                 std::vector<Orientation> orientation = {})
      : counts_(std::move(action_counts)), tables_(std::move(tables)) {
    const int n = static_cast<int>(counts_.size());
    if (n < 1) throw DimensionError("game needs at least one player");
    for (int c : counts_)
      if (c < 1) throw DimensionError("every player needs at least one action");
    if (static_cast<int>(tables_.size()) != n)
      throw DimensionError("one utility table per player expected");
    strides_.assign(n, 1);
    for (int i = n - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * counts_[i + 1];
    profiles_ = strides_[0] * static_cast<std::size_t>(counts_[0]);
    for (const auto& t : tables_)
      if (t.size() != profiles_) throw DimensionError("utility table has wrong size");

    if (orientation.empty()) orientation.assign(n, Orientation::maximize);
    if (orientation.size() == 1 && n > 1) orientation.assign(n, orientation[0]);
    if (static_cast<int>(orientation.size()) != n)
      throw DimensionError("orientation list length differs from player count");
    orientation_ = orientation;

    scale_.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
      const double sign = orientation_[i] == Orientation::minimize ? -1.0 : 1.0;
      double peak = 0.0;
      for (double& v : tables_[i]) {
        if (!std::isfinite(v)) throw DomainError("non-finite utility entry");
        v = sign * v + 0.0;
        peak = std::max(peak, std::abs(v));
      }
      if (peak > 1.0) {
        scale_[i] = 1.0 / peak;
        for (double& v : tables_[i]) v *= scale_[i];
      }
    }
  }

  /// Builds a game from a callback giving player i's utility at a pure profile.
  static NormalFormGame from_function(
      const std::vector<int>& counts,
      const std::function<double(int, const PureProfile&)>& utility,
      std::vector<Orientation> orientation = {}) {
    std::size_t total = 1;
    for (int c : counts) total *= static_cast<std::size_t>(c);
    std::vector<std::vector<double>> tables(counts.size(), std::vector<double>(total));
    PureProfile a(counts.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
      for (std::size_t i = 0; i < counts.size(); ++i)
        tables[i][k] = utility(static_cast<int>(i), a);
      for (int i = static_cast<int>(counts.size()) - 1; i >= 0; --i) {
        if (++a[i] < counts[i]) break;
        a[i] = 0;
      }
    }
    return NormalFormGame(counts, std::move(tables), std::move(orientation));
  }

  int num_players() const { return static_cast<int>(counts_.size()); }
  const std::vector<int>& action_counts() const { return counts_; }
  int action_count(int i) const { return counts_.at(i); }
  std::size_t num_profiles() const { return profiles_; }
  std::size_t stride(int i) const { return strides_[i]; }
  const std::vector<double>& table(int i) const { return tables_.at(i); }
  double scale(int i) const { return scale_.at(i); }
  Orientation orientation(int i) const { return orientation_.at(i); }

  std::size_t index_of(const PureProfile& a) const {
    std::size_t k = 0;
    for (int i = 0; i < num_players(); ++i) {
      if (a[i] < 0 || a[i] >= counts_[i]) throw DimensionError("action out of range");
      k += strides_[i] * static_cast<std::size_t>(a[i]);
    }
    return k;
  }

  PureProfile profile_of(std::size_t k) const {
    PureProfile a(counts_.size());
    for (int i = 0; i < num_players(); ++i) {
      a[i] = static_cast<int>(k / strides_[i]);
      k %= strides_[i];
    }
    return a;
  }

  double utility(int i, const PureProfile& a) const { return tables_.at(i)[index_of(a)]; }
  double utility(int i, std::size_t k) const { return tables_[i][k]; }

  /// Utility in the orientation and units of the source data.
  double source_utility(int i, std::size_t k) const {
    const double sign = orientation_[i] == Orientation::minimize ? -1.0 : 1.0;
    return sign * tables_[i][k] / scale_[i] + 0.0;
  }

  /// Player i's payoff matrix against player j in a two-player game, source units.
  Mat source_matrix(int i) const {
    if (num_players() != 2) throw DimensionError("source_matrix needs two players");
    Mat m(counts_[0], counts_[1]);
    for (int r = 0; r < counts_[0]; ++r)
      for (int c = 0; c < counts_[1]; ++c) m(r, c) = source_utility(i, index_of({r, c}));
    return m;
  }

  /// Internal (maximize, rescaled) payoff matrix of player i in a two-player game.
  Mat matrix(int i) const {
    if (num_players() != 2) throw DimensionError("matrix needs two players");
    Mat m(counts_[0], counts_[1]);
    for (int r = 0; r < counts_[0]; ++r)
      for (int c = 0; c < counts_[1]; ++c) m(r, c) = utility(i, index_of({r, c}));
    return m;
  }

 private:
  std::vector<int> counts_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::size_t> strides_;
  std::size_t profiles_ = 0;
  std::vector<double> scale_;
  std::vector<Orientation> orientation_;
};

inline void check_profile(const NormalFormGame& g, const MixedProfile& x, double tol = 1e-9) {
  if (static_cast<int>(x.size()) != g.num_players())
    throw DimensionError("profile has wrong number of players");
  for (int i = 0; i < g.num_players(); ++i) {
    if (x[i].size() != g.action_count(i)) throw DimensionError("strategy has wrong length");
    if (!on_simplex(x[i], tol)) throw DomainError("strategy is not on the simplex");
  }
}

inline MixedProfile uniform_profile(const NormalFormGame& g) {
  MixedProfile x;
  for (int c : g.action_counts()) x.push_back(uniform_point(c));
  return x;
}

inline MixedProfile pure_to_mixed(const NormalFormGame& g, const PureProfile& a) {
  MixedProfile x;
  for (int i = 0; i < g.num_players(); ++i) {
    Vec e = Vec::Zero(g.action_count(i));
    e(a[i]) = 1.0;
    x.push_back(e);
  }
  return x;
}

/// u_i(., x_{-i}): expected utility of each of player i's actions.
inline Vec utility_vector(const NormalFormGame& g, int i, const MixedProfile& x) {
  const int n = g.num_players();
  Vec out = Vec::Zero(g.action_count(i));
  const auto& tab = g.table(i);
  PureProfile a(n, 0);
  for (std::size_t k = 0; k < g.num_profiles(); ++k) {
    double w = 1.0;
    for (int j = 0; j < n && w != 0.0; ++j)
      if (j != i) w *= x[j](a[j]);
    if (w != 0.0) out(a[i]) += w * tab[k];
    for (int j = n - 1; j >= 0; --j) {
      if (++a[j] < g.action_count(j)) break;
      a[j] = 0;
    }
  }
  return out;
}

inline std::vector<Vec> utility_vectors(const NormalFormGame& g, const MixedProfile& x) {
  std::vector<Vec> out;
  out.reserve(g.num_players());
  for (int i = 0; i < g.num_players(); ++i) out.push_back(utility_vector(g, i, x));
  return out;
}

inline double expected_utility(const NormalFormGame& g, int i, const MixedProfile& x) {
  check_profile(g, x);
  return x[i].dot(utility_vector(g, i, x));
}

inline double social_welfare(const NormalFormGame& g, const MixedProfile& x) {
  check_profile(g, x);
  double s = 0.0;
  for (int i = 0; i < g.num_players(); ++i) s += x[i].dot(utility_vector(g, i, x));
  return s;
}

/// Largest unilateral gain over all players.
inline double nash_gap(const NormalFormGame& g, const MixedProfile& x) {
  check_profile(g, x);
  double gap = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    const Vec u = utility_vector(g, i, x);
    gap = std::max(gap, u.maxCoeff() - x[i].dot(u));
  }
  return gap;
}

struct WelfareOptimum {
  double value;
  PureProfile argmax;
};

inline WelfareOptimum optimal_welfare(const NormalFormGame& g,
                                      std::size_t cap = kDefaultProfileCap) {
  if (g.num_profiles() > cap)
    throw CapExceeded("welfare enumeration needs " + std::to_string(g.num_profiles()) +
                      " profiles, cap is " + std::to_string(cap));
  WelfareOptimum best{-std::numeric_limits<double>::infinity(), {}};
  std::size_t arg = 0;
  for (std::size_t k = 0; k < g.num_profiles(); ++k) {
    double s = 0.0;
    for (int i = 0; i < g.num_players(); ++i) s += g.utility(i, k);
    if (s > best.value) {
      best.value = s;
      arg = k;
    }
  }
  best.argmax = g.profile_of(arg);
  return best;
}

struct SmoothnessParams {
  double lambda;
  double mu;
};

struct SmoothnessReport {
  bool holds;
  double worst_slack;
  PureProfile worst_profile;
  PureProfile worst_deviation;
};

/**
 * \brief Exhaustive check of sum_i u_i(a*_i, a_-i) >= lambda sw(a*) - mu sw(a)
 * over all pairs of pure profiles.
 */
inline SmoothnessReport verify_smoothness(const NormalFormGame& g, SmoothnessParams p,
                                          double tol = 1e-12,
                                          std::size_t cap = kDefaultProfileCap) {
  if (p.lambda <= 0.0 || p.mu <= -1.0) throw DomainError("need lambda > 0 and mu > -1");
  const std::size_t m = g.num_profiles();
  if (m > cap / std::max<std::size_t>(m, 1))
    throw CapExceeded("smoothness check needs " + std::to_string(m) + "^2 profile pairs");
  const int n = g.num_players();
  std::vector<double> sw(m, 0.0);
  for (std::size_t k = 0; k < m; ++k)
    for (int i = 0; i < n; ++i) sw[k] += g.utility(i, k);

  SmoothnessReport rep{true, std::numeric_limits<double>::infinity(), {}, {}};
  for (std::size_t ka = 0; ka < m; ++ka) {
    const PureProfile a = g.profile_of(ka);
    for (std::size_t ks = 0; ks < m; ++ks) {
      const PureProfile star = g.profile_of(ks);
      double lhs = 0.0;
      for (int i = 0; i < n; ++i) {
        const std::size_t k = ka + g.stride(i) * (star[i] - a[i]);
        lhs += g.utility(i, k);
      }
      const double slack = lhs - p.lambda * sw[ks] + p.mu * sw[ka];
      if (slack < rep.worst_slack) {
        rep.worst_slack = slack;
        rep.worst_profile = a;
        rep.worst_deviation = star;
      }
    }
  }
  rep.holds = rep.worst_slack >= -tol;
  return rep;
}

inline double robust_poa_bound(SmoothnessParams p) { return p.lambda / (1.0 + p.mu); }

}  // namespace gamelab

#endif  // GAMELAB_GAME_HPP
