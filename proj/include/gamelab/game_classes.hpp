#ifndef GAMELAB_GAME_CLASSES_HPP
#define GAMELAB_GAME_CLASSES_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "game.hpp"

namespace gamelab {

/// Pairwise game on edge (i, j): payoff_ij is |A_i| x |A_j| (to i), payoff_ji
/// is |A_j| x |A_i| (to j).
struct PolymatrixEdge {
  int i;
  int j;
  Mat payoff_ij;
  Mat payoff_ji;
};

struct PolymatrixGame {
  std::vector<int> action_counts;
  std::vector<PolymatrixEdge> edges;

  int num_players() const { return static_cast<int>(action_counts.size()); }

  void validate() const {
    const int n = num_players();
    for (const auto& e : edges) {
      if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n || e.i == e.j)
        throw DimensionError("polymatrix edge has invalid endpoints");
      if (e.payoff_ij.rows() != action_counts[e.i] || e.payoff_ij.cols() != action_counts[e.j] ||
          e.payoff_ji.rows() != action_counts[e.j] || e.payoff_ji.cols() != action_counts[e.i])
        throw DimensionError("polymatrix edge matrices do not match action counts");
    }
  }

  double utility(int p, const PureProfile& a) const {
    double s = 0.0;
    for (const auto& e : edges) {
      if (e.i == p) s += e.payoff_ij(a[e.i], a[e.j]);
      if (e.j == p) s += e.payoff_ji(a[e.j], a[e.i]);
    }
    return s;
  }

  bool zero_sum_edges() const {
    for (const auto& e : edges)
      if (e.payoff_ij != -e.payoff_ji.transpose()) return false;
    return true;
  }
};

inline NormalFormGame polymatrix_to_nfg(const PolymatrixGame& pg) {
  pg.validate();
  return NormalFormGame::from_function(
      pg.action_counts, [&](int p, const PureProfile& a) { return pg.utility(p, a); });
}

struct ConstantSumReport {
  bool constant;
  double value;                      // sum of utilities at the first profile
  std::optional<PureProfile> witness;  // profile where the sum differs
};

inline ConstantSumReport verify_constant_sum(const NormalFormGame& g, double tol = 1e-9,
                                             std::size_t cap = kDefaultProfileCap) {
  if (g.num_profiles() > cap) throw CapExceeded("constant-sum check exceeds profile cap");
  auto total = [&](std::size_t k) {
    double s = 0.0;
    for (int i = 0; i < g.num_players(); ++i) s += g.utility(i, k);
    return s;
  };
  ConstantSumReport r{true, total(0), std::nullopt};
  for (std::size_t k = 1; k < g.num_profiles(); ++k)
    if (std::abs(total(k) - r.value) > tol) {
      r.constant = false;
      r.witness = g.profile_of(k);
      break;
    }
  return r;
}

inline ConstantSumReport verify_constant_sum_polymatrix(const PolymatrixGame& pg,
                                                        double tol = 1e-9,
                                                        std::size_t cap = kDefaultProfileCap) {
  pg.validate();
  std::size_t total = 1;
  for (int c : pg.action_counts) {
    total *= static_cast<std::size_t>(c);
    if (total > cap) throw CapExceeded("constant-sum check exceeds profile cap");
  }
  PureProfile a(pg.num_players(), 0);
  auto sum_at = [&]() {
    double s = 0.0;
    for (int p = 0; p < pg.num_players(); ++p) s += pg.utility(p, a);
    return s;
  };
  ConstantSumReport r{true, sum_at(), std::nullopt};
  for (std::size_t k = 1; k < total; ++k) {
    for (int i = pg.num_players() - 1; i >= 0; --i) {
      if (++a[i] < pg.action_counts[i]) break;
      a[i] = 0;
    }
    if (std::abs(sum_at() - r.value) > tol) {
      r.constant = false;
      r.witness = a;
      break;
    }
  }
  return r;
}

/**
 * \brief Bimatrix (A, B) written as A = C + v_a 1^T, B = -scale C + 1 v_b^T.
 *
 * The row offsets v_a are normalized to sum to zero, which pins down C.
 */
struct SzsDecomposition {
  bool holds = false;
  bool singular = false;  // A has no strategic content (rank-one additive)
  double scale = 0.0;
  Mat core;
  Vec row_offset;  // v_a
  Vec col_offset;  // v_b
  double residual = 0.0;
};

inline std::pair<Mat, Mat> make_strategically_zero_sum(double scale, const Mat& core,
                                                       const Vec& row_offset,
                                                       const Vec& col_offset) {
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  if (row_offset.size() != core.rows() || col_offset.size() != core.cols())
    throw DimensionError("offset lengths must match the core matrix");
  const Mat ones_r = Vec::Ones(core.cols()).transpose();
  const Mat ones_c = Vec::Ones(core.rows());
  Mat A = core + row_offset * ones_r;
  Mat B = -scale * core + ones_c * col_offset.transpose();
  return {A, B};
}

/// Removes row and column means: kills every matrix of the form r 1^T + 1 c^T.
inline Mat double_center(const Mat& M) {
  const Vec rm = M.rowwise().mean();
  const Eigen::RowVectorXd cm = M.colwise().mean();
  Mat out = M;
  out.colwise() -= rm;
  out.rowwise() -= cm;
  out.array() += M.mean();
  return out;
}

inline SzsDecomposition verify_strategically_zero_sum(const Mat& A, const Mat& B,
                                                      double tol = 1e-9) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw DimensionError("bimatrix components differ in shape");
  SzsDecomposition d;
  const Mat pa = double_center(A);
  const Mat pb = double_center(B);
  const double na = pa.squaredNorm();
  const double ref = std::max({1.0, A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff()});
  if (na <= (tol * ref) * (tol * ref)) {
    d.singular = true;
    return d;
  }
  d.scale = -pa.cwiseProduct(pb).sum() / na;
  d.residual = (pb + d.scale * pa).norm();
  if (!(d.scale > 0.0)) {
    d.holds = false;
    return d;
  }
  const Mat M = B + d.scale * A;  // = scale v_a 1^T + 1 v_b^T
  const Vec rm = M.rowwise().mean();
  d.col_offset = M.colwise().mean().transpose();
  d.row_offset = (rm.array() - M.mean()).matrix() / d.scale;
  d.core = A - d.row_offset * Vec::Ones(A.cols()).transpose();
  d.holds = d.residual <= tol * ref * std::sqrt(static_cast<double>(A.size()));
  return d;
}

/// Maximum pairwise difference of unilateral-deviation payoff differences.
inline double mpd_distance(const NormalFormGame& g, const NormalFormGame& h) {
  if (g.action_counts() != h.action_counts())
    throw DimensionError("games must share the action space");
  double worst = 0.0;
  for (std::size_t k = 0; k < g.num_profiles(); ++k) {
    const PureProfile a = g.profile_of(k);
    for (int i = 0; i < g.num_players(); ++i)
      for (int b = 0; b < g.action_count(i); ++b) {
        const std::size_t kb = k + g.stride(i) * static_cast<std::size_t>(b) -
                               g.stride(i) * static_cast<std::size_t>(a[i]);
        const double dg = g.utility(i, kb) - g.utility(i, k);
        const double dh = h.utility(i, kb) - h.utility(i, k);
        worst = std::max(worst, std::abs(dg - dh));
      }
  }
  return worst;
}

// Random instances with utilities already inside [-1, 1].

inline Mat random_matrix(std::mt19937_64& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Mat m(r, c);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < c; ++b) m(a, b) = U(rng);
  return m;
}

/// Zero-sum edges on a random connected graph, scaled so every player's
/// utility stays within [-1, 1].
inline PolymatrixGame random_polymatrix_zero_sum(std::mt19937_64& rng, int n, int max_actions) {
  std::uniform_int_distribution<int> A(2, max_actions);
  PolymatrixGame pg;
  for (int i = 0; i < n; ++i) pg.action_counts.push_back(A(rng));
  std::bernoulli_distribution coin(0.6);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (j == i + 1 || coin(rng)) pairs.emplace_back(i, j);
  std::vector<int> degree(n, 0);
  for (auto [i, j] : pairs) ++degree[i], ++degree[j];
  for (auto [i, j] : pairs) {
    const double s = 1.0 / std::max(degree[i], degree[j]);
    Mat m = s * random_matrix(rng, pg.action_counts[i], pg.action_counts[j]);
    pg.edges.push_back({i, j, m, -m.transpose()});
  }
  return pg;
}

/// Constant-sum but not pairwise zero-sum: per-edge constants plus linear
/// terms in one player's strategy that cancel across two of its edges.
inline PolymatrixGame random_polymatrix_constant_sum(std::mt19937_64& rng, int n,
                                                     int max_actions) {
  if (n < 3) throw DimensionError("constant-sum construction needs three players");
  std::uniform_int_distribution<int> A(2, max_actions);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  PolymatrixGame pg;
  for (int i = 0; i < n; ++i) pg.action_counts.push_back(A(rng));
  // a cycle keeps every degree at two
  const double s = 0.15;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    Mat m = s * random_matrix(rng, pg.action_counts[i], pg.action_counts[j]);
    const double c = s * U(rng);
    pg.edges.push_back({i, j, m, (-m.transpose()).array() + c});
  }
  // node 0 gains v on its first edge and loses it on the last one
  Vec v(pg.action_counts[0]);
  for (int k = 0; k < v.size(); ++k) v(k) = s * U(rng);
  pg.edges.front().payoff_ij.colwise() += v;
  pg.edges.back().payoff_ji.colwise() -= v;
  return pg;
}

/// Strategically zero-sum edges with equal scale on both sides.
inline PolymatrixGame random_polymatrix_szs(std::mt19937_64& rng, int n, int max_actions) {
  PolymatrixGame pg = random_polymatrix_zero_sum(rng, n, max_actions);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<int> degree(n, 0);
  for (const auto& e : pg.edges) ++degree[e.i], ++degree[e.j];
  for (auto& e : pg.edges) {
    const double s = 0.5 / std::max(degree[e.i], degree[e.j]);
    e.payoff_ij *= 0.5;
    e.payoff_ji *= 0.5;
    // each endpoint gains an offset depending on its own action only
    Vec vi(e.payoff_ij.rows()), vj(e.payoff_ji.rows());
    for (int k = 0; k < vi.size(); ++k) vi(k) = s * U(rng);
    for (int k = 0; k < vj.size(); ++k) vj(k) = s * U(rng);
    e.payoff_ij.colwise() += vi;
    e.payoff_ji.colwise() += vj;
  }
  return pg;
}

/// Random bimatrix SZS game in [-1, 1] with the given scale.
inline std::pair<Mat, Mat> random_szs_bimatrix(std::mt19937_64& rng, int rows, int cols,
                                               double scale) {
  const double s = 0.5 / std::max(1.0, scale);
  Mat C = s * random_matrix(rng, rows, cols);
  Vec va = 0.5 * random_matrix(rng, rows, 1);
  Vec vb = 0.5 * random_matrix(rng, cols, 1);
  va.array() -= va.mean();
  return make_strategically_zero_sum(scale, C, va, vb);
}

inline NormalFormGame bimatrix_game(const Mat& A, const Mat& B,
                                    Orientation o = Orientation::maximize) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw DimensionError("bimatrix components differ in shape");
  std::vector<int> counts{static_cast<int>(A.rows()), static_cast<int>(A.cols())};
  return NormalFormGame::from_function(
      counts, [&](int i, const PureProfile& a) { return i == 0 ? A(a[0], a[1]) : B(a[0], a[1]); },
      {o, o});
}

/**
 * Weights under which the regret sum of a two-player or polymatrix game is
 * nonnegative: all ones for constant-sum games, (1, 1/scale) for strategically
 * zero-sum bimatrix games. The fit runs on the stored utilities, so ingestion
 * rescaling and orientation are accounted for.
 */
inline std::optional<std::vector<double>> regret_sum_weights(const NormalFormGame& g,
                                                             double tol = 1e-9) {
  if (verify_constant_sum(g, tol).constant) return std::vector<double>(g.num_players(), 1.0);
  if (g.num_players() != 2) return std::nullopt;
  const auto d = verify_strategically_zero_sum(g.matrix(0), g.matrix(1), tol);
  if (!d.holds) return std::nullopt;
  return std::vector<double>{1.0, 1.0 / d.scale};
}

}  // namespace gamelab

#endif  // GAMELAB_GAME_CLASSES_HPP
