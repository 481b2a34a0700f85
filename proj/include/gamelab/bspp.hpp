#ifndef GAMELAB_BSPP_HPP
#define GAMELAB_BSPP_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "common.hpp"
#include "regularizers.hpp"
#include "treeplex.hpp"

namespace gamelab {

enum class DomainKind { simplex, treeplex, box, l1_ball };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::simplex: return "simplex";
    case DomainKind::treeplex: return "treeplex";
    case DomainKind::box: return "box";
    case DomainKind::l1_ball: return "l1_ball";
  }
  return "?";
}

/// Compact convex strategy set with euclidean projection and linear maximization.
class Domain {
 public:
  static Domain simplex(int d) {
    Domain D;
    D.kind_ = DomainKind::simplex;
    D.dim_ = d;
    return D;
  }
  static Domain treeplex(Treeplex tp) {
    Domain D;
    D.kind_ = DomainKind::treeplex;
    D.dim_ = tp.dim();
    D.tp_ = std::move(tp);
    return D;
  }
  static Domain box(int d, double lo, double hi) {
    if (!(lo < hi)) throw DomainError("box needs lo < hi");
    Domain D;
    D.kind_ = DomainKind::box;
    D.dim_ = d;
    D.lo_ = lo;
    D.hi_ = hi;
    return D;
  }
  static Domain l1_ball(int d, double radius) {
    if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
    Domain D;
    D.kind_ = DomainKind::l1_ball;
    D.dim_ = d;
    D.hi_ = radius;
    return D;
  }

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Treeplex& tree() const { return tp_; }

  Vec project(const Vec& v) const {
    if (v.size() != dim_) throw DimensionError("domain point has wrong dimension");
    switch (kind_) {
      case DomainKind::simplex: return project_simplex(v);
      case DomainKind::treeplex: return tp_.project(v);
      case DomainKind::box: return v.cwiseMax(lo_).cwiseMin(hi_);
      case DomainKind::l1_ball: return project_l1_ball(v, hi_);
    }
    return v;
  }

  /// max <g, x> over the domain and a maximizer.
  std::pair<double, Vec> best_response(const Vec& g) const {
    if (g.size() != dim_) throw DimensionError("gradient has wrong dimension");
    switch (kind_) {
      case DomainKind::simplex: {
        Eigen::Index a = 0;
        const double v = g.maxCoeff(&a);
        Vec e = Vec::Zero(dim_);
        e(a) = 1.0;
        return {v, e};
      }
      case DomainKind::treeplex: return tp_.best_response(g);
      case DomainKind::box: {
        Vec x(dim_);
        for (int k = 0; k < dim_; ++k) x(k) = g(k) > 0.0 ? hi_ : lo_;
        return {g.dot(x), x};
      }
      case DomainKind::l1_ball: {
        Eigen::Index a = 0;
        g.cwiseAbs().maxCoeff(&a);
        Vec x = Vec::Zero(dim_);
        x(a) = g(a) >= 0.0 ? hi_ : -hi_;
        return {g.dot(x), x};
      }
    }
    return {0.0, Vec()};
  }

  bool contains(const Vec& x, double tol = 1e-8) const {
    if (x.size() != dim_) return false;
    switch (kind_) {
      case DomainKind::simplex: return on_simplex(x, tol);
      case DomainKind::treeplex: return tp_.contains(x, tol);
      case DomainKind::box: return x.minCoeff() >= lo_ - tol && x.maxCoeff() <= hi_ + tol;
      case DomainKind::l1_ball: return x.lpNorm<1>() <= hi_ + tol;
    }
    return false;
  }

  /// Minimizer of the squared norm, the starting point of euclidean OMD.
  Vec center() const {
    switch (kind_) {
      case DomainKind::simplex: return uniform_point(dim_);
      case DomainKind::treeplex: return tp_.center();
      default: return project(Vec::Zero(dim_));
    }
  }

  /// sup over the domain of half the squared distance to center().
  double omega() const {
    const Vec c = center();
    switch (kind_) {
      case DomainKind::simplex: return 0.5 * (1.0 - 1.0 / dim_);
      case DomainKind::treeplex: {
        double best = 0.0;
        for (const auto& v : tp_.vertices()) best = std::max(best, 0.5 * (v - c).squaredNorm());
        return best;
      }
      case DomainKind::box: {
        double s = 0.0;
        for (int k = 0; k < dim_; ++k)
          s += 0.5 * std::max(std::pow(lo_ - c(k), 2), std::pow(hi_ - c(k), 2));
        return s;
      }
      case DomainKind::l1_ball: return 0.5 * hi_ * hi_;
    }
    return 0.0;
  }

 private:
  DomainKind kind_ = DomainKind::simplex;
  int dim_ = 0;
  Treeplex tp_;
  double lo_ = 0.0, hi_ = 1.0;
};

/// min over x in X, max over y in Y of x^T A y.
struct Bspp {
  Mat A;
  Domain X;
  Domain Y;
  std::string name;

  void validate() const {
    if (A.rows() != X.dim() || A.cols() != Y.dim())
      throw DimensionError("payoff matrix does not match the domains");
  }
};

/// Largest singular value by power iteration on A^T A.
inline double spectral_norm(const Mat& A, double tol = 1e-12, long cap = 100'000) {
  if (A.size() == 0) return 0.0;
  Vec v = Vec::Ones(A.cols()) / std::sqrt(double(A.cols()));
  // a fixed, generic start avoids orthogonality to the top singular vector
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) += 1e-3 * std::sin(1.0 + k);
  v.normalize();
  double sigma = 0.0;
  for (long it = 0; it < cap; ++it) {
    Vec w = A.transpose() * (A * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    w /= nrm;
    const double next = std::sqrt(nrm);
    const bool done = std::abs(next - sigma) <= tol * std::max(1.0, next);
    sigma = next;
    v = w;
    if (done) break;
  }
  return sigma;
}

/// max_y' x^T A y' - min_x' x'^T A y over the domains.
inline double saddle_point_gap(const Bspp& g, const Vec& x, const Vec& y, double tol = 1e-8) {
  if (!g.X.contains(x, tol) || !g.Y.contains(y, tol)) throw DomainError("gap needs feasible points");
  const double hi = g.Y.best_response(g.A.transpose() * x).first;
  const double lo = -g.X.best_response(-(g.A * y)).first;
  return hi - lo;
}

/// Kuhn poker in sequence form; x is the first player and minimizes the second player's payoff.
inline Bspp build_kuhn() {
  // player 1, per card c: infoset (c) with check = 4c+1, bet = 4c+2; infoset
  // (c, check-bet) with fold = 4c+3, call = 4c+4
  std::vector<Infoset> p1, p2;
  for (int c = 0; c < 3; ++c) p1.push_back({0, {4 * c + 1, 4 * c + 2}});
  for (int c = 0; c < 3; ++c) p1.push_back({4 * c + 1, {4 * c + 3, 4 * c + 4}});
  // player 2, per card c: facing a check: check = 4c+1, bet = 4c+2; facing a
  // bet: fold = 4c+3, call = 4c+4
  for (int c = 0; c < 3; ++c) {
    p2.push_back({0, {4 * c + 1, 4 * c + 2}});
    p2.push_back({0, {4 * c + 3, 4 * c + 4}});
  }
  Mat A = Mat::Zero(13, 13);
  const double chance = 1.0 / 6.0;
  for (int c1 = 0; c1 < 3; ++c1)
    for (int c2 = 0; c2 < 3; ++c2) {
      if (c1 == c2) continue;
      const double win2 = c2 > c1 ? 1.0 : -1.0;
      A(4 * c1 + 1, 4 * c2 + 1) += chance * win2;        // check, check
      A(4 * c1 + 3, 4 * c2 + 2) += chance * 1.0;         // check, bet, fold
      A(4 * c1 + 4, 4 * c2 + 2) += chance * 2.0 * win2;  // check, bet, call
      A(4 * c1 + 2, 4 * c2 + 3) += chance * -1.0;        // bet, fold
      A(4 * c1 + 2, 4 * c2 + 4) += chance * 2.0 * win2;  // bet, call
    }
  return {A, Domain::treeplex(Treeplex(13, p1)), Domain::treeplex(Treeplex(13, p2)), "kuhn"};
}

/// Matrix game on simplices; x minimizes x^T A y.
inline Bspp simplex_bspp(const Mat& A, std::string name = "matrix") {
  return {A, Domain::simplex(static_cast<int>(A.rows())), Domain::simplex(static_cast<int>(A.cols())),
          std::move(name)};
}

struct BsppRun {
  double eta = 0.0;
  std::vector<Vec> x, y;        // [t], t = 0..T
  std::vector<double> last_gap;  // [t]
  std::vector<double> avg_gap;   // [t], t >= 1: gap of the mean of iterates 1..t
  std::vector<double> path;      // [t]: sum_{s<=t} ||dx||^2 + ||dy||^2
  double path_bound = 0.0;       // 16 (Omega_X + Omega_Y)
  std::vector<double> regret_sum;  // [t]
};

struct BsppOptions {
  long gap_every = 1;  // evaluate gaps every k steps (always at T)
  double tol = 1e-9;
  bool certify_path = true;  // abort when the path sum exceeds 16 (Omega_X + Omega_Y)
};

namespace detail {

/// Euclidean OMD for two players against linear utility oracles. The oracle
/// returns (u_x, u_y), the utility gradients at (x, y).
template <typename Oracle>
BsppRun omd_pair(const Domain& X, const Domain& Y, Oracle oracle, double eta, long T,
                 const std::function<double(const Vec&, const Vec&)>& gap_fn,
                 const BsppOptions& opt) {
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (T < 1) throw ConfigError("horizon T must be at least 1");
  BsppRun r;
  r.eta = eta;
  Vec x = X.center(), y = Y.center();
  Vec xh = x, yh = y;
  auto [ux, uy] = oracle(x, y);
  r.x.push_back(x);
  r.y.push_back(y);
  r.path.push_back(0.0);
  r.path_bound = 16.0 * (X.omega() + Y.omega());
  r.last_gap.push_back(gap_fn(x, y));
  r.avg_gap.push_back(r.last_gap[0]);
  r.regret_sum.push_back(0.0);
  Vec sx = Vec::Zero(x.size()), sy = Vec::Zero(y.size());
  Vec cum_ux = Vec::Zero(x.size()), cum_uy = Vec::Zero(y.size());
  double realized = 0.0;
  for (long t = 1; t <= T; ++t) {
    const Vec xn = X.project(xh + eta * ux);
    const Vec yn = Y.project(yh + eta * uy);
    std::tie(ux, uy) = oracle(xn, yn);
    xh = X.project(xh + eta * ux);
    yh = Y.project(yh + eta * uy);
    r.path.push_back(r.path.back() + (xn - x).squaredNorm() + (yn - y).squaredNorm());
    if (opt.certify_path && r.path.back() > r.path_bound + opt.tol)
      throw CertificateViolation("path bound exceeded: " + fmt17(r.path.back()) + " > " +
                                     fmt17(r.path_bound),
                                 t);
    x = xn;
    y = yn;
    r.x.push_back(x);
    r.y.push_back(y);
    sx += x;
    sy += y;
    cum_ux += ux;
    cum_uy += uy;
    realized += ux.dot(x) + uy.dot(y);
    r.regret_sum.push_back(X.best_response(cum_ux).first + Y.best_response(cum_uy).first -
                           realized);
    if (t % opt.gap_every == 0 || t == T) {
      r.last_gap.push_back(gap_fn(x, y));
      r.avg_gap.push_back(gap_fn(sx / double(t), sy / double(t)));
    } else {
      r.last_gap.push_back(std::numeric_limits<double>::quiet_NaN());
      r.avg_gap.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return r;
}

}  // namespace detail

/// Both players run euclidean OMD with one-step prediction; x receives -A y, y receives A^T x.
inline BsppRun bspp_omd_run(const Bspp& g, double eta, long T, const BsppOptions& opt = {}) {
  g.validate();
  auto oracle = [&](const Vec& x, const Vec& y) {
    return std::pair<Vec, Vec>(-(g.A * y), g.A.transpose() * x);
  };
  auto gap = [&](const Vec& x, const Vec& y) { return saddle_point_gap(g, x, y, 1e-7); };
  return detail::omd_pair(g.X, g.Y, oracle, eta, T, gap, opt);
}

/// Convex-concave f(x, y), x minimizing: both players feed the tangent planes
/// of f into euclidean OMD with eta = 1/(8L).
struct ConvexConcaveProblem {
  std::function<Vec(const Vec&, const Vec&)> grad_x;
  std::function<Vec(const Vec&, const Vec&)> grad_y;
  Domain X;
  Domain Y;
  double smoothness = 1.0;
};

inline BsppRun convex_concave_run(const ConvexConcaveProblem& p, long T,
                                  std::optional<double> eta = std::nullopt,
                                  const BsppOptions& opt = {}) {
  auto oracle = [&](const Vec& x, const Vec& y) {
    Vec gx = p.grad_x(x, y), gy = p.grad_y(x, y);
    if (!gx.allFinite() || !gy.allFinite()) throw DomainError("non-finite gradient");
    return std::pair<Vec, Vec>(-gx, gy);
  };
  // the linearized duality gap at the current point
  auto gap = [&](const Vec& x, const Vec& y) {
    const Vec gx = p.grad_x(x, y), gy = p.grad_y(x, y);
    return p.Y.best_response(gy).first - gy.dot(y) + gx.dot(x) + p.X.best_response(-gx).first;
  };
  return detail::omd_pair(p.X, p.Y, oracle, eta ? *eta : 1.0 / (8.0 * p.smoothness), T, gap, opt);
}

/// Equilibrium family of Kuhn poker, first player's randomization alpha in [0, 1/3].
inline std::pair<Vec, Vec> kuhn_equilibrium(double alpha) {
  Vec x = Vec::Zero(13), y = Vec::Zero(13);
  x(0) = y(0) = 1.0;
  // cards 0 = J, 1 = Q, 2 = K; per card: check, bet, fold, call
  auto set_p1 = [&](int c, double bet, double call_after_check) {
    x(4 * c + 2) = bet;
    x(4 * c + 1) = 1.0 - bet;
    x(4 * c + 4) = (1.0 - bet) * call_after_check;
    x(4 * c + 3) = (1.0 - bet) * (1.0 - call_after_check);
  };
  set_p1(0, alpha, 0.0);
  set_p1(1, 0.0, alpha + 1.0 / 3.0);
  set_p1(2, 3.0 * alpha, 1.0);
  auto set_p2 = [&](int c, double bet_after_check, double call) {
    y(4 * c + 2) = bet_after_check;
    y(4 * c + 1) = 1.0 - bet_after_check;
    y(4 * c + 4) = call;
    y(4 * c + 3) = 1.0 - call;
  };
  set_p2(0, 1.0 / 3.0, 0.0);
  set_p2(1, 0.0, 1.0 / 3.0);
  set_p2(2, 1.0, 1.0);
  return {x, y};
}

}  // namespace gamelab

#endif  // GAMELAB_BSPP_HPP
