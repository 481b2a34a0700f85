#ifndef GAMELAB_CONTINUOUS_HPP
#define GAMELAB_CONTINUOUS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "common.hpp"
#include "polynomial.hpp"
#include "regularizers.hpp"

namespace gamelab {

inline constexpr double kDivergenceNorm = 1e12;
inline constexpr double kRealTol = 1e-9;

/// Two-player bilinear game: utilities x^T A y and x^T B y.
struct BilinearGame {
  Mat A;
  Mat B;
  std::optional<double> radius;  // l1-ball constraint on both players

  void validate() const {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
      throw DimensionError("bilinear game needs square matrices of equal size");
    if (radius && !(*radius > 0.0)) throw DomainError("ball radius must be positive");
  }
  int dim() const { return static_cast<int>(A.rows()); }
  Mat coupling() const { return A.transpose() * B; }
  /// Gradient map z = (x, y) -> (A y, B^T x).
  Mat jacobian() const {
    const int d = dim();
    Mat J = Mat::Zero(2 * d, 2 * d);
    J.topRightCorner(d, d) = A;
    J.bottomLeftCorner(d, d) = B.transpose();
    return J;
  }
  std::vector<int> blocks() const { return {dim(), dim()}; }
};

/// Player 1 against players 2..n: u_1 = sum_j x_1^T A_1j x_j, u_j = x_j^T A_j1 x_1.
struct OneVsManyGame {
  std::vector<Mat> hub_to_leaf;  // A_1j
  std::vector<Mat> leaf_to_hub;  // A_j1

  void validate() const {
    if (hub_to_leaf.empty() || hub_to_leaf.size() != leaf_to_hub.size())
      throw DimensionError("one-vs-many game needs matching edge lists");
    const auto d = hub_to_leaf[0].rows();
    for (std::size_t k = 0; k < hub_to_leaf.size(); ++k)
      if (hub_to_leaf[k].rows() != d || hub_to_leaf[k].cols() != d ||
          leaf_to_hub[k].rows() != d || leaf_to_hub[k].cols() != d)
        throw DimensionError("one-vs-many blocks must be square and equal-sized");
  }
  int dim() const { return static_cast<int>(hub_to_leaf[0].rows()); }
  Mat coupling() const {
    Mat M = Mat::Zero(dim(), dim());
    for (std::size_t k = 0; k < hub_to_leaf.size(); ++k) M += hub_to_leaf[k] * leaf_to_hub[k];
    return M;
  }
  Mat jacobian() const {
    const int d = dim();
    const int n = static_cast<int>(hub_to_leaf.size()) + 1;
    Mat J = Mat::Zero(n * d, n * d);
    for (int k = 1; k < n; ++k) {
      J.block(0, k * d, d, d) = hub_to_leaf[k - 1];
      J.block(k * d, 0, d, d) = leaf_to_hub[k - 1];
    }
    return J;
  }
  std::vector<int> blocks() const { return std::vector<int>(hub_to_leaf.size() + 1, dim()); }
};

/**
 * \brief Linear first-order method x(t+1) = sum_k a_k x(t-k) + sum_k b_k grad(t-k).
 *
 * S(z) = sum_k a_k z^-k and G(z) = sum_k b_k z^-k.
 */
struct HgdMethod {
  std::string name;
  std::vector<double> state_coeffs;
  std::vector<double> grad_coeffs;

  static HgdMethod ogd(double eta) { return {"ogd", {1.0}, {2.0 * eta, -eta}}; }
  static HgdMethod gd(double eta) { return {"gd", {1.0}, {eta}}; }

  int order() const {
    return static_cast<int>(std::max(state_coeffs.size(), grad_coeffs.size())) - 1;
  }
  template <typename Z>
  Z S(Z z) const {
    Z acc = 0, p = 1;
    for (double a : state_coeffs) { acc += a * p; p /= z; }
    return acc;
  }
  template <typename Z>
  Z G(Z z) const {
    Z acc = 0, p = 1;
    for (double b : grad_coeffs) { acc += b * p; p /= z; }
    return acc;
  }
  bool regular(double tol = 1e-12) const {
    return std::abs(S(1.0) - 1.0) <= tol && std::abs(G(1.0)) > tol;
  }
  /// z^K (z - S(z)) as an ordinary polynomial, K = order().
  ComplexPoly shifted_gap() const {
    const int K = order();
    ComplexPoly p(K + 2, 0.0);
    p[K + 1] = 1.0;
    for (std::size_t k = 0; k < state_coeffs.size(); ++k) p[K - k] -= state_coeffs[k];
    return p;
  }
  /// z^K G(z).
  ComplexPoly shifted_gradient() const {
    const int K = order();
    ComplexPoly p(K + 1, 0.0);
    for (std::size_t k = 0; k < grad_coeffs.size(); ++k) p[K - k] += grad_coeffs[k];
    return p;
  }
  /// G and z - S share no nonzero root.
  bool coprime(double tol = 1e-7) const {
    auto nonzero = [](std::vector<Complex> r) {
      r.erase(std::remove_if(r.begin(), r.end(), [](Complex z) { return std::abs(z) < 1e-12; }),
              r.end());
      return r;
    };
    const auto a = nonzero(poly_roots(shifted_gap()));
    const auto b = nonzero(poly_roots(shifted_gradient()));
    for (const auto& p : a)
      for (const auto& q : b)
        if (std::abs(p - q) <= tol * (1.0 + std::abs(p))) return false;
    return true;
  }
  std::optional<double> ogd_step() const {
    if (state_coeffs.size() == 1 && state_coeffs[0] == 1.0 && grad_coeffs.size() == 2 &&
        grad_coeffs[0] > 0.0 && std::abs(grad_coeffs[1] + 0.5 * grad_coeffs[0]) <= 1e-15)
      return -grad_coeffs[1];
    return std::nullopt;
  }
};

inline bool is_real(Complex z) { return std::abs(z.imag()) <= kRealTol * (1.0 + std::abs(z.real())); }

inline void sort_complex(std::vector<Complex>& v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

/// Spectrum of a small square matrix: closed form for 2x2, symmetric solver
/// when possible, general QR otherwise.
inline std::vector<Complex> eigenvalues(const Mat& M) {
  if (M.rows() != M.cols()) throw DimensionError("eigenvalues need a square matrix");
  std::vector<Complex> out;
  if (M.rows() == 2) {
    const double tr = M.trace(), det = M.determinant();
    const Complex disc = std::sqrt(Complex(tr * tr / 4.0 - det, 0.0));
    out = {tr / 2.0 - disc, tr / 2.0 + disc};
  } else if (M.isApprox(M.transpose(), 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.emplace_back(es.eigenvalues()(k));
  } else {
    Eigen::EigenSolver<Mat> es(M, false);
    if (es.info() != Eigen::Success) throw Error("eigensolver did not converge");
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()(k));
  }
  for (auto& z : out)
    if (is_real(z)) z = Complex(z.real(), 0.0);
  sort_complex(out);
  return out;
}

inline double spectral_radius(const std::vector<Complex>& eig) {
  double r = 0.0;
  for (const auto& z : eig) r = std::max(r, std::abs(z));
  return r;
}

/// All roots of the characteristic equation (z - S)^2 = mu G^2 over the
/// eigenvalues mu of the coupling matrix.
inline std::vector<Complex> method_roots(const HgdMethod& m, const std::vector<Complex>& eig) {
  const ComplexPoly gap = m.shifted_gap(), grad = m.shifted_gradient();
  std::vector<Complex> roots;
  for (const auto& mu : eig) {
    const Complex s = std::sqrt(mu);
    for (double sign : {1.0, -1.0}) {
      const auto r = poly_roots(poly_add(gap, poly_scale(grad, -sign * s)));
      roots.insert(roots.end(), r.begin(), r.end());
    }
  }
  return roots;
}

struct RootMagnitudes {
  double plus;
  double minus;
  bool in_regime;  // eta <= 1/(2 sqrt(lambda)): closed form applies
};

/// |z+-| for the OGD roots induced by the eigenvalue -lambda of the coupling.
inline RootMagnitudes characteristic_roots(double lambda, double eta) {
  if (!(lambda > 0.0) || !(eta > 0.0)) throw DomainError("need lambda > 0 and eta > 0");
  const double disc = 1.0 - 4.0 * eta * eta * lambda;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    return {std::sqrt(0.5 * (1.0 + r)), std::sqrt(0.5 * (1.0 - r)), true};
  }
  const auto roots = method_roots(HgdMethod::ogd(eta), {Complex(-lambda, 0.0)});
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (const auto& z : roots) {
    hi = std::max(hi, std::abs(z));
    lo = std::min(lo, std::abs(z));
  }
  return {hi, lo, false};
}

enum class Verdict { converge, diverge, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converge: return "Converge";
    case Verdict::diverge: return "Diverge";
    case Verdict::inconclusive: return "Inconclusive";
  }
  return "?";
}

struct SpectralReport {
  std::vector<Complex> eigenvalues;
  double gamma = 0.0;  // spectral radius of the coupling
  std::string condition;
  Verdict verdict = Verdict::inconclusive;
  std::optional<double> predicted_rate;
  std::optional<Complex> witness;
  bool theorem_regime = false;
  double max_root_modulus = 0.0;
};

/// Verdict from the spectrum of the coupling matrix (A^T B or the one-vs-many sum).
inline SpectralReport spectral_predict_coupling(const Mat& coupling, const HgdMethod& method) {
  SpectralReport r;
  r.eigenvalues = eigenvalues(coupling);
  r.gamma = spectral_radius(r.eigenvalues);
  const double zero_tol = 1e-12 * (1.0 + r.gamma);
  bool any_positive = false, all_negative = true;
  for (const auto& z : r.eigenvalues) {
    const bool real = is_real(z);
    if (real && z.real() > zero_tol) any_positive = true;
    if (!(real && z.real() < -zero_tol)) all_negative = false;
  }
  const auto roots = method_roots(method, r.eigenvalues);
  Complex top = 0.0;
  for (const auto& z : roots)
    if (std::abs(z) > std::abs(top)) top = z;
  r.max_root_modulus = std::abs(top);

  auto decide_from_roots = [&]() {
    r.theorem_regime = false;
    if (r.max_root_modulus < 1.0 - 1e-12) {
      r.verdict = Verdict::converge;
      r.predicted_rate = r.max_root_modulus;
    } else if (r.max_root_modulus > 1.0 + 1e-12) {
      r.verdict = Verdict::diverge;
      r.witness = top;
      r.predicted_rate = r.max_root_modulus;
    }
  };

  if (any_positive) {
    r.condition = "positive real eigenvalue";
    if (method.regular() && method.coprime()) {
      r.verdict = Verdict::diverge;
      r.theorem_regime = true;
      // a real root beyond 1 exists for regular methods; report the largest one
      Complex best = 0.0;
      for (const auto& z : roots)
        if (is_real(z) && z.real() > 1.0 && z.real() > best.real()) best = Complex(z.real(), 0.0);
      if (best.real() > 1.0) r.witness = best;
      else r.witness = top;
      r.predicted_rate = r.max_root_modulus;
    } else {
      decide_from_roots();
    }
  } else if (all_negative) {
    r.condition = "negative real spectrum";
    const auto eta = method.ogd_step();
    if (eta && *eta <= 1.0 / (2.0 * std::sqrt(r.gamma)) * (1.0 + 1e-12)) {
      r.verdict = Verdict::converge;
      r.theorem_regime = true;
      double rate = 0.0;
      for (const auto& z : r.eigenvalues)
        rate = std::max(rate, characteristic_roots(-z.real(), *eta).plus);
      r.predicted_rate = rate;
    } else {
      decide_from_roots();
    }
  } else {
    r.condition = "complex or zero eigenvalue";
  }
  return r;
}

inline SpectralReport spectral_predict(const BilinearGame& g, const HgdMethod& m) {
  g.validate();
  return spectral_predict_coupling(g.coupling(), m);
}

inline SpectralReport spectral_predict(const OneVsManyGame& g, const HgdMethod& m) {
  g.validate();
  return spectral_predict_coupling(g.coupling(), m);
}

struct SimulationOptions {
  long max_steps = 1000;
  double halt_norm = kDivergenceNorm;
  double stop_below = 0.0;  // stop once the joint norm falls below this
  int plateau_window = 100;
  double plateau_tol = 1e-9;
  bool record_states = false;
};

struct Trajectory {
  std::vector<double> norm;  // joint l2 norm per step, index 0 = start
  std::vector<Vec> states;   // filled when requested
  Vec final_state;
  bool diverged = false;
  long diverged_at = -1;
  bool converged = false;
  bool projection_active = false;
};

/// Simulates the method on the linear gradient map z -> J z, with player
/// blocks of the given sizes and an optional l1-ball constraint per block.
inline Trajectory simulate_linear(const Mat& J, const std::vector<int>& blocks,
                                  const HgdMethod& m, const Vec& z0,
                                  const SimulationOptions& opt = {},
                                  std::optional<double> radius = std::nullopt) {
  if (J.rows() != J.cols() || J.rows() != z0.size()) throw DimensionError("state size mismatch");
  const int K = m.order();
  std::deque<Vec> states(K + 1, z0);  // newest first; pre-history repeats the start
  std::deque<Vec> grads(K + 1, J * z0);
  Trajectory tr;
  tr.norm.push_back(z0.norm());
  if (opt.record_states) tr.states.push_back(z0);
  for (long t = 0; t < opt.max_steps; ++t) {
    Vec next = Vec::Zero(z0.size());
    for (std::size_t k = 0; k < m.state_coeffs.size(); ++k) next += m.state_coeffs[k] * states[k];
    for (std::size_t k = 0; k < m.grad_coeffs.size(); ++k) next += m.grad_coeffs[k] * grads[k];
    if (radius) {
      int off = 0;
      for (int b : blocks) {
        const Vec seg = next.segment(off, b);
        if (seg.lpNorm<1>() > *radius) {
          tr.projection_active = true;
          next.segment(off, b) = project_l1_ball(seg, *radius);
        }
        off += b;
      }
    }
    states.push_front(next);
    states.pop_back();
    grads.push_front(J * next);
    grads.pop_back();
    const double nrm = next.norm();
    tr.norm.push_back(nrm);
    if (opt.record_states) tr.states.push_back(next);
    if (!std::isfinite(nrm) || nrm > opt.halt_norm) {
      tr.diverged = true;
      tr.diverged_at = t + 1;
      break;
    }
    if (opt.stop_below > 0.0 && nrm < opt.stop_below) break;
  }
  tr.final_state = states.front();
  const long n = static_cast<long>(tr.norm.size());
  if (!tr.diverged && n > opt.plateau_window) {
    // compare against the state plateau_window steps back
    if (opt.record_states) {
      const double change = (tr.states[n - 1] - tr.states[n - 1 - opt.plateau_window]).norm();
      tr.converged = change <= opt.plateau_tol * (1.0 + z0.norm());
    } else {
      const double change = std::abs(tr.norm[n - 1] - tr.norm[n - 1 - opt.plateau_window]);
      tr.converged = change <= opt.plateau_tol * (1.0 + z0.norm());
    }
  }
  if (!tr.diverged && opt.stop_below > 0.0 && tr.norm.back() < opt.stop_below) tr.converged = true;
  return tr;
}

inline Trajectory simulate(const BilinearGame& g, const HgdMethod& m, const Vec& x0,
                           const Vec& y0, const SimulationOptions& opt = {}) {
  g.validate();
  Vec z0(2 * g.dim());
  z0 << x0, y0;
  return simulate_linear(g.jacobian(), g.blocks(), m, z0, opt, g.radius);
}

inline Trajectory simulate(const OneVsManyGame& g, const HgdMethod& m, const Vec& z0,
                           const SimulationOptions& opt = {}) {
  g.validate();
  return simulate_linear(g.jacobian(), g.blocks(), m, z0, opt);
}

/// Per-step factor from a least-squares fit of log norm over steps [from, to).
inline double fit_linear_rate(const std::vector<double>& norm, long from, long to) {
  if (to - from < 2) throw DomainError("rate fit needs at least two points");
  double st = 0, sy = 0, stt = 0, sty = 0;
  long n = 0;
  for (long t = from; t < to; ++t) {
    if (!(norm[t] > 0.0)) continue;
    const double y = std::log(norm[t]);
    st += t;
    sy += y;
    stt += double(t) * t;
    sty += t * y;
    ++n;
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  return std::exp(slope);
}

/// Game (I, lambda I) whose coupling has the positive eigenvalue
/// lambda = ((1 + eps - S(1 + eps)) / G(1 + eps))^2, so z = 1 + eps solves the
/// characteristic equation.
inline BilinearGame adversarial_game_for(const HgdMethod& m, double eps = 1.0, int d = 2) {
  if (!m.regular()) throw DomainError("adversarial construction needs a regular method");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  for (int attempt = 0; attempt < 60; ++attempt, eps *= 0.5) {
    const double z = 1.0 + eps;
    const double s = m.S(z), g = m.G(z);
    if (std::abs(g) < 1e-12 || std::abs(z - s) < 1e-12) continue;
    const double lambda = std::pow((z - s) / g, 2);
    return {Mat::Identity(d, d), lambda * Mat::Identity(d, d), std::nullopt};
  }
  throw DomainError("no admissible eps found for the adversarial game");
}

inline BilinearGame inefficiency_game(std::optional<double> radius = std::nullopt) {
  Mat A(2, 2), B(2, 2);
  A << 1, -2, -1, 1;
  B << 1, 1, 1, -1;
  return {A, B, radius};
}

inline BilinearGame robustness_game(double eps) {
  Mat A = Mat::Zero(2, 2), B = Mat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = eps / 2.0;
  B(0, 0) = -1.0;
  B(1, 1) = eps / 2.0;
  return {A, B, std::nullopt};
}

struct InefficiencyReport {
  double radius = 0.0;
  std::vector<Vec> limits;       // final (x, y) per initialization
  double worst_limit_norm = 0.0;
  bool projection_active = false;
  double limit_welfare = 0.0;    // max |sw| over limits
  double equilibrium_welfare = 0.0;  // sw((R,0), (R,0)) = 2R^2
  double equilibrium_slack = 0.0;    // min over both players of best-deviation slack
};

inline InefficiencyReport inefficiency_demo(double R, const std::vector<Vec>& inits, double eta,
                                            long steps) {
  const BilinearGame g = inefficiency_game(R);
  InefficiencyReport rep;
  rep.radius = R;
  const auto m = HgdMethod::ogd(eta);
  SimulationOptions opt;
  opt.max_steps = steps;
  for (const auto& z0 : inits) {
    const auto tr = simulate_linear(g.jacobian(), g.blocks(), m, z0, opt, g.radius);
    rep.projection_active = rep.projection_active || tr.projection_active;
    rep.limits.push_back(tr.final_state);
    rep.worst_limit_norm = std::max(rep.worst_limit_norm, tr.final_state.norm());
    const Vec x = tr.final_state.head(2), y = tr.final_state.tail(2);
    rep.limit_welfare = std::max(rep.limit_welfare, std::abs(x.dot((g.A + g.B) * y)));
  }
  if (rep.projection_active) throw DomainError("ball constraint became active; enlarge R");
  Vec xs(2), ys(2);
  xs << R, 0.0;
  ys << R, 0.0;
  rep.equilibrium_welfare = xs.dot((g.A + g.B) * ys);
  // over the l1 ball, max_x x^T v = R ||v||_inf
  const double slack_x = xs.dot(g.A * ys) - R * norm_linf(g.A * ys);
  const double slack_y = xs.dot(g.B * ys) - R * norm_linf(g.B.transpose() * xs);
  rep.equilibrium_slack = std::min(slack_x, slack_y);
  return rep;
}

/// Random d x d pair with coupling A^T B = -P D P^{-1}, D well separated and positive.
inline BilinearGame random_negative_spectrum_game(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Mat A(d, d), P(d, d);
  do {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = U(rng) + (i == j ? 2.0 : 0.0);
  } while (std::abs(A.determinant()) < 0.1);
  do {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) P(i, j) = U(rng) + (i == j ? 2.0 : 0.0);
  } while (std::abs(P.determinant()) < 0.1);
  Vec D(d);
  std::uniform_real_distribution<double> Ul(0.5, 1.5);
  double level = Ul(rng);
  for (int k = 0; k < d; ++k) {
    D(k) = level;
    level *= 1.5 + 0.5 * (U(rng) + 1.0);
  }
  const Mat C = -P * D.asDiagonal() * P.inverse();
  const Mat B = A.transpose().inverse() * C;
  return {A, B, std::nullopt};
}

}  // namespace gamelab

#endif  // GAMELAB_CONTINUOUS_HPP
