#ifndef GAMELAB_TESTS_ORACLES_HPP
#define GAMELAB_TESTS_ORACLES_HPP

// Reference computations for the tests. Each one is written from the
// definition and avoids the library routine it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Visits every pure profile of the given action counts.
inline void for_each_profile(const std::vector<int>& counts,
                             const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(counts.size(), 0);
  while (true) {
    fn(a);
    int i = static_cast<int>(counts.size()) - 1;
    while (i >= 0 && ++a[i] == counts[i]) a[i--] = 0;
    if (i < 0) return;
  }
}

/// E_{a ~ x} f(a) by summing probability-weighted entries over all profiles.
inline double expectation(const std::vector<int>& counts, const std::vector<Vec>& x,
                          const std::function<double(const std::vector<int>&)>& f) {
  double s = 0.0;
  for_each_profile(counts, [&](const std::vector<int>& a) {
    double p = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) p *= x[i](a[i]);
    s += p * f(a);
  });
  return s;
}

/// Euclidean simplex projection by bisection on the threshold tau.
inline Vec simplex_projection_bisect(const Vec& v) {
  double lo = v.minCoeff() - 1.0, hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = (v.array() - mid).max(0.0).sum();
    (s > 1.0 ? lo : hi) = mid;
  }
  return (v.array() - 0.5 * (lo + hi)).max(0.0).matrix();
}

/// Whether x = max(v - tau, 0) for some tau with sum x = 1.
inline bool satisfies_projection_kkt(const Vec& v, const Vec& x, double tol) {
  if (std::abs(x.sum() - 1.0) > tol || x.minCoeff() < -tol) return false;
  double tau = 0.0;
  int support = 0;
  for (int k = 0; k < v.size(); ++k)
    if (x(k) > tol) tau += v(k) - x(k), ++support;
  if (support == 0) return false;
  tau /= support;
  for (int k = 0; k < v.size(); ++k) {
    if (x(k) > tol && std::abs(v(k) - x(k) - tau) > tol) return false;
    if (x(k) <= tol && v(k) > tau + tol) return false;
  }
  return true;
}

inline double kl(const Vec& p, const Vec& q) {
  double s = 0.0;
  for (int k = 0; k < p.size(); ++k)
    if (p(k) > 0.0) s += p(k) * std::log(p(k) / q(k));
  return s;
}

/// Largest singular value from the eigenvalues of A^T A.
inline double spectral_norm_eig(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A.transpose() * A);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

/// Roots of a real polynomial (ascending coefficients) by Durand-Kerner.
inline std::vector<std::complex<double>> durand_kerner(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<std::complex<double>> z(n);
  const std::complex<double> seed(0.4, 0.9);
  for (int k = 0; k < n; ++k) z[k] = std::pow(seed, k);
  auto eval = [&](std::complex<double> x) {
    std::complex<double> acc = 0.0;
    for (int k = n; k >= 0; --k) acc = acc * x + c[k];
    return acc / c[n];
  };
  for (int it = 0; it < 2000; ++it)
    for (int k = 0; k < n; ++k) {
      std::complex<double> den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != k) den *= z[k] - z[j];
      z[k] -= eval(z[k]) / den;
    }
  return z;
}

/// Central finite difference of f along coordinate k.
inline double central_difference(const std::function<double(const Vec&)>& f, Vec x, int k,
                                 double h = 1e-5) {
  const double x0 = x(k);
  x(k) = x0 + h;
  const double up = f(x);
  x(k) = x0 - h;
  const double dn = f(x);
  return (up - dn) / (2.0 * h);
}

inline Vec random_simplex_point(std::mt19937_64& rng, int d) {
  std::exponential_distribution<double> E(1.0);
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = E(rng) + 1e-4;
  return v / v.sum();
}

}  // namespace oracle

#endif  // GAMELAB_TESTS_ORACLES_HPP
