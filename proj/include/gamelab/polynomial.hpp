#ifndef GAMELAB_POLYNOMIAL_HPP
#define GAMELAB_POLYNOMIAL_HPP

#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "common.hpp"

namespace gamelab {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;

/// Coefficient lists run from the constant term upward.
using RealPoly = std::vector<double>;
using ComplexPoly = std::vector<Complex>;

template <typename Poly, typename Z>
Z poly_eval(const Poly& c, Z z) {
  Z acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + Z(*it);
  return acc;
}

/// Roots via the eigenvalues of the companion matrix; leading zeros are dropped.
inline std::vector<Complex> poly_roots(ComplexPoly c) {
  while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
  if (c.empty()) throw DomainError("the zero polynomial has no finite root set");
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg == 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int k = 1; k < deg; ++k) comp(k, k - 1) = 1.0;
  for (int k = 0; k < deg; ++k) comp(k, deg - 1) = -c[k] / c[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw Error("companion eigensolver did not converge");
  const CVec v = es.eigenvalues();
  return std::vector<Complex>(v.data(), v.data() + v.size());
}

inline std::vector<Complex> poly_roots(const RealPoly& c) {
  return poly_roots(ComplexPoly(c.begin(), c.end()));
}

/// det(z I - M) by the Faddeev-LeVerrier recursion.
inline RealPoly characteristic_polynomial(const Mat& M) {
  if (M.rows() != M.cols()) throw DimensionError("characteristic polynomial needs a square matrix");
  const int n = static_cast<int>(M.rows());
  RealPoly c(n + 1, 0.0);
  c[n] = 1.0;
  Mat Mk = Mat::Zero(n, n);
  const Mat I = Mat::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    Mk = M * Mk + c[n - k + 1] * I;
    c[n - k] = -(M * Mk).trace() / k;
  }
  return c;
}

inline ComplexPoly poly_add(const ComplexPoly& a, const ComplexPoly& b) {
  ComplexPoly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) r[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) r[k] += b[k];
  return r;
}

inline ComplexPoly poly_scale(const ComplexPoly& a, Complex s) {
  ComplexPoly r(a);
  for (auto& v : r) v *= s;
  return r;
}

/// Smallest distance between a root of p and a root of q.
inline double root_separation(const ComplexPoly& p, const ComplexPoly& q) {
  const auto rp = poly_roots(p), rq = poly_roots(q);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : rp)
    for (const auto& b : rq) best = std::min(best, std::abs(a - b));
  return best;
}

}  // namespace gamelab

#endif  // GAMELAB_POLYNOMIAL_HPP
