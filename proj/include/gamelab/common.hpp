#ifndef GAMELAB_COMMON_HPP
#define GAMELAB_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace gamelab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/** \brief Base class for every error raised by the library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/** \brief Thrown when an exhaustive enumeration would exceed its cap. */
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/** \brief A theorem-backed inequality failed at a specific iteration. */
class CertificateViolation : public Error {
 public:
  CertificateViolation(const std::string& what, long iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

inline Vec uniform_point(int d) {
  if (d <= 0) throw DimensionError("action count must be positive");
  return Vec::Constant(d, 1.0 / d);
}

inline bool on_simplex(const Vec& x, double tol = 1e-9) {
  if (x.size() == 0) return false;
  if (x.minCoeff() < -tol) return false;
  return std::abs(x.sum() - 1.0) <= tol;
}

inline double norm_l1(const Vec& v) { return v.lpNorm<1>(); }
inline double norm_linf(const Vec& v) {
  return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
}

/// Shortest round-trip decimal form; used for every CSV and JSON number.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace gamelab

#endif  // GAMELAB_COMMON_HPP
