#ifndef GAMELAB_REGULARIZERS_HPP
#define GAMELAB_REGULARIZERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "common.hpp"

namespace gamelab {

inline constexpr double kEntropyFloor = 1e-300;

/// Euclidean projection onto {x >= 0, sum x = radius} by sorting.
inline Vec project_scaled_simplex(const Vec& v, double radius) {
  if (v.size() == 0) throw DimensionError("cannot project an empty vector");
  if (!(radius > 0.0)) throw DomainError("simplex radius must be positive");
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (!std::isfinite(v(k))) throw DomainError("non-finite input to simplex projection");
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cum += s[j];
    const double t = (cum - radius) / static_cast<double>(j + 1);
    if (s[j] - t > 0.0) tau = t;
  }
  return (v.array() - tau).cwiseMax(0.0).matrix();
}

inline Vec project_simplex(const Vec& v) { return project_scaled_simplex(v, 1.0); }

/// Projection onto the l1 ball, reduced to a simplex projection of |v|.
inline Vec project_l1_ball(const Vec& v, double radius) {
  if (!(radius > 0.0)) throw DomainError("l1 ball radius must be positive");
  if (v.lpNorm<1>() <= radius) return v;
  const Vec mag = project_scaled_simplex(v.cwiseAbs(), radius);
  Vec out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out(k) = v(k) < 0 ? -mag(k) : mag(k);
  return out;
}

inline Vec softmax(const Vec& logits) {
  const double top = logits.maxCoeff();
  Vec w = (logits.array() - top).exp().matrix();
  w /= w.sum();
  return w.cwiseMax(kEntropyFloor);
}

enum class RegularizerKind { euclidean, negative_entropy };
enum class NormPair { l1_linf, l2_l2 };

inline std::string to_string(RegularizerKind k) {
  return k == RegularizerKind::euclidean ? "euclidean" : "entropy";
}

inline RegularizerKind regularizer_from_string(const std::string& s) {
  if (s == "euclidean" || s == "l2") return RegularizerKind::euclidean;
  if (s == "entropy" || s == "negative_entropy") return RegularizerKind::negative_entropy;
  throw ConfigError("unknown regularizer '" + s + "'");
}

/**
 * \brief 1-strongly convex regularizer on the probability simplex.
 *
 * Euclidean is strongly convex in l2, negative entropy in l1; norm_pair()
 * reports the primal/dual pair the regret bounds are stated in.
 */
struct Regularizer {
  RegularizerKind kind = RegularizerKind::euclidean;

  NormPair norm_pair() const {
    return kind == RegularizerKind::euclidean ? NormPair::l2_l2 : NormPair::l1_linf;
  }

  double value(const Vec& x) const {
    if (kind == RegularizerKind::euclidean) return 0.5 * x.squaredNorm();
    double s = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k)
      if (x(k) > 0.0) s += x(k) * std::log(x(k));
    return s;
  }

  Vec gradient(const Vec& x) const {
    if (kind == RegularizerKind::euclidean) return x;
    if (x.minCoeff() <= 0.0) throw DomainError("entropy gradient needs a positive point");
    return (x.array().log() + 1.0).matrix();
  }

  /// D(x, y) = R(x) - R(y) - <grad R(y), x - y>.
  double bregman(const Vec& x, const Vec& y) const {
    if (x.size() != y.size()) throw DimensionError("bregman arguments differ in length");
    if (kind == RegularizerKind::euclidean) return 0.5 * (x - y).squaredNorm();
    double s = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (x(k) < 0.0 || y(k) < 0.0) throw DomainError("entropy divergence of a negative point");
      if (x(k) > 0.0) {
        if (y(k) == 0.0) throw DomainError("entropy divergence to a point with zero coordinate");
        s += x(k) * std::log(x(k) / y(k));
      }
      s += y(k) - x(k);
    }
    return std::max(s, 0.0);
  }

  /// argmax_x <g, x> - D(x, anchor) / eta over the simplex.
  Vec prox(const Vec& anchor, const Vec& g, double eta) const {
    if (anchor.size() != g.size()) throw DimensionError("prox arguments differ in length");
    if (!(eta > 0.0)) throw DomainError("step size must be positive");
    if (kind == RegularizerKind::euclidean) return project_simplex(anchor + eta * g);
    const Vec logits = anchor.cwiseMax(kEntropyFloor).array().log().matrix() + eta * g;
    return softmax(logits);
  }

  /// argmax_x <s, x> - R(x) / eta over the simplex.
  Vec leader(const Vec& s, double eta) const {
    if (!(eta > 0.0)) throw DomainError("step size must be positive");
    if (kind == RegularizerKind::euclidean) return project_simplex(eta * s);
    return softmax(eta * s);
  }

  /// sup_x D(x, uniform), the range term for mirror descent from the center.
  double range_from_center(int d) const {
    if (kind == RegularizerKind::euclidean) return 0.5 * (1.0 - 1.0 / d);
    return std::log(static_cast<double>(d));
  }

  /// sup_x R(x) - inf_x R(x); equals range_from_center for both kinds.
  double range(int d) const { return range_from_center(d); }

  /// sup_{x,y} D(x, y); unbounded for entropy.
  double divergence_diameter(int) const {
    if (kind == RegularizerKind::euclidean) return 1.0;
    return std::numeric_limits<double>::infinity();
  }

  /// Lipschitz constant of grad R in the l2 norm; infinite for entropy.
  double gradient_lipschitz() const {
    return kind == RegularizerKind::euclidean ? 1.0 : std::numeric_limits<double>::infinity();
  }
};

inline double simplex_l2_diameter() { return std::sqrt(2.0); }

/// Norm constants with C ||.||_2 <= ||.|| <= C* ||.||_2 for the l2 pair used by
/// the last-iterate analysis, where the primal norm is l2 scaled to the simplex.
struct NormConstants {
  double lower;
  double upper;
};

inline NormConstants l2_norm_constants(int d) {
  return {1.0 / std::sqrt(static_cast<double>(d)), std::sqrt(static_cast<double>(d))};
}

}  // namespace gamelab

#endif  // GAMELAB_REGULARIZERS_HPP
