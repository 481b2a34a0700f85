#ifndef GAMELAB_TREEPLEX_HPP
#define GAMELAB_TREEPLEX_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"

namespace gamelab {

/// Decision point: sequences that extend the parent sequence (index 0 is the empty sequence).
struct Infoset {
  int parent = 0;
  std::vector<int> children;
};

struct ProjectionStats {
  long iterations = 0;
  double last_move = 0.0;
  bool polished = false;
  bool capped = false;
};

/**
 * \brief Sequence-form strategy polytope of a perfect-recall player.
 *
 * Infosets must be listed top-down: an infoset's parent sequence belongs to an
 * earlier infoset or is the empty sequence.
 */
class Treeplex {
 public:
  Treeplex() = default;
  Treeplex(int num_sequences, std::vector<Infoset> infosets)
      : n_(num_sequences), sets_(std::move(infosets)) {
    if (n_ < 2) throw DimensionError("treeplex needs at least one non-empty sequence");
    std::vector<int> owner(n_, -1);
    std::vector<bool> defined(n_, false);
    defined[0] = true;
    for (std::size_t s = 0; s < sets_.size(); ++s) {
      const auto& I = sets_[s];
      if (I.parent < 0 || I.parent >= n_ || !defined[I.parent])
        throw DomainError("infoset " + std::to_string(s) + " has an undefined parent");
      if (I.children.empty()) throw DomainError("infoset without actions");
      for (int c : I.children) {
        if (c <= 0 || c >= n_ || owner[c] != -1) throw DomainError("sequence indices overlap");
        owner[c] = static_cast<int>(s);
        defined[c] = true;
      }
    }
    for (int k = 1; k < n_; ++k)
      if (owner[k] == -1) throw DomainError("sequence " + std::to_string(k) + " has no infoset");
    build_affine();
  }

  /// The simplex over d actions as a one-infoset treeplex (dimension d + 1).
  static Treeplex simplex(int d) {
    Infoset I{0, {}};
    for (int k = 1; k <= d; ++k) I.children.push_back(k);
    return Treeplex(d + 1, {I});
  }

  int dim() const { return n_; }
  const std::vector<Infoset>& infosets() const { return sets_; }

  /// Largest violation of flow conservation, the root constraint, or nonnegativity.
  double infeasibility(const Vec& x) const {
    if (x.size() != n_) throw DimensionError("treeplex point has wrong dimension");
    double worst = std::abs(x(0) - 1.0);
    for (const auto& I : sets_) {
      double s = 0.0;
      for (int c : I.children) s += x(c);
      worst = std::max(worst, std::abs(s - x(I.parent)));
    }
    return std::max(worst, std::max(0.0, -x.minCoeff()));
  }
  bool contains(const Vec& x, double tol = 1e-8) const { return infeasibility(x) <= tol; }

  /// max <g, x> over the treeplex by a bottom-up pass; returns the value and a maximizing vertex.
  std::pair<double, Vec> best_response(const Vec& g) const {
    if (g.size() != n_) throw DimensionError("gradient has wrong dimension");
    Vec value = g;
    std::vector<int> choice(sets_.size(), -1);
    for (int s = static_cast<int>(sets_.size()) - 1; s >= 0; --s) {
      const auto& I = sets_[s];
      int best = I.children[0];
      for (int c : I.children)
        if (value(c) > value(best)) best = c;
      choice[s] = best;
      value(I.parent) += value(best);
    }
    Vec v = Vec::Zero(n_);
    v(0) = 1.0;
    for (std::size_t s = 0; s < sets_.size(); ++s)
      if (v(sets_[s].parent) > 0.0) v(choice[s]) = 1.0;
    return {value(0), v};
  }

  /// Every pure sequence-form strategy (reduced: unreachable choices collapsed).
  std::vector<Vec> vertices(std::size_t cap = 1'000'000) const {
    std::vector<Vec> out;
    Vec v = Vec::Zero(n_);
    v(0) = 1.0;
    enumerate(0, v, out, cap);
    return out;
  }

  /// Euclidean projection by Dykstra's method between the affine hull of the
  /// flow constraints and the nonnegative orthant. Once the support settles,
  /// an exact solve on the support is accepted if it passes the optimality
  /// conditions.
  Vec project(const Vec& p, ProjectionStats* stats = nullptr, double tol = 1e-10,
              long cap = 100'000) const {
    if (p.size() != n_) throw DimensionError("projection input has wrong dimension");
    if (!p.allFinite()) throw DomainError("non-finite projection input");
    ProjectionStats st;
    Vec x = p, q_aff = Vec::Zero(n_), q_pos = Vec::Zero(n_);
    Vec result;
    for (long it = 1; it <= cap; ++it) {
      const Vec a = affine_projection(x + q_aff);
      q_aff = x + q_aff - a;
      const Vec b = (a + q_pos).cwiseMax(0.0);
      q_pos = a + q_pos - b;
      st.last_move = (b - x).norm();
      x = b;
      st.iterations = it;
      if (it % 8 == 0 || st.last_move < tol) {
        Vec exact;
        if (polish(p, x, exact)) {
          st.polished = true;
          result = exact;
          break;
        }
      }
      if (st.last_move < tol) {
        result = x;
        break;
      }
    }
    if (result.size() == 0) {
      st.capped = true;
      result = x;
    }
    if (stats) *stats = st;
    return result;
  }

  /// Projection of the origin, the minimizer of the squared norm.
  Vec center() const { return project(Vec::Zero(n_)); }

 private:
  void enumerate(std::size_t s, Vec& v, std::vector<Vec>& out, std::size_t cap) const {
    if (out.size() >= cap) throw CapExceeded("treeplex vertex enumeration cap exceeded");
    if (s == sets_.size()) {
      out.push_back(v);
      return;
    }
    const auto& I = sets_[s];
    if (v(I.parent) == 0.0) {
      enumerate(s + 1, v, out, cap);
      return;
    }
    for (int c : I.children) {
      v(c) = 1.0;
      enumerate(s + 1, v, out, cap);
      v(c) = 0.0;
    }
  }

  void build_affine() {
    const int m = static_cast<int>(sets_.size()) + 1;
    C_ = Mat::Zero(m, n_);
    rhs_ = Vec::Zero(m);
    C_(0, 0) = 1.0;
    rhs_(0) = 1.0;
    for (std::size_t s = 0; s < sets_.size(); ++s) {
      C_(s + 1, sets_[s].parent) = -1.0;
      for (int c : sets_[s].children) C_(s + 1, c) = 1.0;
    }
    const Mat CCt = C_ * C_.transpose();
    const Mat CCt_inv = CCt.inverse();
    proj_ = Mat::Identity(n_, n_) - C_.transpose() * CCt_inv * C_;
    offset_ = C_.transpose() * (CCt_inv * rhs_);
  }

  Vec affine_projection(const Vec& v) const { return proj_ * v + offset_; }

  /// Solves the projection with the zero set of guess fixed and checks KKT.
  bool polish(const Vec& p, const Vec& guess, Vec& out) const {
    std::vector<int> free;
    for (int k = 0; k < n_; ++k)
      if (guess(k) > 1e-12) free.push_back(k);
    const int f = static_cast<int>(free.size());
    if (f == 0) return false;
    Mat Cf(C_.rows(), f);
    Vec pf(f);
    for (int k = 0; k < f; ++k) {
      Cf.col(k) = C_.col(free[k]);
      pf(k) = p(free[k]);
    }
    // x_F = p_F - C_F^T nu with C_F x_F = rhs
    const Mat K = Cf * Cf.transpose();
    const Eigen::CompleteOrthogonalDecomposition<Mat> cod(K);
    const Vec nu = cod.solve(Cf * pf - rhs_);
    const Vec xf = pf - Cf.transpose() * nu;
    if (xf.minCoeff() < -1e-13) return false;
    Vec x = Vec::Zero(n_);
    for (int k = 0; k < f; ++k) x(free[k]) = std::max(0.0, xf(k));
    if (infeasibility(x) > 1e-12) return false;
    // multipliers of the active nonnegativity constraints must be nonnegative
    const Vec mu = x - p + C_.transpose() * nu;
    for (int k = 0; k < n_; ++k)
      if (guess(k) <= 1e-12 && mu(k) < -1e-12) return false;
    out = x;
    return true;
  }

  int n_ = 0;
  std::vector<Infoset> sets_;
  Mat C_, proj_;
  Vec rhs_, offset_;
};

}  // namespace gamelab

#endif  // GAMELAB_TREEPLEX_HPP
