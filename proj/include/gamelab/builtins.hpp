#ifndef GAMELAB_BUILTINS_HPP
#define GAMELAB_BUILTINS_HPP

#include <optional>
#include <string>
#include <vector>

#include "bspp.hpp"
#include "continuous.hpp"
#include "game.hpp"
#include "game_classes.hpp"

namespace gamelab {

/// Row player's cost matrix of the three reference 3x3 matrix games (j = 1..3).
inline Mat reference_cost_matrix(int j) {
  Mat A(3, 3);
  switch (j) {
    case 1: A << 1, -1, -1, -1, -1, 0, -0.5, 0, -1; break;
    case 2: A << 1, -2, -1, -1, 1, 0, -0.5, 1, -1; break;
    case 3: A << -1, 1, -1, 0, 0.5, -1, 0.3, -0.5, -0.5; break;
    default: throw ConfigError("reference games are numbered 1..3");
  }
  return A;
}

/// Column player's cost matrix in the general-sum variants (j = 1..3).
inline Mat reference_column_cost_matrix(int j) {
  Mat B(3, 3);
  switch (j) {
    case 1: B << -1, 0.5, 1, 0, 0.5, 0.5, -0.25, 0, 1; break;
    case 2: B << 0.3, 0, 0.3, -0.2, 0.25, 0.3, -0.35, 0.75, 0.05; break;
    case 3: B << 0.7, 0.5, 0.56, 0.4, 0.4, 0.7, 0.5, 0.6, 0.5; break;
    default: throw ConfigError("reference games are numbered 1..3");
  }
  return B;
}

/// Step size used by the robustness builtin.
inline constexpr double kRobustnessEps = 0.05;

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "kuhn",  "zero_sum_1", "zero_sum_2",   "zero_sum_3", "szs_1",
      "szs_2", "szs_3",      "inefficiency", "robustness"};
  return names;
}

inline bool is_builtin(const std::string& name) {
  for (const auto& n : builtin_names())
    if (n == name) return true;
  return false;
}

namespace detail {
inline std::optional<int> suffix_index(const std::string& name, const std::string& stem) {
  if (name.size() != stem.size() + 1 || name.compare(0, stem.size(), stem) != 0) return std::nullopt;
  const char c = name.back();
  if (c < '1' || c > '3') return std::nullopt;
  return c - '0';
}
}  // namespace detail

/// Normal-form builtins, ingested in cost orientation.
inline std::optional<NormalFormGame> builtin_nfg(const std::string& name) {
  if (auto j = detail::suffix_index(name, "zero_sum_")) {
    const Mat A = reference_cost_matrix(*j);
    return bimatrix_game(A, -A, Orientation::minimize);
  }
  if (auto j = detail::suffix_index(name, "szs_"))
    return bimatrix_game(reference_cost_matrix(*j), reference_column_cost_matrix(*j),
                         Orientation::minimize);
  return std::nullopt;
}

/// Saddle-point builtins: Kuhn poker and the zero-sum matrix games (x pays A).
inline std::optional<Bspp> builtin_bspp(const std::string& name) {
  if (name == "kuhn") return build_kuhn();
  if (auto j = detail::suffix_index(name, "zero_sum_"))
    return simplex_bspp(reference_cost_matrix(*j), name);
  return std::nullopt;
}

inline std::optional<BilinearGame> builtin_bilinear(const std::string& name) {
  if (name == "inefficiency") return inefficiency_game();
  if (name == "robustness") return robustness_game(kRobustnessEps);
  return std::nullopt;
}

}  // namespace gamelab

#endif  // GAMELAB_BUILTINS_HPP
