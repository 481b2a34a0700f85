#ifndef GAMELAB_IO_HPP
#define GAMELAB_IO_HPP

// JSON and CSV plumbing for the command-line driver. Needs nlohmann/json on
// the include path.

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "builtins.hpp"
#include "fisher.hpp"
#include "game.hpp"
#include "game_classes.hpp"
#include "learners.hpp"
#include "metrics.hpp"
#include "potential.hpp"

namespace gamelab {

using Json = nlohmann::ordered_json;

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

template <typename T>
T json_get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

inline const Json& json_require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j[key];
}

inline Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected a numeric array");
  Vec v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw ConfigError("expected a numeric array");
    v(k) = j[k].get<double>();
  }
  return v;
}

inline Mat mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("expected a nested matrix");
  const std::size_t cols = j[0].size();
  Mat m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError("ragged matrix rows");
    m.row(r) = vec_from_json(j[r]).transpose();
  }
  return m;
}

inline Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

inline Json to_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vec(m.row(r).transpose())));
  return a;
}

/// Row-major nested array of the given shape, first index outermost.
inline std::vector<double> flatten_tensor(const Json& j, const std::vector<int>& shape,
                                          std::size_t depth = 0) {
  if (depth == shape.size()) {
    if (!j.is_number()) throw ConfigError("tensor entry is not a number");
    return {j.get<double>()};
  }
  if (!j.is_array() || static_cast<int>(j.size()) != shape[depth])
    throw ConfigError("tensor shape does not match action_counts");
  std::vector<double> out;
  for (const auto& e : j) {
    auto part = flatten_tensor(e, shape, depth + 1);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

/// Converts a row-major table (first player outermost) to the game's layout.
inline std::vector<double> table_to_game_order(const NormalFormGame& g,
                                               const std::vector<double>& row_major) {
  std::vector<double> out(g.num_profiles());
  const auto& counts = g.action_counts();
  for (std::size_t k = 0; k < g.num_profiles(); ++k) {
    const PureProfile a = g.profile_of(k);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) idx = idx * counts[i] + a[i];
    out[k] = row_major[idx];
  }
  return out;
}

inline Orientation orientation_from_json(const Json& j) {
  const std::string o = json_get<std::string>(j, "orientation", "maximize");
  if (o == "maximize") return Orientation::maximize;
  if (o == "minimize") return Orientation::minimize;
  throw ConfigError("orientation must be 'maximize' or 'minimize'");
}

inline PolymatrixGame polymatrix_from_json(const Json& j) {
  PolymatrixGame pg;
  pg.action_counts = json_require(j, "action_counts").get<std::vector<int>>();
  for (const auto& e : json_require(j, "edges")) {
    pg.edges.push_back({json_require(e, "i").get<int>(), json_require(e, "j").get<int>(),
                        mat_from_json(json_require(e, "A_ij")),
                        mat_from_json(json_require(e, "A_ji"))});
  }
  pg.validate();
  return pg;
}

/**
 * Game object: {action_counts, utilities: [per-player nested tensor]} or
 * {A, B} for a bimatrix or {action_counts, edges} for a polymatrix game, with
 * an optional orientation.
 */
inline NormalFormGame game_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("game must be a JSON object");
  const Orientation o = orientation_from_json(j);
  if (j.contains("A") && j.contains("B"))
    return bimatrix_game(mat_from_json(j["A"]), mat_from_json(j["B"]), o);
  if (j.contains("edges")) {
    const PolymatrixGame pg = polymatrix_from_json(j);
    if (o == Orientation::maximize) return polymatrix_to_nfg(pg);
    return NormalFormGame::from_function(
        pg.action_counts, [&](int i, const PureProfile& a) { return pg.utility(i, a); },
        std::vector<Orientation>(pg.action_counts.size(), o));
  }
  const auto counts = json_require(j, "action_counts").get<std::vector<int>>();
  const Json& util = json_require(j, "utilities");
  if (j.contains("players") && j["players"].get<std::size_t>() != counts.size())
    throw ConfigError("players disagrees with action_counts");
  if (!util.is_array() || util.size() != counts.size())
    throw ConfigError("one utility tensor per player expected");
  std::vector<std::vector<double>> rm;
  for (const auto& t : util) rm.push_back(flatten_tensor(t, counts));
  return NormalFormGame::from_function(
      counts,
      [&](int i, const PureProfile& a) {
        std::size_t idx = 0;
        for (std::size_t p = 0; p < counts.size(); ++p) idx = idx * counts[p] + a[p];
        return rm[i][idx];
      },
      std::vector<Orientation>(counts.size(), o));
}

/// Potential game object: a game object plus {phi_table, weights}.
inline PotentialGame potential_game_from_json(const Json& j) {
  NormalFormGame g = game_from_json(j);
  const auto phi_rm = flatten_tensor(json_require(j, "phi_table"), g.action_counts());
  auto weights = json_get<std::vector<double>>(j, "weights", {});
  return make_potential_game(g, table_to_game_order(g, phi_rm), weights);
}

inline FisherMarket market_from_json(const Json& j) {
  Mat u = mat_from_json(json_require(j, "utilities"));
  std::optional<Vec> b;
  if (j.contains("budgets")) b = vec_from_json(j["budgets"]);
  return make_market(std::move(u), b);
}

inline PredictionMechanism prediction_from_json(const Json& j) {
  if (j.is_null()) return PredictionMechanism::one_step();
  if (j.is_string()) {
    if (j.get<std::string>() == "one_step") return PredictionMechanism::one_step();
    throw ConfigError("prediction '" + j.get<std::string>() + "' needs parameters");
  }
  const std::string kind = json_get<std::string>(j, "kind", "one_step");
  if (kind == "one_step") return PredictionMechanism::one_step();
  if (kind == "h_step") return PredictionMechanism::h_step(json_get<int>(j, "H", 1));
  if (kind == "h_order") return PredictionMechanism::h_order(json_get<int>(j, "H", 1));
  if (kind == "discounted") return PredictionMechanism::discounted(json_get<double>(j, "delta", 0.5));
  throw ConfigError("unknown prediction kind '" + kind + "'");
}

inline LearnerConfig learner_from_json(const Json& j, double default_eta) {
  LearnerConfig c;
  c.algorithm = algorithm_from_string(json_get<std::string>(j, "algorithm", "omd"));
  const std::string reg = json_get<std::string>(
      j, "regularizer", c.algorithm == Algorithm::omwu ? "negative_entropy" : "euclidean");
  c.regularizer = Regularizer{regularizer_from_string(reg)};
  c.eta = json_get<double>(j, "eta", default_eta);
  if (j.contains("prediction")) c.prediction = prediction_from_json(j["prediction"]);
  const std::string tr = json_get<std::string>(j, "transform", "identity");
  if (tr == "identity") c.transform = Transform::identity;
  else if (tr == "log_shift") c.transform = Transform::log_shift;
  else throw ConfigError("unknown transform '" + tr + "'");
  c.validate();
  return c;
}

/// {"name": "ogd"|"gd", "eta": ...} or explicit {"state_coeffs", "grad_coeffs"}.
inline HgdMethod method_from_json(const Json& j) {
  if (j.contains("state_coeffs") || j.contains("grad_coeffs"))
    return {json_get<std::string>(j, "name", "custom"),
            json_require(j, "state_coeffs").get<std::vector<double>>(),
            json_require(j, "grad_coeffs").get<std::vector<double>>()};
  const std::string name = json_get<std::string>(j, "name", "ogd");
  const double eta = json_get<double>(j, "eta", 0.1);
  if (!(eta > 0.0)) throw ConfigError("method eta must be positive");
  if (name == "ogd") return HgdMethod::ogd(eta);
  if (name == "gd") return HgdMethod::gd(eta);
  throw ConfigError("unknown method '" + name + "'");
}

/// Comma- or whitespace-separated numeric matrix, one row per line.
inline Mat read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("'" + path + "' has a non-numeric entry '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("'" + path + "' holds no matrix");
  Mat m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw ConfigError("'" + path + "' has ragged rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

// ---------------------------------------------------------------------------
// CSV output. Floats use 17 significant digits; a trailing newline ends every row.

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void header(const std::vector<std::string>& cols) {
    for (std::size_t k = 0; k < cols.size(); ++k) os_ << (k ? "," : "") << cols[k];
    os_ << '\n';
  }
  CsvWriter& cell(long v) { sep(); os_ << v; return *this; }
  CsvWriter& cell(int v) { return cell(static_cast<long>(v)); }
  CsvWriter& cell(double v) { sep(); os_ << fmt17(v); return *this; }
  CsvWriter& empty() { sep(); return *this; }
  void end() {
    os_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }
  std::ostream& os_;
  bool first_ = true;
};

inline std::vector<std::string> runlog_columns(int width) {
  std::vector<std::string> c{"iter", "player"};
  for (int k = 0; k < width; ++k) c.push_back("x" + std::to_string(k));
  for (int k = 0; k < width; ++k) c.push_back("u" + std::to_string(k));
  for (const char* s : {"regret", "path_sq_l1", "nash_gap", "welfare"}) c.push_back(s);
  return c;
}

/// iter, player, x0.., u0.., regret, path_sq_l1, nash_gap, welfare; players with
/// fewer actions leave the surplus x/u cells empty.
inline void write_runlog_csv(std::ostream& os, const RunLog& log) {
  const int n = log.num_players();
  int width = 0;
  for (int i = 0; i < n; ++i) width = std::max(width, static_cast<int>(log.x[i][0].size()));
  const auto reps = regret_reports(log);
  std::vector<std::vector<double>> paths;
  for (int i = 0; i < n; ++i) paths.push_back(path_length_sq(log.x[i], PathNorm::l1));
  CsvWriter w(os);
  w.header(runlog_columns(width));
  for (long t = 0; t <= log.horizon(); ++t)
    for (int i = 0; i < n; ++i) {
      w.cell(t).cell(i);
      const Vec& x = log.x[i][t];
      const Vec& u = log.u[i][t];
      for (int k = 0; k < width; ++k) k < x.size() ? w.cell(x(k)) : w.empty();
      for (int k = 0; k < width; ++k) k < u.size() ? w.cell(u(k)) : w.empty();
      w.cell(reps[i].prefix[t]).cell(paths[i][t]).cell(log.nash_gap[t]).cell(log.welfare[t]);
      w.end();
    }
}

inline std::vector<std::string> fisher_columns(int goods) {
  std::vector<std::string> c{"iter", "buyer"};
  for (int k = 0; k < goods; ++k) c.push_back("b" + std::to_string(k));
  c.push_back("phi");
  c.push_back("residual");
  return c;
}

/// iter, buyer, b0..b{m-1}, phi, residual.
inline void write_fisher_csv(std::ostream& os, const FisherRun& run) {
  const int buyers = static_cast<int>(run.spend[0].rows());
  const int goods = static_cast<int>(run.spend[0].cols());
  CsvWriter w(os);
  w.header(fisher_columns(goods));
  for (std::size_t t = 0; t < run.spend.size(); ++t)
    for (int i = 0; i < buyers; ++i) {
      w.cell(static_cast<long>(t)).cell(i);
      for (int j = 0; j < goods; ++j) w.cell(run.spend[t](i, j));
      w.cell(run.phi[t]).cell(run.residual[t]);
      w.end();
    }
}

inline std::vector<std::string> gap_columns() { return {"iter", "last_gap", "avg_gap"}; }

/// iter, last_gap, avg_gap for every iteration where the gaps were evaluated.
inline void write_gap_csv(std::ostream& os, const BsppRun& run) {
  CsvWriter w(os);
  w.header(gap_columns());
  for (std::size_t t = 1; t < run.last_gap.size(); ++t) {
    if (std::isnan(run.last_gap[t])) continue;
    w.cell(static_cast<long>(t)).cell(run.last_gap[t]).cell(run.avg_gap[t]);
    w.end();
  }
}

inline std::vector<std::string> trajectory_columns(int dim) {
  std::vector<std::string> c{"iter", "norm"};
  for (int k = 0; k < dim; ++k) c.push_back("z" + std::to_string(k));
  return c;
}

/// iter, norm, z0..; the state columns are filled when states were recorded.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, int dim) {
  CsvWriter w(os);
  w.header(trajectory_columns(dim));
  for (std::size_t t = 0; t < tr.norm.size(); ++t) {
    w.cell(static_cast<long>(t)).cell(tr.norm[t]);
    for (int k = 0; k < dim; ++k)
      t < tr.states.size() ? w.cell(tr.states[t](k)) : w.empty();
    w.end();
  }
}

/// Rows "metric,player,value"; player is empty for whole-run metrics.
class MetricsTable {
 public:
  void add(const std::string& name, double v) { rows_.push_back({name, -1, v}); }
  void add(const std::string& name, int player, double v) { rows_.push_back({name, player, v}); }
  void write(std::ostream& os) const {
    CsvWriter w(os);
    w.header({"metric", "player", "value"});
    for (const auto& r : rows_) {
      os << r.name << ',';
      if (r.player >= 0) os << r.player;
      os << ',' << fmt17(r.value) << '\n';
    }
  }

 private:
  struct Row {
    std::string name;
    int player;
    double value;
  };
  std::vector<Row> rows_;
};

inline Json audit_to_json(const AuditReport& a) {
  Json j;
  j["check"] = a.check;
  j["pass"] = a.pass;
  j["worst_slack"] = std::isfinite(a.worst_slack) ? Json(a.worst_slack) : Json(nullptr);
  j["prefix"] = a.prefix;
  return j;
}

/// Which documented layout a CSV header belongs to.
enum class CsvSchema { runlog, fisher, gap, trajectory, metrics };

/**
 * Checks the header against the documented column order and that every row
 * has as many cells as the header, with numeric (or empty padding) cells.
 * Returns an empty string when the text conforms, else the first problem.
 */
inline std::string lint_csv(const std::string& text, CsvSchema schema) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return "empty file";
  std::vector<std::string> head;
  {
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) head.push_back(c);
  }
  auto numbered = [&](std::size_t from, const std::string& stem) {
    std::size_t k = from;
    int idx = 0;
    while (k < head.size() && head[k] == stem + std::to_string(idx)) ++k, ++idx;
    return std::pair<std::size_t, int>{k, idx};
  };
  std::vector<std::string> expect;
  switch (schema) {
    case CsvSchema::runlog: {
      const auto [k, width] = numbered(2, "x");
      expect = runlog_columns(width);
      (void)k;
      break;
    }
    case CsvSchema::fisher: expect = fisher_columns(numbered(2, "b").second); break;
    case CsvSchema::gap: expect = gap_columns(); break;
    case CsvSchema::trajectory: expect = trajectory_columns(numbered(2, "z").second); break;
    case CsvSchema::metrics: expect = {"metric", "player", "value"}; break;
  }
  if (head != expect) return "header does not match the schema";
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t p = line.find(',', start);
      cells.push_back(line.substr(start, p == std::string::npos ? std::string::npos : p - start));
      if (p == std::string::npos) break;
      start = p + 1;
    }
    if (cells.size() != head.size()) return "row " + std::to_string(row) + " has the wrong width";
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (schema == CsvSchema::metrics && c == 0) continue;
      if (cells[c].empty()) {
        if (schema == CsvSchema::metrics && c == 1) continue;
        if (schema == CsvSchema::runlog || schema == CsvSchema::trajectory) continue;
        return "row " + std::to_string(row) + " has an empty cell";
      }
      char* end = nullptr;
      std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0')
        return "row " + std::to_string(row) + " has a non-numeric cell";
    }
  }
  return {};
}

}  // namespace gamelab

#endif  // GAMELAB_IO_HPP
