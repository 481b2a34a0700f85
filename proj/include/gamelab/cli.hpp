#ifndef GAMELAB_CLI_HPP
#define GAMELAB_CLI_HPP

// Experiment driver behind tools/gamelab.cpp: config dispatch, artifacts, exit codes.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bspp.hpp"
#include "builtins.hpp"
#include "continuous.hpp"
#include "fisher.hpp"
#include "game_classes.hpp"
#include "io.hpp"
#include "learners.hpp"
#include "metrics.hpp"
#include "potential.hpp"

namespace gamelab::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kConfigError = 1, kCertificateViolation = 2, kDivergence = 3 };

/// Artifacts of one experiment before they are written out.
struct Artifacts {
  std::string runlog;  // CSV text
  MetricsTable metrics;
  Json report = Json::object();
  int code = kOk;
};

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

inline Json complex_to_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  Json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

inline Json spectral_to_json(const SpectralReport& r) {
  Json j;
  j["eigenvalues"] = Json::array();
  for (const auto& z : r.eigenvalues) j["eigenvalues"].push_back(complex_to_json(z));
  j["condition"] = r.condition;
  j["verdict"] = to_string(r.verdict);
  j["predicted_rate"] = r.predicted_rate ? Json(*r.predicted_rate) : Json(nullptr);
  j["gamma"] = r.gamma;
  j["theorem_regime"] = r.theorem_regime;
  j["max_root_modulus"] = r.max_root_modulus;
  if (r.witness) j["witness"] = complex_to_json(*r.witness);
  return j;
}

/// A game reference is a builtin name, a path to a JSON file, or an inline object.
inline Json resolve_game(const Json& ref, const fs::path& base) {
  if (ref.is_object()) return ref;
  if (!ref.is_string()) throw ConfigError("game must be a builtin name, a file, or an object");
  const std::string s = ref.get<std::string>();
  if (is_builtin(s)) return s;
  fs::path p(s);
  if (p.is_relative()) p = base / p;
  return load_json_file(p.string());
}

inline NormalFormGame nfg_from_ref(const Json& g) {
  if (g.is_string()) {
    if (auto b = builtin_nfg(g.get<std::string>())) return *b;
    throw ConfigError("builtin '" + g.get<std::string>() + "' is not a normal-form game");
  }
  return game_from_json(g);
}

inline std::vector<LearnerConfig> learners_from_config(const Json& cfg, int n) {
  const double eta = default_optimistic_eta(n);
  std::vector<LearnerConfig> out;
  if (!cfg.contains("learners")) return std::vector<LearnerConfig>(n, learner_from_json(Json::object(), eta));
  const Json& l = cfg["learners"];
  if (l.is_object()) return std::vector<LearnerConfig>(n, learner_from_json(l, eta));
  if (!l.is_array() || static_cast<int>(l.size()) != n)
    throw ConfigError("learners must be one object or one per player");
  for (const auto& e : l) out.push_back(learner_from_json(e, eta));
  return out;
}

inline long horizon_from(const Json& cfg, long fallback = -1) {
  const long T = json_get<long>(cfg, "T", fallback);
  if (T < 1) throw ConfigError("T must be a positive integer");
  return T;
}

// ---------------------------------------------------------------------------
// run kinds

inline void run_nfg(const Json& cfg, const fs::path& base, Artifacts& art) {
  const NormalFormGame g = nfg_from_ref(resolve_game(json_require(cfg, "game"), base));
  const int n = g.num_players();
  const auto configs = learners_from_config(cfg, n);
  RunOptions opt;
  opt.random_init = json_get<bool>(cfg, "random_init", false);
  opt.seed = json_get<unsigned long long>(cfg, "seed", 0);
  const RunLog log = run_dynamics(g, configs, horizon_from(cfg), opt);

  std::ostringstream csv;
  write_runlog_csv(csv, log);
  art.runlog = csv.str();

  const auto reps = regret_reports(log);
  Json audits = Json::array();
  bool ok = true;
  for (int i = 0; i < n; ++i) {
    art.metrics.add("regret_final", i, reps[i].final());
    art.metrics.add("regret_max", i, reps[i].max());
    art.metrics.add("path_sq_l1", i, path_length_sq(log.x[i], PathNorm::l1).back());
    art.metrics.add("utility_scale", i, g.scale(i));
    try {
      const RvuParams p = RvuParams::declared(configs[i], g.action_count(i));
      AuditReport a = rvu_audit(p, log.u[i], log.x[i]);
      a.check = "rvu/player" + std::to_string(i);
      ok = ok && a.pass;
      audits.push_back(audit_to_json(a));
    } catch (const ConfigError&) {
      // no declared parameters for this learner; nothing to certify
    }
  }
  {
    const double s = utility_variation_slack(log);
    AuditReport a{"utility_variation", s >= -1e-12, s, 0};
    ok = ok && a.pass;
    audits.push_back(audit_to_json(a));
  }
  if (const auto w = regret_sum_weights(g)) {
    const auto sum = regret_sum(reps, *w);
    AuditReport a{"regret_sum_nonnegative", true, std::numeric_limits<double>::infinity(), 0};
    for (long t = 1; t <= log.horizon(); ++t)
      if (sum[t] < a.worst_slack) a.worst_slack = sum[t], a.prefix = t;
    a.pass = a.worst_slack >= -1e-9;
    ok = ok && a.pass;
    audits.push_back(audit_to_json(a));
    art.metrics.add("regret_sum_final", sum.back());
  }
  const double gap_min = *std::min_element(log.nash_gap.begin() + 1, log.nash_gap.end());
  art.metrics.add("nash_gap_final", log.nash_gap.back());
  art.metrics.add("nash_gap_min", gap_min);
  art.metrics.add("path_sq_l1_total", total_path_length_sq(log, PathNorm::l1).back());
  art.report["players"] = n;
  art.report["T"] = log.horizon();
  art.report["learners"] = Json::array();
  for (const auto& c : configs) art.report["learners"].push_back(c.describe());
  art.report["path_unstable"] = path_unstable(log);
  art.report["audits"] = audits;
  if (!ok) art.code = kCertificateViolation;
}

inline std::vector<Regularizer> regularizers_from(const Json& cfg, int n) {
  const Json r = cfg.contains("regularizers") ? cfg["regularizers"] : Json("euclidean");
  if (r.is_string()) return std::vector<Regularizer>(n, Regularizer{regularizer_from_string(r.get<std::string>())});
  if (!r.is_array() || static_cast<int>(r.size()) != n)
    throw ConfigError("regularizers must be one name or one per player");
  std::vector<Regularizer> out;
  for (const auto& e : r) out.push_back(Regularizer{regularizer_from_string(e.get<std::string>())});
  return out;
}

inline PotentialGame potential_from_config(const Json& cfg, const fs::path& base) {
  if (cfg.contains("random")) {
    std::mt19937_64 rng(json_get<unsigned long long>(cfg, "seed", 0));
    return random_weighted_potential_game(
        rng, json_require(cfg["random"], "action_counts").get<std::vector<int>>());
  }
  const Json g = resolve_game(json_require(cfg, "game"), base);
  if (!g.is_object()) throw ConfigError("potential runs need a game object with phi_table");
  return potential_game_from_json(g);
}

inline void run_potential(const Json& cfg, const fs::path& base, Artifacts& art) {
  const PotentialGame pg = potential_from_config(cfg, base);
  const int n = pg.game.num_players();
  const long T = horizon_from(cfg);
  art.report["L"] = pg.lipschitz();
  art.report["phi_max"] = pg.phi_max;
  Json audits = Json::array();
  std::ostringstream csv;

  if (json_get<std::string>(cfg, "algorithm", "md") == "omwu") {
    const auto run = omwu_potential_run(pg, T);
    write_runlog_csv(csv, run.log);
    art.runlog = csv.str();
    art.report["eta"] = run.eta;
    const auto reps = regret_reports(run.log);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      AuditReport a{"regret_constant/player" + std::to_string(i), true,
                    std::numeric_limits<double>::infinity(), 0};
      for (long t = 1; t <= run.log.horizon(); ++t) {
        const double s = run.regret_constant[i] - pg.weights[i] * reps[i].prefix[t];
        if (s < a.worst_slack) a.worst_slack = s, a.prefix = t;
      }
      a.pass = a.worst_slack >= -1e-9;
      ok = ok && a.pass;
      audits.push_back(audit_to_json(a));
      art.metrics.add("regret_max", i, reps[i].max());
    }
    audits.push_back(audit_to_json({"optimistic_path", true, 2.0 * pg.phi_max - run.path.back(),
                                    run.log.horizon()}));
    art.metrics.add("phi_final", run.phi.back());
    art.report["audits"] = audits;
    if (!ok) art.code = kCertificateViolation;
    return;
  }

  PotentialRunOptions opt;
  opt.eta = json_get<double>(cfg, "eta", 0.0);
  opt.sign_bug_at = json_get<long>(cfg, "inject_sign_bug_at", -1);
  const auto run = run_md_potential(pg, regularizers_from(cfg, n), T, opt);
  write_runlog_csv(csv, run.log);
  art.runlog = csv.str();
  art.report["eta"] = run.eta;
  const double worst = *std::min_element(run.step_slack.begin() + 1, run.step_slack.end());
  audits.push_back(audit_to_json({"potential_monotone", true, worst, 0}));
  audits.push_back(audit_to_json(
      {"cumulative_path", true, 2.0 * pg.phi_max - run.cumulative.back(), run.log.horizon()}));
  if (cfg.contains("epsilon")) {
    const auto c = md_rate_certificate(pg, run, cfg["epsilon"].get<double>());
    Json j;
    j["found"] = c.found;
    j["iteration"] = c.iteration;
    j["budget"] = c.budget;
    j["step"] = c.step;
    j["gap_bound"] = c.gap_bound ? Json(*c.gap_bound) : Json(nullptr);
    j["measured_gap"] = c.measured_gap;
    art.report["rate_certificate"] = j;
  }
  art.metrics.add("phi_initial", run.phi.front());
  art.metrics.add("phi_final", run.phi.back());
  art.metrics.add("min_step_slack", worst);
  art.metrics.add("cumulative_path", run.cumulative.back());
  art.report["audits"] = audits;
}

inline void run_fisher(const Json& cfg, const fs::path& base, Artifacts& art) {
  FisherMarket m;
  if (cfg.contains("random")) {
    std::mt19937_64 rng(json_get<unsigned long long>(cfg, "seed", 0));
    m = random_market(rng, json_require(cfg["random"], "buyers").get<int>(),
                      json_require(cfg["random"], "goods").get<int>());
  } else {
    Json mj = json_require(cfg, "market");
    if (mj.is_string()) {
      fs::path p(mj.get<std::string>());
      if (p.is_relative()) p = base / p;
      mj = load_json_file(p.string());
    }
    m = market_from_json(mj);
  }
  const long T = horizon_from(cfg);
  const FisherRun run = run_pr(m, T);
  std::ostringstream csv;
  write_fisher_csv(csv, run);
  art.runlog = csv.str();
  const long oracle_steps = json_get<long>(cfg, "oracle_iterations", 1'000'000);
  const Mat b_star = pr_oracle(m, oracle_steps);
  const auto rate = pr_rate_certificate(m, run, b_star);
  Json audits = Json::array();
  audits.push_back(audit_to_json({"phi_nondecreasing", run.worst_increase >= -1e-10,
                                  run.worst_increase, 0}));
  audits.push_back(audit_to_json({"rate_envelope", rate.worst_slack >= -1e-8, rate.worst_slack, 0}));
  bool ok = true;
  for (const auto& a : audits) ok = ok && a["pass"].get<bool>();
  art.metrics.add("phi_final", run.phi.back());
  art.metrics.add("phi_star", rate.phi_star);
  art.metrics.add("residual_final", run.residual.back());
  art.metrics.add("max_envelope_ratio", rate.max_ratio);
  art.report["buyers"] = m.buyers();
  art.report["goods"] = m.goods();
  art.report["audits"] = audits;
  if (!ok) art.code = kCertificateViolation;
}

inline BilinearGame bilinear_from_ref(const Json& g) {
  if (g.is_string()) {
    if (auto b = builtin_bilinear(g.get<std::string>())) return *b;
    throw ConfigError("builtin '" + g.get<std::string>() + "' is not a continuous game");
  }
  BilinearGame bg{mat_from_json(json_require(g, "A")), mat_from_json(json_require(g, "B")),
                  std::nullopt};
  if (g.contains("radius")) bg.radius = g["radius"].get<double>();
  bg.validate();
  return bg;
}

inline void run_continuous(const Json& cfg, const fs::path& base, Artifacts& art) {
  const HgdMethod method = cfg.contains("method") ? method_from_json(cfg["method"])
                                                  : HgdMethod::ogd(json_get<double>(cfg, "eta", 0.1));
  BilinearGame g = cfg.contains("adversarial")
                       ? adversarial_game_for(method, json_get<double>(cfg["adversarial"], "eps", 1.0),
                                              json_get<int>(cfg["adversarial"], "dim", 2))
                       : bilinear_from_ref(resolve_game(json_require(cfg, "game"), base));
  const int d = g.dim();
  Vec z0(2 * d);
  if (cfg.contains("init")) {
    z0 = vec_from_json(cfg["init"]);
    if (z0.size() != 2 * d) throw ConfigError("init must hold both players' coordinates");
  } else {
    std::mt19937_64 rng(json_get<unsigned long long>(cfg, "seed", 0));
    std::normal_distribution<double> N(0.0, 1.0);
    for (int k = 0; k < 2 * d; ++k) z0(k) = N(rng);
  }
  SimulationOptions opt;
  opt.max_steps = json_get<long>(cfg, "max_steps", 10'000);
  opt.record_states = true;
  const SpectralReport spec = spectral_predict(g, method);
  const Trajectory tr = simulate(g, method, z0.head(d), z0.tail(d), opt);
  std::ostringstream csv;
  write_trajectory_csv(csv, tr, 2 * d);
  art.runlog = csv.str();
  const bool diverged =
      tr.diverged || (spec.verdict == Verdict::diverge && tr.norm.back() > tr.norm.front());
  art.report["method"] = method.name;
  art.report["spectral"] = spectral_to_json(spec);
  Json sim;
  sim["steps"] = static_cast<long>(tr.norm.size()) - 1;
  sim["initial_norm"] = tr.norm.front();
  sim["final_norm"] = tr.norm.back();
  sim["halted"] = tr.diverged;
  sim["diverged_at"] = tr.diverged_at;
  sim["converged"] = tr.converged;
  art.report["simulation"] = sim;
  art.report["classification"] = diverged ? "diverged" : (tr.converged ? "converged" : "undecided");
  art.metrics.add("final_norm", tr.norm.back());
  art.metrics.add("growth", tr.norm.back() / std::max(tr.norm.front(), 1e-300));
  if (diverged) art.code = kDivergence;
}

inline Domain domain_from_json(const Json& j, int dim) {
  if (!j.is_object()) throw ConfigError("domain spec must be an object");
  const std::string kind = json_get<std::string>(j, "kind", "simplex");
  if (kind == "simplex") return Domain::simplex(dim);
  if (kind == "treeplex") {
    std::vector<Infoset> sets;
    for (const auto& s : json_require(j, "infosets"))
      sets.push_back({json_require(s, "parent").get<int>(),
                      json_require(s, "children").get<std::vector<int>>()});
    return Domain::treeplex(Treeplex(json_get<int>(j, "num_sequences", dim), sets));
  }
  throw ConfigError("unknown domain kind '" + kind + "'");
}

/// {A, domain: "simplex"} or {A, domain: "treeplex", x_treeplex: {...}, y_treeplex: {...}}.
inline Bspp bspp_from_ref(const Json& g) {
  if (g.is_string()) {
    if (auto b = builtin_bspp(g.get<std::string>())) return *b;
    throw ConfigError("builtin '" + g.get<std::string>() + "' is not a saddle-point problem");
  }
  const Mat A = mat_from_json(json_require(g, "A"));
  const std::string domain = json_get<std::string>(g, "domain", "simplex");
  if (domain == "simplex") return simplex_bspp(A);
  if (domain != "treeplex") throw ConfigError("domain must be 'simplex' or 'treeplex'");
  Json xs = json_require(g, "x_treeplex"), ys = json_require(g, "y_treeplex");
  xs["kind"] = "treeplex";
  ys["kind"] = "treeplex";
  Bspp b{A, domain_from_json(xs, static_cast<int>(A.rows())),
         domain_from_json(ys, static_cast<int>(A.cols())), "custom"};
  b.validate();
  return b;
}

inline void run_bspp(const Json& cfg, const fs::path& base, Artifacts& art) {
  const Bspp g = bspp_from_ref(resolve_game(json_require(cfg, "game"), base));
  const double norm = spectral_norm(g.A);
  const double theorem_eta = 1.0 / (4.0 * norm);
  const double eta = cfg.contains("eta") ? cfg["eta"].get<double>()
                                         : json_get<double>(cfg, "eta_scale", 1.0) * theorem_eta;
  BsppOptions opt;
  opt.gap_every = json_get<long>(cfg, "gap_every", 1);
  if (opt.gap_every < 1) throw ConfigError("gap_every must be positive");
  opt.certify_path = eta <= theorem_eta * (1.0 + 1e-12);
  const BsppRun run = bspp_omd_run(g, eta, horizon_from(cfg), opt);
  std::ostringstream csv;
  write_gap_csv(csv, run);
  art.runlog = csv.str();
  const double min_regret_sum = *std::min_element(run.regret_sum.begin() + 1, run.regret_sum.end());
  Json audits = Json::array();
  if (opt.certify_path)
    audits.push_back(audit_to_json({"path_bound", true, run.path_bound - run.path.back(), 0}));
  const AuditReport rs{"regret_sum_nonnegative", min_regret_sum >= -1e-9, min_regret_sum, 0};
  audits.push_back(audit_to_json(rs));
  art.report["spectral_norm"] = norm;
  art.report["eta"] = eta;
  art.report["audits"] = audits;
  art.metrics.add("last_gap_final", run.last_gap.back());
  art.metrics.add("avg_gap_final", run.avg_gap.back());
  art.metrics.add("path", run.path.back());
  art.metrics.add("path_bound", run.path_bound);
  if (!rs.pass) art.code = kCertificateViolation;
}

// ---------------------------------------------------------------------------
// verify / analyze

/// Runs the named class verifier on a resolved game reference.
inline Json verify_game(const Json& ref, const std::string& cls) {
  Json out;
  out["class"] = cls;
  if (ref.is_string()) out["game"] = ref;
  if (cls == "polymatrix_zero_sum") {
    if (!ref.is_object() || !ref.contains("edges"))
      throw ConfigError("polymatrix_zero_sum needs a game with an edge list");
    const PolymatrixGame pg = polymatrix_from_json(ref);
    out["pass"] = pg.zero_sum_edges();
    return out;
  }
  if (cls == "potential") {
    if (!ref.is_object() || !ref.contains("phi_table"))
      throw ConfigError("potential verification needs a phi_table");
    try {
      const PotentialGame pg = potential_game_from_json(ref);
      out["pass"] = true;
      out["phi_max"] = pg.phi_max;
      out["L"] = pg.lipschitz();
    } catch (const DomainError& e) {
      out["pass"] = false;
      out["witness"] = e.what();
    }
    return out;
  }
  const NormalFormGame g = nfg_from_ref(ref);
  if (cls == "constant_sum" || cls == "zero_sum") {
    const auto r = verify_constant_sum(g);
    // report the constant in source units when no rescaling took place
    bool unscaled = true;
    for (int i = 0; i < g.num_players(); ++i) unscaled = unscaled && g.scale(i) == 1.0;
    const bool flip = g.orientation(0) == Orientation::minimize;
    const double c = flip && unscaled ? -r.value + 0.0 : r.value;
    out["pass"] = r.constant && (cls == "constant_sum" || std::abs(r.value) <= 1e-9);
    out["constant"] = c;
    if (r.witness) out["witness"] = *r.witness;
    return out;
  }
  if (cls == "strategically_zero_sum") {
    if (g.num_players() != 2) throw ConfigError("strategically_zero_sum needs two players");
    const Mat A = g.source_matrix(0), B = g.source_matrix(1);
    const auto d = verify_strategically_zero_sum(A, B);
    out["pass"] = d.holds;
    out["singular"] = d.singular;
    out["scale"] = d.scale;
    out["residual"] = d.residual;
    out["orientation"] = g.orientation(0) == Orientation::minimize ? "minimize" : "maximize";
    if (d.holds) {
      out["row_offset"] = to_json(d.row_offset);
      out["col_offset"] = to_json(d.col_offset);
      out["core"] = to_json(d.core);
    } else if (!d.singular) {
      Eigen::Index r = 0, c = 0;
      (double_center(B) + d.scale * double_center(A)).cwiseAbs().maxCoeff(&r, &c);
      out["witness"] = Json::array({static_cast<long>(r), static_cast<long>(c)});
    }
    return out;
  }
  throw ConfigError("unknown class '" + cls + "'");
}

inline Json analyze_matrices(const Mat& A, const Mat& B, double eta) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw ConfigError("analyze needs two square matrices of equal size");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  const BilinearGame g{A, B, std::nullopt};
  const SpectralReport r = spectral_predict(g, HgdMethod::ogd(eta));
  Json j = spectral_to_json(r);
  j["eta"] = eta;
  j["eta_bound"] = r.gamma > 0.0 ? Json(1.0 / (2.0 * std::sqrt(r.gamma))) : Json(nullptr);
  return j;
}

inline Mat matrix_from_ref(const Json& j, const fs::path& base) {
  if (j.is_array()) return mat_from_json(j);
  if (!j.is_string()) throw ConfigError("matrix must be nested arrays or a CSV path");
  fs::path p(j.get<std::string>());
  if (p.is_relative()) p = base / p;
  return read_csv_matrix(p.string());
}

inline void run_verify(const Json& cfg, const fs::path& base, Artifacts& art) {
  const Json v = verify_game(resolve_game(json_require(cfg, "game"), base),
                             json_require(cfg, "class").get<std::string>());
  art.report["verdict"] = v;
}

inline void run_analyze(const Json& cfg, const fs::path& base, Artifacts& art) {
  Mat A, B;
  if (cfg.contains("game")) {
    const BilinearGame g = bilinear_from_ref(resolve_game(cfg["game"], base));
    A = g.A;
    B = g.B;
  } else {
    A = matrix_from_ref(json_require(cfg, "a"), base);
    B = matrix_from_ref(json_require(cfg, "b"), base);
  }
  art.report["analysis"] = analyze_matrices(A, B, json_get<double>(cfg, "eta", 0.1));
}

/// Runs one experiment config; artifacts land in out (created if needed).
inline int run_experiment(const Json& cfg, const fs::path& base, const fs::path& out) {
  Artifacts art;
  std::string kind = "?";
  try {
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    kind = json_require(cfg, "kind").get<std::string>();
    art.report["kind"] = kind;
    if (kind == "nfg_run") run_nfg(cfg, base, art);
    else if (kind == "potential_run") run_potential(cfg, base, art);
    else if (kind == "fisher_run") run_fisher(cfg, base, art);
    else if (kind == "continuous_run") run_continuous(cfg, base, art);
    else if (kind == "bspp_run") run_bspp(cfg, base, art);
    else if (kind == "verify") run_verify(cfg, base, art);
    else if (kind == "analyze") run_analyze(cfg, base, art);
    else throw ConfigError("unknown experiment kind '" + kind + "'");
  } catch (const CertificateViolation& e) {
    art.code = kCertificateViolation;
    art.report["error"] = e.what();
    art.report["violation_iteration"] = e.iteration();
  } catch (const Json::exception& e) {
    art.code = kConfigError;
    art.report["error"] = std::string("malformed config: ") + e.what();
  } catch (const std::exception& e) {
    art.code = kConfigError;
    art.report["error"] = e.what();
  }
  art.report["exit_code"] = art.code;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out.string() + "'");
  write_text(out / "runlog.csv", art.runlog);
  std::ostringstream m;
  art.metrics.write(m);
  write_text(out / "metrics.csv", m.str());
  write_text(out / "report.json", art.report.dump(2) + "\n");
  return art.code;
}

inline unsigned worker_count() {
  unsigned w = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GAMELAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) w = static_cast<unsigned>(v);
  }
  return w;
}

struct SuiteResult {
  std::string name;
  int code;
};

/**
 * A file runs one experiment into out; a directory runs every *.json inside
 * (sorted by name) into out/<stem>/ on a bounded pool. Returns per-config
 * results in name order.
 */
inline std::vector<SuiteResult> run_path(const fs::path& config, const fs::path& out) {
  if (fs::is_directory(config)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(config))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<SuiteResult> results(files.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (std::size_t k = next++; k < files.size(); k = next++) {
        int code = kConfigError;
        try {
          code = run_experiment(load_json_file(files[k].string()), files[k].parent_path(),
                                out / files[k].stem());
        } catch (const std::exception& e) {
          Json report;
          report["error"] = e.what();
          report["exit_code"] = code;
          std::error_code ec;
          fs::create_directories(out / files[k].stem(), ec);
          if (!ec) write_text(out / files[k].stem() / "report.json", report.dump(2) + "\n");
        }
        results[k] = {files[k].stem().string(), code};
      }
    };
    const unsigned n = std::min<unsigned>(worker_count(), std::max<std::size_t>(files.size(), 1));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return results;
  }
  Json cfg;
  try {
    cfg = load_json_file(config.string());
  } catch (const ConfigError& e) {
    Json report;
    report["error"] = e.what();
    report["exit_code"] = static_cast<int>(kConfigError);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!ec) write_text(out / "report.json", report.dump(2) + "\n");
    return {{config.stem().string(), kConfigError}};
  }
  return {{config.stem().string(), run_experiment(cfg, config.parent_path(), out)}};
}

/// The most severe code of a suite: config errors outrank violations, then divergence.
inline int combine_codes(const std::vector<SuiteResult>& rs) {
  int code = kOk;
  auto rank = [](int c) { return c == kConfigError ? 3 : c == kCertificateViolation ? 2 : c == kDivergence ? 1 : 0; };
  for (const auto& r : rs)
    if (rank(r.code) > rank(code)) code = r.code;
  return code;
}

}  // namespace gamelab::cli

#endif  // GAMELAB_CLI_HPP
