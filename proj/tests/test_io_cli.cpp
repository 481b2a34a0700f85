#include <gtest/gtest.h>

#include <cstdio>
#include <sys/wait.h>

#include "gamelab/cli.hpp"

using namespace gamelab;
using namespace gamelab::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gamelab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { write_text(p, text); }

struct Spawned {
  int code;
  std::string out;
};

Spawned spawn(const std::string& args) {
  const std::string cmd = std::string(GAMELAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Json run_and_report(const Json& cfg, const fs::path& out, int* code = nullptr) {
  const int c = run_experiment(cfg, out, out);
  if (code) *code = c;
  return Json::parse(slurp(out / "report.json"));
}

}  // namespace

TEST(Csv, MatrixReaderAcceptsCommasAndSpaces) {
  const fs::path dir = scratch("csv");
  spit(dir / "m.csv", "1, 2\n3 4\n\n");
  const Mat m = read_csv_matrix((dir / "m.csv").string());
  EXPECT_EQ(m, (Mat(2, 2) << 1, 2, 3, 4).finished());
  spit(dir / "bad.csv", "1,2\n3\n");
  EXPECT_THROW(read_csv_matrix((dir / "bad.csv").string()), ConfigError);
}

TEST(Csv, LintRejectsWrongHeaderAndWidth) {
  EXPECT_EQ(lint_csv("iter,last_gap,avg_gap\n1,0.5,0.5\n", CsvSchema::gap), "");
  EXPECT_NE(lint_csv("iter,gap\n1,0.5\n", CsvSchema::gap), "");
  EXPECT_NE(lint_csv("iter,last_gap,avg_gap\n1,0.5\n", CsvSchema::gap), "");
  EXPECT_NE(lint_csv("iter,last_gap,avg_gap\n1,x,0.5\n", CsvSchema::gap), "");
  EXPECT_NE(lint_csv("", CsvSchema::metrics), "");
}

TEST(RunExperiment, NormalFormRunWritesConformingArtifacts) {
  const fs::path out = scratch("nfg");
  const Json cfg = {{"kind", "nfg_run"}, {"game", "szs_1"}, {"T", 200}};
  int code = -1;
  const Json rep = run_and_report(cfg, out, &code);
  EXPECT_EQ(code, kOk);
  EXPECT_EQ(rep["T"], 200);
  EXPECT_EQ(lint_csv(slurp(out / "runlog.csv"), CsvSchema::runlog), "");
  EXPECT_EQ(lint_csv(slurp(out / "metrics.csv"), CsvSchema::metrics), "");
  for (const auto& a : rep["audits"]) EXPECT_TRUE(a["pass"].get<bool>()) << a.dump();
}

TEST(RunExperiment, ByteIdenticalReruns) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const Json cfg = {{"kind", "nfg_run"}, {"game", "zero_sum_2"}, {"T", 300},
                    {"random_init", true}, {"seed", 17}};
  run_experiment(cfg, a, a);
  run_experiment(cfg, b, b);
  for (const char* f : {"runlog.csv", "metrics.csv", "report.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(RunExperiment, OtherKindsLintClean) {
  const fs::path f = scratch("fisher");
  const Json fisher = {{"kind", "fisher_run"}, {"random", {{"buyers", 2}, {"goods", 3}}},
                       {"T", 100}, {"oracle_iterations", 20000}};
  EXPECT_EQ(run_experiment(fisher, f, f), kOk);
  EXPECT_EQ(lint_csv(slurp(f / "runlog.csv"), CsvSchema::fisher), "");

  const fs::path g = scratch("bspp");
  const Json bspp = {{"kind", "bspp_run"}, {"game", "kuhn"}, {"T", 200}, {"gap_every", 50}};
  EXPECT_EQ(run_experiment(bspp, g, g), kOk);
  EXPECT_EQ(lint_csv(slurp(g / "runlog.csv"), CsvSchema::gap), "");

  const fs::path c = scratch("cont");
  const Json cont = {{"kind", "continuous_run"}, {"game", "inefficiency"}, {"max_steps", 500},
                     {"eta", 0.2}};
  EXPECT_EQ(run_experiment(cont, c, c), kOk);
  EXPECT_EQ(lint_csv(slurp(c / "runlog.csv"), CsvSchema::trajectory), "");

  const fs::path p = scratch("pot");
  const Json pot = {{"kind", "potential_run"}, {"random", {{"action_counts", {2, 3}}}},
                    {"T", 100}, {"epsilon", 0.05}};
  EXPECT_EQ(run_experiment(pot, p, p), kOk);
  EXPECT_EQ(lint_csv(slurp(p / "runlog.csv"), CsvSchema::runlog), "");
}

TEST(RunExperiment, ExitCodes) {
  const fs::path out = scratch("codes");
  EXPECT_EQ(run_experiment(Json{{"kind", "nfg_run"}, {"game", "zero_sum_1"}, {"T", 0}}, out, out / "a"),
            kConfigError);
  EXPECT_EQ(run_experiment(Json{{"kind", "nope"}}, out, out / "b"), kConfigError);
  EXPECT_EQ(run_experiment(Json{{"kind", "nfg_run"}, {"game", "no_such_game"}, {"T", 5}}, out,
                           out / "c"),
            kConfigError);
  const Json bug = {{"kind", "potential_run"}, {"random", {{"action_counts", {2, 2}}}},
                    {"T", 50}, {"inject_sign_bug_at", 3}};
  EXPECT_EQ(run_experiment(bug, out, out / "d"), kCertificateViolation);
  const Json rep = Json::parse(slurp(out / "d" / "report.json"));
  EXPECT_GE(rep["violation_iteration"].get<long>(), 3);
  const Json div = {{"kind", "continuous_run"}, {"adversarial", {{"eps", 1.0}}}, {"eta", 0.1},
                    {"max_steps", 2000}};
  EXPECT_EQ(run_experiment(div, out, out / "e"), kDivergence);
}

TEST(Verify, StrategicallyZeroSumReference) {
  const Json v = verify_game(Json("szs_1"), "strategically_zero_sum");
  EXPECT_TRUE(v["pass"].get<bool>());
  EXPECT_NEAR(v["scale"].get<double>(), 0.5, 1e-12);
  const Json w = verify_game(Json("szs_2"), "strategically_zero_sum");
  EXPECT_FALSE(w["pass"].get<bool>());
  EXPECT_TRUE(w.contains("witness"));
}

TEST(Verify, ConstantSumAndPerturbation) {
  const Json v = verify_game(Json("zero_sum_1"), "constant_sum");
  EXPECT_TRUE(v["pass"].get<bool>());
  EXPECT_NEAR(v["constant"].get<double>(), 0.0, 1e-15);
  const Json g = {{"A", {{1.0, -1.0}, {-1.0, 1.0}}}, {"B", {{-1.0, 1.0}, {1.0, -0.9}}}};
  const Json w = verify_game(g, "zero_sum");
  EXPECT_FALSE(w["pass"].get<bool>());
  EXPECT_EQ(w["witness"], Json::array({1, 1}));
  EXPECT_THROW(verify_game(Json("zero_sum_1"), "bogus"), ConfigError);
}

TEST(Analyze, InefficiencyAndRobustness) {
  const auto ineff = builtin_bilinear("inefficiency");
  ASSERT_TRUE(ineff);
  const Json a = analyze_matrices(ineff->A, ineff->B, 0.3);
  EXPECT_EQ(a["verdict"], "Converge");
  EXPECT_NEAR(a["eigenvalues"][0].get<double>(), -2.0, 1e-12);
  EXPECT_NEAR(a["eigenvalues"][1].get<double>(), -1.0, 1e-12);
  const auto rob = builtin_bilinear("robustness");
  const Json r = analyze_matrices(rob->A, rob->B, 0.3);
  EXPECT_EQ(r["verdict"], "Diverge");
  EXPECT_THROW(analyze_matrices(Mat::Identity(2, 2), Mat::Identity(3, 3), 0.1), ConfigError);
}

TEST(Cli, SubcommandsAndExitCodes) {
  const fs::path dir = scratch("cli");
  spit(dir / "ok.json", R"({"kind": "nfg_run", "game": "zero_sum_1", "T": 50})");
  spit(dir / "broken.json", "{ not json");
  spit(dir / "div.json",
       R"({"kind": "continuous_run", "adversarial": {"eps": 1.0}, "eta": 0.1, "max_steps": 2000})");
  EXPECT_EQ(spawn("run --config " + (dir / "ok.json").string() + " --out " + (dir / "o1").string()).code,
            kOk);
  EXPECT_EQ(spawn("run --config " + (dir / "broken.json").string() + " --out " + (dir / "o2").string()).code,
            kConfigError);
  EXPECT_EQ(spawn("run --config " + (dir / "div.json").string() + " --out " + (dir / "o3").string()).code,
            kDivergence);
  // a directory run reports the most severe code and keeps every artifact
  EXPECT_EQ(spawn("run --config " + dir.string() + " --out " + (dir / "suite").string()).code,
            kConfigError);
  EXPECT_TRUE(fs::exists(dir / "suite" / "ok" / "runlog.csv"));
  EXPECT_TRUE(fs::exists(dir / "suite" / "broken" / "report.json"));
  EXPECT_EQ(spawn("bogus").code, kConfigError);

  const auto v = spawn("verify --game szs_1 --class strategically_zero_sum");
  EXPECT_EQ(v.code, kOk);
  EXPECT_NEAR(Json::parse(v.out)["scale"].get<double>(), 0.5, 1e-12);

  spit(dir / "a.csv", "1,-2\n-1,1\n");
  spit(dir / "b.csv", "1,1\n1,-1\n");
  const auto an = spawn("analyze --a " + (dir / "a.csv").string() + " --b " + (dir / "b.csv").string() +
                        " --eta 0.2");
  EXPECT_EQ(an.code, kOk);
  EXPECT_EQ(Json::parse(an.out)["verdict"], "Converge");
}
