// gamelab: run experiment configs, verify game classes, analyze bilinear spectra.

#include <iostream>

#include <CLI11.hpp>

#include "gamelab/cli.hpp"

namespace {

using namespace gamelab;
using namespace gamelab::cli;

int cmd_run(const std::string& config, const std::string& out) {
  const auto results = run_path(config, out);
  for (const auto& r : results) std::cout << r.name << " exit=" << r.code << "\n";
  return combine_codes(results);
}

int cmd_verify(const std::string& game, const std::string& cls) {
  const fs::path here = fs::current_path();
  const Json v = verify_game(resolve_game(Json(game), here), cls);
  std::cout << v.dump(2) << "\n";
  return kOk;
}

int cmd_analyze(const std::string& a, const std::string& b, double eta) {
  const Json j = analyze_matrices(read_csv_matrix(a), read_csv_matrix(b), eta);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gamelab: optimistic learning dynamics in games"};
  app.require_subcommand(1);

  std::string config, out = "out";
  auto* run = app.add_subcommand("run", "run one config file or every *.json in a directory");
  run->add_option("--config", config, "config file or directory")->required();
  run->add_option("--out", out, "output directory");

  std::string game, cls;
  auto* verify = app.add_subcommand("verify", "check a game against a class");
  verify->add_option("--game", game, "builtin name or game JSON file")->required();
  verify->add_option("--class", cls,
                     "constant_sum | zero_sum | strategically_zero_sum | potential | "
                     "polymatrix_zero_sum")
      ->required();

  std::string a, b;
  double eta = 0.1;
  auto* analyze = app.add_subcommand("analyze", "spectral verdict for OGD on (A, B)");
  analyze->add_option("--a", a, "CSV matrix A")->required();
  analyze->add_option("--b", b, "CSV matrix B")->required();
  analyze->add_option("--eta", eta, "OGD step size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*verify) return cmd_verify(game, cls);
    if (*analyze) return cmd_analyze(a, b, eta);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
