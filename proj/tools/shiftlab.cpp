// shiftlab: configuration-driven experiment runner for the operator lab.
//
// Subcommands:
//   run <config>       execute an experiment and emit a report
//   list               print the experiment catalog with parameter schemas
//   validate <config>  parse and validate a config without running it
//
// Exit codes: 0 all verdicts pass (or expected_fail set), 1 verdict failure,
// 2 validation failure, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include <shiftlab/runner.hpp>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Overrides {
  std::string out;
  std::string format;
  bool has_seed = false;
  std::uint64_t seed = 0;
  int dim = 0;
  int grid = 0;
  double tol = 0.0;
};

void apply(shiftlab::ExperimentConfig& cfg, const Overrides& ov) {
  if (!ov.out.empty()) cfg.out_path = ov.out;
  if (!ov.format.empty()) cfg.format = ov.format;
  if (ov.has_seed) cfg.seed = ov.seed;
  if (ov.dim > 0) cfg.params["n"] = ov.dim;
  if (ov.grid > 0) cfg.params["grid"] = ov.grid;
  if (ov.tol > 0.0) cfg.params["tol"] = ov.tol;
}

int run_command(const std::string& config_path, const Overrides& ov) {
  shiftlab::ExperimentConfig cfg;
  try {
    cfg = shiftlab::parse_config(slurp(config_path));
    apply(cfg, ov);
    shiftlab::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  }
  shiftlab::RunResult res;
  try {
    res = shiftlab::run_experiment(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  std::string payload;
  if (cfg.format == "csv") {
    payload = shiftlab::report_to_csv(res);
  } else {
    shiftlab::json full = res.report;
    full["envelope"] = res.envelope;
    payload = full.dump(2);
    payload += '\n';
  }
  if (!cfg.out_path.empty()) {
    std::ofstream out(cfg.out_path);
    if (!out) {
      std::cerr << "validation error: cannot write " << cfg.out_path << "\n";
      return 2;
    }
    out << payload;
  }
  std::cout << payload;
  return res.exit_code;
}

int validate_command(const std::string& config_path, const Overrides& ov) {
  try {
    shiftlab::ExperimentConfig cfg = shiftlab::parse_config(slurp(config_path));
    apply(cfg, ov);
    shiftlab::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shiftlab: finite-section experiments for shift perturbations"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "config file path")->required();
  run->add_option("--out", ov.out, "report output path");
  run->add_option("--format", ov.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--seed", ov.seed, "override the config seed")
      ->each([&ov](const std::string&) { ov.has_seed = true; });
  run->add_option("--dim", ov.dim, "override params.n");
  run->add_option("--grid", ov.grid, "override params.grid");
  run->add_option("--tol", ov.tol, "override params.tol");

  CLI::App* list = app.add_subcommand("list", "print the experiment catalog");

  CLI::App* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("config", config_path, "config file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    std::cout << shiftlab::list_experiments();
    return 0;
  }
  if (validate->parsed()) return validate_command(config_path, ov);
  return run_command(config_path, ov);
}
