// affw: run experiments, verification suites and constant reports.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "affw/experiment.hpp"
#include "affw/verify.hpp"

namespace {

// --seed, then the config's seed, then FW_AFFINE_SEED, then 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           const std::optional<std::uint64_t>& config) {
  if (flag) return *flag;
  if (config) return *config;
  if (const char* env = std::getenv("FW_AFFINE_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw affw::InputError(std::string("FW_AFFINE_SEED is not an integer: ") +
                           env);
  }
  return 0;
}

int cmd_verify(const std::string& suite_name, std::uint64_t seed,
               double alpha_scale) {
  const auto suite = affw::parse_suite(suite_name);
  if (!suite) {
    std::cerr << "unknown suite '" << suite_name
              << "' (geometry, inequalities, invariance, rates, all)\n";
    return 2;
  }
  affw::VerifyOptions opt;
  opt.seed = seed;
  opt.alpha_scale = alpha_scale;
  const auto results = affw::run_suite(*suite, opt);
  bool ok = true;
  std::cout << "suite " << affw::to_string(*suite) << ", seed " << seed
            << "\n";
  for (const auto& r : results) {
    ok = ok && r.passed;
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << std::left
              << std::setw(56) << r.name << std::right << std::fixed
              << std::setprecision(2) << std::setw(7) << r.seconds << "s\n"
              << std::defaultfloat << "      " << r.detail << "\n";
  }
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine-invariant Frank-Wolfe experiments"};
  app.require_subcommand(1);
  app.footer(affw::config_reference());

  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string output_dir;
  std::string dataset;
  bool dry_run = false;
  double alpha_scale = 1.0;
  std::string config_path;
  std::string suite_name;

  auto* run = app.add_subcommand("run", "run every (strategy x map) cell of a config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seed, "global seed (default: config, then FW_AFFINE_SEED, then 0)");
  run->add_option("--jobs", jobs, "cells run in parallel")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  run->add_option("--output-dir", output_dir, "overrides output.dir");
  run->add_option("--dataset", dataset, "overrides problem.dataset")
      ->check(CLI::ExistingFile);
  run->add_flag("--dry-run", dry_run, "print the cell matrix without running");

  auto* verify = app.add_subcommand("verify", "run built-in property suites");
  verify->add_option("suite", suite_name,
                     "geometry | inequalities | invariance | rates | all")
      ->required();
  verify->add_option("--seed", seed, "seed (default: FW_AFFINE_SEED, then 0)");
  verify->add_option("--alpha-scale", alpha_scale,
                     "multiply strong-convexity constants (fault injection)")
      ->default_val(1.0);

  auto* constants = app.add_subcommand(
      "constants", "print theory constants and the directional smoothness per map cell");
  constants->add_option("config", config_path, "config file")->required();
  constants->add_option("--seed", seed, "global seed");
  constants->add_option("--dataset", dataset, "overrides problem.dataset")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return cmd_verify(suite_name, resolve_seed(seed, std::nullopt),
                        alpha_scale);
    }
    auto config = affw::parse_config(config_path);
    if (!dataset.empty()) {
      if (config.kind == affw::ProblemKind::projection) {
        throw affw::InputError("--dataset only applies to ERM problems");
      }
      config.dataset = dataset;
    }
    const std::uint64_t s = resolve_seed(seed, config.seed);
    if (constants->parsed()) {
      return affw::print_constants(config, s, std::cout) ? 0 : 1;
    }
    affw::RunSettings settings;
    settings.seed = s;
    settings.jobs = jobs;
    settings.output_dir = output_dir;
    settings.dry_run = dry_run;
    const auto outcome = affw::run_experiment(config, settings, std::cout);
    if (dry_run) return 0;
    std::cout << outcome.cells - outcome.failed_cells << "/" << outcome.cells
              << " cells passed"
              << (outcome.passed ? "" : "; embedded assertions FAILED") << "\n";
    return outcome.passed ? 0 : 1;
  } catch (const affw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
