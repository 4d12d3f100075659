#pragma once

// Experiment configs, cell construction and the runner behind `affw run`
// and `affw constants`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "affw/analysis.hpp"
#include "affw/problems.hpp"
#include "affw/solver.hpp"
#include "affw/stepsize.hpp"

namespace affw {

enum class ProblemKind { projection, quadratic_erm, logistic_erm };
enum class StartPoint { zero, random };

std::string to_string(ProblemKind k);
std::string to_string(StartPoint s);

/// Parsed experiment file. Unset optionals take the defaults listed in
/// config_reference().
struct ExperimentConfig {
  // [experiment]
  std::string name = "experiment";
  std::optional<std::uint64_t> seed;
  // [problem]
  ProblemKind kind = ProblemKind::projection;
  std::optional<int> dim;
  std::optional<double> radius;
  double ratio = 1.1;
  std::optional<std::string> dataset;
  int samples = 500;
  std::optional<StartPoint> x0;
  // [map]
  std::vector<double> conditions = {1.0};
  std::optional<std::uint64_t> map_seed;
  // [solver]
  std::vector<StrategyKind> strategies;
  int max_iters = 500;
  double gap_tol = 1e-10;
  std::optional<double> wall_budget;
  double initial_constant = 1.0;
  // [output]
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Raised for malformed configs; messages carry "source:line:".
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source = "<config>");
ExperimentConfig parse_config(const std::filesystem::path& path);
/// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);
/// Human-readable list of sections, keys and defaults.
std::string config_reference();

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const ExperimentConfig& config);

int effective_dim(const ExperimentConfig& config);
StartPoint effective_start(const ExperimentConfig& config);

/// The untransformed problem of a config (also used as the reference for
/// every map cell).
Problem build_base_problem(const ExperimentConfig& config, std::uint64_t seed);

struct Cell {
  StrategyKind strategy;
  double condition;
  std::string id;  // file stem
};

std::vector<Cell> cell_matrix(const ExperimentConfig& config);

struct RunSettings {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path output_dir;
  bool dry_run = false;
};

struct RunOutcome {
  bool passed = true;
  int cells = 0;
  int failed_cells = 0;
};

/// Runs every cell, writes <output_dir>/<cell>.csv and summary.jsonl and
/// reports whether every embedded assertion passed.
RunOutcome run_experiment(const ExperimentConfig& config,
                          const RunSettings& settings, std::ostream& log);

/// Prints theory constants and the directional-smoothness estimate for each
/// map cell of the config.
bool print_constants(const ExperimentConfig& config, std::uint64_t seed,
                     std::ostream& out);

/// CSV header of per-cell traces.
inline constexpr const char* kTraceCsvHeader =
    "iter,gap,primal_gap,step,L_estimate,lmo_calls,f_evals,grad_evals";

void write_trace_csv(const Trace& trace, std::ostream& out);

}  // namespace affw
