#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affw/common.hpp"
#include "affw/problems.hpp"
#include "affw/stepsize.hpp"

namespace affw {

struct StopCriteria {
  int max_iters = 1000;
  double gap_tol = 1e-10;
  std::optional<double> wall_budget;  // seconds
};

struct RunOptions {
  /// Store x_k in every record. The final record always carries its iterate.
  bool keep_iterates = true;
  /// Keep every n-th record (plus the last one).
  int record_stride = 1;
};

struct IterateRecord {
  int k = 0;
  Vector x;
  double gap = 0.0;
  std::optional<double> primal_gap;
  double gamma = 0.0;
  std::optional<double> L_estimate;
  std::uint64_t lmo_calls = 0;
  std::uint64_t f_evals = 0;
  std::uint64_t grad_evals = 0;

  bool operator==(const IterateRecord&) const = default;
};

enum class Termination {
  gap_tol,
  max_iters,
  budget,
  degenerate_gradient,
  step_converged,
};

std::string to_string(Termination t);

struct Trace {
  std::vector<IterateRecord> records;
  std::string problem_label;
  std::string strategy_label;
  Termination terminated_by = Termination::max_iters;

  const IterateRecord& last() const;
  /// Largest accepted constant over the run, if the strategy reports one.
  std::optional<double> max_L_estimate() const;
  /// First iteration with gap ≤ tol, if any.
  std::optional<int> first_gap_below(double tol) const;
};

/// Frank-Wolfe: x_{k+1} = (1 − γ_k)x_k + γ_k v_k with v_k the LMO output.
Trace fw_run(const Problem& problem, StepStrategy& strategy,
             const StopCriteria& stop, const RunOptions& options = {});

/// ⟨−∇f(x), v(x) − x⟩.
double fw_gap(const Problem& problem, const Vector& x);

/// (1 − γ)x + γv, γ ∈ [0, 1].
Vector convex_update(const Vector& x, const Vector& v, double gamma);

}  // namespace affw
