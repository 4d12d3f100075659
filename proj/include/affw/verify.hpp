#pragma once

// Built-in problem batteries and the property checks run on them. Each
// check returns one named pass/fail line; suites group them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affw/problems.hpp"

namespace affw {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  /// Multiplies every strong-convexity constant before it is used
  /// (fault injection; 1 leaves the checks untouched).
  double alpha_scale = 1.0;
};

enum class Suite { geometry, inequalities, invariance, rates, all };

std::string to_string(Suite s);
std::optional<Suite> parse_suite(const std::string& name);

/// Projection of x̄ onto the ball of radius R centered at the origin, with
/// ‖x̄‖ = ratio·R along a random direction and a random feasible x0.
Problem ball_projection_problem(Eigen::Index dim, double radius, double ratio,
                                std::uint64_t seed);

/// Untransformed ball projections of varying dimension, radius and
/// ‖x̄‖/R > 1.
std::vector<Problem> ball_projection_battery(std::uint64_t seed);

/// Ball and ellipsoid problems whose unconstrained optimum lies strictly
/// outside the set (projections and random quadratics).
std::vector<Problem> outside_optimum_battery(std::uint64_t seed);

// One check per property; names describe the property.
CheckResult check_affine_covariance(const VerifyOptions& opt);
CheckResult check_backtracking_invariance(const VerifyOptions& opt);
CheckResult check_backtracking_constant(const VerifyOptions& opt);
CheckResult check_directional_bound(const VerifyOptions& opt);
CheckResult check_linear_rate(const VerifyOptions& opt);
CheckResult check_norm_backtracking_steps(const VerifyOptions& opt);
CheckResult check_accelerated_sublinear(const VerifyOptions& opt);
CheckResult check_geometry(const VerifyOptions& opt);
CheckResult check_inequalities(const VerifyOptions& opt);
CheckResult check_hand_traces(const VerifyOptions& opt);

/// Runs the checks of a suite in a fixed order, catching library errors
/// into failed results.
std::vector<CheckResult> run_suite(Suite suite, const VerifyOptions& opt);

}  // namespace affw
