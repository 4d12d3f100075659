#pragma once

// Estimators and checkers for the convergence theory: directional
// smoothness, the bounds and rates it implies, sampled inequality checks,
// affine-covariance comparisons and empirical rate fits.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "affw/common.hpp"
#include "affw/geometry.hpp"
#include "affw/problems.hpp"
#include "affw/solver.hpp"
#include "affw/stepsize.hpp"

namespace affw {

enum class ConstantSource { analytic, oracle };

std::string to_string(ConstantSource s);

/// Constants of one (problem, gauge) pair.
struct TheoryConstants {
  std::string gauge_id;
  double L_omega = 0.0;
  double mu_omega = 0.0;
  double alpha_omega = 0.0;
  double c_omega = 0.0;
  double kappa_omega = 1.0;
  ConstantSource source = ConstantSource::oracle;
};

/// L_ω / (c_ω α_ω).
double theory_bound_linear(const TheoryConstants& tc);
double best_bound_over_gauges(const std::vector<TheoryConstants>& tcs);
/// max{1/2, 1 − 1/(2𝓛)}.
double theory_rate_linear(double L_dir);
/// 4 h0 max{1, 18 𝓛̃²} / (k + 2)².
double theory_rate_sublinear(double h0, double L_mod, int k);
/// κ_ω √2 L_ω / (α_ω √μ_ω) / √h0.
double theory_bound_modified(const TheoryConstants& tc, double h0);

/// {2⁰, 2⁻¹, …, 2⁻²⁰}.
std::vector<double> default_h_grid();

// A (probe, h) pair is skipped when h²·gap < kRoundoffGuard·max(1, |f(x)|),
// where the difference quotient would be dominated by rounding.
inline constexpr double kRoundoffGuard = 1e-8;

struct SmoothnessEstimate {
  double value = 0.0;
  int probes_used = 0;
  int probes_skipped = 0;
};

/// 𝓛̂ = max over probes x and h of 2[f(x + hδ) − f(x) + h·gap]/(h²·gap)
/// with δ = v(x) − x. Probes with gap ≤ 0 are skipped; throws
/// NumericalError when every probe is skipped.
SmoothnessEstimate estimate_directional_smoothness(
    const Problem& problem, const std::vector<Vector>& probes,
    const std::vector<double>& h_grid = default_h_grid());

/// Same quotient weighted by √((f(x) − f*)/h0), the constant of the
/// modified directional smoothness inequality. Needs problem.fstar.
SmoothnessEstimate estimate_modified_smoothness(
    const Problem& problem, const std::vector<Vector>& probes, double h0,
    const std::vector<double>& h_grid = default_h_grid());

/// Iterates of `reference` (if given) plus `random_points` random members.
std::vector<Vector> default_probes(const Problem& problem,
                                   const Trace* reference,
                                   int random_points = 100,
                                   std::uint64_t seed = 0);

/// Minimum of ω_*(−∇f) over `samples` feasible points (alternating
/// boundary and volume samples) and the iterates of `trajectory`.
double estimate_c_omega(const Problem& problem, const Gauge& gauge,
                        int samples, std::uint64_t seed,
                        const Trace* trajectory = nullptr);

/// L_ω, μ_ω from the objective's Euclidean constants and the gauge radii,
/// α_ω from the sampled strong-convexity oracle (plain variant), c_ω from
/// estimate_c_omega, κ_ω analytic.
TheoryConstants oracle_constants(const Problem& problem, const Gauge& gauge,
                                 int samples, std::uint64_t seed,
                                 const Trace* trajectory = nullptr);

struct RateReport {
  double empirical_rho = 1.0;
  double theory_rho = 1.0;
  std::optional<double> sublinear_C;
  bool passed = false;
  int window_begin = 0;
  int window_end = 0;  // exclusive
  /// Index of the first element that violates a checked bound.
  std::optional<int> violation_index;
  /// Smallest (bound − value) seen; negative beyond the slack on failure.
  double worst_slack = 0.0;
};

enum class RateSeries { primal_gap, fw_gap };

struct FitWindow {
  int begin = 5;   // burn-in
  int end = -1;    // exclusive, −1 for the whole series
  double floor = 0.0;
};

/// Least-squares slope of log(series_k) over the window; ρ̂ = exp(slope).
/// The window stops at the first value ≤ floor; fewer than 5 remaining
/// points is an InputError. Passes iff ρ̂ ≤ theory_rho + 0.02.
RateReport rate_fit(const std::vector<double>& series, double theory_rho,
                    const FitWindow& window = {});
RateReport rate_fit(const Trace& trace, double theory_rho, RateSeries which,
                    const FitWindow& window = {});

/// h_{k+1} ≤ h_k·max{1/2, 1 − M√h_k} + slack and h_k ≤ C/(k+2)² + slack
/// with C = max{4h_0, 18/M²}.
RateReport recurrence_check(const std::vector<double>& h, double M,
                            double slack = 1e-10);
RateReport recurrence_check(const Trace& trace, double M,
                            double slack = 1e-10);

/// h_{k+1} ≤ max{1/2, 1 − 1/(2𝓛_k)}·h_k + slack using each iteration's
/// accepted constant.
RateReport per_step_contraction_check(const Trace& trace,
                                      double slack = 1e-12);

struct InequalityWorst {
  double slack = std::numeric_limits<double>::infinity();
  int tested = 0;
};

struct InequalityReport {
  InequalityWorst interpolation;    // strong-convexity interpolation
  InequalityWorst gradient_bound;   // ω_*²(−∇f)/(2L) ≤ f − f_min
  InequalityWorst sqrt_suboptimal;  // ω_*(∇f) ≥ √(μ/2)√(f − f*)
  double tolerance = 1e-9;
  bool passed() const;
};

/// Samples feasible (x, y, γ) and checks the three inequalities with the
/// gauge-relative constants μ_ω, L_ω of a quadratic objective. f_min is the
/// unconstrained minimum, f* the constrained one (problem.fstar).
InequalityReport inequality_suite(const Problem& problem, const Gauge& gauge,
                                  int samples, std::uint64_t seed,
                                  double tolerance = 1e-9);

struct CovarianceReport {
  double iterate_deviation = 0.0;
  double step_deviation = 0.0;
  std::optional<double> constant_deviation;
  std::optional<double> max_constant_original;
  std::optional<double> max_constant_transformed;
  int compared = 0;
  Trace original;
  Trace transformed;
};

/// Runs the strategy on the problem and on its transform, maps transformed
/// iterates back with x = By + b and reports the largest relative
/// deviations over the common prefix of the two traces.
CovarianceReport affine_covariance_report(const Problem& problem,
                                          const AffineMap& map,
                                          const StrategySpec& strategy,
                                          const StopCriteria& stop);

/// max over common k ≥ burn_in of max(γ_a/γ_b, γ_b/γ_a), ignoring the final
/// records (which carry no step).
double step_ratio(const Trace& a, const Trace& b, int burn_in);

/// Relative deviation ‖a − b‖ / max(‖a‖, 1).
double relative_deviation(const Vector& a, const Vector& b);

}  // namespace affw
