#pragma once

// Step-size rules for the Frank-Wolfe update x + γ(v − x).
//
// Every rule exists as a free function acting on one iteration's context
// and as a stateful StepStrategy that carries its running constant across
// iterations (one strategy instance per solver run).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "affw/common.hpp"
#include "affw/problems.hpp"

namespace affw {

struct StepContext {
  const Vector& x;     // current iterate x_k
  const Vector& v;     // Frank-Wolfe vertex v_k
  const Vector& grad;  // ∇f(x_k)
  double f_x;          // f(x_k)
  int k;
  double gap;          // ⟨−∇f(x_k), v_k − x_k⟩
};

struct StepDecision {
  double gamma = 0.0;
  std::optional<double> L_estimate;
  int f_evals = 0;
  /// The rule declined to move because x_k is already optimal (zero gap,
  /// zero direction or zero suboptimality).
  bool converged = false;
};

/// One sufficient-decrease trial of a backtracking rule.
struct BacktrackTrial {
  double constant;
  double gamma;
  double f_trial;
  double model;
  bool accepted;
};

// Sufficient decrease is tested as f(x(L)) ≤ m(L) + kDecreaseSlack.
inline constexpr double kDecreaseSlack = 1e-12;
inline constexpr int kMaxDoublings = 64;

/// γ = 2/(k + 2).
StepDecision scheduled_step(const StepContext& ctx);

/// argmin over [0,1] of f(x + γd). Closed form when the objective exposes
/// its curvature dᵀHd, golden-section search to width 1e-10 otherwise.
StepDecision exact_linesearch(const StepContext& ctx, const Objective& f);

/// γ = min{1, 1/L}.
StepDecision fixed_inverse_L_step(const StepContext& ctx, double L);

/// γ = min{1, 1/𝓛} for a directional smoothness constant 𝓛.
StepDecision directional_fixed_step(const StepContext& ctx, double L_dir);

/// Backtracking on the Euclidean quadratic model
///   m(L) = f(x) + ⟨∇f, x(L) − x⟩ + (L/2)‖x(L) − x‖²,
///   γ(L) = min{gap / (L‖d‖²), 1},
/// starting from L_prev/2 and doubling until f(x(L)) ≤ m(L).
StepDecision backtracking_norm(const StepContext& ctx, const Objective& f,
                               double L_prev,
                               std::vector<BacktrackTrial>* trials = nullptr);

/// Backtracking on the directional-smoothness model
///   m(𝓛) = f(x) − (γ − 𝓛γ²/2)·gap,  γ(𝓛) = min{1/𝓛, 1},
/// starting from 𝓛_prev/2 and doubling until f(x(𝓛)) ≤ m(𝓛). Only f values
/// and the gap enter, so the output is unchanged by affine
/// reparametrizations of the problem.
StepDecision backtracking_affine_invariant(
    const StepContext& ctx, const Objective& f, double L_dir_prev,
    std::vector<BacktrackTrial>* trials = nullptr);

/// γ = min{1, √((f(x_k) − f*)/h0) / 𝓛̃} with h0 = f(x_0) − f*.
StepDecision modified_step(const StepContext& ctx, double L_mod, double h0,
                           double fstar);

class StepStrategy {
 public:
  virtual ~StepStrategy() = default;
  virtual std::string label() const = 0;
  virtual StepDecision step(const StepContext& ctx, const Objective& f) = 0;
  /// Same rule and parameters, initial state.
  virtual std::unique_ptr<StepStrategy> fresh() const = 0;
};

enum class StrategyKind {
  scheduled,
  exact,
  fixed_inverse_L,
  directional_fixed,
  backtracking_norm,
  backtracking_affine,
  modified,
};

std::string to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_kind(const std::string& name);

struct StrategySpec {
  StrategyKind kind = StrategyKind::exact;
  /// fixed_inverse_L: L; directional_fixed: 𝓛; backtracking: initial
  /// constant; modified: 𝓛̃.
  double constant = 1.0;
  /// modified only; h0 defaults to f(x_0) − f* at the first iteration.
  std::optional<double> fstar;
  std::optional<double> h0;
};

std::unique_ptr<StepStrategy> make_strategy(const StrategySpec& spec);

}  // namespace affw
