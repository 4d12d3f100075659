#include "affw/stepsize.hpp"

#include <algorithm>
#include <cmath>

namespace affw {

namespace {

StepDecision converged_decision() {
  StepDecision d;
  d.converged = true;
  return d;
}

void check_constant(double c, const char* what) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InputError(std::string(what) + ": constant must be positive");
  }
}

// Shared doubling loop of both backtracking rules. `gamma_of(L)` is the
// step for a trial constant and `model_of(L, gamma)` the upper model.
template <class GammaOf, class ModelOf>
StepDecision backtrack(const StepContext& ctx, const Objective& f,
                       double prev, GammaOf gamma_of, ModelOf model_of,
                       std::vector<BacktrackTrial>* trials, const char* who) {
  const Vector d = ctx.v - ctx.x;
  double L = prev / 2.0;
  StepDecision out;
  for (int doublings = 0;; ++doublings) {
    if (doublings > kMaxDoublings) {
      throw NumericalError(std::string(who) +
                           ": sufficient decrease not reached after " +
                           std::to_string(kMaxDoublings) +
                           " doublings (non-smooth objective?)");
    }
    const double gamma = gamma_of(L);
    const double f_trial = f.value(ctx.x + gamma * d);
    ++out.f_evals;
    if (std::isnan(f_trial)) {
      throw NumericalError(std::string(who) + ": objective returned NaN");
    }
    const double m = model_of(L, gamma);
    const bool ok = f_trial <= m + kDecreaseSlack;
    if (trials != nullptr) trials->push_back({L, gamma, f_trial, m, ok});
    if (ok) {
      out.gamma = gamma;
      out.L_estimate = L;
      return out;
    }
    L *= 2.0;
  }
}

}  // namespace

StepDecision scheduled_step(const StepContext& ctx) {
  if (ctx.k < 0) throw InputError("scheduled_step: k must be >= 0");
  StepDecision d;
  d.gamma = 2.0 / (ctx.k + 2.0);
  return d;
}

StepDecision exact_linesearch(const StepContext& ctx, const Objective& f) {
  const Vector d = ctx.v - ctx.x;
  if (!(ctx.gap > 0.0) || d.squaredNorm() == 0.0) return converged_decision();

  StepDecision out;
  if (const auto q = f.curvature(d)) {
    out.gamma = *q > 0.0 ? std::clamp(ctx.gap / *q, 0.0, 1.0) : 1.0;
    return out;
  }

  // Golden-section search on [0, 1].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = 1.0;
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = f.value(ctx.x + c * d);
  double fe = f.value(ctx.x + e * d);
  out.f_evals = 2;
  while (b - a > 1e-10) {
    if (fc <= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = f.value(ctx.x + c * d);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = f.value(ctx.x + e * d);
    }
    ++out.f_evals;
  }
  double gamma = 0.5 * (a + b);
  // The endpoints are never probed by the interior points; compare them.
  double best = f.value(ctx.x + gamma * d);
  const double f_one = f.value(ctx.x + d);
  out.f_evals += 2;
  if (f_one < best) {
    gamma = 1.0;
    best = f_one;
  }
  if (ctx.f_x < best) gamma = 0.0;
  out.gamma = gamma;
  return out;
}

StepDecision fixed_inverse_L_step(const StepContext& ctx, double L) {
  (void)ctx;
  check_constant(L, "fixed_inverse_L_step");
  StepDecision d;
  d.gamma = std::min(1.0, 1.0 / L);
  return d;
}

StepDecision directional_fixed_step(const StepContext& ctx, double L_dir) {
  (void)ctx;
  check_constant(L_dir, "directional_fixed_step");
  StepDecision d;
  d.gamma = std::min(1.0, 1.0 / L_dir);
  return d;
}

StepDecision backtracking_norm(const StepContext& ctx, const Objective& f,
                               double L_prev,
                               std::vector<BacktrackTrial>* trials) {
  check_constant(L_prev, "backtracking_norm");
  const double dd = (ctx.v - ctx.x).squaredNorm();
  if (!(ctx.gap > 0.0) || dd == 0.0) return converged_decision();
  auto gamma_of = [&](double L) { return std::min(ctx.gap / (L * dd), 1.0); };
  auto model_of = [&](double L, double gamma) {
    return ctx.f_x - gamma * ctx.gap + 0.5 * L * gamma * gamma * dd;
  };
  return backtrack(ctx, f, L_prev, gamma_of, model_of, trials,
                   "backtracking_norm");
}

StepDecision backtracking_affine_invariant(
    const StepContext& ctx, const Objective& f, double L_dir_prev,
    std::vector<BacktrackTrial>* trials) {
  check_constant(L_dir_prev, "backtracking_affine_invariant");
  if (!(ctx.gap > 0.0)) return converged_decision();
  auto gamma_of = [](double L) { return std::min(1.0 / L, 1.0); };
  auto model_of = [&](double L, double gamma) {
    return ctx.f_x - (gamma - 0.5 * L * gamma * gamma) * ctx.gap;
  };
  return backtrack(ctx, f, L_dir_prev, gamma_of, model_of, trials,
                   "backtracking_affine_invariant");
}

StepDecision modified_step(const StepContext& ctx, double L_mod, double h0,
                           double fstar) {
  check_constant(L_mod, "modified_step");
  if (!(h0 > 0.0)) throw InputError("modified_step: h0 must be > 0");
  const double h = ctx.f_x - fstar;
  if (h < -1e-12) {
    throw NumericalError("modified_step: f(x_k) is below f* by " +
                         std::to_string(-h) + "; f* is inconsistent");
  }
  if (h <= 0.0) return converged_decision();
  StepDecision d;
  d.gamma = std::min(1.0, std::sqrt(h / h0) / L_mod);
  return d;
}

// --- strategies ------------------------------------------------------------

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::scheduled:
      return "scheduled";
    case StrategyKind::exact:
      return "exact";
    case StrategyKind::fixed_inverse_L:
      return "fixed_L";
    case StrategyKind::directional_fixed:
      return "directional";
    case StrategyKind::backtracking_norm:
      return "backtracking_norm";
    case StrategyKind::backtracking_affine:
      return "backtracking_affine";
    case StrategyKind::modified:
      return "modified";
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy_kind(const std::string& name) {
  for (auto k : {StrategyKind::scheduled, StrategyKind::exact,
                 StrategyKind::fixed_inverse_L, StrategyKind::directional_fixed,
                 StrategyKind::backtracking_norm,
                 StrategyKind::backtracking_affine, StrategyKind::modified}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

class ScheduledStrategy final : public StepStrategy {
 public:
  std::string label() const override { return "scheduled"; }
  StepDecision step(const StepContext& ctx, const Objective&) override {
    return scheduled_step(ctx);
  }
  std::unique_ptr<StepStrategy> fresh() const override {
    return std::make_unique<ScheduledStrategy>();
  }
};

class ExactStrategy final : public StepStrategy {
 public:
  std::string label() const override { return "exact"; }
  StepDecision step(const StepContext& ctx, const Objective& f) override {
    return exact_linesearch(ctx, f);
  }
  std::unique_ptr<StepStrategy> fresh() const override {
    return std::make_unique<ExactStrategy>();
  }
};

class FixedStrategy final : public StepStrategy {
 public:
  FixedStrategy(double c, bool directional) : c_(c), directional_(directional) {
    check_constant(c_, "fixed step");
  }
  std::string label() const override {
    return directional_ ? "directional" : "fixed_L";
  }
  StepDecision step(const StepContext& ctx, const Objective&) override {
    auto d = directional_ ? directional_fixed_step(ctx, c_)
                          : fixed_inverse_L_step(ctx, c_);
    d.L_estimate = c_;
    return d;
  }
  std::unique_ptr<StepStrategy> fresh() const override {
    return std::make_unique<FixedStrategy>(c_, directional_);
  }

 private:
  double c_;
  bool directional_;
};

class BacktrackingStrategy final : public StepStrategy {
 public:
  BacktrackingStrategy(double initial, bool affine)
      : initial_(initial), current_(initial), affine_(affine) {
    check_constant(initial_, "backtracking");
  }
  std::string label() const override {
    return affine_ ? "backtracking_affine" : "backtracking_norm";
  }
  StepDecision step(const StepContext& ctx, const Objective& f) override {
    auto d = affine_ ? backtracking_affine_invariant(ctx, f, current_)
                     : backtracking_norm(ctx, f, current_);
    if (d.L_estimate) current_ = *d.L_estimate;
    return d;
  }
  std::unique_ptr<StepStrategy> fresh() const override {
    return std::make_unique<BacktrackingStrategy>(initial_, affine_);
  }

 private:
  double initial_;
  double current_;
  bool affine_;
};

class ModifiedStrategy final : public StepStrategy {
 public:
  ModifiedStrategy(double L_mod, double fstar, std::optional<double> h0)
      : L_mod_(L_mod), fstar_(fstar), h0_given_(h0), h0_(h0) {
    check_constant(L_mod_, "modified step");
  }
  std::string label() const override { return "modified"; }
  StepDecision step(const StepContext& ctx, const Objective&) override {
    if (!h0_) h0_ = ctx.f_x - fstar_;
    if (!(*h0_ > 0.0)) {
      StepDecision d;
      d.converged = true;
      return d;
    }
    auto d = modified_step(ctx, L_mod_, *h0_, fstar_);
    d.L_estimate = L_mod_;
    return d;
  }
  std::unique_ptr<StepStrategy> fresh() const override {
    return std::make_unique<ModifiedStrategy>(L_mod_, fstar_, h0_given_);
  }

 private:
  double L_mod_;
  double fstar_;
  std::optional<double> h0_given_;
  std::optional<double> h0_;
};

}  // namespace

std::unique_ptr<StepStrategy> make_strategy(const StrategySpec& spec) {
  switch (spec.kind) {
    case StrategyKind::scheduled:
      return std::make_unique<ScheduledStrategy>();
    case StrategyKind::exact:
      return std::make_unique<ExactStrategy>();
    case StrategyKind::fixed_inverse_L:
      return std::make_unique<FixedStrategy>(spec.constant, false);
    case StrategyKind::directional_fixed:
      return std::make_unique<FixedStrategy>(spec.constant, true);
    case StrategyKind::backtracking_norm:
      return std::make_unique<BacktrackingStrategy>(spec.constant, false);
    case StrategyKind::backtracking_affine:
      return std::make_unique<BacktrackingStrategy>(spec.constant, true);
    case StrategyKind::modified:
      if (!spec.fstar) {
        throw InputError("modified step needs a known or proxied f*");
      }
      return std::make_unique<ModifiedStrategy>(spec.constant, *spec.fstar,
                                                spec.h0);
  }
  throw InputError("make_strategy: unknown strategy kind");
}

}  // namespace affw
