#include "affw/solver.hpp"

#include <algorithm>
#include <chrono>

namespace affw {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::gap_tol:
      return "gap_tol";
    case Termination::max_iters:
      return "max_iters";
    case Termination::budget:
      return "budget";
    case Termination::degenerate_gradient:
      return "degenerate_gradient";
    case Termination::step_converged:
      return "step_converged";
  }
  return "unknown";
}

const IterateRecord& Trace::last() const {
  if (records.empty()) throw InputError("Trace::last: empty trace");
  return records.back();
}

std::optional<double> Trace::max_L_estimate() const {
  std::optional<double> best;
  for (const auto& r : records) {
    if (r.L_estimate && (!best || *r.L_estimate > *best)) best = r.L_estimate;
  }
  return best;
}

std::optional<int> Trace::first_gap_below(double tol) const {
  for (const auto& r : records) {
    if (r.gap <= tol) return r.k;
  }
  return std::nullopt;
}

Vector convex_update(const Vector& x, const Vector& v, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InputError("convex_update: gamma must lie in [0, 1], got " +
                     std::to_string(gamma));
  }
  require_dim(v, x.size(), "convex_update");
  return (1.0 - gamma) * x + gamma * v;
}

double fw_gap(const Problem& problem, const Vector& x) {
  const Vector g = problem.objective->gradient(x);
  if (g.squaredNorm() == 0.0) return 0.0;
  const Vector v = problem.set.lmo(g);
  return g.dot(x - v);
}

namespace {

template <class E>
[[noreturn]] void rethrow_at(const E& e, int k) {
  throw E("iteration " + std::to_string(k) + ": " + e.what());
}

}  // namespace

Trace fw_run(const Problem& problem, StepStrategy& strategy,
             const StopCriteria& stop, const RunOptions& options) {
  if (stop.max_iters < 1) throw InputError("fw_run: max_iters must be >= 1");
  if (!(stop.gap_tol >= 0.0)) throw InputError("fw_run: gap_tol must be >= 0");
  if (options.record_stride < 1) {
    throw InputError("fw_run: record_stride must be >= 1");
  }

  const Objective& f = *problem.objective;
  const FeasibleSet& set = problem.set;
  const auto f0 = f.value_calls();
  const auto g0 = f.gradient_calls();
  const auto l0 = set.lmo_calls();
  const auto start = std::chrono::steady_clock::now();

  Trace trace;
  trace.problem_label = problem.label;
  trace.strategy_label = strategy.label();

  Vector x = problem.x0;
  for (int k = 0;; ++k) {
    IterateRecord rec;
    rec.k = k;
    const double f_x = f.value(x);
    const Vector grad = f.gradient(x);
    if (problem.fstar) rec.primal_gap = f_x - *problem.fstar;

    std::optional<Termination> done;
    Vector v;
    if (grad.squaredNorm() == 0.0) {
      done = Termination::degenerate_gradient;
    } else {
      v = set.lmo(grad);
      rec.gap = grad.dot(x - v);
      if (rec.gap <= stop.gap_tol) {
        done = Termination::gap_tol;
      } else if (k >= stop.max_iters) {
        done = Termination::max_iters;
      } else if (stop.wall_budget) {
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - start;
        if (elapsed.count() > *stop.wall_budget) done = Termination::budget;
      }
    }

    StepDecision step;
    if (!done) {
      const StepContext ctx{x, v, grad, f_x, k, rec.gap};
      try {
        step = strategy.step(ctx, f);
      } catch (const NumericalError& e) {
        rethrow_at(e, k);
      } catch (const InputError& e) {
        rethrow_at(e, k);
      } catch (const DataError& e) {
        rethrow_at(e, k);
      }
      if (step.converged) done = Termination::step_converged;
    }
    if (!done) {
      rec.gamma = step.gamma;
      rec.L_estimate = step.L_estimate;
    }

    rec.lmo_calls = set.lmo_calls() - l0;
    rec.f_evals = f.value_calls() - f0;
    rec.grad_evals = f.gradient_calls() - g0;
    if (done || options.keep_iterates) rec.x = x;
    if (done || k % options.record_stride == 0) {
      trace.records.push_back(std::move(rec));
    }
    if (done) {
      trace.terminated_by = *done;
      break;
    }

    x = convex_update(x, v, step.gamma);
    if (!set.contains(x, FeasibleSet::kMembershipTol)) {
      throw InvariantError("fw_run: iterate " + std::to_string(k + 1) +
                           " left the feasible set (scaled distance " +
                           std::to_string(set.scaled_distance(x)) + ")");
    }
  }
  return trace;
}

}  // namespace affw
