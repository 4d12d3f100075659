#include <gtest/gtest.h>

#include <cmath>

#include "affw/analysis.hpp"
#include "affw/solver.hpp"
#include "affw/stepsize.hpp"

namespace affw {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// f = ½‖x‖² at x = (1, 0) with vertex v = (−1, 0): gap 2, d = (−2, 0).
struct HalfSquaredNorm {
  std::shared_ptr<ProjectionObjective> f = make_projection_objective(vec({0, 0}));
  Vector x = vec({1, 0});
  Vector v = vec({-1, 0});
  Vector grad = f->gradient(x);
  double fx = f->value(x);
  StepContext ctx(int k = 0) const {
    return {x, v, grad, fx, k, grad.dot(x - v)};
  }
};

StepContext context(const Vector& x, const Vector& v, const Vector& g,
                    double fx, int k) {
  return {x, v, g, fx, k, g.dot(x - v)};
}

TEST(Scheduled, Values) {
  HalfSquaredNorm s;
  EXPECT_DOUBLE_EQ(scheduled_step(s.ctx(0)).gamma, 1.0);
  EXPECT_DOUBLE_EQ(scheduled_step(s.ctx(2)).gamma, 0.5);
  EXPECT_DOUBLE_EQ(scheduled_step(s.ctx(8)).gamma, 0.2);
  EXPECT_FALSE(scheduled_step(s.ctx(8)).L_estimate);
  EXPECT_EQ(scheduled_step(s.ctx(8)).f_evals, 0);
}

TEST(ExactLinesearch, ClosedFormExamples) {
  auto f = make_projection_objective(vec({1, 0}));
  const Vector x = vec({0, 0}), v = vec({1, 0});
  const Vector g = f->gradient(x);
  EXPECT_DOUBLE_EQ(exact_linesearch(context(x, v, g, f->value(x), 0), *f).gamma,
                   1.0);
  HalfSquaredNorm s;
  EXPECT_DOUBLE_EQ(exact_linesearch(s.ctx(), *s.f).gamma, 0.5);
}

TEST(ExactLinesearch, ZeroDirectionSignalsConvergence) {
  HalfSquaredNorm s;
  const auto d = exact_linesearch(context(s.x, s.x, s.grad, s.fx, 0), *s.f);
  EXPECT_TRUE(d.converged);
  EXPECT_EQ(d.gamma, 0.0);
}

TEST(ExactLinesearch, GoldenSectionMatchesClosedFormOnNonQuadratic) {
  auto data = std::make_shared<Dataset>(
      synthesize_dataset(40, 3, DatasetKind::classification, 1));
  auto f = make_erm_objective(data, Loss::logistic);
  const Vector x = vec({0.1, -0.2, 0.0});
  const Vector g = f->gradient(x);
  const Vector v = lmo_ball(1.0, Vector::Zero(3), g);
  const auto dec = exact_linesearch(context(x, v, g, f->value(x), 0), *f);
  EXPECT_GT(dec.f_evals, 10);
  // Independent check: dense grid.
  double best_gamma = 0.0, best = 1e300;
  for (int i = 0; i <= 100000; ++i) {
    const double t = i / 100000.0;
    const double val = f->value(x + t * (v - x));
    if (val < best) best = val, best_gamma = t;
  }
  EXPECT_NEAR(dec.gamma, best_gamma, 2e-5);
}

TEST(FixedSteps, Values) {
  HalfSquaredNorm s;
  EXPECT_DOUBLE_EQ(fixed_inverse_L_step(s.ctx(), 1.0).gamma, 1.0);
  EXPECT_DOUBLE_EQ(fixed_inverse_L_step(s.ctx(), 4.0).gamma, 0.25);
  EXPECT_DOUBLE_EQ(fixed_inverse_L_step(s.ctx(), 0.5).gamma, 1.0);
  EXPECT_DOUBLE_EQ(directional_fixed_step(s.ctx(), 2.0).gamma, 0.5);
  EXPECT_DOUBLE_EQ(directional_fixed_step(s.ctx(), 1.0).gamma, 1.0);
  EXPECT_DOUBLE_EQ(directional_fixed_step(s.ctx(), 0.25).gamma, 1.0);
  EXPECT_THROW(fixed_inverse_L_step(s.ctx(), 0.0), InputError);
  EXPECT_THROW(directional_fixed_step(s.ctx(), -1.0), InputError);
}

TEST(BacktrackingNorm, HandTrace) {
  HalfSquaredNorm s;
  std::vector<BacktrackTrial> trials;
  const auto d = backtracking_norm(s.ctx(), *s.f, 1.0, &trials);
  ASSERT_EQ(trials.size(), 2u);
  EXPECT_EQ(trials[0].constant, 0.5);
  EXPECT_FALSE(trials[0].accepted);
  EXPECT_EQ(trials[1].constant, 1.0);
  EXPECT_TRUE(trials[1].accepted);
  EXPECT_EQ(trials[1].model, 0.0);
  EXPECT_EQ(d.gamma, 0.5);
  EXPECT_EQ(*d.L_estimate, 1.0);
  EXPECT_EQ(convex_update(s.x, s.v, d.gamma), vec({0, 0}));
}

TEST(BacktrackingNorm, WarmStartAtTwiceTrueConstantAcceptsFirstTrial) {
  HalfSquaredNorm s;
  std::vector<BacktrackTrial> trials;
  const auto d = backtracking_norm(s.ctx(), *s.f, 2.0, &trials);
  ASSERT_EQ(trials.size(), 1u);
  EXPECT_EQ(*d.L_estimate, 1.0);
  EXPECT_EQ(d.f_evals, 1);
}

TEST(BacktrackingAffine, HandTrace) {
  HalfSquaredNorm s;
  std::vector<BacktrackTrial> trials;
  const auto d = backtracking_affine_invariant(s.ctx(), *s.f, 1.0, &trials);
  ASSERT_EQ(trials.size(), 3u);
  const double constants[] = {0.5, 1.0, 2.0};
  const double gammas[] = {1.0, 1.0, 0.5};
  const double models[] = {-1.0, -0.5, 0.0};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(trials[i].constant, constants[i]);
    EXPECT_EQ(trials[i].gamma, gammas[i]);
    EXPECT_EQ(trials[i].model, models[i]);
    EXPECT_EQ(trials[i].accepted, i == 2);
  }
  EXPECT_EQ(d.gamma, 0.5);
  EXPECT_EQ(*d.L_estimate, 2.0);
}

TEST(Backtracking, GapZeroSignalsConvergence) {
  HalfSquaredNorm s;
  const Vector g0 = Vector::Zero(2);
  const auto ctx = context(s.x, s.v, g0, s.fx, 0);
  EXPECT_TRUE(backtracking_norm(ctx, *s.f, 1.0).converged);
  EXPECT_TRUE(backtracking_affine_invariant(ctx, *s.f, 1.0).converged);
}

TEST(Backtracking, NanObjectiveIsANumericalError) {
  class NanObjective : public Objective {
   public:
    Eigen::Index dim() const override { return 2; }
   protected:
    double compute_value(const Vector&) const override { return std::nan(""); }
    Vector compute_gradient(const Vector& x) const override { return x; }
  } f;
  HalfSquaredNorm s;
  EXPECT_THROW(backtracking_norm(s.ctx(), f, 1.0), NumericalError);
  EXPECT_THROW(backtracking_affine_invariant(s.ctx(), f, 1.0), NumericalError);
}

TEST(BacktrackingAffine, AcceptedModelDominatesAndWarmStartQuantizes) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector xbar = 1.5 * random_unit_vector(rng, 4);
    auto f = make_projection_objective(xbar);
    const auto set = FeasibleSet::ball(1.0, 4);
    const Vector x = set.random_member(rng);
    const Vector g = f->gradient(x);
    const Vector v = set.lmo(g);
    const double prev = std::ldexp(1.0, int(trial % 7) - 3);
    std::vector<BacktrackTrial> trials;
    const auto d = backtracking_affine_invariant(
        context(x, v, g, f->value(x), 0), *f, prev, &trials);
    ASSERT_TRUE(trials.back().accepted);
    EXPECT_LE(f->value(convex_update(x, v, d.gamma)),
              trials.back().model + kDecreaseSlack);
    // Accepted constant = (prev/2)·2^j.
    const double j = std::log2(*d.L_estimate / (prev / 2.0));
    EXPECT_NEAR(j, std::round(j), 1e-12);
  }
}

TEST(BacktrackingAffine, IdenticalTrailUnderAffineMap) {
  const Problem p(make_projection_objective(vec({1.3, 0.4, -0.2}), 1.0),
                  FeasibleSet::ball(1.0, 3), vec({0.0, 0.1, 0.2}), "p");
  const Problem t = transform_problem(p, AffineMap::random(3, 100.0, 5));
  auto a = make_strategy({StrategyKind::backtracking_affine, 1.0, {}, {}});
  auto b = a->fresh();
  const Trace ta = fw_run(p, *a, {60, 0.0, {}});
  const Trace tb = fw_run(t, *b, {60, 0.0, {}});
  ASSERT_EQ(ta.records.size(), tb.records.size());
  for (std::size_t k = 0; k + 1 < ta.records.size(); ++k) {
    EXPECT_NEAR(tb.records[k].gamma, ta.records[k].gamma,
                1e-6 * ta.records[k].gamma);
    EXPECT_EQ(tb.records[k].L_estimate, ta.records[k].L_estimate);
  }
}

TEST(BacktrackingAffine, RecoversFromHugeInitialConstant) {
  const Problem p(make_projection_objective(vec({1.2, 0.3}), 1.0),
                  FeasibleSet::ball(1.0, 2), vec({-0.5, 0.0}), "p");
  auto s = make_strategy(
      {StrategyKind::backtracking_affine, std::ldexp(1.0, 60), {}, {}});
  const Trace t = fw_run(p, *s, {200, 1e-12, {}});
  ASSERT_GT(t.records.size(), 3u);
  EXPECT_LT(t.records[0].gamma, 1e-15);
  // Each iteration halves until the true constant is reached.
  for (std::size_t k = 1; k < 40 && k + 1 < t.records.size(); ++k) {
    const double prev = *t.records[k - 1].L_estimate;
    const double cur = *t.records[k].L_estimate;
    if (prev > 64.0) EXPECT_EQ(cur, prev / 2.0) << "k=" << k;
  }
  EXPECT_EQ(t.terminated_by, Termination::gap_tol);
}

TEST(BacktrackingNorm, StepsStayAboveDirectionalFloorOnBall) {
  const Problem p(make_projection_objective(vec({1.4, -0.2, 0.5}), 1.0),
                  FeasibleSet::ball(1.0, 3), vec({0.2, 0.2, 0.2}), "p");
  auto ref = make_strategy({StrategyKind::backtracking_affine, 1.0, {}, {}});
  const Trace tr = fw_run(p, *ref, {200, 1e-12, {}});
  const double Lhat =
      estimate_directional_smoothness(p, default_probes(p, &tr, 100, 1)).value;
  auto s = make_strategy({StrategyKind::backtracking_norm, 1.0, {}, {}});
  const Trace t = fw_run(p, *s, {200, 1e-12, {}});
  for (std::size_t k = 5; k + 1 < t.records.size(); ++k) {
    EXPECT_GE(t.records[k].gamma, std::min(1.0, 1.0 / (2.0 * Lhat)) - 1e-12);
  }
}

TEST(ModifiedStep, Values) {
  HalfSquaredNorm s;  // f(x) = 0.5, f* = 0
  EXPECT_DOUBLE_EQ(modified_step(s.ctx(), 4.0, 0.5, 0.0).gamma, 0.25);
  EXPECT_DOUBLE_EQ(modified_step(s.ctx(), 0.5, 0.5, 0.0).gamma, 1.0);
  EXPECT_DOUBLE_EQ(modified_step(s.ctx(), 1.0, 2.0, 0.0).gamma, 0.5);
  const auto at_opt = modified_step(s.ctx(), 1.0, 2.0, 0.5);
  EXPECT_TRUE(at_opt.converged);
  EXPECT_EQ(at_opt.gamma, 0.0);
  EXPECT_NEAR(modified_step(s.ctx(), 1.0, 2.0, 0.5 - 1e-12).gamma, 0.0, 1e-6);
  EXPECT_THROW(modified_step(s.ctx(), 1.0, 2.0, 0.6), NumericalError);
  EXPECT_THROW(modified_step(s.ctx(), 1.0, 0.0, 0.0), InputError);
}

TEST(Strategies, ParseAndFreshState) {
  for (auto k : {StrategyKind::scheduled, StrategyKind::exact,
                 StrategyKind::fixed_inverse_L, StrategyKind::directional_fixed,
                 StrategyKind::backtracking_norm,
                 StrategyKind::backtracking_affine, StrategyKind::modified}) {
    EXPECT_EQ(parse_strategy_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_strategy_kind("nope"));
  EXPECT_THROW(make_strategy({StrategyKind::modified, 1.0, {}, {}}),
               InputError);

  HalfSquaredNorm s;
  auto a = make_strategy({StrategyKind::backtracking_affine, 1.0, {}, {}});
  const auto first = a->step(s.ctx(), *s.f);
  a->step(s.ctx(1), *s.f);
  auto b = a->fresh();
  const auto again = b->step(s.ctx(), *s.f);
  EXPECT_EQ(first.gamma, again.gamma);
  EXPECT_EQ(first.L_estimate, again.L_estimate);
}

}  // namespace
}  // namespace affw
