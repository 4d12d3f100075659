#include <gtest/gtest.h>

#include "affw/solver.hpp"

namespace affw {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Problem unit_ball_projection(const Vector& xbar, const Vector& x0) {
  return Problem(make_projection_objective(xbar, 1.0),
                 FeasibleSet::ball(1.0, xbar.size()), x0, "projection");
}

Trace run(const Problem& p, StrategyKind kind, StopCriteria stop,
          RunOptions options = {}) {
  auto s = make_strategy({kind, 1.0, p.fstar, std::nullopt});
  return fw_run(p, *s, stop, options);
}

TEST(ConvexUpdate, Values) {
  const Vector x = vec({0, 0}), v = vec({2, 0});
  EXPECT_EQ(convex_update(x, v, 0.0), x);
  EXPECT_EQ(convex_update(x, v, 1.0), v);
  EXPECT_EQ(convex_update(x, v, 0.5), vec({1, 0}));
  EXPECT_THROW(convex_update(x, v, 1.5), InputError);
  EXPECT_THROW(convex_update(x, v, -0.1), InputError);
}

TEST(FwGap, Values) {
  const Problem p = unit_ball_projection(vec({2, 0}), vec({0, 0}));
  EXPECT_DOUBLE_EQ(fw_gap(p, vec({0, 0})), 2.0);
  EXPECT_NEAR(fw_gap(p, vec({1, 0})), 0.0, 1e-15);
}

TEST(FwGap, UpperBoundsSuboptimality) {
  const Problem p = unit_ball_projection(vec({1.2, -0.7, 0.4}), Vector::Zero(3));
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Vector x = p.set.random_member(rng);
    EXPECT_GE(fw_gap(p, x), p.objective->value(x) - *p.fstar - 1e-12);
  }
}

TEST(FwRun, OneExactStepLandsOnBoundaryOptimum) {
  const Problem p = unit_ball_projection(vec({2, 0}), vec({0, 0}));
  const Trace t = run(p, StrategyKind::exact, {100, 1e-12, {}});
  ASSERT_EQ(t.records.size(), 2u);
  EXPECT_EQ(t.records[1].x, vec({1, 0}));
  EXPECT_NEAR(t.records[1].gap, 0.0, 1e-15);
  EXPECT_EQ(t.terminated_by, Termination::gap_tol);
}

TEST(FwRun, OptimalStartGivesSingleRecord) {
  const Problem p = unit_ball_projection(vec({2, 0}), vec({1, 0}));
  const Trace t = run(p, StrategyKind::backtracking_affine, {100, 0.0, {}});
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.terminated_by, Termination::gap_tol);
}

TEST(FwRun, IterationCapBoundsRecords) {
  const Problem p = unit_ball_projection(vec({0.2, 0.1}), vec({-1, 0}));
  const Trace t = run(p, StrategyKind::scheduled, {3, 0.0, {}});
  EXPECT_LE(t.records.size(), 4u);
  EXPECT_EQ(t.terminated_by, Termination::max_iters);
  for (std::size_t k = 0; k < t.records.size(); ++k) {
    EXPECT_EQ(t.records[k].k, static_cast<int>(k));
  }
}

TEST(FwRun, ZeroGradientTerminatesCleanly) {
  const Problem p = unit_ball_projection(vec({0.1, 0.2}), vec({0.1, 0.2}));
  const Trace t = run(p, StrategyKind::scheduled, {10, 0.0, {}});
  EXPECT_EQ(t.terminated_by, Termination::degenerate_gradient);
  EXPECT_EQ(t.records.size(), 1u);
}

TEST(FwRun, RecordsSatisfyInvariants) {
  const Problem p = transform_problem(
      unit_ball_projection(vec({0.9, 0.9, 0.1}), vec({0, 0, 0})),
      AffineMap::random(3, 1e3, 2));
  for (auto kind : {StrategyKind::scheduled, StrategyKind::exact,
                    StrategyKind::backtracking_norm,
                    StrategyKind::backtracking_affine}) {
    const Trace t = run(p, kind, {300, 1e-12, {}});
    for (const auto& r : t.records) {
      EXPECT_GE(r.gap, -1e-12);
      ASSERT_TRUE(r.primal_gap);
      EXPECT_GE(*r.primal_gap, -1e-10);
      EXPECT_GE(r.gamma, 0.0);
      EXPECT_LE(r.gamma, 1.0);
      if (r.L_estimate) EXPECT_GT(*r.L_estimate, 0.0);
      EXPECT_TRUE(p.set.contains(r.x, FeasibleSet::kMembershipTol));
    }
    // Counters are cumulative.
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      EXPECT_GE(t.records[k].lmo_calls, t.records[k - 1].lmo_calls);
      EXPECT_GE(t.records[k].f_evals, t.records[k - 1].f_evals);
      EXPECT_GE(t.records[k].grad_evals, t.records[k - 1].grad_evals);
    }
  }
}

TEST(FwRun, StrideKeepsLastRecord) {
  const Problem p = unit_ball_projection(vec({0.2, 0.1}), vec({-1, 0}));
  const Trace t = run(p, StrategyKind::scheduled, {25, 0.0, {}},
                      RunOptions{false, 10});
  ASSERT_FALSE(t.records.empty());
  EXPECT_EQ(t.records.back().k, 25);
  EXPECT_EQ(t.records.back().x.size(), 2);
  EXPECT_EQ(t.records.front().x.size(), 0);
}

TEST(FwRun, RejectsInvalidStopCriteria) {
  const Problem p = unit_ball_projection(vec({2, 0}), vec({0, 0}));
  EXPECT_THROW(run(p, StrategyKind::exact, {0, 1e-10, {}}), InputError);
  EXPECT_THROW(run(p, StrategyKind::exact, {10, -1.0, {}}), InputError);
}

TEST(FwRun, StrategyErrorsCarryIterationIndex) {
  Problem p = unit_ball_projection(vec({2, 0}), vec({0, 0}));
  auto s = make_strategy({StrategyKind::modified, 1.0, 10.0, 1.0});
  try {
    fw_run(p, *s, {10, 0.0, {}});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration 0"), std::string::npos)
        << e.what();
  }
}

TEST(FwRun, IsDeterministic) {
  const Problem p = unit_ball_projection(vec({1.1, 0.3, -0.4}), vec({0, 0, 0}));
  const Trace a = run(p, StrategyKind::backtracking_affine, {100, 1e-12, {}});
  const Trace b = run(p, StrategyKind::backtracking_affine, {100, 1e-12, {}});
  EXPECT_EQ(a.records, b.records);
}

}  // namespace
}  // namespace affw
