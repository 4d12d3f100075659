#include <gtest/gtest.h>

#include <cmath>

#include "affw/geometry.hpp"
#include "affw/problems.hpp"

namespace affw {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// The square [−1, 1]²: compact, convex, flat faces.
class Square : public ConvexBody {
 public:
  Eigen::Index dim() const override { return 2; }
  bool contains(const Vector& x, double tol) const override {
    return x.cwiseAbs().maxCoeff() <= 1.0 + tol;
  }
  Vector interior_point() const override { return Vector::Zero(2); }
  Vector argmax_linear(const Vector& phi) const override {
    return phi.unaryExpr([](double p) { return p >= 0.0 ? 1.0 : -1.0; });
  }
};

TEST(Gauge, EvaluatesSpecExamples) {
  EXPECT_DOUBLE_EQ(Gauge::norm_ball(2).eval(vec({3, 4})), 5.0);
  const Matrix A = vec({0.25, 1.0}).asDiagonal();
  EXPECT_NEAR(Gauge::ellipsoid(A).eval(vec({2, 0})), 1.0, 1e-15);
  // |x₁ − 0.5τ| ≤ τ at x₁ = −1.5 first holds for τ = 3.
  const auto shifted = Gauge::shifted_ball(vec({0.5, 0}), 1.0);
  EXPECT_NEAR(shifted.eval(vec({-1.5, 0})), 3.0, 3e-12);
}

TEST(Gauge, DualSpecExamples) {
  EXPECT_DOUBLE_EQ(Gauge::norm_ball(2).dual(vec({3, 4})), 5.0);
  EXPECT_NEAR(Gauge::shifted_ball(vec({0.5, 0}), 1.0).dual(vec({1, 0})), 1.5,
              1e-15);
  const Matrix A = vec({0.25, 1.0}).asDiagonal();
  EXPECT_NEAR(Gauge::ellipsoid(A).dual(vec({1, 0})), 2.0, 1e-15);
}

TEST(Gauge, RejectsDimensionMismatch) {
  EXPECT_THROW(Gauge::norm_ball(3).eval(vec({1, 2})), InputError);
  EXPECT_THROW(Gauge::norm_ball(3).dual(vec({1, 2})), InputError);
}

TEST(Gauge, RejectsInvalidBodies) {
  EXPECT_THROW(Gauge::norm_ball(2, -1.0), InputError);
  EXPECT_THROW(Gauge::shifted_ball(vec({2, 0}), 1.0), InputError);
  EXPECT_THROW(Gauge::ellipsoid(vec({1.0, -1.0}).asDiagonal()), InputError);
}

TEST(Gauge, AsymmetryConstants) {
  EXPECT_DOUBLE_EQ(Gauge::norm_ball(3).analytic_asymmetry(), 1.0);
  EXPECT_DOUBLE_EQ(
      Gauge::ellipsoid(vec({1, 4, 9}).asDiagonal()).analytic_asymmetry(), 1.0);
  const auto est =
      asymmetry_constant(Gauge::shifted_ball(vec({0.5, 0}), 1.0), 100000, 1);
  EXPECT_DOUBLE_EQ(est.analytic, 3.0);
  EXPECT_NEAR(est.sampled, 3.0, 1e-3);
  EXPECT_LE(est.sampled, est.analytic + 1e-9);
}

class GaugeAxioms : public ::testing::TestWithParam<int> {
 protected:
  Gauge make() const {
    switch (GetParam()) {
      case 0: return Gauge::norm_ball(4, 1.7);
      case 1: return Gauge::ellipsoid(vec({1, 4, 9, 0.5}).asDiagonal());
      default: return Gauge::shifted_ball(vec({0.3, -0.2, 0.1, 0.0}), 1.0);
    }
  }
};

TEST_P(GaugeAxioms, HomogeneityTriangleAndAsymmetry) {
  const Gauge g = make();
  Rng rng(42 + GetParam());
  EXPECT_EQ(g.eval(Vector::Zero(4)), 0.0);
  const double kappa = g.analytic_asymmetry();
  for (int i = 0; i < 10000; ++i) {
    const Vector x = random_gaussian(rng, 4);
    const Vector y = random_gaussian(rng, 4);
    const double t = 3.0 * uniform01(rng);
    const double wx = g.eval(x);
    ASSERT_GT(wx, 0.0);
    ASSERT_NEAR(g.eval(t * x), t * wx, 1e-10 * std::max(1.0, t * wx));
    ASSERT_LE(g.eval(x + y), wx + g.eval(y) + 1e-10);
    ASSERT_LE(wx / g.eval(-x), kappa + 1e-9);
  }
}

TEST_P(GaugeAxioms, DualIsSupportFunctionOfUnitLevelSet) {
  const Gauge g = make();
  Rng rng(7 + GetParam());
  std::vector<Vector> boundary;
  for (int i = 0; i < 10000; ++i) {
    boundary.push_back(g.unit_level_point(random_unit_vector(rng, 4)));
  }
  for (int i = 0; i < 200; ++i) {
    const Vector v = random_gaussian(rng, 4);
    double best = -1e300;
    for (const auto& x : boundary) best = std::max(best, v.dot(x));
    const double dual = g.dual(v);
    ASSERT_LE(best, dual * (1.0 + 1e-12));
    ASSERT_GE(best, dual * 0.90);  // 4-D sampling gap; exactness tested above
  }
}

INSTANTIATE_TEST_SUITE_P(Bodies, GaugeAxioms, ::testing::Values(0, 1, 2));

TEST(StrongConvexity, UnitBallHasAlphaOne) {
  const auto set = FeasibleSet::ball(1.0, 3);
  const auto cert = strong_convexity_oracle(set, Gauge::norm_ball(3),
                                            ConvexityVariant::asymmetric,
                                            4000, 3);
  EXPECT_NEAR(cert.alpha, 1.0, 0.05);
  EXPECT_EQ(cert.status, CertificateStatus::sampled);
}

TEST(StrongConvexity, HalfLevelSetOfSquaredNormHasAlphaInverseSqrtTwo) {
  const auto set = FeasibleSet::ball(std::sqrt(2.0), 2);
  const auto cert = strong_convexity_oracle(set, Gauge::norm_ball(2),
                                            ConvexityVariant::asymmetric,
                                            4000, 5);
  EXPECT_NEAR(cert.alpha, 1.0 / std::sqrt(2.0), 0.05 / std::sqrt(2.0));
}

TEST(StrongConvexity, PolytopeHasNoStrongConvexity) {
  const Square square;
  const auto cert = strong_convexity_oracle(square, Gauge::norm_ball(2),
                                            ConvexityVariant::asymmetric,
                                            2000, 9);
  EXPECT_LT(cert.alpha, 0.05);
}

TEST(StrongConvexity, CertificatePassesItsOwnSamples) {
  const auto set = FeasibleSet::ellipsoid(vec({1, 4}).asDiagonal(), 1.0,
                                          Vector::Zero(2));
  const Gauge g = Gauge::norm_ball(2);
  const auto cert =
      strong_convexity_oracle(set, g, ConvexityVariant::plain, 2000, 11);
  const auto check = check_strong_convexity(
      set, g, ConvexityVariant::plain, cert.alpha, 2000, 11);
  EXPECT_TRUE(check.passed);
  EXPECT_EQ(check.failures, 0);
}

TEST(ScalingInequality, SpecExamples) {
  const auto ball = FeasibleSet::ball(1.0, 2);
  const Gauge g = Gauge::norm_ball(2);
  auto antipodal = scaling_inequality_check(ball, g, 1.0, vec({-1, 0}),
                                            vec({1, 0}));
  EXPECT_FALSE(antipodal.holds);
  EXPECT_NEAR(antipodal.slack, -2.0, 1e-15);
  antipodal = scaling_inequality_check(ball, g, 0.5, vec({-1, 0}), vec({1, 0}));
  EXPECT_TRUE(antipodal.holds);
  EXPECT_NEAR(antipodal.slack, 0.0, 1e-15);

  const auto fixed = scaling_inequality_check(ball, g, 123.0, vec({1, 0}),
                                              vec({1, 0}));
  EXPECT_TRUE(fixed.holds);
  EXPECT_NEAR(fixed.slack, 0.0, 1e-15);

  const auto center = scaling_inequality_check(ball, g, 0.5, vec({0, 0}),
                                               vec({1, 0}));
  EXPECT_TRUE(center.holds);
  EXPECT_NEAR(center.slack, 0.5, 1e-15);
}

TEST(ScalingInequality, RejectsInfeasiblePoint) {
  const auto ball = FeasibleSet::ball(1.0, 2);
  EXPECT_THROW(scaling_inequality_check(ball, Gauge::norm_ball(2), 0.5,
                                        vec({2, 0}), vec({1, 0})),
               InputError);
}

TEST(ScalingInequality, HoldsWithOracleAlphaOnRandomPairs) {
  const auto ellipse = FeasibleSet::ellipsoid(vec({1, 3, 6}).asDiagonal(), 1.0,
                                              Vector::Zero(3));
  const std::vector<Gauge> gauges = {
      Gauge::norm_ball(3), Gauge::shifted_ball(vec({0.2, 0, -0.1}), 1.0)};
  for (const auto& g : gauges) {
    const auto cert = strong_convexity_oracle(
        ellipse, g, ConvexityVariant::plain, 4000, 21);
    const double alpha = scaling_alpha(cert, g.analytic_asymmetry());
    Rng rng(23);
    for (int i = 0; i < 1000; ++i) {
      const Vector x = ellipse.random_member(rng);
      const Vector phi = random_gaussian(rng, 3);
      const auto r = scaling_inequality_check(ellipse, g, alpha, x, phi, 1e-9);
      ASSERT_TRUE(r.holds) << g.id() << " sample " << i << " slack "
                           << r.slack;
    }
  }
}

TEST(LevelSetAlpha, FormulaPlugs) {
  EXPECT_NEAR(level_set_alpha(1, 1, 1, 1), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(level_set_alpha(2, 1, 1, 1), 0.5, 1e-15);
  EXPECT_NEAR(level_set_alpha(1, 1, 1, 3), 1.0 / (3.0 * std::sqrt(2.0)), 1e-15);
  EXPECT_THROW(level_set_alpha(0, 1, 1, 1), InputError);
  EXPECT_THROW(level_set_alpha(1, 2, 1, 1), InputError);
  EXPECT_THROW(level_set_alpha(1, 1, 1, 0.5), InputError);
}

TEST(LevelSetAlpha, SampledLevelSetOfQuadraticPassesAtFormulaAlpha) {
  // {½xᵀdiag(1,4)x ≤ R} = {xᵀdiag(1,4)x ≤ 2R}.
  const double R = 0.5;
  const auto set = FeasibleSet::ellipsoid(vec({1, 4}).asDiagonal(), 2.0 * R,
                                          Vector::Zero(2));
  const double alpha = level_set_alpha(4.0, 1.0, R, 1.0);
  const auto check = check_strong_convexity(
      set, Gauge::norm_ball(2), ConvexityVariant::asymmetric, alpha, 10000, 31);
  EXPECT_TRUE(check.passed) << check.failures << " failures";
}

}  // namespace
}  // namespace affw
