#include "affw/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "affw/analysis.hpp"
#include "affw/geometry.hpp"
#include "affw/solver.hpp"
#include "affw/stepsize.hpp"

namespace affw {

std::string to_string(Suite s) {
  switch (s) {
    case Suite::geometry:
      return "geometry";
    case Suite::inequalities:
      return "inequalities";
    case Suite::invariance:
      return "invariance";
    case Suite::rates:
      return "rates";
    case Suite::all:
      return "all";
  }
  return "unknown";
}

std::optional<Suite> parse_suite(const std::string& name) {
  for (auto s : {Suite::geometry, Suite::inequalities, Suite::invariance,
                 Suite::rates, Suite::all}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Accumulates sub-check outcomes into one detail line.
class Detail {
 public:
  template <class T>
  Detail& operator<<(const T& v) {
    out_ << v;
    return *this;
  }
  void fail(const std::string& what) {
    ok_ = false;
    failed_.push_back(what);
  }
  bool ok() const { return ok_; }
  std::string str() const {
    std::string s = out_.str();
    if (!failed_.empty()) {
      s += " | failed:";
      for (const auto& f : failed_) s += " " + f + ";";
    }
    return s;
  }

 private:
  std::ostringstream out_ = [] {
    std::ostringstream o;
    o.precision(4);
    return o;
  }();
  bool ok_ = true;
  std::vector<std::string> failed_;
};

CheckResult finish(std::string name, const Detail& d, Clock::time_point t0) {
  return {std::move(name), d.ok(), d.str(), seconds_since(t0)};
}

StrategySpec affine_backtracking() {
  return {StrategyKind::backtracking_affine, 1.0, std::nullopt, std::nullopt};
}

StrategySpec norm_backtracking() {
  return {StrategyKind::backtracking_norm, 1.0, std::nullopt, std::nullopt};
}

Trace run(const Problem& p, const StrategySpec& spec, StopCriteria stop,
          RunOptions options = {}) {
  auto s = make_strategy(spec);
  return fw_run(p, *s, stop, options);
}

Matrix diagonal(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v.asDiagonal();
}

}  // namespace

// --- batteries -------------------------------------------------------------

Problem ball_projection_problem(Eigen::Index dim, double radius, double ratio,
                                std::uint64_t seed) {
  Rng rng(seed);
  const Vector xbar = ratio * radius * random_unit_vector(rng, dim);
  auto set = FeasibleSet::ball(radius, dim);
  Vector x0 = set.random_member(rng);
  std::ostringstream label;
  label << "projection(d=" << dim << ",R=" << radius << ",ratio=" << ratio
        << ")";
  return Problem(make_projection_objective(xbar, radius), std::move(set),
                 std::move(x0), label.str());
}

std::vector<Problem> ball_projection_battery(std::uint64_t seed) {
  struct Cell {
    Eigen::Index dim;
    double radius;
    double ratio;
  };
  const Cell cells[] = {{2, 1.0, 1.1}, {5, 0.5, 1.5}, {20, 1.0, 1.1},
                        {20, 3.0, 2.0}, {50, 1.0, 1.3}, {10, 2.0, 4.0}};
  std::vector<Problem> out;
  std::uint64_t i = 0;
  for (const auto& c : cells) {
    out.push_back(ball_projection_problem(c.dim, c.radius, c.ratio,
                                          seed * 1000 + 17 * ++i));
  }
  return out;
}

namespace {

// ½(x − x̄)ᵀH(x − x̄) with eigenvalues log-spaced in [1, cond] and a random
// rotation; x̄ at distance `outside`·(set extent) from the origin.
std::shared_ptr<QuadraticObjective> random_quadratic(Rng& rng,
                                                     Eigen::Index dim,
                                                     double cond,
                                                     const Vector& xbar) {
  const Matrix G = Matrix::NullaryExpr(dim, dim, [&] {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
  });
  const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Vector eig(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    eig[i] = dim == 1 ? 1.0
                      : std::pow(cond, static_cast<double>(i) /
                                           static_cast<double>(dim - 1));
  }
  const Matrix H = Q * eig.asDiagonal() * Q.transpose();
  return std::make_shared<QuadraticObjective>(0.5 * (H + H.transpose()), xbar);
}

Problem quadratic_ball_problem(Eigen::Index dim, double radius, double cond,
                               double ratio, std::uint64_t seed) {
  Rng rng(seed);
  const Vector xbar = ratio * radius * random_unit_vector(rng, dim);
  auto f = random_quadratic(rng, dim, cond, xbar);
  f->known_fstar = minimize_quadratic_on_ball(*f, radius, Vector::Zero(dim))
                       .value;
  f->reset_counters();
  auto set = FeasibleSet::ball(radius, dim);
  Vector x0 = set.random_member(rng);
  std::ostringstream label;
  label << "quadratic(d=" << dim << ",R=" << radius << ",cond=" << cond
        << ")";
  return Problem(f, std::move(set), std::move(x0), label.str());
}

}  // namespace

std::vector<Problem> outside_optimum_battery(std::uint64_t seed) {
  std::vector<Problem> out;
  out.push_back(ball_projection_problem(2, 1.0, 2.0, seed * 1000 + 1));
  out.push_back(ball_projection_problem(10, 1.0, 1.1, seed * 1000 + 2));
  out.push_back(ball_projection_problem(20, 2.0, 1.5, seed * 1000 + 3));
  out.push_back(quadratic_ball_problem(5, 1.0, 10.0, 3.0, seed * 1000 + 4));

  Rng rng(seed * 1000 + 5);
  {
    const Matrix A = diagonal({1.0, 4.0, 9.0});
    auto set = FeasibleSet::ellipsoid(A, 1.0, Vector::Zero(3));
    const Vector xbar = 2.0 * set.boundary_point(random_unit_vector(rng, 3));
    Vector x0 = set.random_member(rng);
    out.emplace_back(make_projection_objective(xbar), std::move(set),
                     std::move(x0), "projection-ellipsoid(d=3)");
  }
  {
    const Matrix A = diagonal({1.0, 2.0, 2.0, 5.0, 10.0});
    auto set = FeasibleSet::ellipsoid(A, 2.0, Vector::Zero(5));
    const Vector xbar = 1.5 * set.boundary_point(random_unit_vector(rng, 5));
    auto f = random_quadratic(rng, 5, 5.0, xbar);
    Vector x0 = set.random_member(rng);
    out.emplace_back(f, std::move(set), std::move(x0),
                     "quadratic-ellipsoid(d=5)");
  }
  return out;
}

// --- checks ----------------------------------------------------------------

CheckResult check_affine_covariance(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  const Problem p = ball_projection_problem(20, 1.0, 1.1, opt.seed + 101);
  const StrategySpec exact{StrategyKind::exact, 1.0, std::nullopt,
                           std::nullopt};
  const StopCriteria stop{50, 0.0, std::nullopt};
  const std::pair<double, double> cases[] = {{1e2, 1e-8}, {1e6, 1e-3}};
  for (const auto& [kappa, tol] : cases) {
    const auto map = AffineMap::random(20, kappa, opt.seed + 202);
    const auto rep = affine_covariance_report(p, map, exact, stop);
    d << "kappa=" << kappa << ": dev=" << rep.iterate_deviation << " over "
      << rep.compared << " iterates; ";
    if (!(rep.iterate_deviation <= tol)) {
      d.fail("iterate deviation at kappa=" + std::to_string(kappa));
    }
  }
  const double secs = seconds_since(t0);
  d << "time=" << secs << "s";
  if (secs >= 1.0) d.fail("runtime");
  return finish("affine covariance of exact line-search", d, t0);
}

CheckResult check_backtracking_invariance(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  const Problem p = ball_projection_problem(20, 1.0, 1.1, opt.seed + 101);
  const auto map = AffineMap::random(20, 1e6, opt.seed + 303);
  const auto rep = affine_covariance_report(p, map, affine_backtracking(),
                                            {200, 1e-10, std::nullopt});
  const double cdev = rep.constant_deviation.value_or(0.0);
  d << "step dev=" << rep.step_deviation << ", constant dev=" << cdev
    << ", max constant " << rep.max_constant_original.value_or(0.0) << " vs "
    << rep.max_constant_transformed.value_or(0.0) << ", records "
    << rep.original.records.size() << " vs "
    << rep.transformed.records.size() << "; ";
  if (!(rep.step_deviation <= 1e-6)) d.fail("step sequence");
  if (!(cdev <= 1e-6)) d.fail("constant sequence");
  if (rep.max_constant_original != rep.max_constant_transformed) {
    d.fail("max constant");
  }
  const double secs = seconds_since(t0);
  d << "time=" << secs << "s";
  if (secs >= 1.0) d.fail("runtime");
  return finish("affine invariance of affine-invariant backtracking", d, t0);
}

CheckResult check_backtracking_constant(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  const double L0 = affine_backtracking().constant;
  double worst = 0.0;
  for (const Problem& p : ball_projection_battery(opt.seed)) {
    const Trace t = run(p, affine_backtracking(), {500, 1e-10, std::nullopt});
    const auto probes = default_probes(p, &t, 100, opt.seed + 7);
    const double Lhat = estimate_directional_smoothness(p, probes).value;
    const int k0 =
        std::max(0, static_cast<int>(std::ceil(std::log2(L0 / Lhat))));
    for (const auto& r : t.records) {
      if (r.k < k0 || !r.L_estimate) continue;
      const double ratio = *r.L_estimate / Lhat;
      worst = std::max(worst, ratio);
      if (!(*r.L_estimate < 2.0 * Lhat * (1.0 + 1e-6))) {
        d.fail(p.label + " k=" + std::to_string(r.k));
        break;
      }
    }
  }
  d << "max accepted/estimate=" << worst << " (limit 2)";
  return finish("backtracking constant below twice the estimate", d, t0);
}

CheckResult check_directional_bound(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  int checked = 0;
  for (const Problem& p : outside_optimum_battery(opt.seed)) {
    const Trace t = run(p, affine_backtracking(), {500, 1e-10, std::nullopt});
    const auto probes = default_probes(p, &t, 100, opt.seed + 11);
    const double Lhat = estimate_directional_smoothness(p, probes).value;
    const Gauge l2 = Gauge::norm_ball(p.set.dim());
    auto tc = oracle_constants(p, l2, 10000, opt.seed + 13, &t);
    tc.alpha_omega *= opt.alpha_scale;
    const double bound = theory_bound_linear(tc);
    d << p.label << ": " << Lhat << "<=" << bound << "; ";
    ++checked;
    if (!(Lhat <= 1.02 * bound)) d.fail(p.label);
  }
  if (checked < 5) d.fail("fewer than 5 problems");
  return finish("directional smoothness below L/(c alpha)", d, t0);
}

CheckResult check_linear_rate(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  const Problem p = ball_projection_problem(20, 1.0, 1.1, opt.seed + 404);
  const Trace t = run(p, affine_backtracking(), {200, 1e-10, std::nullopt});
  const auto probes = default_probes(p, &t, 100, opt.seed + 17);
  const double Lhat = estimate_directional_smoothness(p, probes).value;
  const auto fit = rate_fit(t, theory_rate_linear(Lhat), RateSeries::primal_gap,
                            FitWindow{5, -1, 1e-14});
  d << "rho=" << fit.empirical_rho << " theory=" << fit.theory_rho
    << " window=[" << fit.window_begin << "," << fit.window_end << ") "
    << "iters=" << t.last().k << " (" << to_string(t.terminated_by) << "); ";
  if (!fit.passed) d.fail("fitted rate");
  if (t.terminated_by != Termination::gap_tol) d.fail("gap 1e-10 in 200");

  const auto map = AffineMap::random(20, 1e6, opt.seed + 505);
  const Problem tp = transform_problem(p, map);
  const Trace fast = run(tp, affine_backtracking(), {1000, 1e-4, std::nullopt});
  const auto k_fast = fast.first_gap_below(1e-4);
  if (!k_fast) {
    d.fail("backtracking never reached gap 1e-4");
  } else {
    const int cap = 10000 * std::max(*k_fast, 1);
    const StrategySpec fixed{StrategyKind::fixed_inverse_L,
                             *tp.objective->known_L, std::nullopt,
                             std::nullopt};
    const Trace slow = run(tp, fixed, {cap, 1e-4, std::nullopt},
                           RunOptions{false, cap});
    const int k_slow = slow.terminated_by == Termination::gap_tol
                           ? slow.last().k
                           : cap + 1;
    d << "gap 1e-4: backtracking k=" << *k_fast << ", fixed 1/L k"
      << (k_slow > cap ? ">" : "=") << std::min(k_slow, cap);
    if (k_slow < 10000 * std::max(*k_fast, 1)) d.fail("fixed-step separation");
  }
  return finish("linear rate of affine-invariant backtracking", d, t0);
}

namespace {

// Steps of the affine-invariant rule at the iterates of `trace`, each from a
// cold start on the same power-of-two grid, against the trace's own steps:
// max over k ≥ burn_in of max(γ_a/γ_b, γ_b/γ_a).
double same_point_step_ratio(const Problem& p, const Trace& trace,
                             int burn_in) {
  const Objective& f = *p.objective;
  double worst = 1.0;
  for (std::size_t i = static_cast<std::size_t>(burn_in);
       i + 1 < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    const Vector g = f.gradient(r.x);
    const Vector v = p.set.lmo(g);
    const StepContext ctx{r.x, v, g, f.value(r.x), r.k, g.dot(r.x - v)};
    const auto s = backtracking_affine_invariant(ctx, f, std::ldexp(1.0, -19));
    if (!(s.gamma > 0.0) || !(r.gamma > 0.0)) continue;
    worst = std::max({worst, s.gamma / r.gamma, r.gamma / s.gamma});
  }
  return worst;
}

}  // namespace

CheckResult check_norm_backtracking_steps(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  const int burn_in = 5;
  double worst_ratio = 1.0;
  double worst_step = std::numeric_limits<double>::infinity();
  for (const Problem& p : ball_projection_battery(opt.seed)) {
    const StopCriteria stop{500, 1e-10, std::nullopt};
    const Trace t2 = run(p, affine_backtracking(), stop);
    const Trace t3 = run(p, norm_backtracking(), stop);
    auto probes = default_probes(p, &t2, 100, opt.seed + 19);
    for (const auto& r : t3.records) probes.push_back(r.x);
    const double Lhat = estimate_directional_smoothness(p, probes).value;
    const double floor_step = std::min(1.0, 1.0 / (2.0 * Lhat));
    for (std::size_t i = burn_in; i + 1 < t3.records.size(); ++i) {
      const double rel = t3.records[i].gamma / floor_step;
      worst_step = std::min(worst_step, rel);
      if (rel < 1.0 - 1e-9) {
        d.fail(p.label + " step k=" + std::to_string(i));
        break;
      }
    }
    const double ratio = same_point_step_ratio(p, t3, burn_in);
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio > 2.0 * (1.0 + 1e-9)) d.fail(p.label + " step agreement");
  }
  d << "min step/floor=" << worst_step
    << ", max same-point step ratio=" << worst_ratio << " (limit 2)";
  return finish("norm backtracking steps", d, t0);
}

CheckResult check_accelerated_sublinear(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  const double R = 1.0;
  const Problem p = ball_projection_problem(20, R, 1.0, opt.seed + 606);
  const double h0 = p.objective->value(p.x0) - *p.fstar;
  TheoryConstants tc;
  tc.gauge_id = Gauge::norm_ball(20).id();
  tc.L_omega = 1.0;
  tc.mu_omega = 1.0;
  tc.kappa_omega = 1.0;
  tc.alpha_omega = opt.alpha_scale / (2.0 * R);
  tc.source = ConstantSource::analytic;
  const double L_mod = theory_bound_modified(tc, h0);
  const StrategySpec spec{StrategyKind::modified, L_mod, p.fstar, h0};
  const Trace t = run(p, spec, {500, 0.0, std::nullopt});
  const double M = 1.0 / (2.0 * L_mod * std::sqrt(h0));
  const auto rep = recurrence_check(t, M, 1e-10);
  d << "L_mod=" << L_mod << " M=" << M << " C=" << rep.sublinear_C.value_or(0)
    << " iters=" << t.last().k << " worst slack=" << rep.worst_slack
    << " h_last=" << t.last().primal_gap.value_or(0);
  if (!rep.passed) {
    d.fail("recurrence at k=" + std::to_string(rep.violation_index.value_or(-1)));
  }
  if (t.last().k < 500 && t.terminated_by == Termination::max_iters) {
    d.fail("iteration count");
  }
  return finish("accelerated sublinear recurrence of the modified step", d,
                t0);
}

CheckResult check_geometry(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  Rng rng(opt.seed + 707);

  const std::vector<Gauge> gauges = {
      Gauge::norm_ball(3, 1.5), Gauge::ellipsoid(diagonal({1.0, 4.0, 9.0})),
      Gauge::shifted_ball((Vector(3) << 0.3, 0.2, 0.0).finished(), 1.0)};

  // Gauge axioms.
  double worst_axiom = 0.0;
  for (const Gauge& g : gauges) {
    if (g(Vector::Zero(3)) != 0.0) d.fail("gauge zero " + g.id());
    for (int i = 0; i < 10000; ++i) {
      const Vector x = random_gaussian(rng, 3);
      const Vector y = random_gaussian(rng, 3);
      const double t = 5.0 * uniform01(rng);
      const double wx = g(x);
      worst_axiom = std::max({worst_axiom, -wx, std::abs(g(t * x) - t * wx),
                              g(x + y) - wx - g(y)});
    }
  }
  d << "axioms worst=" << worst_axiom << "; ";
  if (worst_axiom > 1e-10) d.fail("gauge axioms");

  // Dual consistency against sampled maxima over the unit level set.
  double worst_dual = 0.0;
  for (const Gauge& g : gauges) {
    std::vector<Vector> level;
    for (int i = 0; i < 10000; ++i) {
      level.push_back(g.unit_level_point(random_unit_vector(rng, 3)));
    }
    for (int j = 0; j < 20; ++j) {
      const Vector v = random_gaussian(rng, 3);
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& s : level) best = std::max(best, v.dot(s));
      const double dual = g.dual(v);
      worst_dual = std::max(worst_dual, std::abs(best - dual) / dual);
      if (best > dual * (1.0 + 1e-9) + 1e-12) d.fail("dual exceeded " + g.id());
    }
  }
  d << "dual rel gap=" << worst_dual << "; ";
  if (worst_dual > 0.01) d.fail("dual consistency");

  // Scaling inequality with oracle alpha.
  const Gauge l2 = Gauge::norm_ball(3);
  const FeasibleSet sets[] = {
      FeasibleSet::ball(1.0, 3),
      FeasibleSet::ellipsoid(diagonal({1.0, 2.0, 4.0}), 1.0, Vector::Zero(3))};
  double worst_scaling = std::numeric_limits<double>::infinity();
  for (const auto& set : sets) {
    const auto cert = strong_convexity_oracle(set, l2, ConvexityVariant::plain,
                                              2000, opt.seed + 808);
    const double alpha = scaling_alpha(cert, 1.0) * opt.alpha_scale;
    for (int i = 0; i < 1000; ++i) {
      const Vector x = set.random_member(rng);
      const Vector phi = random_gaussian(rng, 3);
      const auto chk = scaling_inequality_check(set, l2, alpha, x, phi);
      worst_scaling = std::min(worst_scaling, chk.slack);
      if (!chk.holds) {
        d.fail("scaling inequality (strongly convex set, oracle alpha)");
        break;
      }
    }
  }
  d << "scaling slack=" << worst_scaling << "; ";

  // Level sets of smooth strongly convex functions are strongly convex.
  {
    const double R = 0.5;
    const auto ellipse =
        FeasibleSet::ellipsoid(diagonal({1.0, 4.0}), 2.0 * R, Vector::Zero(2));
    const double alpha = level_set_alpha(4.0, 1.0, R, 1.0) * opt.alpha_scale;
    const auto chk =
        check_strong_convexity(ellipse, Gauge::norm_ball(2),
                               ConvexityVariant::asymmetric, alpha, 10000,
                               opt.seed + 909);
    d << "level-set alpha=" << alpha << " failures=" << chk.failures << "/"
      << chk.tested << "; ";
    if (!chk.passed) d.fail("level-set strong convexity");
  }

  // Asymmetry constant of a shifted ball.
  {
    const auto g = Gauge::shifted_ball((Vector(2) << 0.5, 0.0).finished(), 1.0);
    const auto est = asymmetry_constant(g, 10000, opt.seed + 1010);
    d << "asymmetry=" << est.sampled;
    if (std::abs(est.sampled - 3.0) > 1e-3) d.fail("asymmetry constant");
  }
  return finish("geometry of gauges and strongly convex sets", d, t0);
}

CheckResult check_inequalities(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Detail d;
  const std::vector<Problem> problems = {
      ball_projection_problem(5, 1.0, 1.5, opt.seed + 1111),
      quadratic_ball_problem(5, 1.0, 10.0, 2.0, opt.seed + 1212),
      quadratic_ball_problem(5, 2.0, 3.0, 0.5, opt.seed + 1313)};
  const std::vector<Gauge> gauges = {
      Gauge::norm_ball(5), Gauge::ellipsoid(diagonal({1, 2, 3, 4, 5})),
      Gauge::shifted_ball(
          (Vector(5) << 0.3, 0.0, 0.1, 0.0, 0.0).finished(), 1.0)};
  double w1 = std::numeric_limits<double>::infinity(), w2 = w1, w3 = w1;
  std::uint64_t s = opt.seed + 1414;
  for (const auto& p : problems) {
    for (const auto& g : gauges) {
      const auto rep = inequality_suite(p, g, 10000, ++s, 1e-9);
      w1 = std::min(w1, rep.interpolation.slack);
      w2 = std::min(w2, rep.gradient_bound.slack);
      w3 = std::min(w3, rep.sqrt_suboptimal.slack);
      if (!rep.passed()) d.fail(p.label + " / " + g.id());
    }
  }
  d << "worst slack: interpolation=" << w1 << " gradient=" << w2
    << " sqrt-suboptimality=" << w3;
  return finish("strong convexity and smoothness inequalities", d, t0);
}

CheckResult check_hand_traces(const VerifyOptions&) {
  const auto t0 = Clock::now();
  Detail d;
  const auto f = make_projection_objective(Vector::Zero(2));
  const Vector x = (Vector(2) << 1.0, 0.0).finished();
  const Vector v = (Vector(2) << -1.0, 0.0).finished();
  const Vector g = f->gradient(x);
  const double gap = g.dot(x - v);
  const StepContext ctx{x, v, g, f->value(x), 0, gap};

  std::vector<BacktrackTrial> trials2;
  const auto s2 = backtracking_affine_invariant(ctx, *f, 1.0, &trials2);
  const std::vector<std::pair<double, bool>> want2 = {
      {0.5, false}, {1.0, false}, {2.0, true}};
  bool ok2 = trials2.size() == want2.size() && s2.gamma == 0.5 &&
             s2.L_estimate == 2.0;
  for (std::size_t i = 0; ok2 && i < want2.size(); ++i) {
    ok2 = trials2[i].constant == want2[i].first &&
          trials2[i].accepted == want2[i].second;
  }
  if (ok2) {
    ok2 = trials2[0].model == -1.0 && trials2[1].model == -0.5 &&
          trials2[2].model == 0.0;
  }
  if (!ok2) d.fail("affine-invariant trail");

  std::vector<BacktrackTrial> trials3;
  const auto s3 = backtracking_norm(ctx, *f, 1.0, &trials3);
  const bool ok3 = trials3.size() == 2 && trials3[0].constant == 0.5 &&
                   !trials3[0].accepted && trials3[1].constant == 1.0 &&
                   trials3[1].accepted && s3.gamma == 0.5 &&
                   s3.L_estimate == 1.0;
  if (!ok3) d.fail("norm trail");

  const Vector next = convex_update(x, v, 0.5);
  if (next != Vector::Zero(2)) d.fail("next iterate");
  d << "affine-invariant: " << trials2.size() << " trials, constant "
    << s2.L_estimate.value_or(0) << ", step " << s2.gamma
    << "; norm: " << trials3.size() << " trials, constant "
    << s3.L_estimate.value_or(0) << ", step " << s3.gamma;
  return finish("hand-traced backtracking trails", d, t0);
}

std::vector<CheckResult> run_suite(Suite suite, const VerifyOptions& opt) {
  using Fn = CheckResult (*)(const VerifyOptions&);
  struct Entry {
    Suite suite;
    const char* name;
    Fn fn;
  };
  static const Entry entries[] = {
      {Suite::invariance, "affine covariance", check_affine_covariance},
      {Suite::invariance, "backtracking invariance",
       check_backtracking_invariance},
      {Suite::rates, "backtracking constant", check_backtracking_constant},
      {Suite::rates, "directional bound", check_directional_bound},
      {Suite::rates, "linear rate", check_linear_rate},
      {Suite::rates, "norm backtracking steps", check_norm_backtracking_steps},
      {Suite::rates, "accelerated sublinear", check_accelerated_sublinear},
      {Suite::geometry, "geometry", check_geometry},
      {Suite::inequalities, "inequalities", check_inequalities},
      {Suite::inequalities, "hand traces", check_hand_traces},
  };
  std::vector<CheckResult> out;
  for (const auto& e : entries) {
    if (suite != Suite::all && suite != e.suite) continue;
    const auto t0 = Clock::now();
    try {
      out.push_back(e.fn(opt));
    } catch (const Error& err) {
      out.push_back({e.name, false, std::string("error: ") + err.what(),
                     seconds_since(t0)});
    }
  }
  return out;
}

}  // namespace affw
