#include "affw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace affw {

std::string to_string(ConstantSource s) {
  return s == ConstantSource::analytic ? "analytic" : "oracle";
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

double theory_bound_linear(const TheoryConstants& tc) {
  require_positive(tc.L_omega, "theory_bound_linear: L_omega");
  require_positive(tc.c_omega, "theory_bound_linear: c_omega");
  require_positive(tc.alpha_omega, "theory_bound_linear: alpha_omega");
  return tc.L_omega / (tc.c_omega * tc.alpha_omega);
}

double best_bound_over_gauges(const std::vector<TheoryConstants>& tcs) {
  if (tcs.empty()) throw InputError("best_bound_over_gauges: empty list");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& tc : tcs) best = std::min(best, theory_bound_linear(tc));
  return best;
}

double theory_rate_linear(double L_dir) {
  require_positive(L_dir, "theory_rate_linear: constant");
  return std::max(0.5, 1.0 - 1.0 / (2.0 * L_dir));
}

double theory_rate_sublinear(double h0, double L_mod, int k) {
  require_positive(h0, "theory_rate_sublinear: h0");
  require_positive(L_mod, "theory_rate_sublinear: constant");
  if (k < 0) throw InputError("theory_rate_sublinear: k must be >= 0");
  const double kk = k + 2.0;
  return 4.0 * h0 * std::max(1.0, 18.0 * L_mod * L_mod) / (kk * kk);
}

double theory_bound_modified(const TheoryConstants& tc, double h0) {
  require_positive(tc.L_omega, "theory_bound_modified: L_omega");
  require_positive(tc.mu_omega, "theory_bound_modified: mu_omega");
  require_positive(tc.alpha_omega, "theory_bound_modified: alpha_omega");
  require_positive(tc.kappa_omega, "theory_bound_modified: kappa_omega");
  require_positive(h0, "theory_bound_modified: h0");
  return tc.kappa_omega * std::sqrt(2.0) * tc.L_omega /
         (tc.alpha_omega * std::sqrt(tc.mu_omega)) / std::sqrt(h0);
}

std::vector<double> default_h_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(std::ldexp(1.0, -i));
  return grid;
}

namespace {

// Shared probe loop; `weight(f_x)` scales each probe's quotient and returns
// nullopt to skip the probe.
template <class Weight>
SmoothnessEstimate estimate_quotient(const Problem& problem,
                                     const std::vector<Vector>& probes,
                                     const std::vector<double>& h_grid,
                                     Weight weight, const char* who) {
  const Objective& f = *problem.objective;
  SmoothnessEstimate est;
  bool any = false;
  for (const Vector& x : probes) {
    if (!problem.set.contains(x, FeasibleSet::kMembershipTol)) {
      throw InputError(std::string(who) + ": probe point is not feasible");
    }
    const Vector g = f.gradient(x);
    if (g.squaredNorm() == 0.0) {
      ++est.probes_skipped;
      continue;
    }
    const Vector d = problem.set.lmo(g) - x;
    const double gap = -g.dot(d);
    const double f_x = f.value(x);
    const auto w = weight(f_x);
    if (!(gap > 0.0) || !w) {
      ++est.probes_skipped;
      continue;
    }
    bool used = false;
    for (double h : h_grid) {
      if (!(h > 0.0 && h <= 1.0)) {
        throw InputError(std::string(who) + ": h must lie in (0, 1]");
      }
      if (h * h * gap < kRoundoffGuard * std::max(1.0, std::abs(f_x))) {
        continue;
      }
      const double f_h = f.value(x + h * d);
      const double q = 2.0 * (f_h - f_x + h * gap) / (h * h * gap) * *w;
      if (!any || q > est.value) est.value = q;
      any = true;
      used = true;
    }
    used ? ++est.probes_used : ++est.probes_skipped;
  }
  if (!any) {
    throw NumericalError(std::string(who) + ": every probe was skipped");
  }
  return est;
}

}  // namespace

SmoothnessEstimate estimate_directional_smoothness(
    const Problem& problem, const std::vector<Vector>& probes,
    const std::vector<double>& h_grid) {
  return estimate_quotient(
      problem, probes, h_grid,
      [](double) { return std::optional<double>(1.0); },
      "estimate_directional_smoothness");
}

SmoothnessEstimate estimate_modified_smoothness(
    const Problem& problem, const std::vector<Vector>& probes, double h0,
    const std::vector<double>& h_grid) {
  if (!problem.fstar) {
    throw InputError("estimate_modified_smoothness: f* is unknown");
  }
  require_positive(h0, "estimate_modified_smoothness: h0");
  const double fstar = *problem.fstar;
  return estimate_quotient(
      problem, probes, h_grid,
      [&](double f_x) -> std::optional<double> {
        const double h = f_x - fstar;
        if (!(h > 0.0)) return std::nullopt;
        return std::sqrt(h / h0);
      },
      "estimate_modified_smoothness");
}

std::vector<Vector> default_probes(const Problem& problem,
                                   const Trace* reference, int random_points,
                                   std::uint64_t seed) {
  std::vector<Vector> probes;
  if (reference != nullptr) {
    for (const auto& r : reference->records) {
      if (r.x.size() == problem.set.dim()) probes.push_back(r.x);
    }
  }
  Rng rng(seed);
  for (int i = 0; i < random_points; ++i) {
    probes.push_back(problem.set.random_member(rng));
  }
  return probes;
}

double estimate_c_omega(const Problem& problem, const Gauge& gauge,
                        int samples, std::uint64_t seed,
                        const Trace* trajectory) {
  if (gauge.dim() != problem.set.dim()) {
    throw InputError("estimate_c_omega: gauge/problem dimension mismatch");
  }
  const Objective& f = *problem.objective;
  Rng rng(seed);
  double c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Vector x =
        (i % 2 == 0)
            ? problem.set.boundary_point(random_unit_vector(rng, gauge.dim()))
            : problem.set.random_member(rng);
    c = std::min(c, gauge.dual(-f.gradient(x)));
  }
  if (trajectory != nullptr) {
    for (const auto& r : trajectory->records) {
      if (r.x.size() == gauge.dim()) {
        c = std::min(c, gauge.dual(-f.gradient(r.x)));
      }
    }
  }
  return c;
}

TheoryConstants oracle_constants(const Problem& problem, const Gauge& gauge,
                                 int samples, std::uint64_t seed,
                                 const Trace* trajectory) {
  const Objective& f = *problem.objective;
  if (!f.known_L || !f.known_mu) {
    throw InputError("oracle_constants: objective has no known L / mu");
  }
  const auto radii = gauge.euclidean_radii();
  TheoryConstants tc;
  tc.gauge_id = gauge.id();
  tc.L_omega = *f.known_L * radii.outer * radii.outer;
  tc.mu_omega = *f.known_mu * radii.inner * radii.inner;
  tc.alpha_omega =
      strong_convexity_oracle(problem.set, gauge, ConvexityVariant::plain,
                              std::clamp(samples, 100, 4000), seed)
          .alpha;
  tc.c_omega = estimate_c_omega(problem, gauge, samples, seed + 1, trajectory);
  tc.kappa_omega = gauge.analytic_asymmetry();
  tc.source = ConstantSource::oracle;
  return tc;
}

// --- rates -----------------------------------------------------------------

RateReport rate_fit(const std::vector<double>& series, double theory_rho,
                    const FitWindow& window) {
  const int n = static_cast<int>(series.size());
  const int begin = std::max(0, window.begin);
  const int end = window.end < 0 ? n : std::min(n, window.end);
  std::vector<double> ks;
  std::vector<double> logs;
  int k = begin;
  for (; k < end; ++k) {
    const double v = series[static_cast<std::size_t>(k)];
    if (!(v > window.floor) || !std::isfinite(v)) break;
    ks.push_back(k);
    logs.push_back(std::log(v));
  }
  if (ks.size() < 5) {
    throw InputError("rate_fit: fewer than 5 usable points in window [" +
                     std::to_string(begin) + ", " + std::to_string(end) +
                     ")");
  }
  const double m = static_cast<double>(ks.size());
  double sk = 0.0, sl = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sk += ks[i];
    sl += logs[i];
  }
  const double mk = sk / m;
  const double ml = sl / m;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    num += (ks[i] - mk) * (logs[i] - ml);
    den += (ks[i] - mk) * (ks[i] - mk);
  }
  RateReport rep;
  rep.empirical_rho = std::exp(num / den);
  rep.theory_rho = theory_rho;
  rep.window_begin = begin;
  rep.window_end = k;
  rep.worst_slack = theory_rho + 0.02 - rep.empirical_rho;
  rep.passed = rep.empirical_rho <= theory_rho + 0.02;
  return rep;
}

namespace {

std::vector<double> series_of(const Trace& trace, RateSeries which) {
  std::vector<double> out;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (r.k != static_cast<int>(i)) {
      throw InputError("trace must be recorded at every iteration");
    }
    if (which == RateSeries::fw_gap) {
      out.push_back(r.gap);
    } else {
      if (!r.primal_gap) throw InputError("trace has no primal gaps (f* unknown)");
      out.push_back(*r.primal_gap);
    }
  }
  return out;
}

void note_violation(RateReport& rep, double slack, double tol, int index) {
  rep.worst_slack = std::min(rep.worst_slack, slack);
  if (slack < -tol && !rep.violation_index) rep.violation_index = index;
}

}  // namespace

RateReport rate_fit(const Trace& trace, double theory_rho, RateSeries which,
                    const FitWindow& window) {
  return rate_fit(series_of(trace, which), theory_rho, window);
}

RateReport recurrence_check(const std::vector<double>& h, double M,
                            double slack) {
  require_positive(M, "recurrence_check: M");
  if (h.empty()) throw InputError("recurrence_check: empty sequence");
  RateReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  const double C = std::max(4.0 * h[0], 18.0 / (M * M));
  rep.sublinear_C = C;
  rep.window_end = static_cast<int>(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double kk = static_cast<double>(k) + 2.0;
    note_violation(rep, C / (kk * kk) - h[k], slack, static_cast<int>(k));
    if (k + 1 < h.size()) {
      const double factor =
          std::max(0.5, 1.0 - M * std::sqrt(std::max(h[k], 0.0)));
      note_violation(rep, h[k] * factor - h[k + 1], slack,
                     static_cast<int>(k + 1));
    }
  }
  rep.passed = !rep.violation_index;
  return rep;
}

RateReport recurrence_check(const Trace& trace, double M, double slack) {
  return recurrence_check(series_of(trace, RateSeries::primal_gap), M, slack);
}

RateReport per_step_contraction_check(const Trace& trace, double slack) {
  const auto h = series_of(trace, RateSeries::primal_gap);
  RateReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  rep.window_end = static_cast<int>(h.size());
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    const auto& L = trace.records[k].L_estimate;
    if (!L) continue;
    const double bound = theory_rate_linear(*L) * h[k];
    note_violation(rep, bound - h[k + 1], slack, static_cast<int>(k + 1));
  }
  rep.passed = !rep.violation_index;
  return rep;
}

// --- inequality suite ------------------------------------------------------

bool InequalityReport::passed() const {
  return interpolation.slack >= -tolerance &&
         gradient_bound.slack >= -tolerance &&
         sqrt_suboptimal.slack >= -tolerance;
}

InequalityReport inequality_suite(const Problem& problem, const Gauge& gauge,
                                  int samples, std::uint64_t seed,
                                  double tolerance) {
  const Objective& f = *problem.objective;
  std::optional<double> f_min;
  if (const auto* q = dynamic_cast<const QuadraticObjective*>(&f)) {
    f_min = q->offset();
  } else if (dynamic_cast<const ProjectionObjective*>(&f) != nullptr) {
    f_min = 0.0;
  }
  if (!f_min || !f.known_L || !f.known_mu || !problem.fstar) {
    throw InputError(
        "inequality_suite: needs a quadratic objective with known L, mu "
        "and f*");
  }
  if (gauge.dim() != problem.set.dim()) {
    throw InputError("inequality_suite: gauge/problem dimension mismatch");
  }
  if (samples < 2) throw InputError("inequality_suite: samples must be >= 2");

  const auto radii = gauge.euclidean_radii();
  const double L = *f.known_L * radii.outer * radii.outer;
  const double mu = *f.known_mu * radii.inner * radii.inner;
  const double fstar = *problem.fstar;

  InequalityReport rep;
  rep.tolerance = tolerance;
  Rng rng(seed);
  auto sample = [&](int i) {
    return (i % 2 == 0)
               ? problem.set.boundary_point(random_unit_vector(rng, gauge.dim()))
               : problem.set.random_member(rng);
  };
  for (int i = 0; i < samples; ++i) {
    const Vector x = sample(i);
    const Vector y = sample(i + 1);
    const double gamma = i == 0 ? 0.0 : (i == 1 ? 1.0 : uniform01(rng));
    const Vector z = gamma * x + (1.0 - gamma) * y;
    const double fx = f.value(x);
    const double fy = f.value(y);

    const double wxy = gauge(x - y);
    const double wyx = gauge(y - x);
    const double inset = mu * gamma * (1.0 - gamma) *
                         ((1.0 - gamma) * wxy * wxy + gamma * wyx * wyx) / 2.0;
    const double s1 = gamma * fx + (1.0 - gamma) * fy - f.value(z) - inset;
    rep.interpolation.slack = std::min(rep.interpolation.slack, s1);
    ++rep.interpolation.tested;

    const Vector gy = f.gradient(y);
    const double dual_neg = gauge.dual(-gy);
    const double s2 = fy - *f_min - dual_neg * dual_neg / (2.0 * L);
    rep.gradient_bound.slack = std::min(rep.gradient_bound.slack, s2);
    ++rep.gradient_bound.tested;

    const Vector gx = f.gradient(x);
    const double s3 = gauge.dual(gx) - std::sqrt(mu / 2.0) *
                                           std::sqrt(std::max(fx - fstar, 0.0));
    rep.sqrt_suboptimal.slack = std::min(rep.sqrt_suboptimal.slack, s3);
    ++rep.sqrt_suboptimal.tested;
  }
  return rep;
}

// --- affine covariance -----------------------------------------------------

double relative_deviation(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(a.norm(), 1.0);
}

namespace {

double relative_scalar(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

CovarianceReport affine_covariance_report(const Problem& problem,
                                          const AffineMap& map,
                                          const StrategySpec& strategy,
                                          const StopCriteria& stop) {
  const Problem transformed = transform_problem(problem, map);
  auto s1 = make_strategy(strategy);
  auto s2 = make_strategy(strategy);

  CovarianceReport rep;
  rep.original = fw_run(problem, *s1, stop);
  rep.transformed = fw_run(transformed, *s2, stop);
  rep.max_constant_original = rep.original.max_L_estimate();
  rep.max_constant_transformed = rep.transformed.max_L_estimate();

  const auto& a = rep.original.records;
  const auto& b = rep.transformed.records;
  const std::size_t n = std::min(a.size(), b.size());
  rep.compared = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.iterate_deviation =
        std::max(rep.iterate_deviation,
                 relative_deviation(a[i].x, map.forward(b[i].x)));
    if (i + 1 == a.size() || i + 1 == b.size()) continue;
    rep.step_deviation =
        std::max(rep.step_deviation, relative_scalar(a[i].gamma, b[i].gamma));
    if (a[i].L_estimate && b[i].L_estimate) {
      rep.constant_deviation =
          std::max(rep.constant_deviation.value_or(0.0),
                   relative_scalar(*a[i].L_estimate, *b[i].L_estimate));
    }
  }
  return rep;
}

double step_ratio(const Trace& a, const Trace& b, int burn_in) {
  const std::size_t n = std::min(a.records.size(), b.records.size());
  double worst = 1.0;
  for (std::size_t i = static_cast<std::size_t>(std::max(burn_in, 0));
       i + 1 < n; ++i) {
    const double ga = a.records[i].gamma;
    const double gb = b.records[i].gamma;
    if (!(ga > 0.0) || !(gb > 0.0)) continue;
    worst = std::max(worst, std::max(ga / gb, gb / ga));
  }
  return worst;
}

}  // namespace affw
