#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "affw/analysis.hpp"
#include "affw/experiment.hpp"
#include "affw/solver.hpp"
#include "affw/verify.hpp"

namespace py = pybind11;
using namespace affw;

namespace {

Vector column(const Trace& t, double (*get)(const IterateRecord&)) {
  Vector out(static_cast<Eigen::Index>(t.records.size()));
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = get(t.records[i]);
  }
  return out;
}

double or_nan(const std::optional<double>& v) {
  return v.value_or(std::numeric_limits<double>::quiet_NaN());
}

Trace solve(const Problem& problem, StrategyKind kind, double constant,
            std::optional<double> h0, int max_iters, double gap_tol,
            std::optional<double> wall_budget, bool keep_iterates) {
  auto strategy = make_strategy({kind, constant, problem.fstar, h0});
  py::gil_scoped_release release;
  return fw_run(problem, *strategy, {max_iters, gap_tol, wall_budget},
                {keep_iterates, 1});
}

}  // namespace

PYBIND11_MODULE(_affw, m) {
  m.doc() = "Affine-invariant Frank-Wolfe on strongly convex sets";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

  py::class_<Gauge>(m, "Gauge")
      .def_static("norm_ball", &Gauge::norm_ball, py::arg("dim"),
                  py::arg("radius") = 1.0)
      .def_static("ellipsoid", &Gauge::ellipsoid, py::arg("shape"))
      .def_static("shifted_ball", &Gauge::shifted_ball, py::arg("center"),
                  py::arg("radius"))
      .def_property_readonly("dim", &Gauge::dim)
      .def_property_readonly("id", &Gauge::id)
      .def_property_readonly("is_symmetric", &Gauge::is_symmetric)
      .def("__call__", &Gauge::eval, py::arg("x"))
      .def("dual", &Gauge::dual, py::arg("v"))
      .def("analytic_asymmetry", &Gauge::analytic_asymmetry)
      .def("unit_level_point", &Gauge::unit_level_point, py::arg("u"));

  py::class_<Objective, std::shared_ptr<Objective>>(m, "Objective")
      .def_property_readonly("dim", &Objective::dim)
      .def("value", &Objective::value, py::arg("x"))
      .def("gradient", &Objective::gradient, py::arg("x"))
      .def_readwrite("known_L", &Objective::known_L)
      .def_readwrite("known_mu", &Objective::known_mu)
      .def_readwrite("known_fstar", &Objective::known_fstar);

  py::class_<QuadraticObjective, Objective,
             std::shared_ptr<QuadraticObjective>>(m, "QuadraticObjective")
      .def(py::init<Matrix, Vector, double>(), py::arg("hessian"),
           py::arg("minimizer"), py::arg("offset") = 0.0)
      .def_property_readonly("hessian", &QuadraticObjective::hessian)
      .def_property_readonly("minimizer", &QuadraticObjective::minimizer);

  py::class_<ProjectionObjective, Objective,
             std::shared_ptr<ProjectionObjective>>(m, "ProjectionObjective")
      .def(py::init([](const Vector& xbar, std::optional<double> radius) {
             return radius ? make_projection_objective(xbar, *radius)
                           : make_projection_objective(xbar);
           }),
           py::arg("target"), py::arg("ball_radius") = py::none())
      .def_property_readonly("target", &ProjectionObjective::target);

  py::class_<FeasibleSet>(m, "FeasibleSet")
      .def_static("ball",
                  py::overload_cast<double, const Vector&>(&FeasibleSet::ball),
                  py::arg("radius"), py::arg("center"))
      .def_static("ellipsoid", &FeasibleSet::ellipsoid, py::arg("shape"),
                  py::arg("level_sq"), py::arg("center"))
      .def_property_readonly("dim", &FeasibleSet::dim)
      .def_property_readonly("radius", &FeasibleSet::radius)
      .def_property_readonly("center", &FeasibleSet::center)
      .def_property_readonly("is_ball", &FeasibleSet::is_ball)
      .def("shape_matrix", &FeasibleSet::shape_matrix)
      .def("lmo", &FeasibleSet::lmo, py::arg("g"))
      .def("contains", &FeasibleSet::contains, py::arg("x"),
           py::arg("tol") = FeasibleSet::kMembershipTol);

  py::class_<AffineMap>(m, "AffineMap")
      .def(py::init<Matrix, Vector>(), py::arg("B"), py::arg("b"))
      .def_static("identity", &AffineMap::identity, py::arg("dim"))
      .def_static("random", &AffineMap::random, py::arg("dim"),
                  py::arg("condition_number"), py::arg("seed"))
      .def_property_readonly("matrix", &AffineMap::matrix)
      .def_property_readonly("offset", &AffineMap::offset)
      .def_property_readonly("condition_number", &AffineMap::condition_number)
      .def("forward", &AffineMap::forward, py::arg("y"))
      .def("inverse", &AffineMap::inverse, py::arg("x"));

  py::class_<Problem>(m, "Problem")
      .def(py::init([](std::shared_ptr<Objective> f, FeasibleSet set,
                       Vector x0, std::string label) {
             return Problem(std::move(f), std::move(set), std::move(x0),
                            std::move(label));
           }),
           py::arg("objective"), py::arg("set"), py::arg("x0"),
           py::arg("label") = "problem")
      .def_property_readonly("objective",
                             [](const Problem& p) {
                               return std::const_pointer_cast<Objective>(
                                   p.objective);
                             })
      .def_readonly("set", &Problem::set)
      .def_readonly("x0", &Problem::x0)
      .def_readonly("label", &Problem::label)
      .def_readonly("fstar", &Problem::fstar);

  m.def("transform_problem", &transform_problem, py::arg("problem"),
        py::arg("map"));
  m.def("ball_projection_problem", &ball_projection_problem, py::arg("dim"),
        py::arg("radius"), py::arg("ratio"), py::arg("seed"));
  m.def("fw_gap", &fw_gap, py::arg("problem"), py::arg("x"));

  py::enum_<StrategyKind>(m, "StrategyKind")
      .value("scheduled", StrategyKind::scheduled)
      .value("exact", StrategyKind::exact)
      .value("fixed_inverse_L", StrategyKind::fixed_inverse_L)
      .value("directional_fixed", StrategyKind::directional_fixed)
      .value("backtracking_norm", StrategyKind::backtracking_norm)
      .value("backtracking_affine", StrategyKind::backtracking_affine)
      .value("modified", StrategyKind::modified);

  py::class_<Trace>(m, "Trace")
      .def_property_readonly("terminated_by",
                             [](const Trace& t) {
                               return to_string(t.terminated_by);
                             })
      .def_property_readonly("iterations",
                             [](const Trace& t) { return t.last().k; })
      .def_property_readonly("x", [](const Trace& t) { return t.last().x; })
      .def_property_readonly(
          "gaps", [](const Trace& t) {
            return column(t, [](const IterateRecord& r) { return r.gap; });
          })
      .def_property_readonly(
          "primal_gaps",
          [](const Trace& t) {
            return column(t, [](const IterateRecord& r) {
              return or_nan(r.primal_gap);
            });
          })
      .def_property_readonly(
          "steps", [](const Trace& t) {
            return column(t, [](const IterateRecord& r) { return r.gamma; });
          })
      .def_property_readonly(
          "constants",
          [](const Trace& t) {
            return column(t, [](const IterateRecord& r) {
              return or_nan(r.L_estimate);
            });
          })
      .def_property_readonly("iterates", [](const Trace& t) {
        std::vector<Vector> xs;
        for (const auto& r : t.records) xs.push_back(r.x);
        return xs;
      });

  m.def("solve", &solve, py::arg("problem"), py::arg("strategy"),
        py::arg("constant") = 1.0, py::arg("h0") = py::none(),
        py::arg("max_iters") = 1000, py::arg("gap_tol") = 1e-10,
        py::arg("wall_budget") = py::none(), py::arg("keep_iterates") = true);

  m.def("directional_smoothness",
        [](const Problem& p, const std::vector<Vector>& probes) {
          return estimate_directional_smoothness(p, probes).value;
        },
        py::arg("problem"), py::arg("probes"));
  m.def("theory_rate_linear", &theory_rate_linear, py::arg("L_dir"));
  m.def("theory_rate_sublinear", &theory_rate_sublinear, py::arg("h0"),
        py::arg("L_mod"), py::arg("k"));
  m.def("empirical_rate",
        [](const std::vector<double>& series, int burn_in, double floor) {
          return rate_fit(series, 1.0, {burn_in, -1, floor}).empirical_rho;
        },
        py::arg("series"), py::arg("burn_in") = 5, py::arg("floor") = 0.0);

  m.def("verify",
        [](const std::string& suite, std::uint64_t seed) {
          const auto s = parse_suite(suite);
          if (!s) throw InputError("unknown suite '" + suite + "'");
          VerifyOptions opt;
          opt.seed = seed;
          std::vector<std::tuple<std::string, bool, std::string>> out;
          for (const auto& r : run_suite(*s, opt)) {
            out.emplace_back(r.name, r.passed, r.detail);
          }
          return out;
        },
        py::arg("suite") = "all", py::arg("seed") = 0);

  m.def("config_hash",
        [](const std::string& text) {
          return config_hash(parse_config_text(text, "<string>"));
        },
        py::arg("text"));
}
