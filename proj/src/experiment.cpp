#include "affw/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace affw {

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::projection: return "projection";
    case ProblemKind::quadratic_erm: return "quadratic_erm";
    case ProblemKind::logistic_erm: return "logistic_erm";
  }
  return "?";
}

std::string to_string(StartPoint s) {
  return s == StartPoint::zero ? "zero" : "random";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

struct LineError {
  std::string message;
};

double parse_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (v.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(out)) {
    throw LineError{"expected a finite number, got '" + v + "'"};
  }
  return out;
}

double parse_positive(const std::string& v) {
  const double x = parse_double(v);
  if (!(x > 0.0)) throw LineError{"expected a positive number, got '" + v + "'"};
  return x;
}

template <typename Int>
Int parse_int(const std::string& v) {
  Int out{};
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (v.empty() || r.ec != std::errc() || r.ptr != end) {
    throw LineError{"expected an integer, got '" + v + "'"};
  }
  return out;
}

int parse_positive_int(const std::string& v) {
  const int x = parse_int<int>(v);
  if (x <= 0) throw LineError{"expected a positive integer, got '" + v + "'"};
  return x;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct KeySpec {
  std::string key;  // section.name
  std::string default_text;
  std::string help;
  Setter set;
};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"experiment.name", "experiment", "free-form label",
       [](ExperimentConfig& c, const std::string& v) {
         if (v.empty()) throw LineError{"name must not be empty"};
         c.name = v;
       }},
      {"experiment.seed", "FW_AFFINE_SEED, else 0",
       "global seed; --seed overrides it",
       [](ExperimentConfig& c, const std::string& v) {
         c.seed = parse_int<std::uint64_t>(v);
       }},
      {"problem.kind", "(required)", "projection | quadratic_erm | logistic_erm",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "projection") c.kind = ProblemKind::projection;
         else if (v == "quadratic_erm") c.kind = ProblemKind::quadratic_erm;
         else if (v == "logistic_erm") c.kind = ProblemKind::logistic_erm;
         else throw LineError{"unknown problem kind '" + v + "'"};
       }},
      {"problem.dim", "20 (projection), 50 (synthetic ERM), dataset columns",
       "dimension",
       [](ExperimentConfig& c, const std::string& v) {
         c.dim = parse_positive_int(v);
       }},
      {"problem.radius", "1 (projection), ||x*||/ratio (ERM)",
       "ball radius R",
       [](ExperimentConfig& c, const std::string& v) {
         c.radius = parse_positive(v);
       }},
      {"problem.ratio", "1.1",
       "distance of the unconstrained optimum from the origin, in units of R",
       [](ExperimentConfig& c, const std::string& v) {
         c.ratio = parse_positive(v);
       }},
      {"problem.dataset", "synthetic",
       "CSV with feature columns followed by a label column (ERM only)",
       [](ExperimentConfig& c, const std::string& v) {
         if (v.empty()) throw LineError{"dataset path must not be empty"};
         if (!std::filesystem::exists(v)) {
           throw LineError{"dataset file '" + v + "' does not exist"};
         }
         c.dataset = v;
       }},
      {"problem.samples", "500", "rows of the synthetic dataset",
       [](ExperimentConfig& c, const std::string& v) {
         c.samples = parse_positive_int(v);
       }},
      {"problem.x0", "random (projection), zero (ERM)",
       "zero | random (uniform in the ball)",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "zero") c.x0 = StartPoint::zero;
         else if (v == "random") c.x0 = StartPoint::random;
         else throw LineError{"x0 must be zero or random, got '" + v + "'"};
       }},
      {"map.conditions", "1",
       "comma-separated condition numbers of B; 1 is the identity map",
       [](ExperimentConfig& c, const std::string& v) {
         std::vector<double> out;
         for (const auto& item : split_list(v)) {
           const double k = parse_double(item);
           if (!(k >= 1.0)) {
             throw LineError{"condition number must be >= 1, got '" + item +
                             "'"};
           }
           out.push_back(k);
         }
         if (out.empty()) throw LineError{"conditions must not be empty"};
         c.conditions = std::move(out);
       }},
      {"map.seed", "derived from the global seed", "seed of the random maps",
       [](ExperimentConfig& c, const std::string& v) {
         c.map_seed = parse_int<std::uint64_t>(v);
       }},
      {"solver.strategies", "(required)",
       "comma-separated: scheduled, exact, fixed_L, directional, "
       "backtracking_norm, backtracking_affine, modified",
       [](ExperimentConfig& c, const std::string& v) {
         std::vector<StrategyKind> out;
         for (const auto& item : split_list(v)) {
           const auto k = parse_strategy_kind(item);
           if (!k) throw LineError{"unknown strategy '" + item + "'"};
           if (std::find(out.begin(), out.end(), *k) != out.end()) {
             throw LineError{"strategy '" + item + "' listed twice"};
           }
           out.push_back(*k);
         }
         if (out.empty()) throw LineError{"strategies must not be empty"};
         c.strategies = std::move(out);
       }},
      {"solver.max_iters", "500", "iteration cap",
       [](ExperimentConfig& c, const std::string& v) {
         c.max_iters = parse_positive_int(v);
       }},
      {"solver.gap_tol", "1e-10", "stop once the Frank-Wolfe gap is below this",
       [](ExperimentConfig& c, const std::string& v) {
         const double x = parse_double(v);
         if (x < 0.0) throw LineError{"gap_tol must be >= 0"};
         c.gap_tol = x;
       }},
      {"solver.wall_budget", "none", "per-cell wall-clock budget in seconds",
       [](ExperimentConfig& c, const std::string& v) {
         c.wall_budget = parse_positive(v);
       }},
      {"solver.initial_constant", "1",
       "starting constant of both backtracking rules",
       [](ExperimentConfig& c, const std::string& v) {
         c.initial_constant = parse_positive(v);
       }},
      {"output.dir", "out", "output directory (--output-dir overrides)",
       [](ExperimentConfig& c, const std::string& v) {
         if (v.empty()) throw LineError{"output dir must not be empty"};
         c.output_dir = v;
       }},
  };
  return table;
}

const std::vector<std::string> kRequiredKeys = {"problem.kind",
                                                "solver.strategies"};

std::string condition_tag(double k) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", k);
  std::string s = buf;
  s.erase(std::remove(s.begin(), s.end(), '+'), s.end());
  return s;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source) {
  ExperimentConfig c;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> ConfigError {
    return ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw fail("malformed section header '" + line + "'");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      const bool known = section == "experiment" || section == "problem" ||
                         section == "map" || section == "solver" ||
                         section == "output";
      if (!known) throw fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected 'key = value', got '" + line + "'");
    const std::string name = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) throw fail("key '" + name + "' outside of any section");
    const std::string key = section + "." + name;
    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const KeySpec& k) { return k.key == key; });
    if (it == table.end()) throw fail("unknown key '" + key + "'");
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw fail("duplicate key '" + key + "' (first set on line " +
                 std::to_string(prev->second) + ")");
    }
    seen[key] = line_no;
    try {
      it->set(c, value);
    } catch (const LineError& e) {
      throw fail(key + ": " + e.message);
    }
  }
  std::vector<std::string> missing;
  for (const auto& k : kRequiredKeys) {
    if (!seen.count(k)) missing.push_back(k);
  }
  if (!missing.empty()) {
    std::string msg = source + ": missing required key(s):";
    for (const auto& k : missing) msg += " " + k;
    throw ConfigError(msg);
  }
  if (c.dataset && c.kind == ProblemKind::projection) {
    line_no = seen["problem.dataset"];
    throw fail("problem.dataset only applies to ERM problems");
  }
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\nname = " << c.name << "\n";
  if (c.seed) out << "seed = " << *c.seed << "\n";
  out << "\n[problem]\nkind = " << to_string(c.kind) << "\n";
  if (c.dim) out << "dim = " << *c.dim << "\n";
  if (c.radius) out << "radius = " << fmt17(*c.radius) << "\n";
  out << "ratio = " << fmt17(c.ratio) << "\n";
  if (c.dataset) out << "dataset = " << *c.dataset << "\n";
  out << "samples = " << c.samples << "\n";
  if (c.x0) out << "x0 = " << to_string(*c.x0) << "\n";
  out << "\n[map]\nconditions = ";
  for (std::size_t i = 0; i < c.conditions.size(); ++i) {
    out << (i ? ", " : "") << fmt17(c.conditions[i]);
  }
  out << "\n";
  if (c.map_seed) out << "seed = " << *c.map_seed << "\n";
  out << "\n[solver]\nstrategies = ";
  for (std::size_t i = 0; i < c.strategies.size(); ++i) {
    out << (i ? ", " : "") << to_string(c.strategies[i]);
  }
  out << "\nmax_iters = " << c.max_iters << "\n";
  out << "gap_tol = " << fmt17(c.gap_tol) << "\n";
  if (c.wall_budget) out << "wall_budget = " << fmt17(*c.wall_budget) << "\n";
  out << "initial_constant = " << fmt17(c.initial_constant) << "\n";
  out << "\n[output]\ndir = " << c.output_dir << "\n";
  return out.str();
}

std::string config_reference() {
  std::ostringstream out;
  out << "Config format: [section] headers, 'key = value' lines, '#' "
         "comments.\nRequired keys:";
  for (const auto& k : kRequiredKeys) out << " " << k;
  out << "\n\n";
  for (const auto& k : key_table()) {
    out << "  " << std::left << std::setw(26) << k.key << k.help
        << "\n  " << std::setw(26) << "" << "default: " << k.default_text
        << "\n";
  }
  return out.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_config(config))));
  return buf;
}

StartPoint effective_start(const ExperimentConfig& config) {
  if (config.x0) return *config.x0;
  return config.kind == ProblemKind::projection ? StartPoint::random
                                                : StartPoint::zero;
}

int effective_dim(const ExperimentConfig& config) {
  if (config.dim) return *config.dim;
  return config.kind == ProblemKind::projection ? 20 : 50;
}

// --- problem construction ---------------------------------------------------

namespace {

bool first_line_is_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) return false;
  const std::string cell = trim(line.substr(0, line.find(',')));
  double x = 0.0;
  const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), x);
  return cell.empty() || r.ec != std::errc() ||
         r.ptr != cell.data() + cell.size();
}

std::shared_ptr<const Dataset> load_data(const ExperimentConfig& c,
                                         std::uint64_t seed) {
  if (c.dataset) {
    CsvOptions opt;
    opt.skip_header = first_line_is_header(*c.dataset);
    opt.domain = c.kind == ProblemKind::logistic_erm ? LabelDomain::binary
                                                     : LabelDomain::real;
    auto data = std::make_shared<Dataset>(load_dataset_csv(*c.dataset, opt));
    if (c.dim && *c.dim != data->dim()) {
      throw InputError("problem.dim = " + std::to_string(*c.dim) +
                       " but the dataset has " + std::to_string(data->dim()) +
                       " feature columns");
    }
    return data;
  }
  return std::make_shared<Dataset>(synthesize_dataset(
      c.samples, effective_dim(c), DatasetKind::classification, seed));
}

// Unconstrained minimizer of the ERM objective: normal equations for the
// quadratic loss, damped Newton for the logistic loss.
Vector erm_unconstrained_minimizer(const ErmObjective& f) {
  const Matrix& A = f.data().features;
  const Vector& y = f.data().labels;
  const double n = static_cast<double>(A.rows());
  const Matrix gram = A.transpose() * A / n;
  if (f.loss() == Loss::quadratic) {
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff()) {
      throw DataError(
          "quadratic ERM: singular Gram matrix, set problem.radius");
    }
    return ldlt.solve(A.transpose() * y / n);
  }
  Vector x = Vector::Zero(A.cols());
  for (int it = 0; it < 200; ++it) {
    const Vector g = f.gradient(x);
    if (g.norm() <= 1e-12) break;
    const Vector s = A * x;
    Vector w(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-y[i] * s[i]));
      w[i] = p * (1.0 - p);
    }
    const Matrix H = A.transpose() * w.asDiagonal() * A / n;
    const Vector step = H.ldlt().solve(-g);
    double t = 1.0;
    const double f0 = f.value(x);
    while (t > 1e-12 && f.value(x + t * step) > f0 + 1e-4 * t * g.dot(step)) {
      t *= 0.5;
    }
    x += t * step;
    if (x.norm() > 1e8) break;
  }
  // On separable data the loss flattens out along a ray: the gradient
  // vanishes only asymptotically and the Hessian degenerates with it.
  const Vector s = A * x;
  Vector w(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-y[i] * s[i]));
    w[i] = p * (1.0 - p);
  }
  const double curvature_min =
      Eigen::SelfAdjointEigenSolver<Matrix>(A.transpose() * w.asDiagonal() * A / n,
                                            Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  if (f.gradient(x).norm() > 1e-8 ||
      curvature_min <= 1e-8 * gram.diagonal().maxCoeff()) {
    throw DataError(
        "logistic ERM: no unconstrained minimizer (separable data?), set "
        "problem.radius");
  }
  return x;
}

}  // namespace

Problem build_base_problem(const ExperimentConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  if (c.kind == ProblemKind::projection) {
    const int d = effective_dim(c);
    const double R = c.radius.value_or(1.0);
    const Vector xbar = c.ratio * R * random_unit_vector(rng, d);
    auto set = FeasibleSet::ball(R, d);
    Vector x0 = effective_start(c) == StartPoint::zero ? Vector::Zero(d).eval()
                                         : set.random_member(rng);
    std::ostringstream label;
    label << "projection(d=" << d << ",R=" << R << ")";
    return Problem(make_projection_objective(xbar, R), std::move(set),
                   std::move(x0), label.str());
  }
  const Loss loss =
      c.kind == ProblemKind::quadratic_erm ? Loss::quadratic : Loss::logistic;
  auto data = load_data(c, seed + 1);
  auto f = make_erm_objective(data, loss);
  const Eigen::Index d = data->dim();
  double R = 0.0;
  std::optional<Vector> xstar;
  if (c.radius) {
    R = *c.radius;
  } else {
    xstar = erm_unconstrained_minimizer(*f);
    if (!(xstar->norm() > 0.0)) {
      throw DataError("ERM: unconstrained minimizer is the origin, set "
                      "problem.radius");
    }
    R = xstar->norm() / c.ratio;
  }
  if (loss == Loss::quadratic) {
    const double n = static_cast<double>(data->size());
    const Matrix H = data->features.transpose() * data->features / n;
    const double mu =
        Eigen::SelfAdjointEigenSolver<Matrix>(H, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    if (mu > 0.0) {
      f->known_mu = mu;
      if (!xstar) xstar = erm_unconstrained_minimizer(*f);
      const QuadraticObjective q(H, *xstar, f->value(*xstar));
      f->known_fstar = minimize_quadratic_on_ball(q, R, Vector::Zero(d)).value;
    }
  }
  f->reset_counters();
  auto set = FeasibleSet::ball(R, d);
  Vector x0 = effective_start(c) == StartPoint::zero ? Vector::Zero(d).eval()
                                       : set.random_member(rng);
  std::ostringstream label;
  label << to_string(c.kind) << "(n=" << data->size() << ",d=" << d
        << ",R=" << R << ")";
  return Problem(f, std::move(set), std::move(x0), label.str());
}

std::vector<Cell> cell_matrix(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (const auto s : config.strategies) {
    for (const double k : config.conditions) {
      cells.push_back({s, k, to_string(s) + "_kappa" + condition_tag(k)});
    }
  }
  return cells;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << kTraceCsvHeader << "\n";
  for (const auto& r : trace.records) {
    out << r.k << "," << fmt17(r.gap) << ","
        << (r.primal_gap ? fmt17(*r.primal_gap) : "") << "," << fmt17(r.gamma)
        << "," << (r.L_estimate ? fmt17(*r.L_estimate) : "") << ","
        << r.lmo_calls << "," << r.f_evals << "," << r.grad_evals << "\n";
  }
}

// --- running ---------------------------------------------------------------

namespace {

// Quantities shared by every cell, computed once on the untransformed problem
// (the directional constants are affine invariant).
struct Shared {
  std::optional<double> fstar;
  FstarSource fstar_source = FstarSource::none;
  double L_dir = 0.0;    // sampled 𝓛̂
  double L_step = 0.0;   // max(𝓛̂, L/(cα)), used by the directional step
  std::optional<double> L_mod;
  std::optional<double> h0;
  double rate_floor = 1e-14;
};

std::uint64_t map_seed_for(const ExperimentConfig& c, std::uint64_t seed,
                           std::size_t index) {
  return c.map_seed.value_or(seed + 1000) + 7919 * index;
}

Problem build_cell_problem(const ExperimentConfig& c, std::uint64_t seed,
                           const Shared& shared, double condition) {
  Problem base = build_base_problem(c, seed);
  if (!base.fstar && shared.fstar) {
    base.fstar = shared.fstar;
    base.fstar_source = shared.fstar_source;
  }
  if (condition == 1.0) return base;
  const auto idx = static_cast<std::size_t>(
      std::find(c.conditions.begin(), c.conditions.end(), condition) -
      c.conditions.begin());
  return transform_problem(
      base, AffineMap::random(base.set.dim(), condition,
                              map_seed_for(c, seed, idx)));
}

AffineMap cell_map(const ExperimentConfig& c, std::uint64_t seed,
                   double condition, Eigen::Index dim) {
  if (condition == 1.0) return AffineMap::identity(dim);
  const auto idx = static_cast<std::size_t>(
      std::find(c.conditions.begin(), c.conditions.end(), condition) -
      c.conditions.begin());
  return AffineMap::random(dim, condition, map_seed_for(c, seed, idx));
}

Shared prepare(const ExperimentConfig& c, std::uint64_t seed) {
  Shared s;
  Problem base = build_base_problem(c, seed);
  auto ref_strategy = make_strategy(
      {StrategyKind::backtracking_affine, c.initial_constant, std::nullopt,
       std::nullopt});
  const Trace ref = fw_run(base, *ref_strategy,
                           {std::max(c.max_iters, 2000), 1e-13, std::nullopt});
  if (base.fstar) {
    s.fstar = base.fstar;
    s.fstar_source = base.fstar_source;
  } else {
    s.fstar = base.objective->value(ref.last().x);
    s.fstar_source = FstarSource::reference_run;
    s.rate_floor = std::max(1e-14, 10.0 * ref.last().gap);
    base.fstar = s.fstar;
  }
  const auto probes = default_probes(base, &ref, 100, seed + 11);
  s.L_dir = estimate_directional_smoothness(base, probes).value;
  s.L_step = s.L_dir;
  if (base.objective->known_L && base.objective->known_mu) {
    const Gauge l2 = Gauge::norm_ball(base.set.dim());
    const auto tc = oracle_constants(base, l2, 4000, seed + 13, &ref);
    if (tc.c_omega > 0.0) s.L_step = std::max(s.L_step, theory_bound_linear(tc));
  }

  const bool needs_modified =
      std::find(c.strategies.begin(), c.strategies.end(),
                StrategyKind::modified) != c.strategies.end();
  if (needs_modified) {
    s.h0 = base.objective->value(base.x0) - *s.fstar;
    if (!(*s.h0 > 0.0)) {
      throw InputError("modified step: x0 is already optimal");
    }
    if (base.objective->known_L && base.objective->known_mu &&
        *base.objective->known_mu > 0.0) {
      TheoryConstants tc;
      tc.gauge_id = Gauge::norm_ball(base.set.dim()).id();
      tc.L_omega = *base.objective->known_L;
      tc.mu_omega = *base.objective->known_mu;
      tc.alpha_omega = 1.0 / (2.0 * base.set.radius());
      tc.kappa_omega = 1.0;
      tc.source = ConstantSource::analytic;
      s.L_mod = theory_bound_modified(tc, *s.h0);
    } else {
      s.L_mod = estimate_modified_smoothness(base, probes, *s.h0).value;
    }
  }
  return s;
}

StrategySpec spec_for(const ExperimentConfig& c, StrategyKind kind,
                      const Problem& p, const Shared& s) {
  StrategySpec spec{kind, 1.0, std::nullopt, std::nullopt};
  switch (kind) {
    case StrategyKind::fixed_inverse_L:
      if (!p.objective->known_L) {
        throw InputError("fixed_L needs a known smoothness constant");
      }
      spec.constant = *p.objective->known_L;
      break;
    case StrategyKind::directional_fixed:
      spec.constant = s.L_step;
      break;
    case StrategyKind::backtracking_norm:
    case StrategyKind::backtracking_affine:
      spec.constant = c.initial_constant;
      break;
    case StrategyKind::modified:
      spec.constant = *s.L_mod;
      spec.fstar = s.fstar;
      spec.h0 = s.h0;
      break;
    default:
      break;
  }
  return spec;
}

using json = nlohmann::ordered_json;

struct CellResult {
  Cell cell;
  std::optional<Trace> trace;
  std::string error;
  json assertions = json::object();
  json rate;
  bool passed = false;
};

bool descent_strategy(StrategyKind k) {
  return k == StrategyKind::exact || k == StrategyKind::backtracking_norm ||
         k == StrategyKind::backtracking_affine;
}

bool invariant_strategy(StrategyKind k) {
  return k != StrategyKind::fixed_inverse_L &&
         k != StrategyKind::backtracking_norm;
}

void assess(CellResult& r, const Shared& s) {
  const Trace& t = *r.trace;
  bool ok = true;
  auto record = [&](const std::string& name, bool pass) {
    r.assertions[name] = pass;
    ok = ok && pass;
  };
  if (descent_strategy(r.cell.strategy) && s.fstar) {
    bool mono = true;
    const double slack = 1e-12 * std::max(1.0, std::abs(*s.fstar));
    for (std::size_t i = 1; i < t.records.size(); ++i) {
      if (*t.records[i].primal_gap > *t.records[i - 1].primal_gap + slack) {
        mono = false;
      }
    }
    record("monotone_primal_gap", mono);
  }
  if (r.cell.strategy == StrategyKind::backtracking_affine ||
      r.cell.strategy == StrategyKind::exact) {
    try {
      const auto fit = rate_fit(t, theory_rate_linear(s.L_dir),
                                RateSeries::primal_gap,
                                FitWindow{5, -1, s.rate_floor});
      r.rate = {{"series", "primal_gap"},
                {"empirical_rho", fit.empirical_rho},
                {"theory_rho", fit.theory_rho},
                {"window", {fit.window_begin, fit.window_end}},
                {"passed", fit.passed}};
      record("linear_rate", fit.passed);
    } catch (const InputError& e) {
      r.rate = {{"skipped", e.what()}};
    }
  }
  if (r.cell.strategy == StrategyKind::backtracking_affine) {
    const auto rep = per_step_contraction_check(t, 1e-12);
    record("per_step_contraction", rep.passed);
  }
  if (r.cell.strategy == StrategyKind::modified) {
    const double M = 1.0 / (2.0 * *s.L_mod * std::sqrt(*s.h0));
    const auto rep = recurrence_check(t, M, 1e-10);
    r.rate = {{"series", "primal_gap"},
              {"sublinear_C", rep.sublinear_C.value_or(0.0)},
              {"worst_slack", rep.worst_slack},
              {"passed", rep.passed}};
    record("sublinear_recurrence", rep.passed);
  }
  r.passed = ok;
}

json nullable(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config,
                          const RunSettings& settings, std::ostream& log) {
  const auto cells = cell_matrix(config);
  RunOutcome outcome;
  outcome.cells = static_cast<int>(cells.size());
  const std::filesystem::path dir = settings.output_dir.empty()
                                        ? std::filesystem::path(config.output_dir)
                                        : settings.output_dir;
  if (settings.dry_run) {
    log << "config " << config_hash(config) << " seed " << settings.seed
        << ", " << cells.size() << " cells -> " << dir.string() << "\n";
    for (const auto& c : cells) {
      log << "  " << std::left << std::setw(22) << to_string(c.strategy)
          << " kappa=" << std::setw(8) << condition_tag(c.condition) << " "
          << (dir / (c.id + ".csv")).string() << "\n";
    }
    return outcome;
  }
  std::filesystem::create_directories(dir);

  Shared shared;
  std::string prepare_error;
  try {
    shared = prepare(config, settings.seed);
  } catch (const Error& e) {
    prepare_error = e.what();
  }

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      CellResult& r = results[i];
      r.cell = cells[i];
      if (!prepare_error.empty()) {
        r.error = "setup: " + prepare_error;
        continue;
      }
      try {
        const Problem p =
            build_cell_problem(config, settings.seed, shared, r.cell.condition);
        auto strategy = make_strategy(spec_for(config, r.cell.strategy, p, shared));
        r.trace = fw_run(p, *strategy,
                         {config.max_iters, config.gap_tol, config.wall_budget});
        std::ofstream csv(dir / (r.cell.id + ".csv"), std::ios::binary);
        write_trace_csv(*r.trace, csv);
        if (!csv) throw Error("cannot write " + (dir / (r.cell.id + ".csv")).string());
        assess(r, shared);
      } catch (const Error& e) {
        r.error = e.what();
        r.passed = false;
      }
      std::lock_guard lock(log_mutex);
      log << (r.passed ? "ok   " : "FAIL ") << r.cell.id;
      if (r.trace) {
        log << "  iters=" << r.trace->last().k << " gap=" << r.trace->last().gap
            << " (" << to_string(r.trace->terminated_by) << ")";
      }
      if (!r.error.empty()) log << "  error: " << r.error;
      log << "\n";
    }
  };
  const int jobs = std::max(1, std::min<int>(settings.jobs,
                                             static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Iterates of transformed cells mapped back against the identity cell.
  std::vector<json> invariance;
  for (const auto& r : results) {
    if (!r.trace || r.cell.condition == 1.0 ||
        !invariant_strategy(r.cell.strategy)) {
      continue;
    }
    const auto ref = std::find_if(results.begin(), results.end(), [&](const auto& o) {
      return o.trace && o.cell.strategy == r.cell.strategy &&
             o.cell.condition == 1.0;
    });
    if (ref == results.end()) continue;
    const auto map = cell_map(config, settings.seed, r.cell.condition,
                              ref->trace->last().x.size());
    const auto& a = ref->trace->records;
    const auto& b = r.trace->records;
    const std::size_t n = std::min(a.size(), b.size());
    double dev = 0.0;
    double step_dev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dev = std::max(dev, relative_deviation(a[k].x, map.forward(b[k].x)));
      if (k + 1 < n) {
        step_dev = std::max(step_dev, std::abs(a[k].gamma - b[k].gamma));
      }
    }
    const double limit = 1e-6 * r.cell.condition;
    invariance.push_back({{"type", "invariance"},
                          {"strategy", to_string(r.cell.strategy)},
                          {"kappa", r.cell.condition},
                          {"compared", n},
                          {"iterate_deviation", dev},
                          {"step_deviation", step_dev},
                          {"limit", limit},
                          {"passed", dev <= limit}});
  }

  const std::string hash = config_hash(config);
  std::ofstream summary(dir / "summary.jsonl", std::ios::binary | std::ios::trunc);
  for (const auto& r : results) {
    json line = {{"type", "cell"},
                 {"config_hash", hash},
                 {"seed", settings.seed},
                 {"cell", r.cell.id},
                 {"strategy", to_string(r.cell.strategy)},
                 {"kappa", r.cell.condition}};
    if (r.trace) {
      const auto& last = r.trace->last();
      line["problem"] = r.trace->problem_label;
      line["iterations"] = last.k;
      line["terminated_by"] = to_string(r.trace->terminated_by);
      line["final_gap"] = last.gap;
      line["final_primal_gap"] = nullable(last.primal_gap);
      line["max_L_estimate"] = nullable(r.trace->max_L_estimate());
    }
    if (!r.rate.is_null()) line["rate"] = r.rate;
    line["assertions"] = r.assertions;
    if (!r.error.empty()) line["error"] = r.error;
    line["passed"] = r.passed;
    summary << line.dump() << "\n";
    if (!r.passed) ++outcome.failed_cells;
  }
  bool invariance_ok = true;
  for (auto& line : invariance) {
    line["config_hash"] = hash;
    line["seed"] = settings.seed;
    invariance_ok = invariance_ok && line["passed"].get<bool>();
    summary << line.dump() << "\n";
  }
  outcome.passed = outcome.failed_cells == 0 && invariance_ok;
  json run = {{"type", "run"},
              {"config_hash", hash},
              {"seed", settings.seed},
              {"name", config.name},
              {"cells", outcome.cells},
              {"failed_cells", outcome.failed_cells},
              {"L_directional", shared.L_dir},
              {"L_directional_step", shared.L_step},
              {"fstar", nullable(shared.fstar)},
              {"fstar_source", shared.fstar_source == FstarSource::analytic
                                   ? "analytic"
                                   : shared.fstar_source ==
                                             FstarSource::reference_run
                                         ? "reference_run"
                                         : "none"},
              {"passed", outcome.passed}};
  if (!prepare_error.empty()) run["error"] = prepare_error;
  summary << run.dump() << "\n";
  if (!summary) throw Error("cannot write " + (dir / "summary.jsonl").string());
  return outcome;
}

bool print_constants(const ExperimentConfig& config, std::uint64_t seed,
                     std::ostream& out) {
  const Shared shared = prepare(config, seed);
  out << std::left << std::setw(10) << "kappa" << std::setw(34) << "gauge"
      << std::setw(14) << "L_omega" << std::setw(14) << "mu_omega"
      << std::setw(14) << "alpha_omega" << std::setw(14) << "c_omega"
      << std::setw(14) << "bound" << std::setw(14) << "L_hat" << "\n";
  bool ok = true;
  for (const double k : config.conditions) {
    const Problem p = build_cell_problem(config, seed, shared, k);
    auto strategy = make_strategy({StrategyKind::backtracking_affine,
                                   config.initial_constant, std::nullopt,
                                   std::nullopt});
    const Trace t = fw_run(p, *strategy, {config.max_iters, config.gap_tol,
                                          config.wall_budget});
    const Gauge l2 = Gauge::norm_ball(p.set.dim());
    const auto Lhat =
        estimate_directional_smoothness(p, default_probes(p, &t, 100, seed + 11));
    out << std::setw(10) << condition_tag(k) << std::setw(34) << l2.id();
    if (!p.objective->known_L || !p.objective->known_mu) {
      out << std::setw(14) << "-" << std::setw(14) << "-" << std::setw(14)
          << "-" << std::setw(14) << "-" << std::setw(14) << "-"
          << std::setw(14) << Lhat.value << "\n";
      continue;
    }
    const auto tc = oracle_constants(p, l2, 4000, seed + 13, &t);
    const double bound = theory_bound_linear(tc);
    ok = ok && Lhat.value <= 1.02 * bound;
    out << std::setw(14) << tc.L_omega << std::setw(14) << tc.mu_omega
        << std::setw(14) << tc.alpha_omega << std::setw(14) << tc.c_omega
        << std::setw(14) << bound << std::setw(14) << Lhat.value << "\n";
  }
  return ok;
}

}  // namespace affw
