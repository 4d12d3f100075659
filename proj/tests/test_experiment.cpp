#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "affw/experiment.hpp"

namespace affw {
namespace {

namespace fs = std::filesystem;

const char* kProjection = R"(# small projection experiment
[experiment]
name = unit

[problem]
kind = projection
dim = 8
ratio = 1.2

[map]
conditions = 1, 1e6

[solver]
strategies = backtracking_affine, exact, fixed_L
max_iters = 300
)";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("affw_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Config, ParsesValuesAndDefaults) {
  const auto c = parse_config_text(kProjection);
  EXPECT_EQ(c.name, "unit");
  EXPECT_EQ(c.kind, ProblemKind::projection);
  EXPECT_EQ(c.dim, 8);
  EXPECT_EQ(c.ratio, 1.2);
  EXPECT_EQ(c.conditions, (std::vector<double>{1.0, 1e6}));
  EXPECT_EQ(c.strategies.size(), 3u);
  EXPECT_EQ(c.max_iters, 300);
  EXPECT_EQ(c.gap_tol, 1e-10);
  EXPECT_FALSE(c.seed);
  EXPECT_EQ(effective_start(c), StartPoint::random);
}

TEST(Config, EmptyFileListsRequiredKeys) {
  try {
    parse_config_text("", "empty.ini");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("problem.kind"), std::string::npos) << msg;
    EXPECT_NE(msg.find("solver.strategies"), std::string::npos) << msg;
  }
}

void expect_error(const std::string& text, const std::string& fragment) {
  try {
    parse_config_text(text, "c.ini");
    FAIL() << "expected ConfigError containing '" << fragment << "'";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos)
        << e.what();
  }
}

TEST(Config, ErrorsNameKeyAndLine) {
  expect_error("[problem]\nkind = projection\nkind = projection\n",
               "c.ini:3: duplicate key 'problem.kind'");
  expect_error("[problem]\nkind = projection\ncolour = red\n",
               "c.ini:3: unknown key 'problem.colour'");
  expect_error("[problem]\nkind = cube\n", "c.ini:2:");
  expect_error("[problem]\nkind = projection\ndim = two\n",
               "c.ini:3: problem.dim");
  expect_error("[nope]\n", "c.ini:1: unknown section");
  expect_error("kind = projection\n", "c.ini:1:");
  expect_error("[problem]\njust text\n", "c.ini:2:");
  expect_error("[map]\nconditions = 0.5\n", "c.ini:2:");
  expect_error(
      "[problem]\nkind = logistic_erm\ndataset = /nonexistent/x.csv\n",
      "c.ini:3:");
  expect_error("[solver]\nstrategies = exact, exact\n", "listed twice");
}

TEST(Config, RoundTripIsIdentity) {
  auto c = parse_config_text(kProjection);
  EXPECT_EQ(parse_config_text(serialize_config(c)), c);
  c.seed = 17;
  c.radius = 0.1 + 0.2;  // not exactly representable in short form
  c.wall_budget = 3.5;
  c.map_seed = 99;
  c.x0 = StartPoint::zero;
  c.kind = ProblemKind::quadratic_erm;
  EXPECT_EQ(parse_config_text(serialize_config(c)), c);
  EXPECT_EQ(serialize_config(parse_config_text(serialize_config(c))),
            serialize_config(c));
}

TEST(Config, HashTracksContent) {
  auto c = parse_config_text(kProjection);
  const auto h = config_hash(c);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(config_hash(parse_config_text(serialize_config(c))), h);
  c.max_iters += 1;
  EXPECT_NE(config_hash(c), h);
  // Reference values of 64-bit FNV-1a.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Config, ReferenceDocumentsEveryKey) {
  const auto ref = config_reference();
  for (const char* key : {"experiment.seed", "problem.kind", "problem.dim",
                          "problem.radius", "problem.dataset", "map.conditions",
                          "map.seed", "solver.strategies", "solver.max_iters",
                          "solver.gap_tol", "output.dir"}) {
    EXPECT_NE(ref.find(key), std::string::npos) << key;
  }
}

TEST(Cells, MatrixIsStrategyByCondition) {
  const auto cells = cell_matrix(parse_config_text(kProjection));
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].id, "backtracking_affine_kappa1");
  EXPECT_EQ(cells[1].id, "backtracking_affine_kappa1e06");
}

TEST(Problems, ProjectionRadiusMatchesRatio) {
  const auto c = parse_config_text(kProjection);
  const Problem p = build_base_problem(c, 3);
  const auto& f = dynamic_cast<const ProjectionObjective&>(*p.objective);
  EXPECT_NEAR(f.target().norm(), 1.2 * p.set.radius(), 1e-12);
  EXPECT_EQ(p.set.dim(), 8);
}

TEST(Problems, ErmRadiusPutsUnconstrainedOptimumOutside) {
  for (const char* kind : {"quadratic_erm", "logistic_erm"}) {
    const auto c = parse_config_text(std::string("[problem]\nkind = ") + kind +
                                     "\ndim = 5\nsamples = 80\n"
                                     "[solver]\nstrategies = exact\n");
    const Problem p = build_base_problem(c, 2);
    EXPECT_EQ(p.set.dim(), 5);
    // At the unconstrained minimizer the gradient vanishes; on the ball the
    // constrained optimum has a nonzero gradient.
    auto s = make_strategy({StrategyKind::backtracking_affine, 1.0, {}, {}});
    const Trace t = fw_run(p, *s, {3000, 1e-12, {}});
    EXPECT_NEAR(t.last().x.norm(), p.set.radius(), 1e-6 * p.set.radius())
        << kind;
    EXPECT_GT(p.objective->gradient(t.last().x).norm(), 1e-6) << kind;
  }
}

TEST(Run, DryRunListsCellsWithoutWriting) {
  const auto dir = scratch("dry");
  RunSettings s;
  s.output_dir = dir;
  s.dry_run = true;
  std::ostringstream log;
  run_experiment(parse_config_text(kProjection), s, log);
  EXPECT_NE(log.str().find("fixed_L_kappa1e06.csv"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Run, WritesCsvPerCellAndSummaryAndIsDeterministic) {
  const auto cfg = parse_config_text(kProjection);
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  RunSettings s;
  s.seed = 5;
  s.output_dir = a;
  std::ostringstream log;
  const auto out = run_experiment(cfg, s, log);
  EXPECT_TRUE(out.passed) << log.str();
  EXPECT_EQ(out.cells, 6);
  s.output_dir = b;
  s.jobs = 3;
  run_experiment(cfg, s, log);
  for (const auto& cell : cell_matrix(cfg)) {
    const auto file = cell.id + ".csv";
    ASSERT_TRUE(fs::exists(a / file)) << file;
    const auto text = read_file(a / file);
    EXPECT_EQ(text.rfind(std::string(kTraceCsvHeader) + "\n", 0), 0u);
    EXPECT_EQ(text, read_file(b / file)) << file;
  }
  const auto summary = read_file(a / "summary.jsonl");
  EXPECT_EQ(summary, read_file(b / "summary.jsonl"));
  EXPECT_NE(summary.find("\"config_hash\":\"" + config_hash(cfg) + "\""),
            std::string::npos);
  EXPECT_NE(summary.find("\"seed\":5"), std::string::npos);
  EXPECT_NE(summary.find("\"type\":\"invariance\""), std::string::npos);
  EXPECT_NE(summary.find("\"empirical_rho\""), std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, CellErrorsAreRecordedAndFailTheRun) {
  // A logistic problem on separable data has no unconstrained minimizer.
  const auto dir = scratch("err");
  fs::create_directories(dir);
  std::ofstream(dir / "sep.csv") << "1,0,1\n-1,0,-1\n2,1,1\n-2,-1,-1\n";
  const auto cfg = parse_config_text(
      "[problem]\nkind = logistic_erm\ndataset = " + (dir / "sep.csv").string() +
      "\n[solver]\nstrategies = exact\n");
  RunSettings s;
  s.output_dir = dir / "out";
  std::ostringstream log;
  const auto out = run_experiment(cfg, s, log);
  EXPECT_FALSE(out.passed);
  const auto summary = read_file(dir / "out" / "summary.jsonl");
  EXPECT_NE(summary.find("\"error\""), std::string::npos) << summary;
  fs::remove_all(dir);
}

TEST(Csv, NumbersUseSeventeenSignificantDigits) {
  Trace t;
  IterateRecord r;
  r.k = 0;
  r.gap = 0.1;
  r.primal_gap = 1.0 / 3.0;
  r.gamma = 0.5;
  t.records.push_back(r);
  std::ostringstream out;
  write_trace_csv(t, out);
  EXPECT_EQ(out.str(), std::string(kTraceCsvHeader) +
                           "\n0,0.10000000000000001,0.33333333333333331,0.5,,"
                           "0,0,0\n");
}

}  // namespace
}  // namespace affw
