#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "csaga/bench.hpp"
#include "csaga/error.hpp"

namespace csaga::bench {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("csaga_bench_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

int call(std::vector<std::string> args, std::string* out_text = nullptr,
         std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

TEST(Grid, DefaultPowersOfTwo) {
  const auto g = default_gamma_grid();
  ASSERT_EQ(g.size(), 28u);
  EXPECT_EQ(g.front(), 8192.0);
  EXPECT_EQ(g.back(), std::ldexp(1.0, -14));
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_EQ(g[i - 1] / g[i], 2.0);
  EXPECT_LT(g.back(), 1e-4);
  EXPECT_GT(g.front(), 1e-4);
}

TEST(Grid, ParseSpec) {
  EXPECT_EQ(parse_gamma_grid("default", 1.0), default_gamma_grid());
  const auto g = parse_gamma_grid("0.5,1/L,3e-2", 4.0);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], 0.5);
  EXPECT_EQ(g[1], 0.25);
  EXPECT_EQ(g[2], 0.03);
  EXPECT_THROW(parse_gamma_grid("abc", 1.0), Error);
  EXPECT_THROW(parse_gamma_grid("-1", 1.0), Error);
  EXPECT_THROW(parse_gamma_grid("", 1.0), Error);
}

TEST(GridSearch, BestDominatesMembersAndIsDeterministic) {
  auto p = make_quadratic_family(10, 4, 1.0, 10.0, 2);
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  const DenseVec x0 = random_point_at_distance(ref.x_star, 1.0, 2);
  RunOptions base;
  base.solver.method = MethodKind::saga;
  base.solver.seed = 4;
  base.epochs = 15;
  std::vector<double> gammas = default_gamma_grid();
  gammas.push_back(1.0 / (3.0 * p.raw_L()));
  const GridResult a = grid_search(p, x0, ref, base, gammas, 2);
  const GridResult b = grid_search(p, x0, ref, base, gammas, 1);
  EXPECT_EQ(a.best_gamma, b.best_gamma);
  RunOptions known = base;
  known.solver.gamma = 1.0 / (3.0 * p.raw_L());
  const RunResult r = run(p, x0, known, ref);
  EXPECT_LE(a.cells[a.best_index].final_suboptimality, r.trace.back().suboptimality);
  EXPECT_EQ(a.cells.front().status, "diverged");
  for (const auto& c : a.cells) {
    if (c.status == "ok") EXPECT_LE(a.cells[a.best_index].final_suboptimality, c.final_suboptimality);
  }
}

TEST(GridSearch, GradientDescentOnIsotropicQuadratic) {
  // kappa = 1: exhaustive evaluation of the grid is its own oracle.
  auto p = make_quadratic_family(6, 3, 2.0, 2.0, 1);
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  const DenseVec x0 = random_point_at_distance(ref.x_star, 1.0, 1);
  RunOptions base;
  base.solver.method = MethodKind::gd;
  base.epochs = 3;
  const auto gammas = default_gamma_grid();
  const GridResult g = grid_search(p, x0, ref, base, gammas);
  double best = INFINITY, best_gamma = 0.0;
  for (double gamma : gammas) {
    RunOptions o = base;
    o.solver.gamma = gamma;
    const RunResult r = run(p, x0, o, ref);
    if (!r.diverged && r.trace.back().suboptimality < best) {
      best = r.trace.back().suboptimality;
      best_gamma = gamma;
    }
  }
  EXPECT_EQ(g.best_gamma, best_gamma);
  EXPECT_EQ(g.best_gamma, 0.5);  // 1/L exactly on the grid
}

TEST(GridSearch, AllDivergentThrows) {
  auto p = make_quadratic_family(4, 2, 1.0, 10.0, 0);
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  RunOptions base;
  base.solver.method = MethodKind::csaga;
  base.epochs = 20;
  const std::vector<double> gammas{1000.0, 500.0};
  EXPECT_THROW(grid_search(p, DenseVec{1.0, 1.0}, ref, base, gammas), Error);
}

TEST(Csv, TraceSchema) {
  std::vector<TraceRecord> t{{0, 10, 0.5, 1.0, std::nullopt, 0.1},
                             {1, 20, 0.5, 0.25, 3.0, 0.2}};
  std::ostringstream out;
  write_trace_csv(out, t, false);
  EXPECT_EQ(out.str(),
            "epoch,grad_evals,gamma,suboptimality,lyapunov,wall_seconds\n"
            "0,10,0.5,1,,0\n"
            "1,20,0.5,0.25,3,0\n");
}

TEST(Csv, SummaryOrdering) {
  std::vector<SummaryRow> rows{{"d", "iag", 0, 0.1, 20, 1e-3, "ok"},
                               {"d", "gd", 0, 8192, 0, 0.0, "diverged"},
                               {"d", "csaga", 0, 0.1, 20, 1e-5, "ok"}};
  std::ostringstream out;
  write_summary_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "dataset,method,seed,gamma,final_epoch,final_suboptimality,status");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 7), "d,csaga");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 5), "d,iag");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 4), "d,gd");
}

TEST(Cache, SecondLoadHits) {
  const fs::path dir = scratch_dir("cache");
  ProblemSpec spec;
  spec.synthetic = SyntheticKind::sparse;
  spec.n = 60;
  spec.dim = 100;
  CacheOptions cache{dir, 1e-10};
  const LoadedProblem a = load_problem(spec, cache);
  EXPECT_FALSE(a.cache_hit);
  const LoadedProblem b = load_problem(spec, cache);
  EXPECT_TRUE(b.cache_hit);
  EXPECT_EQ(a.ref.x_star, b.ref.x_star);
  EXPECT_EQ(a.ref.f_star, b.ref.f_star);
  spec.lambda = 0.02;
  EXPECT_FALSE(load_problem(spec, cache).cache_hit);
  EXPECT_NE(problem_hash(a.problem, 1e-10), problem_hash(a.problem, 1e-9));
  const std::string h = problem_hash(a.problem, 1e-10);
  EXPECT_EQ(h.size(), 64u);
  EXPECT_TRUE(fs::exists(dir / (h + ".ref")));
}

TEST(Suite, OutputInventoryAndLog) {
  const fs::path dir = scratch_dir("suite");
  SuiteConfig cfg;
  cfg.problem.synthetic = SyntheticKind::onehot;
  cfg.problem.n = 2000;
  cfg.problem.subsample = 0.05;
  cfg.methods = {MethodKind::iag, MethodKind::csaga};
  cfg.gamma_grid = "default";
  cfg.epochs = 20;
  cfg.out_dir = dir / "out";
  cfg.cache.dir = dir / "cache";
  cfg.wall_clock = false;
  std::ostringstream log1, log2;
  const SuiteResult r = run_suite(cfg, log1);
  EXPECT_TRUE(fs::exists(cfg.out_dir / "onehot_p5_iag.csv"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "onehot_p5_csaga.csv"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "onehot_p5_iag_grid.csv"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "summary.csv"));
  EXPECT_EQ(r.summary.size(), 2u);
  EXPECT_FALSE(r.cache_hit);
  const std::string first = slurp(cfg.out_dir / "onehot_p5_csaga.csv");
  const SuiteResult r2 = run_suite(cfg, log2);
  EXPECT_TRUE(r2.cache_hit);
  EXPECT_NE(log2.str().find("cache hit"), std::string::npos);
  EXPECT_EQ(first, slurp(cfg.out_dir / "onehot_p5_csaga.csv"));

  const auto rows = read_csv(cfg.out_dir / "onehot_p5_csaga.csv");
  ASSERT_EQ(rows.size(), 22u);
  EXPECT_EQ(rows[0].size(), 6u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 6u);
    EXPECT_EQ(std::stoul(rows[i][0]), i - 1);
    EXPECT_EQ(std::stoul(rows[i][1]), 100u * i);
    EXPECT_GE(std::stod(rows[i][3]), 0.0);
    if (i > 1) EXPECT_GE(std::stoul(rows[i][1]), std::stoul(rows[i - 1][1]));
  }
  const auto summary = read_csv(cfg.out_dir / "summary.csv");
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_LE(std::stod(summary[1][5]), std::stod(summary[2][5]));
}

TEST(Suite, ValidationRejections) {
  SuiteConfig cfg;
  cfg.problem.synthetic = SyntheticKind::sparse;
  cfg.gamma = 0.1;
  EXPECT_NO_THROW(validate(cfg));
  cfg.gamma_grid = "default";
  EXPECT_THROW(validate(cfg), Error);
  cfg.gamma_grid.reset();
  cfg.jit = true;
  cfg.methods = {MethodKind::diag};
  EXPECT_THROW(validate(cfg), Error);
  cfg.methods = {MethodKind::csaga};
  cfg.diagnostics = true;
  EXPECT_THROW(validate(cfg), Error);
  cfg.diagnostics = false;
  cfg.problem.synthetic = SyntheticKind::quadratic;
  EXPECT_THROW(validate(cfg), Error);
  cfg.jit = false;
  cfg.problem.subsample = 0.0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(Cli, RejectsJitWithFinito) {
  std::string err;
  EXPECT_NE(call({"run", "--synthetic", "sparse", "--method", "finito", "--jit", "--gamma", "0.1"},
                 nullptr, &err),
            0);
  EXPECT_NE(err.find("Finito"), std::string::npos);
  EXPECT_NE(err.find("sparse"), std::string::npos);
  EXPECT_NE(call({"run", "--synthetic", "sparse", "--method", "diag", "--jit", "--gamma", "0.1"}),
            0);
}

TEST(Cli, RejectsUnknownFlagsAndValues) {
  std::string err;
  EXPECT_NE(call({"run", "--bogus"}, nullptr, &err), 0);
  EXPECT_NE(err.find("error"), std::string::npos);
  EXPECT_NE(call({"run", "--synthetic", "sparse", "--method", "svrg", "--gamma", "1"}), 0);
  EXPECT_NE(call({"run", "--synthetic", "sparse"}), 0);  // no stepsize
  EXPECT_NE(call({"grid", "--synthetic", "sparse", "--loss", "hinge"}), 0);
  EXPECT_NE(call({}), 0);
}

TEST(Cli, SubsampleRunsAreByteIdentical) {
  const fs::path dir = scratch_dir("cli");
  const fs::path data = dir / "data.svm";
  {
    std::ofstream f(data);
    write_libsvm(f, make_sparse_classification(400, 50, 5, 3));
  }
  auto go = [&](const std::string& out) {
    return call({"grid", "--data", data.string(), "--subsample", "0.05", "--seed", "7",
                 "--method", "csaga,iag", "--epochs", "5", "--out", (dir / out).string(),
                 "--cache-dir", (dir / "cache").string(), "--no-wall-clock"});
  };
  ASSERT_EQ(go("a"), 0);
  ASSERT_EQ(go("b"), 0);
  for (const char* f : {"data_p5_csaga.csv", "data_p5_iag.csv", "summary.csv",
                        "data_p5_csaga_grid.csv"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
}

TEST(Cli, DivergentGridExitsZero) {
  const fs::path dir = scratch_dir("diverge");
  std::string out;
  EXPECT_EQ(call({"grid", "--synthetic", "quadratic", "--n", "10", "--dim", "4", "--mu", "1",
                  "--L", "10", "--gamma-grid", "1000/L,0.001", "--epochs", "20", "--out",
                  dir.string(), "--no-cache"},
                 &out),
            0);
  const auto grid = read_csv(dir / "quadratic_csaga_grid.csv");
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid[1][2], "diverged");
  EXPECT_EQ(grid[2][2], "ok");

  const fs::path all = scratch_dir("diverge_all");
  EXPECT_EQ(call({"grid", "--synthetic", "quadratic", "--n", "10", "--dim", "4", "--gamma-grid",
                  "1000/L", "--epochs", "20", "--out", all.string(), "--no-cache"},
                 &out),
            0);
  const auto summary = read_csv(all / "summary.csv");
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[1][6], "diverged");
}

TEST(Cli, VerifyAndParseCheck) {
  std::string out;
  EXPECT_EQ(call({"verify"}, &out), 0);
  EXPECT_NE(out.find("PASS"), std::string::npos);
  EXPECT_EQ(out.find("FAIL"), std::string::npos);

  const fs::path dir = scratch_dir("parse");
  {
    std::ofstream f(dir / "ok.svm");
    f << "1 1:0.5 3:1\n0 2:1\n";
    std::ofstream g(dir / "bad.svm");
    g << "1 1:0.5\n1 3:1 2:1\n";
  }
  EXPECT_EQ(call({"parse-check", "--data", (dir / "ok.svm").string(), "--binary-labels"}, &out), 0);
  EXPECT_NE(out.find("n=2 d=3"), std::string::npos);
  std::string err;
  EXPECT_NE(call({"parse-check", "--data", (dir / "bad.svm").string()}, nullptr, &err), 0);
  EXPECT_NE(err.find("line 2"), std::string::npos);
}

TEST(Cli, Sweep) {
  std::string out;
  EXPECT_EQ(call({"sweep", "--kappas", "1", "--ns", "3", "--epochs", "50"}, &out), 0);
  EXPECT_EQ(out.substr(0, out.find('\n')),
            "kappa,n,method,gamma,empirical_rate,theoretical_rate,converged");
}

}  // namespace
}  // namespace csaga::bench
