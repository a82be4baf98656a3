#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csaga/bench.hpp"
#include "csaga/data.hpp"
#include "csaga/diagnostics.hpp"
#include "csaga/error.hpp"

namespace csaga::bench {

namespace {

struct ProblemFlags {
  std::string data;
  std::string synthetic;
  std::string loss = "logistic";
  std::optional<std::uint64_t> data_seed;
  std::optional<std::size_t> dim;
  std::string cache_dir;
  bool no_cache = false;
};

struct RunFlags {
  std::vector<std::string> methods{"csaga"};
  std::vector<std::uint64_t> seeds{0};
  std::string scheduler;
  std::string path;
  std::string out = ".";
  bool no_wall_clock = false;
};

void add_problem_options(CLI::App* app, ProblemFlags& pf, ProblemSpec& spec) {
  app->add_option("--data", pf.data, "LIBSVM file ('-' for standard input)");
  app->add_option("--synthetic", pf.synthetic, "Synthetic problem instead of --data")
      ->check(CLI::IsMember({"quadratic", "sparse", "onehot"}));
  app->add_option("--loss", pf.loss, "Loss for --data / sparse problems")
      ->check(CLI::IsMember({"logistic", "ridge"}));
  app->add_option("--lambda", spec.lambda, "L2 regularization weight")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--subsample", spec.subsample, "Fraction of rows kept, in (0, 1]");
  app->add_option("--data-seed", pf.data_seed,
                  "Seed for subsampling and generators (default: first --seed)");
  app->add_option("--dim", pf.dim, "Dimension override / synthetic dimension");
  app->add_flag("--scale-maxabs", spec.scale_maxabs, "Scale each feature to [-1, 1]");
  app->add_option("--n", spec.n, "Synthetic component count");
  app->add_option("--nnz", spec.nnz, "Nonzeros per row of the sparse generator");
  app->add_option("--mu", spec.mu, "Quadratic family strong convexity");
  app->add_option("--L", spec.L, "Quadratic family smoothness");
  app->add_option("--cache-dir", pf.cache_dir, "Reference-solution cache directory");
  app->add_flag("--no-cache", pf.no_cache, "Do not read or write the cache");
}

void add_run_options(CLI::App* app, RunFlags& rf, SuiteConfig& cfg) {
  app->add_option("--method", rf.methods,
                  "gd, csaga, saga, rpsaga, sag, iag, finito, diag (repeatable)")
      ->delimiter(',');
  app->add_option("--seed", rf.seeds, "Scheduler seed(s)")->delimiter(',');
  app->add_option("--scheduler", rf.scheduler, "Override: cyclic, iid, permutation");
  app->add_option("--epochs", cfg.epochs, "Passes over the data");
  app->add_flag("--jit", cfg.jit, "Lagged sparse updates");
  app->add_flag("--diagnostics", cfg.diagnostics, "Record the Lyapunov column");
  app->add_option("--path", rf.path, "Gradient path: literal or composite")
      ->check(CLI::IsMember({"literal", "composite"}));
  app->add_option("--out", rf.out, "Output directory");
  app->add_option("--threads", cfg.threads, "Worker threads for grid cells")
      ->check(CLI::PositiveNumber);
  app->add_flag("--no-wall-clock", rf.no_wall_clock,
                "Write 0 in wall_seconds for reproducible output");
}

void finish_problem(const ProblemFlags& pf, ProblemSpec& spec, std::uint64_t seed,
                    CacheOptions& cache) {
  if (!pf.data.empty()) spec.data_path = pf.data;
  if (pf.synthetic == "quadratic") spec.synthetic = SyntheticKind::quadratic;
  if (pf.synthetic == "sparse") spec.synthetic = SyntheticKind::sparse;
  if (pf.synthetic == "onehot") spec.synthetic = SyntheticKind::onehot;
  spec.loss = parse_loss_kind(pf.loss);
  spec.data_seed = pf.data_seed.value_or(seed);
  spec.dim = pf.dim;
  if (!pf.no_cache) cache.dir = pf.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(pf.cache_dir);
}

void finish_run(const RunFlags& rf, SuiteConfig& cfg) {
  cfg.methods.clear();
  for (const auto& m : rf.methods) cfg.methods.push_back(parse_method(m));
  cfg.seeds = rf.seeds;
  if (!rf.scheduler.empty()) cfg.scheduler = parse_scheduler(rf.scheduler);
  if (rf.path == "literal") cfg.path = GradientPath::literal;
  if (rf.path == "composite") cfg.path = GradientPath::composite;
  cfg.out_dir = rf.out;
  cfg.wall_clock = !rf.no_wall_clock;
}

void print_summary(std::ostream& out, const SuiteResult& res) {
  for (const auto& row : res.summary) {
    out << row.method << " seed=" << row.seed << " gamma=" << row.gamma
        << " epoch=" << row.final_epoch << " subopt=" << row.final_suboptimality
        << " " << row.status << '\n';
  }
  for (const auto& f : res.files) out << "wrote " << f.string() << '\n';
}

}  // namespace

int cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incremental gradient benchmark harness", "csaga_bench"};
  app.require_subcommand(1);

  SuiteConfig run_cfg, grid_cfg;
  ProblemFlags run_pf, grid_pf, check_pf;
  RunFlags run_rf, grid_rf;
  double gamma = 0.0;
  std::string gamma_grid = "default";

  auto* run_cmd = app.add_subcommand("run", "Run methods at a single stepsize");
  add_problem_options(run_cmd, run_pf, run_cfg.problem);
  add_run_options(run_cmd, run_rf, run_cfg);
  run_cmd->add_option("--gamma", gamma, "Stepsize")->required()->check(CLI::PositiveNumber);

  auto* grid_cmd = app.add_subcommand("grid", "Pick the best stepsize from a grid");
  add_problem_options(grid_cmd, grid_pf, grid_cfg.problem);
  add_run_options(grid_cmd, grid_rf, grid_cfg);
  grid_cmd->add_option("--gamma-grid", gamma_grid,
                       "Comma list of numbers, '<c>/L' or 'default'");

  SweepOptions sweep;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Empirical vs theoretical rates");
  sweep_cmd->add_option("--kappas", sweep.kappas, "Condition numbers")->delimiter(',');
  sweep_cmd->add_option("--ns", sweep.ns, "Component counts")->delimiter(',');
  sweep_cmd->add_option("--dim", sweep.dim, "Dimension");
  sweep_cmd->add_option("--epochs", sweep.epochs, "Epochs per run");
  sweep_cmd->add_option("--seed", sweep.seed, "Generator seed");
  sweep_cmd->add_option("--out", sweep_out, "CSV file (default: standard output)");

  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "Run the synthetic rate checks");
  verify_cmd->add_option("--seed", verify_seed, "Generator seed");

  bool binary_labels = false;
  auto* check_cmd = app.add_subcommand("parse-check", "Validate a LIBSVM file");
  check_cmd->add_option("--data", check_pf.data, "LIBSVM file ('-' for stdin)")->required();
  check_cmd->add_flag("--binary-labels", binary_labels,
                      "Map labels {0,1} / {-1,1} to {-1,+1}");
  check_cmd->add_option("--dim", check_pf.dim, "Dimension override");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*run_cmd || *grid_cmd) {
      const bool grid = static_cast<bool>(*grid_cmd);
      SuiteConfig& cfg = grid ? grid_cfg : run_cfg;
      finish_run(grid ? grid_rf : run_rf, cfg);
      finish_problem(grid ? grid_pf : run_pf, cfg.problem, cfg.seeds.front(), cfg.cache);
      if (grid) {
        cfg.gamma_grid = gamma_grid;
      } else {
        cfg.gamma = gamma;
      }
      print_summary(out, run_suite(cfg, out));
      return 0;
    }
    if (*sweep_cmd) {
      const auto rows = rate_sweep(sweep);
      if (sweep_out.empty()) {
        write_sweep_csv(out, rows);
      } else {
        std::ofstream f(sweep_out);
        if (!f) throw Error("cannot write '" + sweep_out + "'");
        write_sweep_csv(f, rows);
        out << "wrote " << sweep_out << '\n';
      }
      return 0;
    }
    if (*verify_cmd) {
      bool all = true;
      for (const auto& c : theory_suite(verify_seed)) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.passed;
      }
      return all ? 0 : 1;
    }
    if (*check_cmd) {
      LibsvmOptions opt;
      opt.normalize_binary_labels = binary_labels;
      opt.dim = check_pf.dim;
      const Dataset ds = check_pf.data == "-" ? parse_libsvm(std::cin, opt)
                                              : parse_libsvm_file(check_pf.data, opt);
      const DatasetStats st = stats(ds);
      out << "ok n=" << st.n << " d=" << st.dim << " mean_nnz=" << st.mean_nnz
          << " max_row_sq_norm=" << st.max_row_sq_norm
          << " binary_labels=" << (ds.labels_are_binary() ? "yes" : "no") << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli(args, std::cout, std::cerr);
}

}  // namespace csaga::bench
