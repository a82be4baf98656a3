#ifndef CSAGA_BENCH_HPP
#define CSAGA_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csaga/objectives.hpp"
#include "csaga/solvers.hpp"

namespace csaga::bench {

/// 2^13, 2^12, ..., 2^-14: 28 stepsizes from 8192 down past 1e-4.
std::vector<double> default_gamma_grid();

/// Comma-separated stepsizes. Tokens: a number, "<num>/L" (scaled by the
/// problem's L) or "default" (expands to default_gamma_grid()).
std::vector<double> parse_gamma_grid(std::string_view spec, double L);

enum class SyntheticKind { none, quadratic, sparse, onehot };

/// Where the problem comes from and how it is preprocessed.
struct ProblemSpec {
  std::optional<std::string> data_path;  // "-" reads standard input
  SyntheticKind synthetic = SyntheticKind::none;
  LossKind loss = LossKind::logistic;
  double lambda = 1e-2;
  double subsample = 1.0;
  std::uint64_t data_seed = 0;
  /// LIBSVM data: declared dimension override. Synthetic: the dimension
  /// (default 2000 for sparse, 4 for quadratic).
  std::optional<std::size_t> dim;
  bool scale_maxabs = false;
  // synthetic generators
  std::size_t n = 500;
  std::size_t nnz = 10;
  double mu = 1.0;
  double L = 10.0;
};

struct LoadedProblem {
  FiniteSumProblem problem;
  ReferenceSolution ref;
  DenseVec x0;
  std::string tag;
  bool cache_hit = false;
};

struct CacheOptions {
  /// Directory for reference solutions; empty disables caching.
  std::filesystem::path dir;
  double tol = 1e-10;
};

/// CSAGA_CACHE_DIR when set, else ".csaga_cache" under the working directory.
std::filesystem::path default_cache_dir();

/// Hex SHA-256 of everything the reference solution depends on.
std::string problem_hash(const FiniteSumProblem& p, double tol);

/// Loads (dir/<hash>.ref) or computes and stores the reference solution.
/// Writes go through a temporary file and a rename.
ReferenceSolution cached_reference(const FiniteSumProblem& p,
                                   const CacheOptions& cache, bool* hit = nullptr);

/// Builds the problem, its reference solution and the starting point
/// (origin for GLM losses, a unit offset from x* for quadratics).
LoadedProblem load_problem(const ProblemSpec& spec, const CacheOptions& cache);

/// ok | diverged | rejected (stepsize invalid for the chosen path)
struct GridCell {
  double gamma = 0.0;
  RunResult result;
  std::string status;
  double final_suboptimality = 0.0;
};

struct GridResult {
  bool any_ok = false;
  double best_gamma = 0.0;
  std::size_t best_index = 0;
  std::vector<GridCell> cells;
};

/// Runs every stepsize with the same seed and picks the best completed run;
/// any_ok is false when none completed.
GridResult evaluate_grid(const FiniteSumProblem& p, const DenseVec& x0,
                         const ReferenceSolution& ref, const RunOptions& base,
                         std::span<const double> gammas, std::size_t threads = 1);

/// evaluate_grid that throws when no run completed. Best = smallest
/// final-epoch suboptimality among completed runs; ties go to the larger
/// stepsize.
GridResult grid_search(const FiniteSumProblem& p, const DenseVec& x0,
                       const ReferenceSolution& ref, const RunOptions& base,
                       std::span<const double> gammas, std::size_t threads = 1);

/// Trace CSV: epoch,grad_evals,gamma,suboptimality,lyapunov,wall_seconds
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace,
                     bool wall_clock = true);

struct SummaryRow {
  std::string dataset;
  std::string method;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  std::size_t final_epoch = 0;
  double final_suboptimality = 0.0;
  std::string status;
};

/// Sorted by status (ok first), then final suboptimality, then method.
void write_summary_csv(std::ostream& out, std::vector<SummaryRow> rows);

struct SuiteConfig {
  ProblemSpec problem;
  std::vector<MethodKind> methods{MethodKind::csaga};
  std::vector<std::uint64_t> seeds{0};
  std::optional<SchedulerKind> scheduler;
  std::optional<double> gamma;
  std::optional<std::string> gamma_grid;
  std::size_t epochs = 20;
  bool jit = false;
  bool diagnostics = false;
  std::optional<GradientPath> path;  // resolved per method when unset
  std::filesystem::path out_dir = ".";
  bool wall_clock = true;
  std::size_t threads = 1;
  CacheOptions cache;
};

struct SuiteResult {
  std::vector<SummaryRow> summary;
  std::vector<std::filesystem::path> files;
  bool cache_hit = false;
};

/// Rejects combinations that cannot run (JIT with Finito/DIAG/GD, JIT on
/// quadratic problems, JIT together with diagnostics, missing stepsize).
void validate(const SuiteConfig& config);

/// One trace CSV per (method, seed) plus summary.csv; in grid mode also one
/// <tag>_<method>_grid.csv per method listing every stepsize. A grid where
/// every stepsize diverges is reported (status "diverged"), not an error.
SuiteResult run_suite(const SuiteConfig& config, std::ostream& log);

/// Subcommands: run, grid, sweep, verify, parse-check.
int cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int cli(int argc, char** argv);

}  // namespace csaga::bench

#endif  // CSAGA_BENCH_HPP
