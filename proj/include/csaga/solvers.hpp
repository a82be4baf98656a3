#ifndef CSAGA_SOLVERS_HPP
#define CSAGA_SOLVERS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "csaga/objectives.hpp"
#include "csaga/vecmath.hpp"

namespace csaga {

// ---------------------------------------------------------------------------
// Methods and index schedules

enum class MethodKind { gd, csaga, saga, rp_saga, sag, iag, finito, diag };
enum class SchedulerKind { cyclic, iid_uniform, random_permutation };

/// The update rule behind a method; the scheduler is the other half.
/// csaga/saga/rp_saga share the SAGA rule, sag/iag the SAG rule and
/// finito/diag the Finito rule.
enum class UpdateRule { full_gradient, saga, sag, finito };

UpdateRule update_rule(MethodKind m) noexcept;
SchedulerKind default_scheduler(MethodKind m) noexcept;
/// SAGA- and SAG-type methods have a lagged sparse path; GD and Finito-type
/// methods do not.
bool supports_jit(MethodKind m) noexcept;

std::string_view to_string(MethodKind m) noexcept;
std::string_view to_string(SchedulerKind s) noexcept;
MethodKind parse_method(std::string_view name);
SchedulerKind parse_scheduler(std::string_view name);

/// Emits component indices. Cyclic emits k mod n at step k; random
/// permutation emits a fresh bijection of [0, n) every n steps; iid draws
/// uniformly with replacement. Randomness comes from the scheduler stream
/// derived from `seed`.
class Scheduler {
 public:
  Scheduler(SchedulerKind kind, std::size_t n, std::uint64_t seed);

  std::size_t next();

  SchedulerKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return n_; }

 private:
  SchedulerKind kind_;
  std::size_t n_;
  std::uint64_t emitted_ = 0;
  std::mt19937_64 rng_;
  std::vector<std::size_t> perm_;
};

/// Ring of the last n+1 iterates; back(j) is x^{k-j}.
class HistoryWindow {
 public:
  explicit HistoryWindow(std::size_t n);

  /// Seeds the window with x^{-n} = ... = x^0 = x.
  void fill(const DenseVec& x);
  void push(const DenseVec& x);

  bool warm() const noexcept { return count_ == ring_.size(); }
  std::size_t n() const noexcept { return ring_.size() - 1; }
  const DenseVec& back(std::size_t j) const;

 private:
  std::vector<DenseVec> ring_;
  std::size_t head_ = 0;  // slot of x^k
  std::size_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Solver state and single steps

/// literal: f_i includes the L2 term; tables hold full component gradients.
/// composite: GLM losses only; tables hold the scalar l'(a_i'x) and the
/// lambda*x term is always taken at the current iterate. Only the composite
/// form admits lagged (JIT) updates.
enum class GradientPath { literal, composite };

struct SolverConfig {
  MethodKind method = MethodKind::csaga;
  std::optional<SchedulerKind> scheduler;  // default_scheduler(method) if unset
  double gamma = 0.0;
  std::uint64_t seed = 0;
  bool jit = false;
  GradientPath path = GradientPath::literal;
};

struct SolverState {
  MethodKind method = MethodKind::csaga;
  UpdateRule rule = UpdateRule::saga;
  GradientPath path = GradientPath::literal;
  bool jit = false;
  std::size_t n = 0;
  std::size_t d = 0;
  double gamma = 0.0;
  double lambda = 0.0;

  DenseVec x;
  /// literal: n x d row-major gradients. composite: n scalar derivatives.
  std::vector<double> grad_table;
  /// Mean of the table (loss part only on the composite path).
  DenseVec g_bar;
  /// Finito/DIAG iterate copies (n x d) and their mean.
  std::vector<double> phi;
  DenseVec phi_bar;
  /// JIT: step index up to which each coordinate of x is current.
  std::vector<std::uint64_t> lag;

  std::uint64_t k = 0;
  std::uint64_t grad_evals = 0;
  TouchCounter touches;

  DenseVec scratch;
  DenseVec scratch2;
};

/// x^{-j} = x^0 for all j: every table entry is taken at x0 (n gradient
/// evaluations, counted). Throws on gamma <= 0, non-finite x0, JIT requested
/// for an unsupported method or loss, or gamma*lambda >= 1 under JIT.
SolverState init(const FiniteSumProblem& p, const DenseVec& x0,
                 const SolverConfig& config);

/// Full-gradient step; costs n gradient evaluations.
void step_gd(SolverState& s, const FiniteSumProblem& p);
/// x <- x - gamma (grad f_i(x) - table[i] + g_bar), then table[i] refreshed.
/// With a cyclic scheduler this is C-SAGA.
void step_saga(SolverState& s, const FiniteSumProblem& p, Scheduler& sched);
/// table[i] refreshed first, then x <- x - gamma g_bar (IAG when cyclic).
void step_sag_iag(SolverState& s, const FiniteSumProblem& p, Scheduler& sched);
/// x <- phi_bar - gamma g_bar, then phi_i <- x, table[i] <- grad f_i(x)
/// (DIAG when cyclic).
void step_finito_diag(SolverState& s, const FiniteSumProblem& p, Scheduler& sched);
/// Lagged sparse step for SAGA/SAG rules on the composite path. Only the
/// coordinates of the scheduled row are read or written.
void step_jit(SolverState& s, const FiniteSumProblem& p, Scheduler& sched);

/// Dispatches on (rule, jit).
void step(SolverState& s, const FiniteSumProblem& p, Scheduler& sched);

/// JIT: brings every coordinate of x up to step k. No-op otherwise.
/// Must run before reading x in full.
void finalize(SolverState& s);
/// Replaces the incrementally maintained means with exact recomputations
/// (finalizing first under JIT).
void recompute_aggregates(SolverState& s, const FiniteSumProblem& p);
/// max_j |g_bar_j - exact_j| / max(|exact|_inf, tiny).
double g_bar_drift(const SolverState& s, const FiniteSumProblem& p);

/// Throws DivergenceError when x has a non-finite entry or |x| > 1e100.
void check_divergence(const SolverState& s);

/// Transcription of the C-SAGA recursion with no gradient table:
///   x^{k+1} = x^k - gamma (grad f_[k](x^k) - grad f_[k](x^{k-n})
///                          + 1/n sum_{i=1..n} grad f_[k-i](x^{k-i}))
/// with x^{-j} = x0. Returns x^0 .. x^steps. Recomputes n+2 gradients per
/// step; meant for checking the table engine on small problems.
std::vector<DenseVec> literal_csaga(const FiniteSumProblem& p, const DenseVec& x0,
                                    double gamma, std::size_t steps);

// ---------------------------------------------------------------------------
// Epoch driver

struct TraceRecord {
  std::size_t epoch = 0;
  std::uint64_t grad_evals = 0;
  double gamma = 0.0;
  double suboptimality = 0.0;
  std::optional<double> lyapunov;
  double wall_seconds = 0.0;
};

struct RunOptions {
  SolverConfig solver;
  std::size_t epochs = 1;
  /// Track V^k at epoch boundaries; needs the dense literal path.
  bool diagnostics = false;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  bool diverged = false;
  std::optional<std::uint64_t> divergence_step;
  DenseVec final_x;
};

constexpr double kSuboptimalityFloor = 1e-16;

/// Runs `epochs` epochs (n steps each; one full step for GD) and records one
/// TraceRecord per epoch boundary, starting with epoch 0 after
/// initialization. Divergence truncates the trace and sets `diverged`.
RunResult run(const FiniteSumProblem& p, const DenseVec& x0,
              const RunOptions& options, const ReferenceSolution& ref);

}  // namespace csaga

#endif  // CSAGA_SOLVERS_HPP
