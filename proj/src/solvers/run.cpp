#include <algorithm>
#include <chrono>
#include <string>

#include "csaga/diagnostics.hpp"
#include "csaga/error.hpp"
#include "csaga/solvers.hpp"

namespace csaga {

namespace {

constexpr std::size_t kMaxHistoryEntries = 10'000'000;

}  // namespace

RunResult run(const FiniteSumProblem& p, const DenseVec& x0,
              const RunOptions& options, const ReferenceSolution& ref) {
  if (options.epochs < 1) throw Error("run: epochs must be >= 1");
  const SolverConfig& cfg = options.solver;
  if (options.diagnostics) {
    if (cfg.jit || cfg.path != GradientPath::literal) {
      throw Error("diagnostics need the dense literal path (no --jit)");
    }
    if ((p.n() + 1) * p.dim() > kMaxHistoryEntries) {
      throw Error("diagnostics: history window too large (n*d > 1e7)");
    }
  }

  using clock = std::chrono::steady_clock;
  RunResult result;
  const auto t0 = clock::now();
  SolverState s = init(p, x0, cfg);
  Scheduler sched(cfg.scheduler.value_or(default_scheduler(cfg.method)), p.n(), cfg.seed);
  double solver_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  std::optional<HistoryWindow> window;
  if (options.diagnostics) {
    window.emplace(p.n());
    window->fill(x0);
  }

  auto record = [&](std::size_t epoch) {
    TraceRecord r;
    r.epoch = epoch;
    r.grad_evals = s.grad_evals;
    r.gamma = cfg.gamma;
    r.suboptimality =
        std::max(p.suboptimality(s.x, ref.x_star, ref.f_star), kSuboptimalityFloor);
    if (window) r.lyapunov = lyapunov(*window, ref.x_star);
    r.wall_seconds = solver_seconds;
    result.trace.push_back(r);
  };

  record(0);
  const std::size_t steps_per_epoch =
      update_rule(cfg.method) == UpdateRule::full_gradient ? 1 : p.n();
  try {
    for (std::size_t e = 1; e <= options.epochs; ++e) {
      const auto start = clock::now();
      for (std::size_t t = 0; t < steps_per_epoch; ++t) {
        step(s, p, sched);
        if (window) window->push(s.x);
      }
      recompute_aggregates(s, p);
      check_divergence(s);
      solver_seconds += std::chrono::duration<double>(clock::now() - start).count();
      record(e);
    }
  } catch (const DivergenceError& err) {
    result.diverged = true;
    result.divergence_step = err.iteration();
  }
  finalize(s);
  result.final_x = s.x;
  return result;
}

}  // namespace csaga
