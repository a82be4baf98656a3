#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csaga/error.hpp"
#include "csaga/simd/kernels.hpp"
#include "csaga/solvers.hpp"

namespace csaga {

namespace {

constexpr double kDivergenceNorm = 1e100;
constexpr std::size_t kMaxTableEntries = 200'000'000;

std::span<double> table_row(std::vector<double>& table, std::size_t i, std::size_t d) {
  return {table.data() + i * d, d};
}

void require_glm_row(const FiniteSumProblem& p) {
  if (!p.is_glm()) throw Error("composite path needs a logistic or ridge problem");
}

// x_j after m deferred composite steps with frozen loss average g:
//   x <- rho x - gamma g,   rho = 1 - gamma lambda.
double catch_up(double xj, double gj, std::uint64_t m, double gamma, double lambda) {
  if (lambda == 0.0) return xj - static_cast<double>(m) * gamma * gj;
  const double log_rho = std::log1p(-gamma * lambda);
  const double md = static_cast<double>(m);
  const double rho_m = std::exp(md * log_rho);
  const double one_minus_rho_m = -std::expm1(md * log_rho);
  return rho_m * xj - gj * one_minus_rho_m / lambda;
}

bool coordinate_diverged(double v) {
  return !std::isfinite(v) || std::abs(v) > kDivergenceNorm;
}

}  // namespace

SolverState init(const FiniteSumProblem& p, const DenseVec& x0,
                 const SolverConfig& config) {
  if (!(config.gamma > 0.0) || !std::isfinite(config.gamma)) {
    throw Error("stepsize gamma must be finite and > 0");
  }
  if (x0.size() != p.dim()) throw DimensionError(p.dim(), x0.size());
  if (!x0.all_finite()) throw Error("starting point has non-finite entries");

  SolverState s;
  s.method = config.method;
  s.rule = update_rule(config.method);
  s.path = config.path;
  s.jit = config.jit;
  s.n = p.n();
  s.d = p.dim();
  s.gamma = config.gamma;
  s.lambda = p.lambda();
  s.x = x0;
  s.scratch = DenseVec(s.d);
  s.scratch2 = DenseVec(s.d);

  if (s.path == GradientPath::composite) {
    require_glm_row(p);
    if (s.rule == UpdateRule::finito || s.rule == UpdateRule::full_gradient) {
      throw Error(std::string(to_string(s.method)) +
                  " has no composite-path implementation");
    }
  }
  if (s.jit) {
    if (!supports_jit(s.method)) {
      throw Error(std::string(to_string(s.method)) +
                  " has no just-in-time (lagged) update path");
    }
    if (s.path != GradientPath::composite) {
      throw Error("just-in-time updates need the composite gradient path");
    }
    if (s.gamma * p.lambda() >= 1.0) {
      throw Error("just-in-time updates need gamma * lambda < 1 (got " +
                  std::to_string(s.gamma * p.lambda()) + ")");
    }
    s.lag.assign(s.d, 0);
  }

  if (s.rule == UpdateRule::full_gradient) return s;

  const double inv_n = 1.0 / static_cast<double>(s.n);
  s.g_bar = DenseVec(s.d);
  if (s.path == GradientPath::composite) {
    s.grad_table.resize(s.n);
    for (std::size_t i = 0; i < s.n; ++i) {
      const LossScalar ls = p.component_loss_scalar(i, x0);
      s.grad_table[i] = ls.deriv;
      axpy_sparse(ls.deriv * inv_n, p.row(i), s.g_bar);
    }
  } else {
    if (s.n * s.d > kMaxTableEntries) {
      throw Error("literal gradient table would need " +
                  std::to_string(s.n * s.d) + " entries");
    }
    s.grad_table.assign(s.n * s.d, 0.0);
    for (std::size_t i = 0; i < s.n; ++i) {
      p.component_gradient(i, x0, table_row(s.grad_table, i, s.d));
    }
    recompute_aggregates(s, p);
  }
  if (s.rule == UpdateRule::finito) {
    s.phi.resize(s.n * s.d);
    for (std::size_t i = 0; i < s.n; ++i) {
      std::copy(x0.begin(), x0.end(), s.phi.begin() + static_cast<std::ptrdiff_t>(i * s.d));
    }
    s.phi_bar = x0;
  }
  s.grad_evals = s.n;
  return s;
}

void check_divergence(const SolverState& s) {
  for (std::size_t j = 0; j < s.d; ++j) {
    if (coordinate_diverged(s.x[j])) throw DivergenceError(s.k);
  }
  if (!(norm(s.x) <= kDivergenceNorm)) throw DivergenceError(s.k);
}

void step_gd(SolverState& s, const FiniteSumProblem& p) {
  const DenseVec g = p.full_gradient(s.x);
  axpy(-s.gamma, g, s.x);
  s.grad_evals += s.n;
  ++s.k;
  check_divergence(s);
}

void step_saga(SolverState& s, const FiniteSumProblem& p, Scheduler& sched) {
  const std::size_t i = sched.next();
  const double inv_n = 1.0 / static_cast<double>(s.n);

  if (s.path == GradientPath::composite) {
    const SparseVec& a = p.row(i);
    const double deriv = p.loss_derivative(i, dot(a, s.x));
    const double delta = deriv - s.grad_table[i];
    const double rho = 1.0 - s.gamma * p.lambda();
    // x <- x - gamma (delta a + g_bar + lambda x)
    axpby(-s.gamma, s.g_bar, rho, s.x);
    axpy_sparse(-s.gamma * delta, a, s.x);
    axpy_sparse(delta * inv_n, a, s.g_bar);
    s.grad_table[i] = deriv;
  } else {
    DenseVec& g_new = s.scratch;
    DenseVec& dir = s.scratch2;
    p.component_gradient(i, s.x, g_new.span());
    auto old = table_row(s.grad_table, i, s.d);
    for (std::size_t j = 0; j < s.d; ++j) dir[j] = g_new[j] - old[j] + s.g_bar[j];
    axpy(-s.gamma, dir, s.x);
    for (std::size_t j = 0; j < s.d; ++j) {
      s.g_bar[j] += (g_new[j] - old[j]) * inv_n;
      old[j] = g_new[j];
    }
  }
  ++s.grad_evals;
  ++s.k;
  check_divergence(s);
}

void step_sag_iag(SolverState& s, const FiniteSumProblem& p, Scheduler& sched) {
  const std::size_t i = sched.next();
  const double inv_n = 1.0 / static_cast<double>(s.n);

  if (s.path == GradientPath::composite) {
    const SparseVec& a = p.row(i);
    const double deriv = p.loss_derivative(i, dot(a, s.x));
    const double delta = deriv - s.grad_table[i];
    axpy_sparse(delta * inv_n, a, s.g_bar);
    s.grad_table[i] = deriv;
    axpby(-s.gamma, s.g_bar, 1.0 - s.gamma * p.lambda(), s.x);
  } else {
    DenseVec& g_new = s.scratch;
    p.component_gradient(i, s.x, g_new.span());
    auto old = table_row(s.grad_table, i, s.d);
    for (std::size_t j = 0; j < s.d; ++j) {
      s.g_bar[j] += (g_new[j] - old[j]) * inv_n;
      old[j] = g_new[j];
    }
    axpy(-s.gamma, s.g_bar, s.x);
  }
  ++s.grad_evals;
  ++s.k;
  check_divergence(s);
}

void step_finito_diag(SolverState& s, const FiniteSumProblem& p, Scheduler& sched) {
  const double inv_n = 1.0 / static_cast<double>(s.n);
  // x^{k+1} = phi_bar - gamma g_bar
  for (std::size_t j = 0; j < s.d; ++j) s.x[j] = s.phi_bar[j] - s.gamma * s.g_bar[j];
  ++s.k;
  check_divergence(s);

  const std::size_t i = sched.next();
  DenseVec& g_new = s.scratch;
  p.component_gradient(i, s.x, g_new.span());
  auto old_g = table_row(s.grad_table, i, s.d);
  auto old_phi = table_row(s.phi, i, s.d);
  for (std::size_t j = 0; j < s.d; ++j) {
    s.g_bar[j] += (g_new[j] - old_g[j]) * inv_n;
    s.phi_bar[j] += (s.x[j] - old_phi[j]) * inv_n;
    old_g[j] = g_new[j];
    old_phi[j] = s.x[j];
  }
  ++s.grad_evals;
}

void step_jit(SolverState& s, const FiniteSumProblem& p, Scheduler& sched) {
  const std::size_t i = sched.next();
  const SparseVec& a = p.row(i);
  const auto idx = a.indices();
  const auto val = a.values();
  const double gamma = s.gamma;
  const double lambda = p.lambda();
  const double rho = 1.0 - gamma * lambda;
  const double inv_n = 1.0 / static_cast<double>(s.n);

  // Bring the row's coordinates up to step k and form a_i'x on the way.
  double inner = 0.0;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const std::uint32_t j = idx[t];
    const std::uint64_t m = s.k - s.lag[j];
    if (m > 0) {
      s.x[j] = catch_up(s.x[j], s.g_bar[j], m, gamma, lambda);
      s.lag[j] = s.k;
    }
    inner += val[t] * s.x[j];
  }
  s.touches.touches += idx.size();

  const double deriv = p.loss_derivative(i, inner);
  const double delta = deriv - s.grad_table[i];
  s.grad_table[i] = deriv;

  bool diverged = false;
  if (s.rule == UpdateRule::saga) {
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const std::uint32_t j = idx[t];
      s.x[j] = rho * s.x[j] - gamma * s.g_bar[j] - gamma * delta * val[t];
      s.g_bar[j] += delta * inv_n * val[t];
      s.lag[j] = s.k + 1;
      diverged = diverged || coordinate_diverged(s.x[j]);
    }
  } else {
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const std::uint32_t j = idx[t];
      s.g_bar[j] += delta * inv_n * val[t];
      s.x[j] = rho * s.x[j] - gamma * s.g_bar[j];
      s.lag[j] = s.k + 1;
      diverged = diverged || coordinate_diverged(s.x[j]);
    }
  }
  s.touches.touches += idx.size();
  ++s.grad_evals;
  ++s.k;
  if (diverged) throw DivergenceError(s.k);
}

void step(SolverState& s, const FiniteSumProblem& p, Scheduler& sched) {
  if (s.jit) {
    step_jit(s, p, sched);
    return;
  }
  switch (s.rule) {
    case UpdateRule::full_gradient:
      step_gd(s, p);
      return;
    case UpdateRule::saga:
      step_saga(s, p, sched);
      return;
    case UpdateRule::sag:
      step_sag_iag(s, p, sched);
      return;
    case UpdateRule::finito:
      step_finito_diag(s, p, sched);
      return;
  }
}

void finalize(SolverState& s) {
  if (!s.jit) return;
  for (std::size_t j = 0; j < s.d; ++j) {
    const std::uint64_t m = s.k - s.lag[j];
    if (m == 0) continue;
    s.x[j] = catch_up(s.x[j], s.g_bar[j], m, s.gamma, s.lambda);
    s.lag[j] = s.k;
  }
}

void recompute_aggregates(SolverState& s, const FiniteSumProblem& p) {
  if (s.rule == UpdateRule::full_gradient) return;
  finalize(s);
  const double inv_n = 1.0 / static_cast<double>(s.n);
  s.g_bar.fill(0.0);
  if (s.path == GradientPath::composite) {
    for (std::size_t i = 0; i < s.n; ++i) {
      axpy_sparse(s.grad_table[i], p.row(i), s.g_bar);
    }
  } else {
    const auto& kern = simd::active();
    for (std::size_t i = 0; i < s.n; ++i) {
      kern.axpy(1.0, s.grad_table.data() + i * s.d, s.g_bar.data(), s.d);
    }
  }
  for (double& v : s.g_bar) v *= inv_n;
  if (s.rule == UpdateRule::finito && !s.phi.empty()) {
    s.phi_bar.fill(0.0);
    const auto& kern = simd::active();
    for (std::size_t i = 0; i < s.n; ++i) {
      kern.axpy(1.0, s.phi.data() + i * s.d, s.phi_bar.data(), s.d);
    }
    for (double& v : s.phi_bar) v *= inv_n;
  }
}

double g_bar_drift(const SolverState& s, const FiniteSumProblem& p) {
  if (s.rule == UpdateRule::full_gradient) return 0.0;
  SolverState exact = s;
  exact.jit = false;  // recompute without touching x
  recompute_aggregates(exact, p);
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < s.d; ++j) {
    scale = std::max(scale, std::abs(exact.g_bar[j]));
    worst = std::max(worst, std::abs(s.g_bar[j] - exact.g_bar[j]));
  }
  return worst / std::max(scale, std::numeric_limits<double>::min());
}

}  // namespace csaga
