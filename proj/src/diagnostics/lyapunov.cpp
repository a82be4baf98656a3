#include <algorithm>
#include <cmath>
#include <string>

#include "csaga/diagnostics.hpp"
#include "csaga/error.hpp"

namespace csaga {

namespace {

double root_nn1(std::size_t n) {
  const auto nd = static_cast<double>(n);
  return std::sqrt(nd * (nd + 1.0));
}

}  // namespace

TheoryConstants TheoryConstants::from(const Constants& c, std::size_t n) {
  if (n == 0) throw Error("theory constants: n must be positive");
  const double denom = root_nn1(n) * c.L * c.L;
  TheoryConstants t;
  t.gamma_max = c.mu / (65.0 * denom);
  t.gamma_thm = c.mu / (130.0 * denom);
  t.rho_thm = 1.0 - 1.0 / (368.0 * c.kappa * c.kappa);
  return t;
}

double contraction_factor_bound(const Constants& c, std::size_t n, double gamma) {
  const TheoryConstants t = TheoryConstants::from(c, n);
  if (!(gamma > 0.0) || gamma > t.gamma_max) return 1.0;
  const double sqrt52 = std::sqrt(52.0);
  const double ck = gamma * c.L * root_nn1(n) * c.kappa;
  const auto nd = static_cast<double>(n);
  const double distance_term =
      1.0 - gamma * nd * c.mu * (1.0 - 2.0 * sqrt52 * ck * (4.5 + sqrt52 * ck * ck));
  const double history_term = 5.0 / sqrt52 + 10.0 * ck * ck + 70.0 * ck * ck / nd;
  return std::min(1.0, std::max(distance_term, history_term));
}

double lyapunov(const HistoryWindow& window, const DenseVec& x_star) {
  if (!window.warm()) throw Error("lyapunov: history window is not warm");
  const DenseVec& xk = window.back(0);
  double hist = 0.0;
  for (std::size_t j = 1; j <= window.n(); ++j) hist += sq_dist(xk, window.back(j));
  return sq_dist(xk, x_star) + hist / static_cast<double>(window.n());
}

LyapunovTrace record_lyapunov_trace(const FiniteSumProblem& p, const DenseVec& x0,
                                    const ReferenceSolution& ref, double gamma,
                                    std::size_t epochs, MethodKind method,
                                    bool keep_iterates) {
  const UpdateRule rule = update_rule(method);
  if (rule == UpdateRule::full_gradient) {
    throw Error("lyapunov trace: needs a table method");
  }
  SolverConfig cfg;
  cfg.method = method;
  cfg.gamma = gamma;
  SolverState s = init(p, x0, cfg);
  Scheduler sched(default_scheduler(method), p.n(), 0);

  LyapunovTrace trace;
  trace.n = p.n();
  HistoryWindow window(p.n());
  window.fill(x0);
  if (keep_iterates) trace.iterates.assign(p.n() + 1, x0);

  const std::size_t steps = epochs * p.n();
  trace.V.reserve(steps + 1);
  trace.suboptimality.reserve(steps + 1);
  auto sample = [&] {
    trace.V.push_back(lyapunov(window, ref.x_star));
    trace.suboptimality.push_back(p.suboptimality(s.x, ref.x_star, ref.f_star));
  };
  sample();
  for (std::size_t t = 0; t < steps; ++t) {
    step(s, p, sched);
    if ((t + 1) % p.n() == 0) recompute_aggregates(s, p);
    window.push(s.x);
    if (keep_iterates) trace.iterates.push_back(s.x);
    sample();
  }
  return trace;
}

ContractionReport check_contraction(const LyapunovTrace& trace, std::size_t n,
                                    double rho, double slack) {
  ContractionReport rep;
  if (trace.V.empty()) return rep;
  const double floor = slack * trace.V.front();
  for (std::size_t k = 0; k + n < trace.V.size(); ++k) {
    const double vk = trace.V[k];
    const double vkn = trace.V[k + n];
    ++rep.checked;
    if (vk > 0.0) rep.max_ratio = std::max(rep.max_ratio, vkn / vk);
    if (!(vkn <= rho * vk + floor)) rep.violations.push_back({k, vk, vkn});
  }
  return rep;
}

ValueBoundReport check_value_bound(const LyapunovTrace& trace, double L, double rho,
                                double V0, double slack) {
  ValueBoundReport rep;
  const std::size_t n = trace.n;
  if (n == 0) return rep;
  for (std::size_t e = 0; e * n < trace.suboptimality.size(); ++e) {
    const double lhs = trace.suboptimality[e * n];
    const double bound = 0.5 * L * std::pow(rho, static_cast<double>(e)) * V0;
    ++rep.checked;
    if (bound > 0.0) rep.max_ratio = std::max(rep.max_ratio, lhs / bound);
    if (!(lhs <= bound + slack)) rep.violating_epochs.push_back(e);
  }
  return rep;
}

double delta_residual(const DenseVec& x_k, const DenseVec& x_k_plus_n,
                      const DenseVec& grad_at_xk, std::size_t n, double gamma) {
  if (!(gamma > 0.0)) throw Error("delta_residual: gamma must be > 0");
  if (x_k.size() != x_k_plus_n.size()) throw DimensionError(x_k.size(), x_k_plus_n.size());
  if (x_k.size() != grad_at_xk.size()) throw DimensionError(x_k.size(), grad_at_xk.size());
  const double ng = static_cast<double>(n) * gamma;
  double s = 0.0;
  for (std::size_t j = 0; j < x_k.size(); ++j) {
    const double v = (x_k_plus_n[j] - x_k[j] + ng * grad_at_xk[j]) / ng;
    s += v * v;
  }
  return s;
}

DeltaBoundReport check_delta_bound(const FiniteSumProblem& p,
                                   const LyapunovTrace& trace,
                                   const DenseVec& x_star, double gamma, double L) {
  const std::size_t n = trace.n;
  if (trace.iterates.size() < 2 * n + 1) {
    throw Error("delta bound: trace was recorded without iterates");
  }
  const double c = gamma * L * root_nn1(n);
  const double e8 = std::exp(8.0 * c * c);
  const double coef_dist = 50.0 * c * c * e8 * L * L;
  const double coef_hist = (4.0 + 200.0 * c * c * e8) * L * L / static_cast<double>(n);

  auto x = [&](std::size_t k) -> const DenseVec& { return trace.iterates[k + n]; };
  const std::size_t last = trace.iterates.size() - n - 1;  // largest k recorded

  DeltaBoundReport rep;
  for (std::size_t k = 0; k + n <= last; ++k) {
    const DenseVec grad = p.full_gradient(x(k));
    const double lhs = delta_residual(x(k), x(k + n), grad, n, gamma);
    double hist = 0.0;
    for (std::size_t i = 1; i <= n; ++i) hist += sq_dist(trace.iterates[k + n - i], x(k));
    const double rhs = coef_dist * sq_dist(x(k), x_star) + coef_hist * hist;
    ++rep.checked;
    if (rhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
    if (!(lhs <= rhs * (1.0 + 1e-12) + 1e-300)) ++rep.violations;
  }
  return rep;
}

}  // namespace csaga
