#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "csaga/error.hpp"
#include "csaga/solvers.hpp"

namespace csaga {
namespace {

FiniteSumProblem one_dim_pair() {
  return FiniteSumProblem::quadratic(
      {centered_quadratic({1.0}, DenseVec{1.0}), centered_quadratic({1.0}, DenseVec{-1.0})}, 1);
}

SolverConfig config(MethodKind m, double gamma, std::uint64_t seed = 0) {
  SolverConfig c;
  c.method = m;
  c.gamma = gamma;
  c.seed = seed;
  return c;
}

// Brute-force versions of each update rule, written against the component
// gradients only, with the index sequence supplied up front.
using Vec = std::vector<double>;

Vec grad(const FiniteSumProblem& p, std::size_t i, const Vec& x) {
  return p.component_gradient(i, DenseVec(x)).values();
}

Vec mean_of(const std::vector<Vec>& t) {
  Vec m(t[0].size(), 0.0);
  for (const auto& r : t)
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += r[j] / t.size();
  return m;
}

std::vector<Vec> brute_saga(const FiniteSumProblem& p, Vec x, double g,
                            const std::vector<std::size_t>& order) {
  std::vector<Vec> table;
  for (std::size_t i = 0; i < p.n(); ++i) table.push_back(grad(p, i, x));
  std::vector<Vec> out{x};
  for (std::size_t i : order) {
    const Vec fresh = grad(p, i, x);
    const Vec avg = mean_of(table);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] -= g * (fresh[j] - table[i][j] + avg[j]);
    table[i] = fresh;
    out.push_back(x);
  }
  return out;
}

std::vector<Vec> brute_sag(const FiniteSumProblem& p, Vec x, double g,
                           const std::vector<std::size_t>& order) {
  std::vector<Vec> table;
  for (std::size_t i = 0; i < p.n(); ++i) table.push_back(grad(p, i, x));
  std::vector<Vec> out{x};
  for (std::size_t i : order) {
    table[i] = grad(p, i, x);
    const Vec avg = mean_of(table);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] -= g * avg[j];
    out.push_back(x);
  }
  return out;
}

std::vector<Vec> brute_finito(const FiniteSumProblem& p, Vec x, double g,
                              const std::vector<std::size_t>& order) {
  std::vector<Vec> phi(p.n(), x), table;
  for (std::size_t i = 0; i < p.n(); ++i) table.push_back(grad(p, i, x));
  std::vector<Vec> out{x};
  for (std::size_t i : order) {
    const Vec pb = mean_of(phi), gb = mean_of(table);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = pb[j] - g * gb[j];
    phi[i] = x;
    table[i] = grad(p, i, x);
    out.push_back(x);
  }
  return out;
}

void expect_close(const DenseVec& a, const Vec& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(a[j], b[j], tol) << "coord " << j;
}

TEST(Csaga, HandSimulatedFirstStep) {
  auto p = one_dim_pair();
  SolverState s = init(p, DenseVec{1.0}, config(MethodKind::csaga, 0.1));
  EXPECT_EQ(s.grad_evals, 2u);
  EXPECT_DOUBLE_EQ(s.g_bar[0], 1.0);
  Scheduler sched(SchedulerKind::cyclic, 2, 0);
  step(s, p, sched);
  EXPECT_DOUBLE_EQ(s.x[0], 0.9);
  // i = 1: fresh gradient 1.9, stored 2, mean still 1.
  step(s, p, sched);
  EXPECT_NEAR(s.x[0], 0.81, 1e-15);
}

TEST(Engine, MatchesBruteForceOnTwoComponents) {
  auto p = FiniteSumProblem::quadratic(
      {centered_quadratic({2.0, 0.5, 0.5, 1.0}, DenseVec{1.0, -2.0}),
       centered_quadratic({1.0, -0.3, -0.3, 3.0}, DenseVec{-1.0, 0.5})},
      2);
  const Vec x0{0.3, 0.7};
  const double g = 0.2;
  for (MethodKind m : {MethodKind::csaga, MethodKind::iag, MethodKind::diag,
                       MethodKind::saga, MethodKind::sag, MethodKind::finito,
                       MethodKind::rp_saga}) {
    SolverConfig c = config(m, g, 9);
    SolverState s = init(p, DenseVec(x0), c);
    Scheduler sched(default_scheduler(m), 2, 9);
    Scheduler replay(default_scheduler(m), 2, 9);
    std::vector<std::size_t> order;
    for (int k = 0; k < 3; ++k) order.push_back(replay.next());
    std::vector<Vec> expect;
    switch (update_rule(m)) {
      case UpdateRule::saga: expect = brute_saga(p, x0, g, order); break;
      case UpdateRule::sag: expect = brute_sag(p, x0, g, order); break;
      default: expect = brute_finito(p, x0, g, order); break;
    }
    for (int k = 1; k <= 3; ++k) {
      step(s, p, sched);
      expect_close(s.x, expect[k], 1e-14);
    }
  }
}

TEST(Engine, RandomProblemsMatchBruteForce) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto p = make_quadratic_family(5, 3, 0.5, 3.0, seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Vec x0{nd(rng), nd(rng), nd(rng)};
    for (MethodKind m : {MethodKind::iag, MethodKind::diag, MethodKind::saga}) {
      SolverState s = init(p, DenseVec(x0), config(m, 0.05, seed));
      Scheduler sched(default_scheduler(m), 5, seed), replay(default_scheduler(m), 5, seed);
      std::vector<std::size_t> order;
      for (int k = 0; k < 30; ++k) order.push_back(replay.next());
      auto expect = update_rule(m) == UpdateRule::sag ? brute_sag(p, x0, 0.05, order)
                    : update_rule(m) == UpdateRule::saga ? brute_saga(p, x0, 0.05, order)
                                                         : brute_finito(p, x0, 0.05, order);
      for (int k = 0; k < 30; ++k) step(s, p, sched);
      expect_close(s.x, expect.back(), 1e-12);
    }
  }
}

TEST(Engine, CsagaMatchesLiteralRecursion) {
  auto p = make_quadratic_family(6, 4, 1.0, 4.0, 3);
  const DenseVec x0{0.5, -1.0, 2.0, 0.1};
  const auto lit = literal_csaga(p, x0, 0.02, 50);
  SolverState s = init(p, x0, config(MethodKind::csaga, 0.02));
  Scheduler sched(SchedulerKind::cyclic, 6, 0);
  for (std::size_t k = 1; k <= 50; ++k) {
    step(s, p, sched);
    EXPECT_LE(max_abs_diff(s.x, lit[k]), 1e-12) << "step " << k;
  }
}

TEST(Engine, SingleComponentReducesToGradientDescent) {
  auto p = make_quadratic_family(1, 3, 0.5, 2.0, 8);
  const DenseVec x0{1.0, 2.0, -1.0};
  for (MethodKind m : {MethodKind::csaga, MethodKind::saga, MethodKind::sag,
                       MethodKind::iag, MethodKind::finito, MethodKind::diag}) {
    SolverState s = init(p, x0, config(m, 0.3));
    Scheduler sched(default_scheduler(m), 1, 0);
    DenseVec gd = x0;
    for (int k = 0; k < 100; ++k) {
      step(s, p, sched);
      axpy(-0.3, p.component_gradient(0, gd), gd);
      ASSERT_LE(max_abs_diff(s.x, gd), 1e-14) << to_string(m) << " step " << k;
    }
  }
}

TEST(Engine, FixedPointAtOptimum) {
  const auto data = std::make_shared<const Dataset>(make_sparse_classification(20, 8, 3, 1));
  auto p = FiniteSumProblem::glm(LossKind::logistic, data, 0.1);
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  for (MethodKind m : {MethodKind::gd, MethodKind::csaga, MethodKind::saga, MethodKind::rp_saga,
                       MethodKind::sag, MethodKind::iag, MethodKind::finito, MethodKind::diag}) {
    SolverState s = init(p, ref.x_star, config(m, 0.5, 4));
    Scheduler sched(default_scheduler(m), p.n(), 4);
    const std::size_t steps = m == MethodKind::gd ? 5 : 5 * p.n();
    for (std::size_t k = 0; k < steps; ++k) step(s, p, sched);
    EXPECT_LE(std::sqrt(sq_dist(s.x, ref.x_star)), 1e-8) << to_string(m);
  }
}

TEST(Engine, InitTableMeanIsFullGradient) {
  auto p = make_quadratic_family(7, 3, 1.0, 5.0, 2);
  const DenseVec x0{1.0, 1.0, 1.0};
  SolverState s = init(p, x0, config(MethodKind::saga, 0.1));
  EXPECT_LE(max_abs_diff(s.g_bar, p.full_gradient(x0)), 1e-12);
  EXPECT_EQ(s.grad_evals, 7u);
}

TEST(Engine, IncrementalMeanStaysAccurate) {
  const auto data = std::make_shared<const Dataset>(make_sparse_classification(50, 30, 4, 6));
  auto p = FiniteSumProblem::glm(LossKind::logistic, data, 0.01);
  for (GradientPath path : {GradientPath::literal, GradientPath::composite}) {
    for (MethodKind m : {MethodKind::saga, MethodKind::sag}) {
      SolverConfig c = config(m, 0.5, 2);
      c.path = path;
      SolverState s = init(p, DenseVec(30), c);
      Scheduler sched(default_scheduler(m), p.n(), 2);
      for (int epoch = 0; epoch < 5; ++epoch) {
        for (std::size_t k = 0; k < p.n(); ++k) {
          step(s, p, sched);
          if (k % 7 == 0) EXPECT_LE(g_bar_drift(s, p), 1e-10);
        }
        recompute_aggregates(s, p);
      }
    }
  }
}

TEST(Jit, MatchesDenseComposite) {
  const auto data = std::make_shared<const Dataset>(make_sparse_classification(60, 200, 5, 3));
  for (double lambda : {0.01, 0.0}) {
    auto p = FiniteSumProblem::glm(LossKind::logistic, data, lambda);
    for (MethodKind m : {MethodKind::csaga, MethodKind::saga, MethodKind::iag, MethodKind::sag}) {
      SolverConfig dense = config(m, 0.2, 5);
      dense.path = GradientPath::composite;
      SolverConfig lazy = dense;
      lazy.jit = true;
      SolverState a = init(p, DenseVec(200), dense);
      SolverState b = init(p, DenseVec(200), lazy);
      Scheduler sa(default_scheduler(m), p.n(), 5), sb(default_scheduler(m), p.n(), 5);
      for (int epoch = 0; epoch < 10; ++epoch) {
        for (std::size_t k = 0; k < p.n(); ++k) {
          step(a, p, sa);
          step(b, p, sb);
        }
      }
      finalize(b);
      EXPECT_LE(max_abs_diff(a.x, b.x), 1e-9 * norm(a.x)) << to_string(m) << " lambda " << lambda;
    }
  }
}

TEST(Jit, DenseRowsLeaveNothingDeferred) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<Sample> rows;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> v(6);
    for (auto& e : v) e = nd(rng);
    rows.push_back({SparseVec::from_dense(v), i % 2 ? 1.0 : -1.0});
  }
  auto p = FiniteSumProblem::glm(LossKind::logistic,
                                 std::make_shared<const Dataset>(rows, 6), 0.1);
  SolverConfig dense = config(MethodKind::csaga, 0.3);
  dense.path = GradientPath::composite;
  SolverConfig lazy = dense;
  lazy.jit = true;
  SolverState a = init(p, DenseVec(6), dense), b = init(p, DenseVec(6), lazy);
  Scheduler sa(SchedulerKind::cyclic, 12, 0), sb(SchedulerKind::cyclic, 12, 0);
  for (int k = 0; k < 120; ++k) {
    step(a, p, sa);
    step(b, p, sb);
    for (std::uint64_t l : b.lag) ASSERT_EQ(l, b.k);
    ASSERT_LE(max_abs_diff(a.x, b.x), 1e-13 * (1.0 + norm(a.x)));
  }
}

TEST(Jit, TouchesScaleWithRowNotDimension) {
  for (std::size_t dim : {500u, 50000u}) {
    const auto data = std::make_shared<const Dataset>(make_sparse_classification(100, dim, 8, 1));
    auto p = FiniteSumProblem::glm(LossKind::logistic, data, 0.01);
    SolverConfig c = config(MethodKind::csaga, 0.1);
    c.path = GradientPath::composite;
    c.jit = true;
    SolverState s = init(p, DenseVec(dim), c);
    Scheduler sched(SchedulerKind::cyclic, 100, 0);
    for (int k = 0; k < 300; ++k) {
      const std::uint64_t before = s.touches.touches;
      step(s, p, sched);
      EXPECT_EQ(s.touches.touches - before, 2u * 8u);
    }
  }
}

TEST(Jit, RejectedWhereUnsupported) {
  const auto data = std::make_shared<const Dataset>(make_sparse_classification(10, 20, 3, 1));
  auto p = FiniteSumProblem::glm(LossKind::logistic, data, 0.1);
  for (MethodKind m : {MethodKind::gd, MethodKind::finito, MethodKind::diag}) {
    SolverConfig c = config(m, 0.1);
    c.jit = true;
    c.path = GradientPath::composite;
    EXPECT_THROW(init(p, DenseVec(20), c), Error) << to_string(m);
  }
  SolverConfig c = config(MethodKind::csaga, 10.0);
  c.jit = true;
  c.path = GradientPath::composite;
  EXPECT_THROW(init(p, DenseVec(20), c), Error);  // gamma * lambda >= 1
  c.gamma = 0.1;
  c.path = GradientPath::literal;
  EXPECT_THROW(init(p, DenseVec(20), c), Error);
  auto q = make_quadratic_family(3, 2, 1.0, 2.0, 0);
  c.path = GradientPath::composite;
  EXPECT_THROW(init(q, DenseVec(2), c), Error);
}

TEST(Init, RejectsBadArguments) {
  auto p = one_dim_pair();
  EXPECT_THROW(init(p, DenseVec{1.0}, config(MethodKind::csaga, 0.0)), Error);
  EXPECT_THROW(init(p, DenseVec{1.0}, config(MethodKind::csaga, -1.0)), Error);
  EXPECT_THROW(init(p, DenseVec{std::nan("")}, config(MethodKind::csaga, 0.1)), Error);
  EXPECT_THROW(init(p, DenseVec(2), config(MethodKind::csaga, 0.1)), DimensionError);
}

TEST(Scheduler, CyclicOrder) {
  Scheduler s(SchedulerKind::cyclic, 4, 99);
  for (int k = 0; k < 12; ++k) EXPECT_EQ(s.next(), static_cast<std::size_t>(k % 4));
}

TEST(Scheduler, PermutationIsBijectionPerEpoch) {
  Scheduler s(SchedulerKind::random_permutation, 9, 3);
  std::vector<std::size_t> first;
  for (int epoch = 0; epoch < 20; ++epoch) {
    std::set<std::size_t> seen;
    std::vector<std::size_t> order;
    for (int k = 0; k < 9; ++k) {
      order.push_back(s.next());
      seen.insert(order.back());
    }
    EXPECT_EQ(seen.size(), 9u);
    EXPECT_LT(*seen.rbegin(), 9u);
    if (epoch == 0) first = order;
  }
  Scheduler again(SchedulerKind::random_permutation, 9, 3);
  for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(again.next(), first[k]);
}

TEST(Scheduler, IidReproducibleAndInRange) {
  Scheduler a(SchedulerKind::iid_uniform, 5, 11), b(SchedulerKind::iid_uniform, 5, 11);
  Scheduler c(SchedulerKind::iid_uniform, 5, 12);
  bool differs = false;
  std::vector<int> counts(5, 0);
  for (int k = 0; k < 5000; ++k) {
    const std::size_t i = a.next();
    EXPECT_EQ(i, b.next());
    differs = differs || i != c.next();
    ++counts[i];
  }
  EXPECT_TRUE(differs);
  for (int n : counts) EXPECT_GT(n, 800);
  EXPECT_THROW(Scheduler(SchedulerKind::cyclic, 0, 0), Error);
}

TEST(Methods, NamesAndRules) {
  EXPECT_EQ(parse_method("rpsaga"), MethodKind::rp_saga);
  EXPECT_EQ(parse_method("rp_saga"), MethodKind::rp_saga);
  EXPECT_EQ(to_string(MethodKind::rp_saga), "rpsaga");
  EXPECT_THROW(parse_method("svrg"), Error);
  EXPECT_EQ(default_scheduler(MethodKind::csaga), SchedulerKind::cyclic);
  EXPECT_EQ(default_scheduler(MethodKind::iag), SchedulerKind::cyclic);
  EXPECT_EQ(default_scheduler(MethodKind::diag), SchedulerKind::cyclic);
  EXPECT_EQ(default_scheduler(MethodKind::rp_saga), SchedulerKind::random_permutation);
  EXPECT_EQ(default_scheduler(MethodKind::saga), SchedulerKind::iid_uniform);
  EXPECT_EQ(update_rule(MethodKind::iag), UpdateRule::sag);
  EXPECT_FALSE(supports_jit(MethodKind::diag));
  EXPECT_TRUE(supports_jit(MethodKind::iag));
}

TEST(History, WindowSemantics) {
  HistoryWindow w(2);
  EXPECT_FALSE(w.warm());
  w.fill(DenseVec{1.0});
  EXPECT_TRUE(w.warm());
  w.push(DenseVec{2.0});
  w.push(DenseVec{3.0});
  EXPECT_EQ(w.back(0)[0], 3.0);
  EXPECT_EQ(w.back(1)[0], 2.0);
  EXPECT_EQ(w.back(2)[0], 1.0);
  EXPECT_THROW(w.back(3), Error);
}

TEST(Run, TraceAccountingAndDeterminism) {
  auto p = make_quadratic_family(8, 3, 1.0, 4.0, 1);
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  const DenseVec x0{1.0, 0.0, 0.0};
  RunOptions o;
  o.solver = config(MethodKind::saga, 0.05, 3);
  o.epochs = 6;
  const RunResult a = run(p, x0, o, ref);
  const RunResult b = run(p, x0, o, ref);
  ASSERT_EQ(a.trace.size(), 7u);
  for (std::size_t e = 0; e < a.trace.size(); ++e) {
    EXPECT_EQ(a.trace[e].epoch, e);
    EXPECT_EQ(a.trace[e].grad_evals, 8u * (e + 1));
    EXPECT_EQ(a.trace[e].suboptimality, b.trace[e].suboptimality);
    EXPECT_GE(a.trace[e].suboptimality, kSuboptimalityFloor);
  }
  EXPECT_EQ(a.final_x, b.final_x);
  o.solver.method = MethodKind::gd;
  o.solver.gamma = 0.25;
  const RunResult g = run(p, x0, o, ref);
  for (std::size_t e = 0; e < g.trace.size(); ++e) EXPECT_EQ(g.trace[e].grad_evals, 8u * e);
  for (std::size_t e = 1; e < g.trace.size(); ++e) {
    EXPECT_LT(g.trace[e].suboptimality, g.trace[e - 1].suboptimality);
  }
}

TEST(Run, CsagaTraceMatchesLiteralRecursion) {
  auto p = one_dim_pair();
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  RunOptions o;
  o.solver = config(MethodKind::csaga, 0.1);
  o.epochs = 10;
  const RunResult r = run(p, DenseVec{1.0}, o, ref);
  const auto lit = literal_csaga(p, DenseVec{1.0}, 0.1, 20);
  for (std::size_t e = 0; e <= 10; ++e) {
    const double expect = std::max(kSuboptimalityFloor, 0.5 * lit[2 * e][0] * lit[2 * e][0]);
    EXPECT_NEAR(r.trace[e].suboptimality, expect, 1e-15);
  }
}

TEST(Run, DivergenceIsReported) {
  auto p = make_quadratic_family(5, 2, 1.0, 10.0, 0);
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  RunOptions o;
  o.solver = config(MethodKind::csaga, 100.0);
  o.epochs = 50;
  const RunResult r = run(p, DenseVec{1.0, 1.0}, o, ref);
  EXPECT_TRUE(r.diverged);
  EXPECT_TRUE(r.divergence_step.has_value());
  EXPECT_LT(r.trace.size(), 51u);
}

TEST(Run, DiagnosticsColumn) {
  auto p = make_quadratic_family(4, 2, 1.0, 3.0, 0);
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  RunOptions o;
  o.solver = config(MethodKind::csaga, 0.01);
  o.epochs = 3;
  o.diagnostics = true;
  const RunResult r = run(p, DenseVec{1.0, 1.0}, o, ref);
  for (const auto& t : r.trace) ASSERT_TRUE(t.lyapunov.has_value());
  EXPECT_NEAR(*r.trace[0].lyapunov, sq_dist(DenseVec{1.0, 1.0}, ref.x_star), 1e-14);
}

}  // namespace
}  // namespace csaga
