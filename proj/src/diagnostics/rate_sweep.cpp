#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "csaga/diagnostics.hpp"
#include "csaga/error.hpp"

namespace csaga {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DenseVec unit_offset(const DenseVec& center, std::uint64_t seed) {
  return random_point_at_distance(center, 1.0, seed);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace

double empirical_rate(std::span<const double> subopt) {
  const std::size_t start = subopt.size() / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (std::size_t e = start; e < subopt.size(); ++e) {
    if (!(subopt[e] >= 1e-13) || !std::isfinite(subopt[e])) continue;
    const auto x = static_cast<double>(e);
    const double y = std::log(subopt[e]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return kNaN;
  const auto md = static_cast<double>(m);
  const double denom = md * sxx - sx * sx;
  if (denom == 0.0) return kNaN;
  return std::exp((md * sxy - sx * sy) / denom);
}

std::vector<SweepRow> rate_sweep(const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (double kappa : options.kappas) {
    for (std::size_t n : options.ns) {
      const FiniteSumProblem p =
          make_quadratic_family(n, options.dim, 1.0, kappa, options.seed);
      const Constants c = p.constants();
      const TheoryConstants t = TheoryConstants::from(c, n);
      const ReferenceSolution ref = solve_reference(p, 1e-12);
      const DenseVec x0 = unit_offset(ref.x_star, options.seed);

      for (MethodKind method : {MethodKind::csaga, MethodKind::iag}) {
        for (double gamma : {t.gamma_thm, t.gamma_max, 1.0 / (3.0 * c.L)}) {
          RunOptions ro;
          ro.solver.method = method;
          ro.solver.gamma = gamma;
          ro.solver.seed = options.seed;
          ro.epochs = options.epochs;
          const RunResult res = run(p, x0, ro, ref);

          SweepRow row;
          row.kappa = kappa;
          row.n = n;
          row.method = std::string(to_string(method));
          row.gamma = gamma;
          row.theoretical_rate = kNaN;
          if (method == MethodKind::csaga && gamma <= t.gamma_max) {
            row.theoretical_rate = contraction_factor_bound(c, n, gamma);
          }
          if (res.diverged) {
            row.empirical_rate = kNaN;
            row.converged = false;
          } else {
            std::vector<double> sub;
            sub.reserve(res.trace.size());
            for (const auto& r : res.trace) sub.push_back(r.suboptimality);
            row.empirical_rate = empirical_rate(sub);
            // A trace that hit the float floor early has converged too.
            const bool at_floor = res.trace.back().suboptimality < 1e-13;
            row.converged = at_floor || row.empirical_rate < 1.0;
          }
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "kappa,n,method,gamma,empirical_rate,theoretical_rate,converged\n";
  for (const auto& r : rows) {
    out << fmt(r.kappa) << ',' << r.n << ',' << r.method << ',' << fmt(r.gamma) << ','
        << fmt(r.empirical_rate) << ',' << fmt(r.theoretical_rate) << ','
        << (r.converged ? "true" : "false") << '\n';
  }
}

std::vector<SuiteCheck> theory_suite(std::uint64_t seed) {
  std::vector<SuiteCheck> checks;
  constexpr std::size_t n = 10;
  constexpr std::size_t epochs = 200;
  const FiniteSumProblem p = make_quadratic_family(n, 4, 1.0, 10.0, seed);
  const Constants c = p.constants();
  const TheoryConstants t = TheoryConstants::from(c, n);
  const ReferenceSolution ref = solve_reference(p, 1e-12);
  const DenseVec x0 = unit_offset(ref.x_star, seed);

  const LyapunovTrace trace =
      record_lyapunov_trace(p, x0, ref, t.gamma_thm, epochs, MethodKind::csaga, true);
  {
    const auto rep = check_contraction(trace, n, t.rho_thm, 1e-12);
    checks.push_back({"contraction at gamma_thm", rep.passed(),
                      std::to_string(rep.checked) + " pairs, max V^{k+n}/V^k = " +
                          fmt(rep.max_ratio) + ", rho = " + fmt(t.rho_thm)});
  }
  {
    const auto rep = check_value_bound(trace, c.L, t.rho_thm, trace.V.front(), 1e-12);
    checks.push_back({"function-value bound", rep.passed(),
                      std::to_string(rep.checked) + " epochs, max ratio = " +
                          fmt(rep.max_ratio)});
  }
  {
    const auto rep = check_delta_bound(p, trace, ref.x_star, t.gamma_thm, c.L);
    checks.push_back({"Delta^k residual bound", rep.passed(),
                      std::to_string(rep.checked) + " windows, max ratio = " +
                          fmt(rep.max_ratio)});
  }
  {
    std::mt19937_64 rng(derive_seed(seed, Stream::synthetic));
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    std::size_t cases = 0, failures = 0;
    while (cases < 1000) {
      const double c1 = unif(rng), c2 = unif(rng);
      if (1.0 + c1 < c2) continue;
      ++cases;
      if (!recurrence_bound_check(c1, c2, 60).passed()) ++failures;
    }
    checks.push_back({"recurrence eigenvalue bound", failures == 0,
                      std::to_string(cases) + " cases, " + std::to_string(failures) +
                          " failures"});
  }
  {
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 20; ++r) {
      const std::size_t nn = 1 + static_cast<std::size_t>(r % 8);
      const std::size_t dd = 1 + static_cast<std::size_t>((r / 2) % 4);
      const FiniteSumProblem q = make_quadratic_family(nn, dd, 1.0, 5.0, seed + 100 + r);
      const DenseVec z = unit_offset(DenseVec(dd), seed + r);
      const double gamma = 0.1 / q.raw_L();
      const auto lit = literal_csaga(q, z, gamma, 10 * nn);
      SolverConfig cfg;
      cfg.method = MethodKind::csaga;
      cfg.gamma = gamma;
      SolverState s = init(q, z, cfg);
      Scheduler sched(SchedulerKind::cyclic, nn, 0);
      for (std::size_t k = 1; k <= 10 * nn; ++k) {
        step(s, q, sched);
        worst = std::max(worst, max_abs_diff(s.x, lit[k]));
      }
    }
    checks.push_back({"table engine matches recursion", worst <= 1e-12,
                      "max deviation " + fmt(worst)});
  }
  return checks;
}

}  // namespace csaga
