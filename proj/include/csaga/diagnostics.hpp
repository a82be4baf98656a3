#ifndef CSAGA_DIAGNOSTICS_HPP
#define CSAGA_DIAGNOSTICS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "csaga/objectives.hpp"
#include "csaga/solvers.hpp"

namespace csaga {

/// Stepsize and rate constants of the C-SAGA linear-rate guarantee:
///   gamma_max = mu / (65 sqrt(n(n+1)) L^2)   (any 0 < gamma <= gamma_max)
///   gamma_thm = mu / (130 sqrt(n(n+1)) L^2)
///   rho_thm   = 1 - 1 / (368 kappa^2),  V^{k+n} <= rho_thm V^k at gamma_thm.
struct TheoryConstants {
  double gamma_max = 0.0;
  double gamma_thm = 0.0;
  double rho_thm = 0.0;

  static TheoryConstants from(const Constants& c, std::size_t n);
};

/// Per-epoch contraction factor the proof yields for a general stepsize,
/// with c = gamma L sqrt(n(n+1)):
///   max{ 1 - gamma n mu (1 - 2 sqrt(52) c kappa (4.5 + sqrt(52) c^2 kappa^2)),
///        5/sqrt(52) + 10 c^2 kappa^2 + 70 c^2 kappa^2 / n }.
/// Returns 1 when gamma is outside (0, gamma_max] (no guarantee).
double contraction_factor_bound(const Constants& c, std::size_t n, double gamma);

/// V^k = |x^k - x*|^2 + (1/n) sum_{j=1..n} |x^k - x^{k-j}|^2.
/// Throws when the window is not warm.
double lyapunov(const HistoryWindow& window, const DenseVec& x_star);

/// Per-step record of a dense literal-path run. Index t is step k = t.
struct LyapunovTrace {
  std::size_t n = 0;
  std::vector<double> V;
  std::vector<double> suboptimality;
  /// x^{-n} .. x^K when requested (iterates[t + n] = x^t).
  std::vector<DenseVec> iterates;
};

/// Runs `epochs` epochs of a table method on the dense literal path from x0
/// (history x^{-j} = x0) and records V^k and f(x^k) - f* after every step.
LyapunovTrace record_lyapunov_trace(const FiniteSumProblem& p, const DenseVec& x0,
                                    const ReferenceSolution& ref, double gamma,
                                    std::size_t epochs,
                                    MethodKind method = MethodKind::csaga,
                                    bool keep_iterates = false);

struct ContractionViolation {
  std::size_t k = 0;
  double v_k = 0.0;
  double v_k_plus_n = 0.0;
};

struct ContractionReport {
  std::size_t checked = 0;
  std::vector<ContractionViolation> violations;
  /// max_k V^{k+n} / V^k over pairs with V^k > 0.
  double max_ratio = 0.0;
  bool passed() const noexcept { return violations.empty(); }
};

/// Checks V^{k+n} <= rho V^k + slack V^0 for every recorded k.
ContractionReport check_contraction(const LyapunovTrace& trace, std::size_t n,
                                    double rho, double slack);

struct ValueBoundReport {
  std::size_t checked = 0;
  std::vector<std::size_t> violating_epochs;
  /// max_k (f(x^{kn}) - f*) / ((L/2) rho^k V^0).
  double max_ratio = 0.0;
  bool passed() const noexcept { return violating_epochs.empty(); }
};

/// Checks f(x^{kn}) - f* <= (L/2) rho^k V0 + slack at every epoch boundary.
ValueBoundReport check_value_bound(const LyapunovTrace& trace, double L, double rho,
                                double V0, double slack);

/// |(x^{k+n} - x^k + n gamma grad f(x^k)) / (n gamma)|^2
double delta_residual(const DenseVec& x_k, const DenseVec& x_k_plus_n,
                      const DenseVec& grad_at_xk, std::size_t n, double gamma);

struct DeltaBoundReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// max_k |Delta^k|^2 / bound_k.
  double max_ratio = 0.0;
  bool passed() const noexcept { return violations == 0; }
};

/// Evaluates both sides of
///   |Delta^k|^2 <= 50 c^2 e^{8c^2} L^2 |x^k - x*|^2
///                  + (4 + 200 c^2 e^{8c^2}) (L^2/n) sum_i |x^{k-i} - x^k|^2
/// along a trace recorded with keep_iterates, c = gamma L sqrt(n(n+1)).
DeltaBoundReport check_delta_bound(const FiniteSumProblem& p,
                                   const LyapunovTrace& trace,
                                   const DenseVec& x_star, double gamma, double L);

struct RecurrenceReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// max over k of sigma_k / bound_sigma and tau_k / bound_tau.
  double max_ratio = 0.0;
  double lambda1 = 0.0;
  bool passed() const noexcept { return violations == 0; }
};

/// Iterates [sigma; tau] <- [[1 + c1, 1], [c2, 1]] [sigma; tau] from [1; 0]
/// and checks, for k = 0..kmax,
///   sigma_k <= lambda1^k (1 + c1 / (2 s)),  tau_k <= lambda1^k (2 c2 / (2 s)),
/// with s = sqrt(c1^2 + 4 c2), lambda1 = 1 + (c1 + s) / 2, to `rel_tol`
/// relative. c2 = 0 is checked against sigma_k = (1 + c1)^k, tau_k = 0.
/// Throws unless c1, c2 >= 0, 1 + c1 >= c2 and kmax >= 1.
RecurrenceReport recurrence_bound_check(double c1, double c2, std::size_t kmax,
                                double rel_tol = 1e-9);

/// Geometric per-epoch rate fitted by least squares on log suboptimality over
/// the last half of the trace, ignoring values below 1e-13. NaN when fewer
/// than two points remain.
double empirical_rate(std::span<const double> suboptimality_per_epoch);

struct SweepRow {
  double kappa = 0.0;
  std::size_t n = 0;
  std::string method;
  double gamma = 0.0;
  double empirical_rate = 0.0;
  double theoretical_rate = 0.0;  // NaN when no guarantee applies
  bool converged = false;
};

struct SweepOptions {
  std::vector<double> kappas{1.0, 10.0};
  std::vector<std::size_t> ns{5, 10};
  std::size_t dim = 4;
  std::size_t epochs = 200;
  std::uint64_t seed = 1;
};

/// For every (kappa, n): a quadratic family with mu = 1, L = kappa; C-SAGA and
/// IAG at gamma_thm, gamma_max and 1/(3L). Divergent cells are kept with
/// converged = false.
std::vector<SweepRow> rate_sweep(const SweepOptions& options);

/// Header: kappa,n,method,gamma,empirical_rate,theoretical_rate,converged
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct SuiteCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Synthetic-quadratic checks of the contraction, the function-value bound,
/// the Delta^k bound, the 2x2 recurrence bound and engine/recursion agreement.
std::vector<SuiteCheck> theory_suite(std::uint64_t seed);

}  // namespace csaga

#endif  // CSAGA_DIAGNOSTICS_HPP
