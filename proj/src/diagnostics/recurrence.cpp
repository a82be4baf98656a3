#include <algorithm>
#include <cmath>
#include <string>

#include "csaga/diagnostics.hpp"
#include "csaga/error.hpp"

namespace csaga {

RecurrenceReport recurrence_bound_check(double c1, double c2, std::size_t kmax,
                                double rel_tol) {
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !(1.0 + c1 >= c2) || kmax < 1) {
    throw Error("recurrence_bound_check: need c1, c2 >= 0, 1 + c1 >= c2, kmax >= 1 (got c1=" +
                std::to_string(c1) + ", c2=" + std::to_string(c2) + ")");
  }
  RecurrenceReport rep;
  const double s = std::sqrt(c1 * c1 + 4.0 * c2);
  rep.lambda1 = 1.0 + 0.5 * (c1 + s);

  double sigma = 1.0;
  double tau = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    const double lk = std::pow(rep.lambda1, static_cast<double>(k));
    if (c2 == 0.0) {
      const double exact = std::pow(1.0 + c1, static_cast<double>(k));
      const double ratio = sigma / exact;
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (std::abs(ratio - 1.0) > rel_tol || tau != 0.0) ++rep.violations;
    } else {
      const double bound_sigma = lk * (1.0 + c1 / (2.0 * s));
      const double bound_tau = lk * (2.0 * c2 / (2.0 * s));
      rep.max_ratio = std::max({rep.max_ratio, sigma / bound_sigma, tau / bound_tau});
      if (sigma > bound_sigma * (1.0 + rel_tol)) ++rep.violations;
      if (tau > bound_tau * (1.0 + rel_tol)) ++rep.violations;
    }
    ++rep.checked;
    const double next_sigma = (1.0 + c1) * sigma + tau;
    const double next_tau = c2 * sigma + tau;
    sigma = next_sigma;
    tau = next_tau;
  }
  return rep;
}

}  // namespace csaga
