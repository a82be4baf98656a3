#include <string>

#include "csaga/error.hpp"
#include "csaga/solvers.hpp"

namespace csaga {

std::vector<DenseVec> literal_csaga(const FiniteSumProblem& p, const DenseVec& x0,
                                    double gamma, std::size_t steps) {
  constexpr std::size_t kMaxWork = 10'000'000;
  if (steps == 0) throw Error("literal_csaga: steps must be >= 1");
  if (!(gamma > 0.0)) throw Error("stepsize gamma must be > 0");
  if (x0.size() != p.dim()) throw DimensionError(p.dim(), x0.size());
  const std::size_t n = p.n();
  const std::size_t d = p.dim();
  if (n * steps > kMaxWork) {
    throw Error("literal_csaga: n * steps = " + std::to_string(n * steps) +
                " exceeds the desk-scale limit");
  }

  // history[t] holds x^{t - n}; x^{-n} .. x^0 all equal x0.
  std::vector<DenseVec> history(n + 1, x0);
  history.reserve(n + 1 + steps);
  auto iterate = [&](std::ptrdiff_t k) -> const DenseVec& {
    return history[static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(n))];
  };
  auto cyc = [n](std::ptrdiff_t k) {
    const auto sn = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((k % sn) + sn) % sn);
  };

  DenseVec avg(d);
  for (std::size_t step = 0; step < steps; ++step) {
    const auto k = static_cast<std::ptrdiff_t>(step);
    const std::size_t i = cyc(k);
    avg.fill(0.0);
    for (std::size_t m = 1; m <= n; ++m) {
      const auto km = k - static_cast<std::ptrdiff_t>(m);
      axpy(1.0, p.component_gradient(cyc(km), iterate(km)), avg);
    }
    const DenseVec fresh = p.component_gradient(i, iterate(k));
    const DenseVec stale = p.component_gradient(i, iterate(k - static_cast<std::ptrdiff_t>(n)));
    DenseVec next = iterate(k);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
      next[j] -= gamma * (fresh[j] - stale[j] + avg[j] * inv_n);
    }
    if (!next.all_finite() || norm(next) > 1e100) throw DivergenceError(step + 1);
    history.push_back(std::move(next));
  }
  return {history.begin() + static_cast<std::ptrdiff_t>(n), history.end()};
}

}  // namespace csaga
