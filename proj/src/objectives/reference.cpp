#include <Eigen/Dense>
#include <cmath>

#include "csaga/error.hpp"
#include "csaga/objectives.hpp"

namespace csaga {

namespace {

ReferenceSolution solve_quadratic(const FiniteSumProblem& p) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < p.n(); ++i) {
    const auto& c = p.component(i);
    for (Eigen::Index r = 0; r < d; ++r) {
      b(r) += c.linear[static_cast<std::size_t>(r)];
      for (Eigen::Index k = 0; k < d; ++k) {
        a(r, k) += c.hessian[static_cast<std::size_t>(r * d + k)];
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(p.n());
  a *= inv_n;
  b *= inv_n;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw Error("reference solve: singular Hessian");
  const Eigen::VectorXd sol = ldlt.solve(b);
  ReferenceSolution ref;
  ref.x_star = DenseVec(p.dim());
  for (Eigen::Index r = 0; r < d; ++r) ref.x_star[static_cast<std::size_t>(r)] = sol(r);
  ref.f_star = p.value(ref.x_star);
  ref.grad_norm = norm(p.full_gradient(ref.x_star));
  return ref;
}

}  // namespace

ReferenceSolution solve_reference(const FiniteSumProblem& p, double tol,
                                  std::uint64_t max_iterations) {
  if (!(tol > 0.0)) throw Error("reference solve: tol must be > 0");
  if (!p.is_glm()) return solve_quadratic(p);

  const double step = 1.0 / p.raw_L();
  ReferenceSolution ref;
  ref.x_star = DenseVec(p.dim());
  DenseVec g = p.full_gradient(ref.x_star);
  double gnorm = norm(g);
  std::uint64_t it = 0;
  while (gnorm > tol) {
    if (it == max_iterations) throw ConvergenceError(it, gnorm);
    axpy(-step, g, ref.x_star);
    g = p.full_gradient(ref.x_star);
    gnorm = norm(g);
    ++it;
    if (!std::isfinite(gnorm)) throw ConvergenceError(it, gnorm);
  }
  ref.f_star = p.value(ref.x_star);
  ref.grad_norm = gnorm;
  ref.iterations = it;
  return ref;
}

}  // namespace csaga
