#ifndef CSAGA_OBJECTIVES_HPP
#define CSAGA_OBJECTIVES_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "csaga/data.hpp"
#include "csaga/vecmath.hpp"

namespace csaga {

enum class LossKind { logistic, ridge, quadratic };

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss_kind(std::string_view name);

/// f(x) = 1/2 x'Ax - b'x + c with A symmetric positive semidefinite,
/// stored row-major.
struct QuadraticComponent {
  std::vector<double> hessian;
  DenseVec linear;
  double offset = 0.0;
};

/// 1/2 (x - center)' A (x - center).
QuadraticComponent centered_quadratic(std::vector<double> hessian,
                                      const DenseVec& center);

struct Constants {
  double mu = 0.0;
  double L = 0.0;
  double kappa = 0.0;
};

/// a'x and the derivative of the unregularized scalar loss at a'x.
struct LossScalar {
  double inner = 0.0;
  double deriv = 0.0;
};

/// f(x) = (1/n) sum_i f_i(x). Logistic and ridge components are
///   f_i(x) = l(a_i'x; y_i) + (lambda/2)|x|^2,
/// with l(t; y) = log(1 + exp(-y t)) or 1/2 (t - y)^2. Quadratic components
/// carry their own Hessian. Immutable; copies share the underlying data.
class FiniteSumProblem {
 public:
  static FiniteSumProblem glm(LossKind loss, std::shared_ptr<const Dataset> data,
                              double lambda);
  /// dim <= 64; every component must be d x d.
  static FiniteSumProblem quadratic(std::vector<QuadraticComponent> components,
                                    std::size_t dim);

  LossKind loss() const noexcept { return loss_; }
  bool is_glm() const noexcept { return loss_ != LossKind::quadratic; }
  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  double lambda() const noexcept { return lambda_; }

  /// Requires is_glm().
  const Dataset& dataset() const;
  const SparseVec& row(std::size_t i) const { return dataset()[i].features; }
  /// Requires !is_glm().
  const QuadraticComponent& component(std::size_t i) const;

  /// Per-component strong convexity and smoothness without the mu > 0 check.
  double raw_mu() const noexcept { return mu_; }
  double raw_L() const noexcept { return L_; }
  /// Throws NotStronglyConvexError when mu <= 0.
  Constants constants() const;

  double component_value(std::size_t i, const DenseVec& x) const;
  double value(const DenseVec& x) const;

  DenseVec component_gradient(std::size_t i, const DenseVec& x) const;
  /// Writes grad f_i(x) into out (length d).
  void component_gradient(std::size_t i, const DenseVec& x,
                          std::span<double> out) const;
  DenseVec full_gradient(const DenseVec& x) const;

  /// GLM only; throws for quadratic problems.
  LossScalar component_loss_scalar(std::size_t i, const DenseVec& x) const;
  /// l'(inner) for component i. GLM only.
  double loss_derivative(std::size_t i, double inner) const;

  /// f(x) - f(x_star), never negative. Quadratics use the exact form
  /// 1/2 (x - x*)' Abar (x - x*), which avoids cancellation near x*.
  double suboptimality(const DenseVec& x, const DenseVec& x_star,
                       double f_star) const;

 private:
  FiniteSumProblem() = default;
  void check_index(std::size_t i) const;
  void check_dim(const DenseVec& x) const;

  LossKind loss_ = LossKind::logistic;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  double lambda_ = 0.0;
  double mu_ = 0.0;
  double L_ = 0.0;
  std::shared_ptr<const Dataset> data_;
  std::shared_ptr<const std::vector<QuadraticComponent>> quad_;
  std::shared_ptr<const std::vector<double>> mean_hessian_;
};

/// Extreme eigenvalues of a symmetric row-major d x d matrix.
struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};
EigenRange symmetric_eigen_range(std::span<const double> matrix, std::size_t dim);

/// n random quadratic components in dimension d. Every Hessian is
/// Q diag(mu, ..., L) Q' with a random rotation Q and the interior spectrum
/// drawn uniformly from [mu, L], so the problem's constants are exactly mu, L.
/// Centers are standard normal.
FiniteSumProblem make_quadratic_family(std::size_t n, std::size_t dim, double mu,
                                       double L, std::uint64_t seed);

/// center + distance * u for a random unit direction u.
DenseVec random_point_at_distance(const DenseVec& center, double distance,
                                  std::uint64_t seed);

struct ReferenceSolution {
  DenseVec x_star;
  double f_star = 0.0;
  double grad_norm = 0.0;
  std::uint64_t iterations = 0;
};

/// Quadratics: direct solve of Abar x = bbar. Otherwise gradient descent with
/// step 1/L from the origin until |grad f| <= tol; throws ConvergenceError
/// after max_iterations.
ReferenceSolution solve_reference(const FiniteSumProblem& p, double tol,
                                  std::uint64_t max_iterations = 2'000'000);

}  // namespace csaga

#endif  // CSAGA_OBJECTIVES_HPP
