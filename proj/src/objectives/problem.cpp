#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csaga/error.hpp"
#include "csaga/objectives.hpp"
#include "csaga/simd/kernels.hpp"

namespace csaga {

namespace {

constexpr std::size_t kMaxQuadraticDim = 64;

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  return m >= 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// 1 / (1 + exp(-z)) without overflow.
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double quad_value(const QuadraticComponent& c, const DenseVec& x) {
  const auto& k = simd::active();
  const std::size_t d = x.size();
  double quad = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    quad += x[r] * k.dot(c.hessian.data() + r * d, x.data(), d);
  }
  return 0.5 * quad - k.dot(c.linear.data(), x.data(), d) + c.offset;
}

}  // namespace

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::logistic:
      return "logistic";
    case LossKind::ridge:
      return "ridge";
    case LossKind::quadratic:
      return "quadratic";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "logistic") return LossKind::logistic;
  if (name == "ridge") return LossKind::ridge;
  if (name == "quadratic") return LossKind::quadratic;
  throw Error("unknown loss '" + std::string(name) + "'");
}

QuadraticComponent centered_quadratic(std::vector<double> hessian,
                                      const DenseVec& center) {
  const std::size_t d = center.size();
  if (hessian.size() != d * d) throw DimensionError(d * d, hessian.size());
  QuadraticComponent c;
  c.linear = DenseVec(d);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += hessian[r * d + j] * center[j];
    c.linear[r] = s;
  }
  c.offset = 0.0;
  for (std::size_t r = 0; r < d; ++r) c.offset += 0.5 * center[r] * c.linear[r];
  c.hessian = std::move(hessian);
  return c;
}

EigenRange symmetric_eigen_range(std::span<const double> matrix, std::size_t dim) {
  if (matrix.size() != dim * dim) throw DimensionError(dim * dim, matrix.size());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      m(matrix.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigensolve failed");
  const auto& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

FiniteSumProblem FiniteSumProblem::glm(LossKind loss,
                                       std::shared_ptr<const Dataset> data,
                                       double lambda) {
  if (loss == LossKind::quadratic) throw Error("glm(): loss must be logistic or ridge");
  if (!data || data->empty()) throw Error("glm(): empty dataset");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error("glm(): lambda must be finite and >= 0");
  }
  if (loss == LossKind::logistic && !data->labels_are_binary()) {
    throw Error("logistic loss needs labels in {-1, +1}");
  }
  FiniteSumProblem p;
  p.loss_ = loss;
  p.n_ = data->n();
  p.dim_ = data->dim();
  p.lambda_ = lambda;
  const double scale = loss == LossKind::logistic ? 0.25 : 1.0;
  double max_sq = 0.0;
  for (const auto& s : data->samples()) max_sq = std::max(max_sq, s.features.sq_norm());
  p.L_ = scale * max_sq + lambda;
  p.mu_ = lambda;
  p.data_ = std::move(data);
  return p;
}

FiniteSumProblem FiniteSumProblem::quadratic(
    std::vector<QuadraticComponent> components, std::size_t dim) {
  if (components.empty()) throw Error("quadratic(): no components");
  if (dim == 0 || dim > kMaxQuadraticDim) {
    throw Error("quadratic(): dimension must be in [1, " +
                std::to_string(kMaxQuadraticDim) + "]");
  }
  FiniteSumProblem p;
  p.loss_ = LossKind::quadratic;
  p.n_ = components.size();
  p.dim_ = dim;
  p.mu_ = std::numeric_limits<double>::infinity();
  p.L_ = -std::numeric_limits<double>::infinity();
  auto mean = std::make_shared<std::vector<double>>(dim * dim, 0.0);
  for (const auto& c : components) {
    if (c.hessian.size() != dim * dim) throw DimensionError(dim * dim, c.hessian.size());
    if (c.linear.size() != dim) throw DimensionError(dim, c.linear.size());
    const EigenRange r = symmetric_eigen_range(c.hessian, dim);
    p.mu_ = std::min(p.mu_, r.min);
    p.L_ = std::max(p.L_, r.max);
    for (std::size_t k = 0; k < dim * dim; ++k) (*mean)[k] += c.hessian[k];
  }
  for (double& v : *mean) v /= static_cast<double>(p.n_);
  p.quad_ = std::make_shared<const std::vector<QuadraticComponent>>(std::move(components));
  p.mean_hessian_ = std::move(mean);
  return p;
}

const Dataset& FiniteSumProblem::dataset() const {
  if (!data_) throw Error("problem has no dataset (quadratic components)");
  return *data_;
}

const QuadraticComponent& FiniteSumProblem::component(std::size_t i) const {
  if (!quad_) throw Error("problem has no explicit quadratic components");
  check_index(i);
  return (*quad_)[i];
}

Constants FiniteSumProblem::constants() const {
  if (!(mu_ > 0.0)) throw NotStronglyConvexError(mu_);
  return {mu_, L_, L_ / mu_};
}

void FiniteSumProblem::check_index(std::size_t i) const {
  if (i >= n_) {
    throw Error("component index " + std::to_string(i) + " out of range [0, " +
                std::to_string(n_) + ")");
  }
}

void FiniteSumProblem::check_dim(const DenseVec& x) const {
  if (x.size() != dim_) throw DimensionError(dim_, x.size());
}

double FiniteSumProblem::loss_derivative(std::size_t i, double inner) const {
  const double y = dataset()[i].label;
  switch (loss_) {
    case LossKind::logistic:
      return -y * sigmoid(-y * inner);
    case LossKind::ridge:
      return inner - y;
    case LossKind::quadratic:
      break;
  }
  throw Error("loss_derivative: unsupported for quadratic components");
}

LossScalar FiniteSumProblem::component_loss_scalar(std::size_t i,
                                                   const DenseVec& x) const {
  if (!is_glm()) throw Error("component_loss_scalar: unsupported for quadratic components");
  check_index(i);
  check_dim(x);
  const double inner = dot(row(i), x);
  return {inner, loss_derivative(i, inner)};
}

double FiniteSumProblem::component_value(std::size_t i, const DenseVec& x) const {
  check_index(i);
  check_dim(x);
  if (!is_glm()) return quad_value((*quad_)[i], x);
  const auto& s = (*data_)[i];
  const double inner = dot(s.features, x);
  const double reg = 0.5 * lambda_ * sq_norm(x);
  if (loss_ == LossKind::logistic) return softplus_neg(s.label * inner) + reg;
  const double r = inner - s.label;
  return 0.5 * r * r + reg;
}

double FiniteSumProblem::value(const DenseVec& x) const {
  check_dim(x);
  double total = 0.0;
  if (!is_glm()) {
    for (const auto& c : *quad_) total += quad_value(c, x);
    return total / static_cast<double>(n_);
  }
  for (const auto& s : data_->samples()) {
    const double inner = dot(s.features, x);
    if (loss_ == LossKind::logistic) {
      total += softplus_neg(s.label * inner);
    } else {
      const double r = inner - s.label;
      total += 0.5 * r * r;
    }
  }
  return total / static_cast<double>(n_) + 0.5 * lambda_ * sq_norm(x);
}

void FiniteSumProblem::component_gradient(std::size_t i, const DenseVec& x,
                                          std::span<double> out) const {
  check_index(i);
  check_dim(x);
  if (out.size() != dim_) throw DimensionError(dim_, out.size());
  const auto& k = simd::active();
  if (!is_glm()) {
    const auto& c = (*quad_)[i];
    for (std::size_t r = 0; r < dim_; ++r) {
      out[r] = k.dot(c.hessian.data() + r * dim_, x.data(), dim_) - c.linear[r];
    }
    return;
  }
  const SparseVec& a = row(i);
  const double deriv = loss_derivative(i, dot(a, x));
  for (std::size_t j = 0; j < dim_; ++j) out[j] = lambda_ * x[j];
  k.sparse_axpy(deriv, a.indices().data(), a.values().data(), a.nnz(), out.data());
}

DenseVec FiniteSumProblem::component_gradient(std::size_t i, const DenseVec& x) const {
  DenseVec g(dim_);
  component_gradient(i, x, g.span());
  return g;
}

DenseVec FiniteSumProblem::full_gradient(const DenseVec& x) const {
  check_dim(x);
  DenseVec g(dim_);
  const double inv_n = 1.0 / static_cast<double>(n_);
  const auto& k = simd::active();
  if (!is_glm()) {
    DenseVec gi(dim_);
    for (std::size_t i = 0; i < n_; ++i) {
      component_gradient(i, x, gi.span());
      k.axpy(1.0, gi.data(), g.data(), dim_);
    }
    for (double& v : g) v *= inv_n;
    return g;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const SparseVec& a = row(i);
    const double deriv = loss_derivative(i, dot(a, x));
    k.sparse_axpy(deriv, a.indices().data(), a.values().data(), a.nnz(), g.data());
  }
  k.axpby(lambda_, x.data(), inv_n, g.data(), dim_);
  return g;
}

double FiniteSumProblem::suboptimality(const DenseVec& x, const DenseVec& x_star,
                                       double f_star) const {
  check_dim(x);
  check_dim(x_star);
  if (is_glm()) return std::max(0.0, value(x) - f_star);
  const auto& h = *mean_hessian_;
  const auto& k = simd::active();
  DenseVec e(dim_);
  for (std::size_t j = 0; j < dim_; ++j) e[j] = x[j] - x_star[j];
  double q = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) q += e[r] * k.dot(h.data() + r * dim_, e.data(), dim_);
  return std::max(0.0, 0.5 * q);
}

}  // namespace csaga
