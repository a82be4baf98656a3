#include "csaga/vecmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csaga/error.hpp"
#include "csaga/simd/kernels.hpp"

namespace csaga {

namespace {

void require_same(std::size_t expected, std::size_t actual) {
  if (expected != actual) throw DimensionError(expected, actual);
}

}  // namespace

void DenseVec::fill(double value) noexcept {
  std::fill(v_.begin(), v_.end(), value);
}

bool DenseVec::all_finite() const noexcept {
  return std::all_of(v_.begin(), v_.end(),
                     [](double x) { return std::isfinite(x); });
}

SparseVec::SparseVec(std::size_t dim, std::vector<std::uint32_t> indices,
                     std::vector<double> values)
    : dim_(dim), idx_(std::move(indices)), val_(std::move(values)) {
  if (idx_.size() != val_.size()) {
    throw Error("sparse vector: " + std::to_string(idx_.size()) +
                " indices but " + std::to_string(val_.size()) + " values");
  }
  if (dim_ > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw Error("sparse vector: dimension too large");
  }
  for (std::size_t k = 0; k < idx_.size(); ++k) {
    if (idx_[k] >= dim_) {
      throw Error("sparse vector: index " + std::to_string(idx_[k]) +
                  " out of range for dimension " + std::to_string(dim_));
    }
    if (k > 0 && idx_[k] <= idx_[k - 1]) {
      throw Error("sparse vector: indices not strictly increasing at position " +
                  std::to_string(k));
    }
    if (!std::isfinite(val_[k]) || val_[k] == 0.0) {
      throw Error("sparse vector: value at index " + std::to_string(idx_[k]) +
                  " must be finite and nonzero");
    }
  }
}

SparseVec::SparseVec(
    std::size_t dim,
    std::initializer_list<std::pair<std::uint32_t, double>> entries)
    : SparseVec(dim,
                [&] {
                  std::vector<std::uint32_t> i;
                  for (const auto& e : entries) i.push_back(e.first);
                  return i;
                }(),
                [&] {
                  std::vector<double> v;
                  for (const auto& e : entries) v.push_back(e.second);
                  return v;
                }()) {}

SparseVec SparseVec::from_dense(std::span<const double> dense) {
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (dense[j] != 0.0) {
      idx.push_back(static_cast<std::uint32_t>(j));
      val.push_back(dense[j]);
    }
  }
  return SparseVec(dense.size(), std::move(idx), std::move(val));
}

SparseVec SparseVec::with_dim(std::size_t dim) const {
  return SparseVec(dim, idx_, val_);
}

SparseVec SparseVec::scaled_by_coordinate(std::span<const double> factors) const {
  require_same(dim_, factors.size());
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  idx.reserve(idx_.size());
  val.reserve(val_.size());
  for (std::size_t k = 0; k < idx_.size(); ++k) {
    const double v = val_[k] * factors[idx_[k]];
    if (v != 0.0) {
      idx.push_back(idx_[k]);
      val.push_back(v);
    }
  }
  return SparseVec(dim_, std::move(idx), std::move(val));
}

double SparseVec::sq_norm() const noexcept {
  return simd::active().dot(val_.data(), val_.data(), val_.size());
}

DenseVec SparseVec::to_dense() const {
  DenseVec out(dim_);
  for (std::size_t k = 0; k < idx_.size(); ++k) out[idx_[k]] = val_[k];
  return out;
}

double dot(const SparseVec& a, const DenseVec& x) {
  require_same(a.dim(), x.size());
  return simd::active().sparse_dot(a.indices().data(), a.values().data(),
                                   a.nnz(), x.data());
}

double dot(const DenseVec& a, const DenseVec& b) {
  require_same(a.size(), b.size());
  return simd::active().dot(a.data(), b.data(), a.size());
}

void axpy_sparse(double alpha, const SparseVec& a, DenseVec& x,
                 TouchCounter* counter) {
  require_same(a.dim(), x.size());
  if (counter != nullptr) counter->touches += a.nnz();
  if (alpha == 0.0) return;
  simd::active().sparse_axpy(alpha, a.indices().data(), a.values().data(),
                             a.nnz(), x.data());
}

void axpy(double alpha, const DenseVec& x, DenseVec& y) {
  require_same(y.size(), x.size());
  simd::active().axpy(alpha, x.data(), y.data(), x.size());
}

void axpby(double alpha, const DenseVec& x, double beta, DenseVec& y) {
  require_same(y.size(), x.size());
  simd::active().axpby(alpha, x.data(), beta, y.data(), x.size());
}

double sq_dist(const DenseVec& x, const DenseVec& y) {
  require_same(x.size(), y.size());
  return simd::active().sq_dist(x.data(), y.data(), x.size());
}

double sq_norm(const DenseVec& x) {
  return simd::active().dot(x.data(), x.data(), x.size());
}

double norm(const DenseVec& x) { return std::sqrt(sq_norm(x)); }

double max_abs_diff(const DenseVec& x, const DenseVec& y) {
  require_same(x.size(), y.size());
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace csaga
