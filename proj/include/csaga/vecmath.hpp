#ifndef CSAGA_VECMATH_HPP
#define CSAGA_VECMATH_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace csaga {

/// Dense real vector: iterates, gradients, running averages.
class DenseVec {
 public:
  DenseVec() = default;
  explicit DenseVec(std::size_t d, double fill = 0.0) : v_(d, fill) {}
  DenseVec(std::initializer_list<double> values) : v_(values) {}
  explicit DenseVec(std::vector<double> values) : v_(std::move(values)) {}

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  double& operator[](std::size_t i) noexcept { return v_[i]; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }

  double* data() noexcept { return v_.data(); }
  const double* data() const noexcept { return v_.data(); }

  std::span<double> span() noexcept { return v_; }
  std::span<const double> span() const noexcept { return v_; }

  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  const std::vector<double>& values() const noexcept { return v_; }

  void fill(double value) noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const DenseVec&, const DenseVec&) = default;

 private:
  std::vector<double> v_;
};

/// Sparse vector with strictly increasing 0-based indices and nonzero finite
/// values. Construction validates both.
class SparseVec {
 public:
  SparseVec() = default;
  /// Throws csaga::Error on unsorted or out-of-range indices, zero or
  /// non-finite values.
  SparseVec(std::size_t dim, std::vector<std::uint32_t> indices,
            std::vector<double> values);
  SparseVec(std::size_t dim,
            std::initializer_list<std::pair<std::uint32_t, double>> entries);

  /// Drops exact zeros.
  static SparseVec from_dense(std::span<const double> dense);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return idx_.size(); }
  std::span<const std::uint32_t> indices() const noexcept { return idx_; }
  std::span<const double> values() const noexcept { return val_; }

  /// Same entries, larger declared dimension.
  SparseVec with_dim(std::size_t dim) const;
  /// Multiplies value k by factors[indices[k]]; zero factors drop the entry.
  SparseVec scaled_by_coordinate(std::span<const double> factors) const;

  double sq_norm() const noexcept;
  DenseVec to_dense() const;

  friend bool operator==(const SparseVec&, const SparseVec&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint32_t> idx_;
  std::vector<double> val_;
};

/// Instrumentation hook: counts coordinate reads/writes of a dense vector.
struct TouchCounter {
  std::uint64_t touches = 0;
};

double dot(const SparseVec& a, const DenseVec& x);
double dot(const DenseVec& a, const DenseVec& b);

/// x += alpha * a, touching only the coordinates stored in a.
void axpy_sparse(double alpha, const SparseVec& a, DenseVec& x,
                 TouchCounter* counter = nullptr);
/// y += alpha * x
void axpy(double alpha, const DenseVec& x, DenseVec& y);
/// y = alpha * x + beta * y
void axpby(double alpha, const DenseVec& x, double beta, DenseVec& y);

double sq_dist(const DenseVec& x, const DenseVec& y);
double sq_norm(const DenseVec& x);
double norm(const DenseVec& x);
double max_abs_diff(const DenseVec& x, const DenseVec& y);

}  // namespace csaga

#endif  // CSAGA_VECMATH_HPP
