#include "csaga/simd/kernels.hpp"

namespace csaga::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_scalar(double alpha, const double* x, double beta, double* y,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = alpha * x[i] + beta * y[i];
}

double sparse_dot_scalar(const std::uint32_t* idx, const double* val,
                         std::size_t nnz, const double* x) {
  double s = 0.0;
  for (std::size_t k = 0; k < nnz; ++k) s += val[k] * x[idx[k]];
  return s;
}

void sparse_axpy_scalar(double alpha, const std::uint32_t* idx,
                        const double* val, std::size_t nnz, double* x) {
  for (std::size_t k = 0; k < nnz; ++k) x[idx[k]] += alpha * val[k];
}

constexpr KernelTable kScalar{
    Isa::scalar,       "scalar",           dot_scalar,
    sq_dist_scalar,    axpy_scalar,        axpby_scalar,
    sparse_dot_scalar, sparse_axpy_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace csaga::simd
