#include <immintrin.h>

#include "csaga/simd/kernels.hpp"

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

namespace csaga::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d t0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d t1 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(t0, t0, acc0);
    acc1 = _mm256_fmadd_pd(t1, t1, acc1);
  }
  if (i + 4 <= n) {
    const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(t, t, acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = __builtin_fma(alpha, x[i], y[i]);
}

void axpby_avx2(double alpha, const double* x, double beta, double* y,
                std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), by));
  }
  for (; i < n; ++i) y[i] = __builtin_fma(alpha, x[i], beta * y[i]);
}

double sparse_dot_avx2(const std::uint32_t* idx, const double* val,
                       std::size_t nnz, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= nnz; k += 4) {
    const __m128i vi =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    const __m256d xv = _mm256_i32gather_pd(x, vi, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
  }
  double s = hsum(acc);
  for (; k < nnz; ++k) s += val[k] * x[idx[k]];
  return s;
}

// No scatter in AVX2: gather, fused update, scalar stores. Indices within a
// row are strictly increasing so the four lanes never alias.
void sparse_axpy_avx2(double alpha, const std::uint32_t* idx, const double* val,
                      std::size_t nnz, double* x) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  alignas(32) double out[4];
  for (; k + 4 <= nnz; k += 4) {
    const __m128i vi =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    const __m256d xv = _mm256_i32gather_pd(x, vi, 8);
    _mm256_store_pd(out, _mm256_fmadd_pd(va, _mm256_loadu_pd(val + k), xv));
    x[idx[k]] = out[0];
    x[idx[k + 1]] = out[1];
    x[idx[k + 2]] = out[2];
    x[idx[k + 3]] = out[3];
  }
  for (; k < nnz; ++k) x[idx[k]] = __builtin_fma(alpha, val[k], x[idx[k]]);
}

constexpr KernelTable kAvx2{
    Isa::avx2,       "avx2",           dot_avx2,
    sq_dist_avx2,    axpy_avx2,        axpby_avx2,
    sparse_dot_avx2, sparse_axpy_avx2,
};

}  // namespace

const KernelTable* avx2_kernels_impl() noexcept { return &kAvx2; }

}  // namespace csaga::simd
