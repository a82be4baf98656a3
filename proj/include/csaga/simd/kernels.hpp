#ifndef CSAGA_SIMD_KERNELS_HPP
#define CSAGA_SIMD_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>

// Inner-loop kernels behind the vector operations. Every kernel has a scalar
// reference implementation; x86-64 builds also carry AVX2/FMA variants that
// are picked at runtime when the CPU supports them. Reductions in the SIMD
// variants use a different summation order, so results agree with the scalar
// reference to rounding, not bit for bit.

namespace csaga::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i (a[i] - b[i])^2
  double (*sq_dist)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y[i] = alpha * x[i] + beta * y[i]
  void (*axpby)(double alpha, const double* x, double beta, double* y,
                std::size_t n);
  /// sum_k val[k] * x[idx[k]]
  double (*sparse_dot)(const std::uint32_t* idx, const double* val,
                       std::size_t nnz, const double* x);
  /// x[idx[k]] += alpha * val[k]
  void (*sparse_axpy)(double alpha, const std::uint32_t* idx, const double* val,
                      std::size_t nnz, double* x);
};

const KernelTable& scalar_kernels() noexcept;

/// AVX2 table, or nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels() noexcept;

bool cpu_supports_avx2() noexcept;

/// Table used by the library. Chosen on first use: AVX2 when compiled and
/// supported, scalar otherwise. CSAGA_SIMD=scalar in the environment forces
/// the reference path.
const KernelTable& active() noexcept;

/// Overrides the runtime choice. Returns false (and changes nothing) when the
/// requested ISA is unavailable on this build or CPU.
bool select(Isa isa) noexcept;

std::string_view to_string(Isa isa) noexcept;

}  // namespace csaga::simd

#endif  // CSAGA_SIMD_KERNELS_HPP
