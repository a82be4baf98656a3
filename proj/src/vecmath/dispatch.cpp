#include <atomic>
#include <cstdlib>
#include <cstring>

#include "csaga/simd/kernels.hpp"

namespace csaga::simd {

#ifdef CSAGA_HAVE_AVX2_KERNELS
const KernelTable* avx2_kernels_impl() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#ifdef CSAGA_HAVE_AVX2_KERNELS
  return avx2_kernels_impl();
#else
  return nullptr;
#endif
}

bool cpu_supports_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* pick_default() noexcept {
  const char* env = std::getenv("CSAGA_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
  if (avx2_kernels() != nullptr && cpu_supports_avx2()) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

const KernelTable& active() noexcept {
  return *slot().load(std::memory_order_acquire);
}

bool select(Isa isa) noexcept {
  const KernelTable* table = nullptr;
  switch (isa) {
    case Isa::scalar:
      table = &scalar_kernels();
      break;
    case Isa::avx2:
      if (cpu_supports_avx2()) table = avx2_kernels();
      break;
  }
  if (table == nullptr) return false;
  slot().store(table, std::memory_order_release);
  return true;
}

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

}  // namespace csaga::simd
