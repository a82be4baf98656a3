#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "csaga/error.hpp"
#include "csaga/simd/kernels.hpp"
#include "csaga/vecmath.hpp"

namespace csaga {
namespace {

TEST(DenseVec, DotAndNorms) {
  DenseVec a{1.0, 2.0, 3.0};
  DenseVec b{4.0, -5.0, 6.0};
  EXPECT_DOUBLE_EQ(dot(a, b), 12.0);
  EXPECT_DOUBLE_EQ(sq_norm(a), 14.0);
  EXPECT_DOUBLE_EQ(sq_dist(a, b), 9.0 + 49.0 + 9.0);
  EXPECT_DOUBLE_EQ(norm(DenseVec{3.0, 4.0}), 5.0);
  EXPECT_DOUBLE_EQ(max_abs_diff(a, b), 7.0);
}

TEST(DenseVec, AxpyAndAxpby) {
  DenseVec x{1.0, -1.0};
  DenseVec y{10.0, 20.0};
  axpy(2.0, x, y);
  EXPECT_EQ(y, (DenseVec{12.0, 18.0}));
  axpby(3.0, x, 0.5, y);
  EXPECT_EQ(y, (DenseVec{9.0, 6.0}));
}

TEST(DenseVec, DimensionMismatchThrows) {
  DenseVec a(3), b(4);
  EXPECT_THROW(dot(a, b), DimensionError);
  EXPECT_THROW(axpy(1.0, a, b), DimensionError);
  EXPECT_THROW(sq_dist(a, b), DimensionError);
}

TEST(DenseVec, AllFinite) {
  DenseVec a{1.0, 2.0};
  EXPECT_TRUE(a.all_finite());
  a[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(a.all_finite());
}

TEST(SparseVec, DotWithDense) {
  SparseVec a(5, {{0, 2.0}, {3, -1.0}});
  DenseVec x{1.0, 9.0, 9.0, 4.0, 9.0};
  EXPECT_DOUBLE_EQ(dot(a, x), -2.0);
  EXPECT_DOUBLE_EQ(a.sq_norm(), 5.0);
  EXPECT_EQ(a.to_dense(), (DenseVec{2.0, 0.0, 0.0, -1.0, 0.0}));
}

TEST(SparseVec, AxpyCountsTouches) {
  SparseVec a(4, {{1, 1.0}, {2, 3.0}});
  DenseVec x(4);
  TouchCounter tc;
  axpy_sparse(2.0, a, x, &tc);
  EXPECT_EQ(x, (DenseVec{0.0, 2.0, 6.0, 0.0}));
  EXPECT_EQ(tc.touches, 2u);
}

TEST(SparseVec, RejectsBadInput) {
  EXPECT_THROW(SparseVec(3, {2, 1}, {1.0, 1.0}), Error);   // unsorted
  EXPECT_THROW(SparseVec(3, {1, 1}, {1.0, 1.0}), Error);   // duplicate
  EXPECT_THROW(SparseVec(3, {3}, {1.0}), Error);           // out of range
  EXPECT_THROW(SparseVec(3, {0}, {0.0}), Error);           // explicit zero
  EXPECT_THROW(SparseVec(3, {0, 1}, {1.0}), Error);        // length mismatch
  EXPECT_THROW(SparseVec(3, {0}, {std::nan("")}), Error);
  EXPECT_THROW(dot(SparseVec(3, {{0, 1.0}}), DenseVec(2)), DimensionError);
}

TEST(SparseVec, FromDenseRoundTrip) {
  DenseVec d{0.0, 1.5, 0.0, -2.0};
  SparseVec s = SparseVec::from_dense(d.span());
  EXPECT_EQ(s.nnz(), 2u);
  EXPECT_EQ(s.to_dense(), d);
  EXPECT_EQ(s.with_dim(10).dim(), 10u);
  EXPECT_THROW(s.with_dim(3), Error);
}

// Every compiled variant against the scalar reference, including lengths that
// leave a remainder after the vector width.
class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelEquivalence, MatchesScalar) {
  const simd::KernelTable* fast = simd::avx2_kernels();
  if (fast == nullptr || !simd::cpu_supports_avx2()) {
    GTEST_SKIP() << "AVX2 variant not available";
  }
  const simd::KernelTable& ref = simd::scalar_kernels();
  const std::size_t n = GetParam();
  std::mt19937_64 rng(n + 17);
  std::normal_distribution<double> g;
  std::vector<double> a(n), b(n), y1(n), y2(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = g(rng);
    b[i] = g(rng);
    y1[i] = y2[i] = g(rng);
  }
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
  EXPECT_NEAR(fast->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n),
              1e-14 * scale);
  EXPECT_NEAR(fast->sq_dist(a.data(), b.data(), n),
              ref.sq_dist(a.data(), b.data(), n), 1e-14 * (scale + 4.0 * n));

  fast->axpy(0.7, a.data(), y1.data(), n);
  ref.axpy(0.7, a.data(), y2.data(), n);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (1 + std::abs(y2[i])));
  fast->axpby(-1.3, b.data(), 0.25, y1.data(), n);
  ref.axpby(-1.3, b.data(), 0.25, y2.data(), n);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (1 + std::abs(y2[i])));

  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < n; i += 1 + i % 3) {
    idx.push_back(static_cast<std::uint32_t>(i));
    val.push_back(g(rng));
  }
  double sscale = 1.0;
  for (std::size_t k = 0; k < idx.size(); ++k) sscale += std::abs(val[k] * a[idx[k]]);
  EXPECT_NEAR(fast->sparse_dot(idx.data(), val.data(), idx.size(), a.data()),
              ref.sparse_dot(idx.data(), val.data(), idx.size(), a.data()),
              1e-14 * sscale);
  std::vector<double> x1 = b, x2 = b;
  fast->sparse_axpy(1.1, idx.data(), val.data(), idx.size(), x1.data());
  ref.sparse_axpy(1.1, idx.data(), val.data(), idx.size(), x2.data());
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x1[i], x2[i], 1e-15 * (1 + std::abs(x2[i])));
}

INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalence,
                         ::testing::Values(0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 100, 1023));

TEST(KernelDispatch, SelectScalarAndBack) {
  const simd::Isa before = simd::active().isa;
  ASSERT_TRUE(simd::select(simd::Isa::scalar));
  EXPECT_EQ(simd::active().isa, simd::Isa::scalar);
  DenseVec a{1.0, 2.0, 3.0, 4.0, 5.0};
  EXPECT_DOUBLE_EQ(dot(a, a), 55.0);
  if (simd::avx2_kernels() != nullptr && simd::cpu_supports_avx2()) {
    EXPECT_TRUE(simd::select(simd::Isa::avx2));
    EXPECT_DOUBLE_EQ(dot(a, a), 55.0);
  } else {
    EXPECT_FALSE(simd::select(simd::Isa::avx2));
  }
  simd::select(before);
  EXPECT_EQ(simd::to_string(simd::Isa::scalar), "scalar");
}

}  // namespace
}  // namespace csaga
