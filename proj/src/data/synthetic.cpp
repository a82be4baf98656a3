#include <algorithm>
#include <array>
#include <random>

#include "csaga/data.hpp"
#include "csaga/error.hpp"

namespace csaga {

Dataset make_sparse_classification(std::size_t n, std::size_t dim,
                                   std::size_t nnz_per_row, std::uint64_t seed) {
  if (nnz_per_row > dim) throw Error("nnz_per_row exceeds dimension");
  std::mt19937_64 rng(derive_seed(seed, Stream::synthetic));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  DenseVec planted(dim);
  for (auto& w : planted) w = normal(rng);

  std::vector<std::uint32_t> all(dim);
  for (std::size_t j = 0; j < dim; ++j) all[j] = static_cast<std::uint32_t>(j);

  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint32_t> idx;
    idx.reserve(nnz_per_row);
    std::sample(all.begin(), all.end(), std::back_inserter(idx), nnz_per_row, rng);
    std::vector<double> val(idx.size());
    for (auto& v : val) {
      do {
        v = normal(rng);
      } while (v == 0.0);
    }
    SparseVec row(dim, std::move(idx), std::move(val));
    double label = dot(row, planted) >= 0.0 ? 1.0 : -1.0;
    if (unit(rng) < 0.1) label = -label;
    samples.push_back({std::move(row), label});
  }
  return Dataset(std::move(samples), dim);
}

Dataset make_categorical_onehot(std::size_t n, std::uint64_t seed) {
  // Category counts per attribute; they sum to 112 like the UCI mushroom set.
  constexpr std::array<std::uint32_t, 22> kLevels{6, 4, 10, 2, 9, 2, 2, 2, 10, 2, 5,
                                                  4, 4, 9,  9, 1, 4, 3, 5, 9, 6, 4};
  std::uint32_t dim = 0;
  for (auto c : kLevels) dim += c;

  std::mt19937_64 rng(derive_seed(seed, Stream::synthetic));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weight(dim);
  for (auto& w : weight) w = normal(rng);

  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    double score = 0.0;
    std::uint32_t offset = 0;
    for (auto levels : kLevels) {
      std::uniform_int_distribution<std::uint32_t> pick(0, levels - 1);
      const std::uint32_t j = offset + pick(rng);
      idx.push_back(j);
      val.push_back(1.0);
      score += weight[j];
      offset += levels;
    }
    double label = score >= 0.0 ? 1.0 : -1.0;
    if (unit(rng) < 0.02) label = -label;
    samples.push_back({SparseVec(dim, std::move(idx), std::move(val)), label});
  }
  return Dataset(std::move(samples), dim);
}

}  // namespace csaga
