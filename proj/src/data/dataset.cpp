#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "csaga/data.hpp"
#include "csaga/error.hpp"

namespace csaga {

Dataset::Dataset(std::vector<Sample> samples, std::size_t dim)
    : samples_(std::move(samples)), dim_(dim) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].features.dim() != dim_) {
      throw Error("dataset: sample " + std::to_string(i) + " has dimension " +
                  std::to_string(samples_[i].features.dim()) + ", expected " +
                  std::to_string(dim_));
    }
  }
}

Dataset Dataset::with_dim(std::size_t dim) const {
  if (dim < dim_) {
    throw Error("dataset: cannot shrink dimension from " + std::to_string(dim_) +
                " to " + std::to_string(dim));
  }
  std::vector<Sample> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back({s.features.with_dim(dim), s.label});
  return Dataset(std::move(out), dim);
}

Dataset Dataset::maxabs_scaled() const {
  std::vector<double> scale(dim_, 0.0);
  for (const auto& s : samples_) {
    const auto idx = s.features.indices();
    const auto val = s.features.values();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      scale[idx[k]] = std::max(scale[idx[k]], std::abs(val[k]));
    }
  }
  for (double& c : scale) c = (c > 0.0) ? 1.0 / c : 0.0;
  std::vector<Sample> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) {
    out.push_back({s.features.scaled_by_coordinate(scale), s.label});
  }
  return Dataset(std::move(out), dim_);
}

bool Dataset::labels_are_binary() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](const Sample& s) {
    return s.label == 1.0 || s.label == -1.0;
  });
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept {
  // splitmix64 finalizer over (seed, stream id)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Dataset subsample(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error("subsample: fraction must be in (0, 1], got " +
                std::to_string(fraction));
  }
  if (fraction == 1.0) return ds;
  // Guard against 0.07 * 100 = 7.000000000000001 rounding up to 8.
  const auto m = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(ds.n()) - 1e-9));
  std::vector<std::size_t> all(ds.n());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(m);
  std::mt19937_64 rng(derive_seed(seed, Stream::subsample));
  std::sample(all.begin(), all.end(), std::back_inserter(picked), m, rng);
  std::vector<Sample> out;
  out.reserve(m);
  for (std::size_t i : picked) out.push_back(ds[i]);
  return Dataset(std::move(out), ds.dim());
}

DatasetStats stats(const Dataset& ds) {
  if (ds.empty()) throw Error("stats: empty dataset");
  DatasetStats st;
  st.n = ds.n();
  st.dim = ds.dim();
  std::size_t total_nnz = 0;
  for (const auto& s : ds.samples()) {
    st.max_row_sq_norm = std::max(st.max_row_sq_norm, s.features.sq_norm());
    total_nnz += s.features.nnz();
  }
  st.mean_nnz = static_cast<double>(total_nnz) / static_cast<double>(ds.n());
  return st;
}

}  // namespace csaga
