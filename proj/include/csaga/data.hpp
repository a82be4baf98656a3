#ifndef CSAGA_DATA_HPP
#define CSAGA_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csaga/vecmath.hpp"

namespace csaga {

struct Sample {
  SparseVec features;
  double label = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Immutable collection of labelled sparse rows sharing one dimension.
class Dataset {
 public:
  Dataset() = default;
  /// Every sample must already have features.dim() == dim.
  Dataset(std::vector<Sample> samples, std::size_t dim);

  std::size_t n() const noexcept { return samples_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return samples_.empty(); }

  const Sample& operator[](std::size_t i) const noexcept { return samples_[i]; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }

  /// Same rows re-declared in a larger coordinate space.
  Dataset with_dim(std::size_t dim) const;
  /// Divides every feature by its max absolute value over the dataset.
  Dataset maxabs_scaled() const;
  bool labels_are_binary() const noexcept;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Sample> samples_;
  std::size_t dim_ = 0;
};

struct LibsvmOptions {
  /// Map "+1"/"1" to +1 and "-1"/"0" to -1; any other label is an error.
  bool normalize_binary_labels = false;
  /// Declared dimension; must cover every index seen. Default: max index.
  std::optional<std::size_t> dim;
};

/// Parses LIBSVM text ("label idx:val ..." with 1-based increasing indices).
/// Throws ParseError naming the offending line.
Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options = {});
Dataset parse_libsvm_file(const std::string& path,
                          const LibsvmOptions& options = {});

/// Writes 1-based LIBSVM text with round-trip precision.
void write_libsvm(std::ostream& out, const Dataset& ds);

/// ceil(fraction * n) rows drawn without replacement, kept in original order.
/// fraction == 1 returns the dataset unchanged. The parent dimension is kept.
Dataset subsample(const Dataset& ds, double fraction, std::uint64_t seed);

struct DatasetStats {
  std::size_t n = 0;
  std::size_t dim = 0;
  double max_row_sq_norm = 0.0;
  double mean_nnz = 0.0;
};

DatasetStats stats(const Dataset& ds);

/// Random sparse classification data: `nnz_per_row` distinct coordinates per
/// row with standard normal values, labels from a planted linear model with
/// 10% label noise.
Dataset make_sparse_classification(std::size_t n, std::size_t dim,
                                   std::size_t nnz_per_row, std::uint64_t seed);

/// Mushroom-shaped data: `n` rows of one-hot encoded categorical attributes
/// (22 attributes, 112 binary features), labels from a planted rule.
Dataset make_categorical_onehot(std::size_t n, std::uint64_t seed);

/// Seed derivation for independent random streams of one run.
enum class Stream : std::uint64_t { scheduler = 1, subsample = 2, synthetic = 3 };
std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept;

}  // namespace csaga

#endif  // CSAGA_DATA_HPP
