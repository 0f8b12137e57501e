#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cobweb/data/idx.hpp"
#include "cobweb/image.hpp"

namespace cobweb::data {

// Raw bytes plus a global z-score. Pixels are produced on demand as
// (p / 255 - mean) / std; the raw data is shared, never copied.
class NormalizedDataset {
 public:
  NormalizedDataset(std::shared_ptr<const RawDataset> raw, double mean, double std);

  std::size_t size() const { return raw_->size(); }
  double mean() const { return mean_; }
  double std() const { return std_; }
  const RawDataset& raw() const { return *raw_; }
  std::uint8_t label(std::size_t i) const { return raw_->labels[i]; }
  double value(std::uint8_t p) const { return table_[p]; }

  LabeledImage image(std::size_t i, bool with_label = true) const;

 private:
  std::shared_ptr<const RawDataset> raw_;
  double mean_;
  double std_;
  std::array<double, 256> table_{};
};

// Mean and population std over every pixel of the dataset, scaled to
// [0, 1]. Throws DataError on an empty or constant dataset.
NormalizedDataset normalize(std::shared_ptr<const RawDataset> raw);

struct SequenceSpec {
  std::uint64_t seed = 0;
  std::size_t per_class = 30;
  std::size_t num_runs = 50;
};

using Run = std::vector<std::size_t>;

// Run r: per_class indices of every digit drawn without replacement, then
// shuffled, all with a generator seeded from (seed, r). Throws DataError if
// a digit has fewer than per_class images.
std::vector<Run> build_runs(std::span<const std::uint8_t> labels, const SequenceSpec& spec);

// FNV-1a over the run lists; equal lists give equal fingerprints.
std::uint64_t fingerprint(std::span<const Run> runs);

}  // namespace cobweb::data
