#include "cobweb/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cobweb/data/rng.hpp"
#include "cobweb/error.hpp"

namespace cobweb::data {

NormalizedDataset::NormalizedDataset(std::shared_ptr<const RawDataset> raw, double mean,
                                     double std)
    : raw_(std::move(raw)), mean_(mean), std_(std) {
  if (!(std_ > 0.0)) throw DataError("normalisation std must be positive");
  for (int p = 0; p < 256; ++p) table_[p] = (static_cast<double>(p) / 255.0 - mean_) / std_;
}

LabeledImage NormalizedDataset::image(std::size_t i, bool with_label) const {
  const auto& imgs = raw_->images;
  LabeledImage out;
  out.rows = imgs.rows;
  out.cols = imgs.cols;
  out.pixels.reserve(imgs.rows * imgs.cols);
  for (std::uint8_t p : imgs.image(i)) out.pixels.push_back(table_[p]);
  if (with_label) out.label = std::to_string(raw_->labels[i]);
  return out;
}

NormalizedDataset normalize(std::shared_ptr<const RawDataset> raw) {
  const auto& pixels = raw->images.pixels;
  if (pixels.empty()) throw DataError("cannot normalise an empty dataset");
  // Exact integer moments; the only rounding happens in the final division.
  std::uint64_t s1 = 0;
  unsigned __int128 s2 = 0;
  for (std::uint8_t p : pixels) {
    s1 += p;
    s2 += static_cast<std::uint64_t>(p) * p;
  }
  const auto n = static_cast<long double>(pixels.size());
  const long double mean = static_cast<long double>(s1) / n;
  const long double var = static_cast<long double>(s2) / n - mean * mean;
  if (!(var > 0.0L)) throw DataError("dataset has zero pixel variance");
  const long double std = std::sqrt(var);
  return NormalizedDataset(std::move(raw), static_cast<double>(mean / 255.0L),
                           static_cast<double>(std / 255.0L));
}

std::vector<Run> build_runs(std::span<const std::uint8_t> labels, const SequenceSpec& spec) {
  std::array<std::vector<std::size_t>, 10> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 9) throw DataError("label out of range at index " + std::to_string(i));
    by_class[labels[i]].push_back(i);
  }
  for (std::size_t d = 0; d < 10; ++d) {
    if (by_class[d].size() < spec.per_class) {
      throw DataError("digit " + std::to_string(d) + " has " + std::to_string(by_class[d].size()) +
                      " images, need " + std::to_string(spec.per_class));
    }
  }
  std::vector<Run> runs;
  runs.reserve(spec.num_runs);
  for (std::size_t r = 0; r < spec.num_runs; ++r) {
    Rng rng(derive_seed(spec.seed, r));
    Run run;
    run.reserve(spec.per_class * 10);
    for (std::size_t d = 0; d < 10; ++d) {
      // Partial Fisher-Yates: the first per_class slots become the sample.
      std::vector<std::size_t> pool = by_class[d];
      for (std::size_t i = 0; i < spec.per_class; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        run.push_back(pool[i]);
      }
    }
    rng.shuffle(std::span<std::size_t>(run));
    runs.push_back(std::move(run));
  }
  return runs;
}

std::uint64_t fingerprint(std::span<const Run> runs) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto eat = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  eat(runs.size());
  for (const auto& run : runs) {
    eat(run.size());
    for (std::size_t i : run) eat(i);
  }
  return h;
}

}  // namespace cobweb::data
