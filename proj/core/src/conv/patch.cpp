#include "cobweb/conv/patch.hpp"

#include "cobweb/error.hpp"

namespace cobweb::conv {

std::vector<Patch> extract_patches(const LabeledImage& image, std::size_t k) {
  if (k == 0 || k > image.rows || k > image.cols) {
    throw ConfigError("filter size " + std::to_string(k) + " does not fit a " +
                      std::to_string(image.rows) + "x" + std::to_string(image.cols) + " image");
  }
  std::vector<Patch> out;
  out.reserve((image.rows - k + 1) * (image.cols - k + 1));
  for (std::size_t r = 0; r + k <= image.rows; ++r) {
    for (std::size_t c = 0; c + k <= image.cols; ++c) {
      Patch p{r, c, k, {}};
      p.values.reserve(k * k);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) p.values.push_back(image.at(r + i, c + j));
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string patch_attribute(std::size_t r, std::size_t c) {
  return "(" + std::to_string(r) + "," + std::to_string(c) + ")";
}

Instance patch_to_instance(const Patch& patch) {
  Instance out;
  for (std::size_t r = 0; r < patch.size; ++r) {
    for (std::size_t c = 0; c < patch.size; ++c) out.set(patch_attribute(r, c), patch.at(r, c));
  }
  return out;
}

}  // namespace cobweb::conv
