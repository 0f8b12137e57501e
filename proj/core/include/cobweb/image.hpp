#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cobweb {

// A single-channel image in row-major order. Pixel values are already
// normalised; the label is a digit symbol such as "7".
struct LabeledImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;
  std::optional<std::string> label;

  double at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

}  // namespace cobweb
