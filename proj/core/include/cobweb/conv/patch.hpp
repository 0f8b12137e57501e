#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cobweb/attribute.hpp"
#include "cobweb/image.hpp"

namespace cobweb::conv {

// k x k window of an image; origin is the upper-left pixel.
struct Patch {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t size = 0;
  std::vector<double> values;  // row-major, size * size

  double at(std::size_t r, std::size_t c) const { return values[r * size + c]; }
};

// Stride 1, no padding, row-major by origin. Throws ConfigError when k is 0
// or exceeds either image dimension.
std::vector<Patch> extract_patches(const LabeledImage& image, std::size_t k);

// "(r,c)"
std::string patch_attribute(std::size_t r, std::size_t c);

// k*k continuous attributes keyed by in-patch coordinate. The origin is
// left out so equal-valued patches map to equal instances.
Instance patch_to_instance(const Patch& patch);

}  // namespace cobweb::conv
