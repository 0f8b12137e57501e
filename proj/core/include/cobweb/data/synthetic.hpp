#pragma once

#include <cstdint>
#include <vector>

#include "cobweb/image.hpp"

namespace cobweb::data {

// Small labelled images for exercising the filter hierarchy: four classes
// of bar and block prototypes at several contrasts plus Gaussian noise.
// Classes arrive in blocks whose length shrinks over the sequence, so the
// early hierarchy is shaped by one class at a time and has to be
// reorganised later. Deterministic in `seed`.
std::vector<LabeledImage> synthetic_images(std::size_t count, std::uint64_t seed,
                                           std::size_t side = 8);

}  // namespace cobweb::data
