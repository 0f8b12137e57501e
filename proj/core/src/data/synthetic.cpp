#include "cobweb/data/synthetic.hpp"

#include <cmath>
#include <string>

#include "cobweb/data/rng.hpp"

namespace cobweb::data {
namespace {

double prototype(std::size_t cls, std::size_t r, std::size_t c, std::size_t side) {
  const std::size_t h = side / 2;
  switch (cls) {
    case 0:  // horizontal bars
      return (r / 2) % 2 == 0 ? 2.0 : -2.0;
    case 1:  // vertical bars
      return (c / 2) % 2 == 0 ? 2.0 : -2.0;
    case 2:  // blocks
      return (r < h) == (c < h) ? 2.5 : -1.5;
    default:  // diagonal ramp
      return (static_cast<double>(r + c) / static_cast<double>(side - 1)) * 2.0 - 2.0;
  }
}

// Box-Muller; the standard normal_distribution is not portable.
double gaussian(Rng& rng) {
  const double u = 1.0 - rng.unit();
  const double v = rng.unit();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
}

}  // namespace

std::vector<LabeledImage> synthetic_images(std::size_t count, std::uint64_t seed,
                                           std::size_t side) {
  Rng rng(derive_seed(seed, 0x5e7));
  std::vector<LabeledImage> out;
  out.reserve(count);
  std::size_t block = 64;
  std::size_t cls = 0;
  std::size_t left = block;
  for (std::size_t i = 0; i < count; ++i) {
    if (left == 0) {
      cls = (cls + 1 + rng.below(3)) % 4;
      block = block > 4 ? block / 2 : 4;
      left = block;
    }
    --left;
    const double contrast = 0.5 + static_cast<double>(rng.below(4)) * 0.5;
    LabeledImage img{side, side, std::vector<double>(side * side), std::to_string(cls)};
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        img.pixels[r * side + c] = contrast * prototype(cls, r, c, side) + 0.6 * gaussian(rng);
      }
    }
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace cobweb::data
