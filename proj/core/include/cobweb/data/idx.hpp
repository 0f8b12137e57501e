#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cobweb::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// count images of rows x cols unsigned bytes, row-major, back to back.
struct ByteImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;

  std::span<const std::uint8_t> image(std::size_t i) const {
    return {pixels.data() + i * rows * cols, rows * cols};
  }
  std::uint8_t at(std::size_t i, std::size_t r, std::size_t c) const {
    return pixels[(i * rows + r) * cols + c];
  }
};

// Parsers throw DataError naming the byte offset of the problem: wrong
// magic, truncated payload, trailing bytes, or (labels) a value above 9.
ByteImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> write_idx_images(const ByteImages& images);
std::vector<std::uint8_t> write_idx_labels(std::span<const std::uint8_t> labels);

// Whole file, transparently inflated when it starts with the gzip magic
// 0x1F 0x8B. Throws DataError if the file cannot be read or inflated.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

struct RawDataset {
  ByteImages images;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
};

// Throws DataError when the two files disagree on the number of items.
RawDataset load_raw(const std::filesystem::path& images, const std::filesystem::path& labels);

}  // namespace cobweb::data
