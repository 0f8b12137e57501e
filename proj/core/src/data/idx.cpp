#include "cobweb/data/idx.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>
#include <string>

#include "cobweb/error.hpp"

namespace cobweb::data {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (bytes.size() < offset + 4) {
    throw DataError("IDX header truncated at offset " + std::to_string(bytes.size()));
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex(std::uint32_t v) {
  static const char* digits = "0123456789ABCDEF";
  std::string out = "0x";
  for (int shift = 28; shift >= 0; shift -= 4) out.push_back(digits[(v >> shift) & 0xF]);
  return out;
}

void check_magic(std::uint32_t got, std::uint32_t want) {
  if (got != want) {
    throw DataError("wrong magic " + hex(got) + " at offset 0, expected " + hex(want));
  }
}

void check_length(std::span<const std::uint8_t> bytes, std::size_t expected) {
  if (bytes.size() < expected) {
    throw DataError("IDX payload truncated at offset " + std::to_string(bytes.size()) +
                    ", expected " + std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) {
    throw DataError("trailing bytes after IDX payload at offset " + std::to_string(expected));
  }
}

std::vector<std::uint8_t> inflate_gzip(const std::vector<std::uint8_t>& in, const std::string& name) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw DataError("cannot initialise zlib");
  std::vector<std::uint8_t> out;
  std::uint8_t buffer[1 << 16];
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buffer;
    zs.avail_out = sizeof buffer;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw DataError("corrupt gzip data in " + name);
    }
    out.insert(out.end(), buffer, buffer + (sizeof buffer - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw DataError("truncated gzip data in " + name);
    }
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace

ByteImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  check_magic(read_be32(bytes, 0), kIdxImageMagic);
  ByteImages out;
  out.count = read_be32(bytes, 4);
  out.rows = read_be32(bytes, 8);
  out.cols = read_be32(bytes, 12);
  check_length(bytes, 16 + out.count * out.rows * out.cols);
  out.pixels.assign(bytes.begin() + 16, bytes.end());
  return out;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  check_magic(read_be32(bytes, 0), kIdxLabelMagic);
  const std::size_t count = read_be32(bytes, 4);
  check_length(bytes, 8 + count);
  std::vector<std::uint8_t> out(bytes.begin() + 8, bytes.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] > 9) {
      throw DataError("label " + std::to_string(out[i]) + " out of range at index " +
                      std::to_string(i) + " (offset " + std::to_string(8 + i) + ")");
    }
  }
  return out;
}

std::vector<std::uint8_t> write_idx_images(const ByteImages& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  put_be32(out, kIdxImageMagic);
  put_be32(out, static_cast<std::uint32_t>(images.count));
  put_be32(out, static_cast<std::uint32_t>(images.rows));
  put_be32(out, static_cast<std::uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> write_idx_labels(std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  put_be32(out, kIdxLabelMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw DataError("cannot read " + path.string());
  if (bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B) {
    return inflate_gzip(bytes, path.string());
  }
  return bytes;
}

RawDataset load_raw(const std::filesystem::path& images, const std::filesystem::path& labels) {
  RawDataset out;
  try {
    out.images = parse_idx_images(read_file(images));
  } catch (const DataError& e) {
    throw DataError(images.string() + ": " + e.what());
  }
  try {
    out.labels = parse_idx_labels(read_file(labels));
  } catch (const DataError& e) {
    throw DataError(labels.string() + ": " + e.what());
  }
  if (out.images.count != out.labels.size()) {
    throw DataError(std::to_string(out.images.count) + " images but " +
                    std::to_string(out.labels.size()) + " labels");
  }
  return out;
}

}  // namespace cobweb::data
