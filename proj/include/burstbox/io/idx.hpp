#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstbox/image.hpp"

namespace burstbox {

struct DigitSample {
  ImageBuffer image;  // grayscale, dimensions from the IDX header (28x28 for MNIST)
  uint8_t label = 0;
};

namespace detail {

constexpr uint32_t kIdxImagesMagic = 2051;  // 0x00000803
constexpr uint32_t kIdxLabelsMagic = 2049;  // 0x00000801

inline std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_idx: cannot open " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

inline uint32_t read_be32(const std::vector<uint8_t>& bytes, size_t offset,
                          const std::filesystem::path& path) {
  if (offset + 4 > bytes.size())
    throw std::runtime_error("parse_idx: " + path.string() + ": truncated header");
  return (uint32_t(bytes[offset]) << 24) | (uint32_t(bytes[offset + 1]) << 16) |
         (uint32_t(bytes[offset + 2]) << 8) | uint32_t(bytes[offset + 3]);
}

inline void append_be32(std::vector<uint8_t>& bytes, uint32_t v) {
  bytes.push_back(uint8_t(v >> 24));
  bytes.push_back(uint8_t(v >> 16));
  bytes.push_back(uint8_t(v >> 8));
  bytes.push_back(uint8_t(v));
}

}  // namespace detail

/// Parse an IDX image/label file pair (the MNIST distribution format:
/// big-endian headers, magic 2051 for images and 2049 for labels).
inline std::vector<DigitSample> parse_idx(const std::filesystem::path& images_path,
                                          const std::filesystem::path& labels_path) {
  using detail::read_be32;
  const std::vector<uint8_t> ib = detail::read_file_bytes(images_path);
  const uint32_t imagic = read_be32(ib, 0, images_path);
  if (imagic != detail::kIdxImagesMagic)
    throw std::runtime_error("parse_idx: " + images_path.string() + ": bad magic " +
                             std::to_string(imagic) + " (expected 2051)");
  const uint32_t count = read_be32(ib, 4, images_path);
  const uint32_t rows = read_be32(ib, 8, images_path);
  const uint32_t cols = read_be32(ib, 12, images_path);
  const size_t expected = 16 + size_t(count) * rows * cols;
  if (ib.size() != expected)
    throw std::runtime_error("parse_idx: " + images_path.string() + ": payload is " +
                             std::to_string(ib.size() - 16) + " bytes, header declares " +
                             std::to_string(expected - 16));

  const std::vector<uint8_t> lb = detail::read_file_bytes(labels_path);
  const uint32_t lmagic = read_be32(lb, 0, labels_path);
  if (lmagic != detail::kIdxLabelsMagic)
    throw std::runtime_error("parse_idx: " + labels_path.string() + ": bad magic " +
                             std::to_string(lmagic) + " (expected 2049)");
  const uint32_t lcount = read_be32(lb, 4, labels_path);
  if (lb.size() != 8 + size_t(lcount))
    throw std::runtime_error("parse_idx: " + labels_path.string() + ": payload is " +
                             std::to_string(lb.size() - 8) + " bytes, header declares " +
                             std::to_string(lcount));
  if (count != lcount)
    throw std::runtime_error("parse_idx: image count " + std::to_string(count) +
                             " does not match label count " + std::to_string(lcount));

  std::vector<DigitSample> samples;
  samples.reserve(count);
  const size_t px = size_t(rows) * cols;
  for (uint32_t i = 0; i < count; ++i) {
    DigitSample s;
    s.image = ImageBuffer(cols, rows, 1);
    std::copy_n(ib.begin() + 16 + i * px, px, s.image.data.begin());
    s.label = lb[8 + i];
    samples.push_back(std::move(s));
  }
  return samples;
}

/// Write samples back out as an IDX image/label file pair. All images must
/// share the dimensions of the first.
inline void write_idx(const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path,
                      const std::vector<DigitSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("write_idx: no samples");
  const uint32_t rows = samples.front().image.height;
  const uint32_t cols = samples.front().image.width;

  std::vector<uint8_t> ib, lb;
  ib.reserve(16 + samples.size() * rows * cols);
  detail::append_be32(ib, detail::kIdxImagesMagic);
  detail::append_be32(ib, uint32_t(samples.size()));
  detail::append_be32(ib, rows);
  detail::append_be32(ib, cols);
  detail::append_be32(lb, detail::kIdxLabelsMagic);
  detail::append_be32(lb, uint32_t(samples.size()));
  for (const DigitSample& s : samples) {
    if (s.image.width != cols || s.image.height != rows || s.image.channels != 1)
      throw std::invalid_argument("write_idx: inconsistent sample dimensions");
    ib.insert(ib.end(), s.image.data.begin(), s.image.data.end());
    lb.push_back(s.label);
  }

  for (const auto& [path, bytes] : {std::pair{images_path, &ib}, std::pair{labels_path, &lb}}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_idx: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes->data()), std::streamsize(bytes->size()));
    if (!out) throw std::runtime_error("write_idx: write failed for " + path.string());
  }
}

}  // namespace burstbox
