#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace burstbox {

/// Decoded raster image: 8-bit samples, row-major, interleaved channels.
/// channels is 1 (gray) or 3 (RGB).
struct ImageBuffer {
  uint32_t width = 0;
  uint32_t height = 0;
  uint32_t channels = 1;
  std::vector<uint8_t> data;

  ImageBuffer() = default;

  ImageBuffer(uint32_t w, uint32_t h, uint32_t ch, uint8_t fill = 0)
      : width(w), height(h), channels(ch),
        data(static_cast<size_t>(w) * h * ch, fill) {
    if (ch != 1 && ch != 3)
      throw std::invalid_argument("ImageBuffer: channels must be 1 or 3");
  }

  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
  size_t sample_count() const { return pixel_count() * channels; }

  uint8_t& at(uint32_t x, uint32_t y, uint32_t c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  uint8_t at(uint32_t x, uint32_t y, uint32_t c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  bool same_shape(const ImageBuffer& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }

  void validate() const {
    if (channels != 1 && channels != 3)
      throw std::invalid_argument("ImageBuffer: channels must be 1 or 3");
    if (data.size() != sample_count())
      throw std::invalid_argument("ImageBuffer: data length does not match width*height*channels");
  }
};

/// Per-pixel real values in [0, 1], row-major.
struct FloatMap {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<float> values;

  FloatMap() = default;
  FloatMap(uint32_t w, uint32_t h, float fill = 0.0f)
      : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

  float& at(uint32_t x, uint32_t y) { return values[static_cast<size_t>(y) * width + x]; }
  float at(uint32_t x, uint32_t y) const { return values[static_cast<size_t>(y) * width + x]; }
};

/// Row-major boolean mask; one byte per pixel, values 0 or 1.
struct BinaryMask {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(uint32_t w, uint32_t h, uint8_t fill = 0)
      : width(w), height(h), bits(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

  uint8_t& at(uint32_t x, uint32_t y) { return bits[static_cast<size_t>(y) * width + x]; }
  uint8_t at(uint32_t x, uint32_t y) const { return bits[static_cast<size_t>(y) * width + x]; }

  size_t count_true() const {
    size_t n = 0;
    for (uint8_t b : bits) n += b ? 1 : 0;
    return n;
  }
};

/// Axis-aligned pixel box, top-left origin, w and h >= 1.
struct BoundingBox {
  uint32_t x = 0;
  uint32_t y = 0;
  uint32_t w = 1;
  uint32_t h = 1;

  uint64_t area() const { return static_cast<uint64_t>(w) * h; }
  uint32_t right() const { return x + w; }   // exclusive
  uint32_t bottom() const { return y + h; }  // exclusive

  bool contains(const BoundingBox& o) const {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
  }

  friend bool operator==(const BoundingBox& a, const BoundingBox& b) {
    return a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
  }
};

/// Intersection-over-union of two boxes; 0 when disjoint.
inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const uint32_t ix0 = std::max(a.x, b.x);
  const uint32_t iy0 = std::max(a.y, b.y);
  const uint32_t ix1 = std::min(a.right(), b.right());
  const uint32_t iy1 = std::min(a.bottom(), b.bottom());
  if (ix1 <= ix0 || iy1 <= iy0) return 0.0;
  const uint64_t inter = static_cast<uint64_t>(ix1 - ix0) * (iy1 - iy0);
  const uint64_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// One frame of a capture burst.
struct BurstFrame {
  std::string image_id;
  ImageBuffer image;
  double timestamp = 0.0;  // seconds
};

/// Ordered frames from one camera trigger. All frames share one shape and
/// timestamps are non-decreasing.
struct BurstSequence {
  std::string camera_id;
  std::vector<BurstFrame> frames;

  size_t size() const { return frames.size(); }

  void validate() const {
    if (frames.empty()) throw std::invalid_argument("BurstSequence: empty sequence");
    for (size_t i = 0; i < frames.size(); ++i) {
      frames[i].image.validate();
      if (!frames[i].image.same_shape(frames[0].image))
        throw std::invalid_argument("BurstSequence: frames differ in shape");
      if (i > 0 && frames[i].timestamp < frames[i - 1].timestamp)
        throw std::invalid_argument("BurstSequence: timestamps decrease");
    }
  }
};

/// Rec.601 luma conversion; identity for single-channel input.
inline ImageBuffer to_grayscale(const ImageBuffer& img) {
  if (img.channels == 1) return img;
  ImageBuffer out(img.width, img.height, 1);
  const uint8_t* src = img.data.data();
  for (size_t p = 0; p < out.data.size(); ++p, src += 3) {
    const double luma = 0.299 * src[0] + 0.587 * src[1] + 0.114 * src[2];
    out.data[p] = static_cast<uint8_t>(std::lround(luma));
  }
  return out;
}

}  // namespace burstbox
