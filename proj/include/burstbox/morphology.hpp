#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "burstbox/image.hpp"

namespace burstbox {

namespace detail {

inline void check_kernel(uint32_t kernel) {
  if (kernel < 1 || kernel % 2 == 0)
    throw std::invalid_argument("morphology: kernel must be odd and >= 1");
}

/// van Herk / Gil-Werman running extreme over a centered window of 2r+1.
/// The input is copied into a zero-padded buffer, then block prefix/suffix
/// scans give each output in O(1) regardless of r. Out-of-image pixels are
/// false, for the max (dilate) and the min (erode) alike.
struct RunningExtreme {
  std::vector<uint8_t> padded;
  std::vector<uint8_t> fwd;  // extreme of [block_start .. j]
  std::vector<uint8_t> rev;  // extreme of [j .. block_end]

  template <bool Maximum>
  void filter(const uint8_t* in, size_t in_stride, uint8_t* out, size_t out_stride,
              size_t n, size_t radius) {
    if (radius == 0) {
      for (size_t i = 0; i < n; ++i) out[i * out_stride] = in[i * in_stride];
      return;
    }
    const size_t k = 2 * radius + 1;
    const size_t len = n + 2 * radius;
    padded.assign(len, 0);
    for (size_t i = 0; i < n; ++i) padded[radius + i] = in[i * in_stride];

    fwd.resize(len);
    rev.resize(len);
    for (size_t b = 0; b < len; b += k) {
      const size_t e = std::min(b + k, len);
      uint8_t acc = padded[b];
      fwd[b] = acc;
      for (size_t j = b + 1; j < e; ++j) {
        acc = Maximum ? std::max(acc, padded[j]) : std::min(acc, padded[j]);
        fwd[j] = acc;
      }
      acc = padded[e - 1];
      rev[e - 1] = acc;
      for (size_t j = e - 1; j-- > b;) {
        acc = Maximum ? std::max(acc, padded[j]) : std::min(acc, padded[j]);
        rev[j] = acc;
      }
    }
    // window for output i spans padded [i, i + 2r]: at most two adjacent blocks
    for (size_t i = 0; i < n; ++i) {
      const uint8_t a = rev[i];
      const uint8_t b = fwd[i + 2 * radius];
      out[i * out_stride] = Maximum ? std::max(a, b) : std::min(a, b);
    }
  }
};

template <bool Maximum>
BinaryMask square_filter(const BinaryMask& mask, uint32_t kernel) {
  check_kernel(kernel);
  const size_t r = kernel / 2;
  BinaryMask mid(mask.width, mask.height);
  BinaryMask out(mask.width, mask.height);
  RunningExtreme re;
  for (uint32_t y = 0; y < mask.height; ++y) {
    const size_t row = static_cast<size_t>(y) * mask.width;
    re.filter<Maximum>(mask.bits.data() + row, 1, mid.bits.data() + row, 1, mask.width, r);
  }
  for (uint32_t x = 0; x < mask.width; ++x) {
    re.filter<Maximum>(mid.bits.data() + x, mask.width, out.bits.data() + x, mask.width,
                       mask.height, r);
  }
  return out;
}

}  // namespace detail

/// Square dilation: true iff any pixel of the kernel x kernel neighborhood is
/// true. Separable running-max, per-pixel cost independent of kernel size.
inline BinaryMask dilate(const BinaryMask& mask, uint32_t kernel) {
  return detail::square_filter<true>(mask, kernel);
}

/// Square erosion: true iff every pixel of the neighborhood is true, with
/// out-of-image pixels counting as false.
inline BinaryMask erode(const BinaryMask& mask, uint32_t kernel) {
  return detail::square_filter<false>(mask, kernel);
}

/// Brute-force neighborhood scans. Reference implementations the fast path is
/// checked against bit-for-bit; also fine for tiny masks.
inline BinaryMask dilate_naive(const BinaryMask& mask, uint32_t kernel) {
  detail::check_kernel(kernel);
  const int64_t r = kernel / 2;
  const int64_t w = mask.width, h = mask.height;
  BinaryMask out(mask.width, mask.height);
  for (int64_t y = 0; y < h; ++y) {
    for (int64_t x = 0; x < w; ++x) {
      uint8_t hit = 0;
      const int64_t y0 = std::max<int64_t>(0, y - r), y1 = std::min(h - 1, y + r);
      const int64_t x0 = std::max<int64_t>(0, x - r), x1 = std::min(w - 1, x + r);
      for (int64_t yy = y0; yy <= y1 && !hit; ++yy)
        for (int64_t xx = x0; xx <= x1; ++xx)
          if (mask.bits[yy * w + xx]) { hit = 1; break; }
      out.bits[y * w + x] = hit;
    }
  }
  return out;
}

inline BinaryMask erode_naive(const BinaryMask& mask, uint32_t kernel) {
  detail::check_kernel(kernel);
  const int64_t r = kernel / 2;
  const int64_t w = mask.width, h = mask.height;
  BinaryMask out(mask.width, mask.height);
  for (int64_t y = 0; y < h; ++y) {
    for (int64_t x = 0; x < w; ++x) {
      // any window reaching outside the image contains a false pixel
      uint8_t all = (y - r >= 0 && y + r < h && x - r >= 0 && x + r < w) ? 1 : 0;
      for (int64_t yy = y - r; yy <= y + r && all; ++yy)
        for (int64_t xx = x - r; xx <= x + r; ++xx)
          if (!mask.bits[yy * w + xx]) { all = 0; break; }
      out.bits[y * w + x] = all;
    }
  }
  return out;
}

}  // namespace burstbox
