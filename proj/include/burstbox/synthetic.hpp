#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstbox/image.hpp"
#include "burstbox/rng.hpp"

namespace burstbox {

// Seeded stand-in for real camera-trap bursts: a textured static background,
// a moving bright square with exact known boxes, and optional noise modeled
// on the usual false-positive sources (rain, bugs, lighting).
struct SyntheticBurstSpec {
  uint32_t width = 512;
  uint32_t height = 512;
  size_t n_frames = 3;
  uint32_t object_size = 40;   // 0: no object, only background and noise
  uint32_t displacement = 60;  // pixels per frame, applied per axis
  double salt_pepper_rate = 0.0;
  int brightness_jitter = 0;  // per-frame uniform offset in [-j, +j]
  double distractor_rate = 0.0;  // chance of a small transient blob per frame
  uint64_t seed = 1;
};

struct SyntheticBurst {
  BurstSequence burst;
  std::vector<std::optional<BoundingBox>> truth;  // per-frame object box
};

namespace detail {

// value-noise texture: random lattice every 16 px, bilinear in between;
// levels span [40, 140] so a gray-230 object keeps >= 64 levels of contrast
inline ImageBuffer value_noise_background(uint32_t width, uint32_t height, SplitMix64& rng) {
  constexpr uint32_t kCell = 16;
  const uint32_t lw = width / kCell + 2;
  const uint32_t lh = height / kCell + 2;
  std::vector<uint8_t> lattice(size_t(lw) * lh);
  for (uint8_t& v : lattice) v = uint8_t(40 + rng.below(101));

  ImageBuffer img(width, height, 1);
  for (uint32_t y = 0; y < height; ++y) {
    const uint32_t cy = y / kCell;
    const float fy = float(y % kCell) / kCell;
    for (uint32_t x = 0; x < width; ++x) {
      const uint32_t cx = x / kCell;
      const float fx = float(x % kCell) / kCell;
      const float v00 = lattice[size_t(cy) * lw + cx];
      const float v10 = lattice[size_t(cy) * lw + cx + 1];
      const float v01 = lattice[size_t(cy + 1) * lw + cx];
      const float v11 = lattice[size_t(cy + 1) * lw + cx + 1];
      const float top = v00 + (v10 - v00) * fx;
      const float bottom = v01 + (v11 - v01) * fx;
      img.data[size_t(y) * width + x] = uint8_t(top + (bottom - top) * fy + 0.5f);
    }
  }
  return img;
}

inline void fill_square(ImageBuffer& img, uint32_t x0, uint32_t y0, uint32_t side, uint8_t value) {
  for (uint32_t y = y0; y < y0 + side; ++y)
    for (uint32_t x = x0; x < x0 + side; ++x) img.data[size_t(y) * img.width + x] = value;
}

}  // namespace detail

/// Generate one burst plus exact per-frame truth boxes. Everything derives
/// from the spec's seed; identical specs produce identical bursts.
inline SyntheticBurst generate_burst(const SyntheticBurstSpec& spec) {
  if (spec.n_frames == 0) throw std::invalid_argument("generate_burst: n_frames must be >= 1");
  if (spec.width == 0 || spec.height == 0)
    throw std::invalid_argument("generate_burst: empty frame");

  SplitMix64 rng(spec.seed);
  const ImageBuffer background = detail::value_noise_background(spec.width, spec.height, rng);

  // pick a direction and a start so the whole trajectory stays one pixel off
  // the border
  int dx = 0, dy = 0;
  std::vector<std::pair<uint32_t, uint32_t>> positions;
  if (spec.object_size > 0) {
    while (dx == 0 && dy == 0) {
      dx = int(rng.below(3)) - 1;
      dy = int(rng.below(3)) - 1;
    }
    const int64_t travel = int64_t(spec.n_frames - 1) * spec.displacement;
    auto start_range = [&](uint32_t extent, int dir, int64_t& lo, int64_t& hi) {
      lo = 1 + (dir < 0 ? travel : 0);
      hi = int64_t(extent) - 1 - spec.object_size - (dir > 0 ? travel : 0);
    };
    int64_t x_lo, x_hi, y_lo, y_hi;
    start_range(spec.width, dx, x_lo, x_hi);
    start_range(spec.height, dy, y_lo, y_hi);
    if (x_hi < x_lo || y_hi < y_lo)
      throw std::invalid_argument("generate_burst: object would exit frame");
    const int64_t x0 = x_lo + int64_t(rng.below(uint64_t(x_hi - x_lo + 1)));
    const int64_t y0 = y_lo + int64_t(rng.below(uint64_t(y_hi - y_lo + 1)));
    for (size_t f = 0; f < spec.n_frames; ++f)
      positions.emplace_back(uint32_t(x0 + int64_t(f) * spec.displacement * dx),
                             uint32_t(y0 + int64_t(f) * spec.displacement * dy));
  }

  SyntheticBurst out;
  out.burst.camera_id = "synthetic";
  for (size_t f = 0; f < spec.n_frames; ++f) {
    BurstFrame frame;
    frame.image_id = "s" + std::to_string(spec.seed) + "_f" + std::to_string(f);
    frame.timestamp = double(f);
    frame.image = background;
    if (spec.object_size > 0) {
      const auto [ox, oy] = positions[f];
      detail::fill_square(frame.image, ox, oy, spec.object_size, 230);
      out.truth.emplace_back(BoundingBox{ox, oy, spec.object_size, spec.object_size});
    } else {
      out.truth.emplace_back(std::nullopt);
    }

    if (spec.distractor_rate > 0.0 && rng.chance(spec.distractor_rate)) {
      constexpr uint32_t kBlob = 10;
      const uint32_t bx = uint32_t(rng.below(spec.width - kBlob));
      const uint32_t by = uint32_t(rng.below(spec.height - kBlob));
      detail::fill_square(frame.image, bx, by, kBlob, 220);
    }
    if (spec.brightness_jitter > 0) {
      const int offset =
          int(rng.below(2 * uint64_t(spec.brightness_jitter) + 1)) - spec.brightness_jitter;
      for (uint8_t& v : frame.image.data) v = uint8_t(std::clamp(int(v) + offset, 0, 255));
    }
    if (spec.salt_pepper_rate > 0.0) {
      for (uint8_t& v : frame.image.data)
        if (rng.chance(spec.salt_pepper_rate)) v = rng.below(2) ? 255 : 0;
    }
    out.burst.frames.push_back(std::move(frame));
  }
  return out;
}

}  // namespace burstbox
