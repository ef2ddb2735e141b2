#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstbox/connected.hpp"
#include "burstbox/image.hpp"
#include "burstbox/io/image_codec.hpp"
#include "burstbox/morphology.hpp"

namespace burstbox {

// Motion-based localization over a burst: median background, per-frame motion
// map, threshold, small erosion to kill salt noise, large dilation to merge
// animal parts, then connected-component boxes.
struct LocalizerConfig {
  double threshold_t = 0.12;
  uint32_t erosion_kernel = 3;
  uint32_t dilation_kernel = 151;
  int connectivity = 8;
  uint64_t min_component_area = 1;
  size_t max_components = 1;
  bool tighten_boxes = false;

  void validate() const {
    if (!(threshold_t > 0.0 && threshold_t < 1.0))
      throw std::invalid_argument("LocalizerConfig: threshold_t must be in (0,1)");
    detail::check_kernel(erosion_kernel);
    detail::check_kernel(dilation_kernel);
    if (connectivity != 4 && connectivity != 8)
      throw std::invalid_argument("LocalizerConfig: connectivity must be 4 or 8");
    if (max_components == 0)
      throw std::invalid_argument("LocalizerConfig: max_components must be >= 1");
  }
};

struct FrameLocalization {
  std::string image_id;
  std::vector<BoundingBox> boxes;       // sorted by component area descending
  std::vector<uint64_t> component_areas;  // parallel to boxes
};

struct LocalizationResult {
  std::vector<FrameLocalization> frames;
};

/// Per-pixel, per-channel median of all frames. Even frame counts take the
/// lower median (index (n-1)/2 of the sorted samples) so values stay in the
/// 8-bit domain.
inline ImageBuffer compute_background(const BurstSequence& burst) {
  if (burst.frames.empty()) throw std::invalid_argument("compute_background: empty sequence");
  burst.validate();
  const ImageBuffer& first = burst.frames.front().image;
  const size_t n = burst.frames.size();
  if (n == 1) return first;

  ImageBuffer bg(first.width, first.height, first.channels);
  const size_t samples = bg.data.size();
  if (n == 3) {
    const uint8_t* a = burst.frames[0].image.data.data();
    const uint8_t* b = burst.frames[1].image.data.data();
    const uint8_t* c = burst.frames[2].image.data.data();
    for (size_t i = 0; i < samples; ++i) {
      const uint8_t lo = std::min(a[i], b[i]);
      const uint8_t hi = std::max(a[i], b[i]);
      bg.data[i] = std::max(lo, std::min(hi, c[i]));
    }
    return bg;
  }

  std::vector<uint8_t> sorted(n);
  const size_t mid = (n - 1) / 2;
  for (size_t i = 0; i < samples; ++i) {
    for (size_t f = 0; f < n; ++f) {
      // insertion sort; bursts are a handful of frames
      uint8_t v = burst.frames[f].image.data[i];
      size_t j = f;
      while (j > 0 && sorted[j - 1] > v) {
        sorted[j] = sorted[j - 1];
        --j;
      }
      sorted[j] = v;
    }
    bg.data[i] = sorted[mid];
  }
  return bg;
}

/// Euclidean distance between frame and background per pixel, over channels,
/// normalized by the maximum possible distance (255 * sqrt(channels)) so the
/// result lies in [0, 1].
inline FloatMap motion_map(const ImageBuffer& frame, const ImageBuffer& background) {
  if (!frame.same_shape(background))
    throw std::invalid_argument("motion_map: frame and background dimensions differ");
  FloatMap map(frame.width, frame.height);
  const size_t c = frame.channels;
  const float inv_norm = 1.0f / (255.0f * std::sqrt(static_cast<float>(c)));
  const size_t pixels = map.values.size();
  for (size_t i = 0; i < pixels; ++i) {
    int sum = 0;
    for (size_t ch = 0; ch < c; ++ch) {
      const int d = static_cast<int>(frame.data[i * c + ch]) -
                    static_cast<int>(background.data[i * c + ch]);
      sum += d * d;
    }
    const float v = std::sqrt(static_cast<float>(sum)) * inv_norm;
    map.values[i] = std::min(v, 1.0f);
  }
  return map;
}

/// Binary mask with bit set iff the map value reaches t (inclusive).
inline BinaryMask threshold(const FloatMap& map, double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("threshold: t must be in (0,1)");
  BinaryMask mask(map.width, map.height);
  const float tf = static_cast<float>(t);
  for (size_t i = 0; i < map.values.size(); ++i) mask.bits[i] = map.values[i] >= tf ? 1 : 0;
  return mask;
}

namespace detail {

// Shrink a component's box to the tight bounds of thresholded pixels that fall
// inside its footprint in the denoised mask. Falls back to the original box if
// the footprint holds no thresholded pixel.
inline BoundingBox tighten_box(const BoundingBox& box, uint32_t label,
                               const std::vector<uint32_t>& labels, const BinaryMask& thresholded) {
  uint32_t minx = UINT32_MAX, miny = UINT32_MAX, maxx = 0, maxy = 0;
  bool any = false;
  const uint32_t w = thresholded.width;
  for (uint32_t y = box.y; y < box.bottom(); ++y) {
    const size_t row = static_cast<size_t>(y) * w;
    for (uint32_t x = box.x; x < box.right(); ++x) {
      if (labels[row + x] == label && thresholded.bits[row + x]) {
        any = true;
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
      }
    }
  }
  if (!any) return box;
  return BoundingBox{minx, miny, maxx - minx + 1, maxy - miny + 1};
}

}  // namespace detail

namespace detail {

inline ImageBuffer mask_to_image(const BinaryMask& mask) {
  ImageBuffer img(mask.width, mask.height, 1);
  for (size_t i = 0; i < mask.bits.size(); ++i) img.data[i] = mask.bits[i] ? 255 : 0;
  return img;
}

inline ImageBuffer map_to_image(const FloatMap& map) {
  ImageBuffer img(map.width, map.height, 1);
  for (size_t i = 0; i < map.values.size(); ++i)
    img.data[i] = static_cast<uint8_t>(std::lround(map.values[i] * 255.0f));
  return img;
}

inline void draw_box(ImageBuffer& rgb, const BoundingBox& box, uint8_t r, uint8_t g, uint8_t b,
                     uint32_t thickness = 2) {
  auto paint = [&](uint32_t x, uint32_t y) {
    if (x >= rgb.width || y >= rgb.height) return;
    rgb.at(x, y, 0) = r;
    rgb.at(x, y, 1) = g;
    rgb.at(x, y, 2) = b;
  };
  for (uint32_t t = 0; t < thickness; ++t) {
    for (uint32_t x = box.x; x < box.right(); ++x) {
      paint(x, box.y + t);
      paint(x, box.bottom() - 1 - t);
    }
    for (uint32_t y = box.y; y < box.bottom(); ++y) {
      paint(box.x + t, y);
      paint(box.right() - 1 - t, y);
    }
  }
}

inline ImageBuffer expand_rgb(const ImageBuffer& img) {
  if (img.channels == 3) return img;
  ImageBuffer out(img.width, img.height, 3);
  for (size_t i = 0; i < img.data.size(); ++i) {
    out.data[i * 3] = img.data[i];
    out.data[i * 3 + 1] = img.data[i];
    out.data[i * 3 + 2] = img.data[i];
  }
  return out;
}

inline std::string frame_tag(size_t index) {
  std::string tag = std::to_string(index);
  while (tag.size() < 2) tag.insert(tag.begin(), '0');
  return tag;
}

inline LocalizationResult run_localization(const BurstSequence& burst, const LocalizerConfig& cfg,
                                           const std::filesystem::path* dump_dir) {
  cfg.validate();
  const ImageBuffer background = compute_background(burst);
  if (dump_dir) write_png(*dump_dir / "background.png", background);

  LocalizationResult result;
  result.frames.reserve(burst.frames.size());
  std::vector<uint32_t> labels;
  for (size_t i = 0; i < burst.frames.size(); ++i) {
    const BurstFrame& frame = burst.frames[i];
    const FloatMap map = motion_map(frame.image, background);
    const BinaryMask thresholded = threshold(map, cfg.threshold_t);
    const BinaryMask eroded = erode(thresholded, cfg.erosion_kernel);
    const BinaryMask denoised = dilate(eroded, cfg.dilation_kernel);
    const std::vector<Component> components = label_components(denoised, cfg.connectivity, &labels);

    FrameLocalization out;
    out.image_id = frame.image_id;
    for (const Component& comp : components) {
      if (comp.area < cfg.min_component_area) continue;
      if (out.boxes.size() == cfg.max_components) break;
      BoundingBox box = comp.box;
      if (cfg.tighten_boxes) box = tighten_box(box, comp.label, labels, thresholded);
      out.boxes.push_back(box);
      out.component_areas.push_back(comp.area);
    }
    if (dump_dir) {
      const std::string tag = frame_tag(i);
      write_png(*dump_dir / ("frame_" + tag + "_motion.png"), map_to_image(map));
      write_png(*dump_dir / ("frame_" + tag + "_threshold.png"), mask_to_image(thresholded));
      write_png(*dump_dir / ("frame_" + tag + "_denoised.png"), mask_to_image(denoised));
      ImageBuffer overlay = expand_rgb(frame.image);
      for (const BoundingBox& box : out.boxes) draw_box(overlay, box, 255, 0, 0);
      write_png(*dump_dir / ("frame_" + tag + "_boxes.png"), overlay);
    }
    result.frames.push_back(std::move(out));
  }
  return result;
}

}  // namespace detail

/// Run the full localization chain over one burst. Pure; safe to call
/// concurrently on distinct bursts.
inline LocalizationResult localize(const BurstSequence& burst, const LocalizerConfig& cfg) {
  return detail::run_localization(burst, cfg, nullptr);
}

/// Run localization and write every intermediate stage as PNG panels: the
/// background, then per frame the motion map (value * 255), the thresholded
/// mask, the denoised mask, and the frame with box overlays.
inline LocalizationResult dump_localization(const BurstSequence& burst, const LocalizerConfig& cfg,
                                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  return detail::run_localization(burst, cfg, &dir);
}

}  // namespace burstbox

