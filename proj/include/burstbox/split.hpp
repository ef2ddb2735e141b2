#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstbox/annotate.hpp"
#include "burstbox/rng.hpp"

namespace burstbox {

// Per-camera and per-class counts across the three partitions, in the order
// {train, val, test}.
struct SplitReport {
  std::map<std::string, std::array<uint64_t, 3>> per_camera;
  std::map<uint32_t, std::array<uint64_t, 3>> per_class;
};

struct DatasetSplit {
  std::vector<WeakAnnotation> train;
  std::vector<WeakAnnotation> val;
  std::vector<WeakAnnotation> test;
  SplitReport report;
};

/// Camera-wise split: all images from test cameras go to test; the remaining
/// bursts are shuffled with the seed and ceil(val_fraction * #bursts) whole
/// bursts become validation. Bursts never straddle partitions; each partition
/// is sorted by image_id.
inline DatasetSplit split_by_camera(const std::vector<WeakAnnotation>& annos,
                                    const std::map<std::string, std::string>& camera_of,
                                    const std::map<std::string, std::string>& burst_of,
                                    const std::set<std::string>& test_cameras,
                                    double val_fraction = 0.05, uint64_t seed = 1) {
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("split_by_camera: val_fraction must be in [0,1)");

  DatasetSplit split;
  std::map<std::string, std::vector<const WeakAnnotation*>> train_bursts;
  for (const WeakAnnotation& anno : annos) {
    const auto cam = camera_of.find(anno.image_id);
    if (cam == camera_of.end())
      throw std::runtime_error("split_by_camera: no camera for image " + anno.image_id);
    if (test_cameras.count(cam->second)) {
      split.test.push_back(anno);
      continue;
    }
    const auto burst = burst_of.find(anno.image_id);
    if (burst == burst_of.end())
      throw std::runtime_error("split_by_camera: no burst for image " + anno.image_id);
    train_bursts[burst->second].push_back(&anno);
  }
  if (train_bursts.empty()) throw std::runtime_error("split_by_camera: no training data");

  std::vector<std::string> burst_ids;
  burst_ids.reserve(train_bursts.size());
  for (const auto& [id, _] : train_bursts) burst_ids.push_back(id);
  SplitMix64 rng(seed);
  shuffle(burst_ids, rng);

  // small epsilon guards ceil against values like 0.05*100 landing a hair
  // above the exact product
  const size_t n_val =
      static_cast<size_t>(std::ceil(val_fraction * static_cast<double>(burst_ids.size()) - 1e-9));
  for (size_t i = 0; i < burst_ids.size(); ++i) {
    auto& target = i < n_val ? split.val : split.train;
    for (const WeakAnnotation* anno : train_bursts[burst_ids[i]]) target.push_back(*anno);
  }

  auto by_image_id = [](const WeakAnnotation& a, const WeakAnnotation& b) {
    return a.image_id < b.image_id;
  };
  std::sort(split.train.begin(), split.train.end(), by_image_id);
  std::sort(split.val.begin(), split.val.end(), by_image_id);
  std::sort(split.test.begin(), split.test.end(), by_image_id);

  const std::array<const std::vector<WeakAnnotation>*, 3> parts = {&split.train, &split.val,
                                                                   &split.test};
  for (size_t p = 0; p < parts.size(); ++p) {
    for (const WeakAnnotation& anno : *parts[p]) {
      split.report.per_camera[camera_of.at(anno.image_id)][p] += 1;
      split.report.per_class[anno.class_id][p] += 1;
    }
  }
  return split;
}

}  // namespace burstbox
