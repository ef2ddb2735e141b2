#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstbox/image.hpp"
#include "burstbox/localizer.hpp"

namespace burstbox {

// Image-level labels from the ecologist's mapping file. Class 0 means the
// image is empty; animal taxa start at 1.
struct LabelMapping {
  std::map<std::string, uint32_t> entries;
  std::map<uint32_t, std::string> class_names;
};

enum class AnnotationStatus : uint8_t {
  BOX_AND_ANIMAL,  // box detected, label says animal: keep box + class
  FP_CORRECTED,    // box detected, label says empty: box discarded
  FN_UNLOCALIZED,  // no box, label says animal: class kept, box missing
  TRUE_EMPTY,      // no box, label says empty
};

inline const char* to_string(AnnotationStatus s) {
  switch (s) {
    case AnnotationStatus::BOX_AND_ANIMAL: return "BOX_AND_ANIMAL";
    case AnnotationStatus::FP_CORRECTED: return "FP_CORRECTED";
    case AnnotationStatus::FN_UNLOCALIZED: return "FN_UNLOCALIZED";
    case AnnotationStatus::TRUE_EMPTY: return "TRUE_EMPTY";
  }
  return "?";
}

struct WeakAnnotation {
  std::string image_id;
  uint32_t class_id = 0;
  std::optional<BoundingBox> box;
  AnnotationStatus status = AnnotationStatus::TRUE_EMPTY;
};

enum class FnPolicy : uint8_t {
  KEEP_AS_UNLOCALIZED,  // keep the image with its class and no box (default)
  EXCLUDE,              // drop the image from the output
};

/// Fuse localizer boxes with image-level labels. Detected boxes on images the
/// label calls empty are discarded; only the largest box survives on animal
/// images.
inline std::vector<WeakAnnotation> correct(const LocalizationResult& loc,
                                           const LabelMapping& labels,
                                           FnPolicy fn_policy = FnPolicy::KEEP_AS_UNLOCALIZED) {
  std::vector<WeakAnnotation> out;
  out.reserve(loc.frames.size());
  for (const FrameLocalization& frame : loc.frames) {
    const auto it = labels.entries.find(frame.image_id);
    if (it == labels.entries.end())
      throw std::runtime_error("correct: no label for image " + frame.image_id);
    const uint32_t class_id = it->second;
    const bool has_box = !frame.boxes.empty();

    WeakAnnotation anno;
    anno.image_id = frame.image_id;
    if (has_box && class_id >= 1) {
      anno.class_id = class_id;
      anno.box = frame.boxes.front();  // boxes are sorted largest first
      anno.status = AnnotationStatus::BOX_AND_ANIMAL;
    } else if (has_box) {
      anno.status = AnnotationStatus::FP_CORRECTED;
    } else if (class_id >= 1) {
      if (fn_policy == FnPolicy::EXCLUDE) continue;
      anno.class_id = class_id;
      anno.status = AnnotationStatus::FN_UNLOCALIZED;
    } else {
      anno.status = AnnotationStatus::TRUE_EMPTY;
    }
    out.push_back(std::move(anno));
  }
  return out;
}

// Ground truth for one image; box absent means the image truly has no animal.
struct TruthEntry {
  std::string image_id;
  std::optional<BoundingBox> box;
  uint32_t class_id = 0;
};

struct QualityReport {
  uint64_t total = 0;
  uint64_t correct_count = 0;  // box matched truth with IoU >= iou_min, or both empty
  uint64_t fp_count = 0;       // a box was produced (even if later corrected away) on an empty image
  uint64_t fn_count = 0;       // truth has an animal but no matching box survived

  double correct_pct() const { return total ? 100.0 * correct_count / total : 0.0; }
  double fp_pct() const { return total ? 100.0 * fp_count / total : 0.0; }
  double fn_pct() const { return total ? 100.0 * fn_count / total : 0.0; }
};

/// Score annotations against exact ground truth. FP counts boxes produced on
/// truly empty images, including ones the correction step already discarded
/// (their FP_CORRECTED status records that a box existed).
inline QualityReport annotation_quality(const std::vector<WeakAnnotation>& annos,
                                        const std::vector<TruthEntry>& truth,
                                        double iou_min = 0.5) {
  std::map<std::string, const TruthEntry*> by_id;
  for (const TruthEntry& t : truth) by_id[t.image_id] = &t;

  QualityReport report;
  report.total = annos.size();
  for (const WeakAnnotation& anno : annos) {
    const auto it = by_id.find(anno.image_id);
    if (it == by_id.end())
      throw std::runtime_error("annotation_quality: no truth for image " + anno.image_id);
    const TruthEntry& t = *it->second;
    if (t.box) {
      const bool matched = anno.status == AnnotationStatus::BOX_AND_ANIMAL &&
                           box_iou(*anno.box, *t.box) >= iou_min;
      matched ? ++report.correct_count : ++report.fn_count;
    } else {
      const bool produced_box = anno.status == AnnotationStatus::BOX_AND_ANIMAL ||
                                anno.status == AnnotationStatus::FP_CORRECTED;
      produced_box ? ++report.fp_count : ++report.correct_count;
    }
  }
  return report;
}

}  // namespace burstbox
