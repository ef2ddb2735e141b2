#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "burstbox/annotate.hpp"
#include "burstbox/image.hpp"
#include "burstbox/io/coco.hpp"
#include "burstbox/io/idx.hpp"
#include "burstbox/io/image_codec.hpp"
#include "burstbox/io/ingest.hpp"
#include "burstbox/parallel.hpp"
#include "burstbox/rng.hpp"

namespace burstbox {

// One configuration of the tiny-object testbed: scatter `digit_count` MNIST
// digits on a black canvas and ask whether a '3' is among them. The canvas
// side controls the object-to-image ratio (a 28x28 digit on side^2 pixels).
struct TestbedSpec {
  double o2i = 0.0;
  uint32_t canvas_side = 0;
  uint32_t digit_count = 0;
  uint32_t n_train = 0;
  uint32_t n_val = 0;
  uint32_t n_test = 0;
  double positive_fraction = 0.5;
  uint64_t seed = 1;
  double max_pair_overlap_iou = 0.25;

  void validate() const {
    if (canvas_side < 28)
      throw std::invalid_argument("TestbedSpec: canvas_side must be >= 28");
    if (digit_count == 0) throw std::invalid_argument("TestbedSpec: digit_count must be >= 1");
    const double expected = 784.0 / (double(canvas_side) * canvas_side);
    if (std::abs(o2i - expected) > 0.005)
      throw std::invalid_argument("TestbedSpec: o2i deviates from 784/side^2 by more than 0.5pp");
    if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0))
      throw std::invalid_argument("TestbedSpec: positive_fraction must be in [0,1]");
    if (!(max_pair_overlap_iou >= 0.0 && max_pair_overlap_iou <= 1.0))
      throw std::invalid_argument("TestbedSpec: max_pair_overlap_iou must be in [0,1]");
  }
};

/// The four standard configurations: digit clouds of {3, 6, 26, 101} on
/// canvases of side {64, 128, 256, 512}, giving object-to-image ratios of
/// roughly 19.1%, 4.8%, 1.2%, and 0.3%.
inline std::vector<TestbedSpec> standard_specs(uint64_t seed = 1) {
  std::vector<TestbedSpec> specs;
  const std::pair<uint32_t, uint32_t> side_digits[] = {{64, 3}, {128, 6}, {256, 26}, {512, 101}};
  for (const auto& [side, digits] : side_digits) {
    TestbedSpec spec;
    spec.o2i = 784.0 / (double(side) * side);
    spec.canvas_side = side;
    spec.digit_count = digits;
    spec.n_train = 11276;
    spec.n_val = 1972;
    spec.n_test = 4040;
    spec.seed = seed;
    specs.push_back(spec);
  }
  return specs;
}

struct TestbedSample {
  ImageBuffer canvas;
  bool positive = false;
  std::vector<BoundingBox> target_boxes;  // boxes of '3' digits
  std::vector<std::pair<uint8_t, BoundingBox>> placements;  // every digit placed
};

// Digit pool partitioned by whether the digit is the target class '3'.
struct DigitPool {
  std::vector<const DigitSample*> threes;
  std::vector<const DigitSample*> others;
};

inline DigitPool build_pool(const std::vector<DigitSample>& digits) {
  DigitPool pool;
  for (const DigitSample& d : digits) (d.label == 3 ? pool.threes : pool.others).push_back(&d);
  return pool;
}

/// Compose one canvas. Positives carry exactly one '3'; the rest of the cloud
/// comes from non-3 classes. Digit positions are rejection-sampled so box
/// pairs overlap at IoU <= max_pair_overlap_iou (best effort: after 1000
/// attempts the last candidate is accepted).
inline TestbedSample generate_sample(const TestbedSpec& spec, const DigitPool& pool,
                                     bool want_positive, SplitMix64& rng) {
  spec.validate();
  if (want_positive && pool.threes.empty())
    throw std::runtime_error("generate_sample: digit pool has no '3' digits");
  const uint32_t needed_others = spec.digit_count - (want_positive ? 1 : 0);
  if (needed_others > 0 && pool.others.empty())
    throw std::runtime_error("generate_sample: digit pool has no non-'3' digits");

  TestbedSample sample;
  sample.canvas = ImageBuffer(spec.canvas_side, spec.canvas_side, 1);
  sample.positive = want_positive;
  const size_t three_slot = want_positive ? rng.below(spec.digit_count) : spec.digit_count;

  for (uint32_t slot = 0; slot < spec.digit_count; ++slot) {
    const DigitSample& digit = slot == three_slot
                                   ? *pool.threes[rng.below(pool.threes.size())]
                                   : *pool.others[rng.below(pool.others.size())];
    if (digit.image.width > spec.canvas_side || digit.image.height > spec.canvas_side)
      throw std::runtime_error("generate_sample: digit larger than canvas");

    BoundingBox box{0, 0, digit.image.width, digit.image.height};
    for (int attempt = 0; attempt < 1000; ++attempt) {
      box.x = uint32_t(rng.below(spec.canvas_side - digit.image.width + 1));
      box.y = uint32_t(rng.below(spec.canvas_side - digit.image.height + 1));
      bool ok = true;
      for (const auto& [_, placed] : sample.placements)
        if (box_iou(box, placed) > spec.max_pair_overlap_iou) {
          ok = false;
          break;
        }
      if (ok) break;
    }

    for (uint32_t y = 0; y < digit.image.height; ++y)
      for (uint32_t x = 0; x < digit.image.width; ++x) {
        uint8_t& dst = sample.canvas.at(box.x + x, box.y + y);
        dst = std::max(dst, digit.image.at(x, y));
      }
    sample.placements.emplace_back(digit.label, box);
    if (digit.label == 3) sample.target_boxes.push_back(box);
  }
  return sample;
}

namespace detail {

inline std::string sample_id(const char* split, size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%06zu", split, index);
  return buf;
}

inline uint32_t positive_quota(uint32_t n, double fraction) {
  // ceil with a small epsilon so 0.5 * odd counts lands on "positives get
  // the extra one"
  return uint32_t(std::ceil(fraction * n - 1e-9));
}

}  // namespace detail

/// Generate the full dataset for one spec: PNGs under train/val/test, one
/// labels CSV, one COCO file of '3' boxes, and a manifest. Train and val
/// canvases draw digits from the training pool, test canvases from the test
/// pool. Every sample derives its own RNG stream from (seed, split, index),
/// so results are byte-identical for any worker count.
inline nlohmann::json generate_dataset(const TestbedSpec& spec,
                                       const std::vector<DigitSample>& train_digits,
                                       const std::vector<DigitSample>& test_digits,
                                       const std::filesystem::path& out_dir,
                                       size_t workers = 1) {
  spec.validate();
  const DigitPool train_pool = build_pool(train_digits);
  const DigitPool test_pool = build_pool(test_digits);

  struct SplitPlan {
    const char* name;
    uint32_t count;
    const DigitPool* pool;
    uint64_t stream_base;
  };
  const SplitPlan plans[] = {{"train", spec.n_train, &train_pool, 0},
                             {"val", spec.n_val, &train_pool, uint64_t(1) << 40},
                             {"test", spec.n_test, &test_pool, uint64_t(2) << 40}};

  struct Row {
    std::string image_id;
    const char* split;
    bool positive;
    std::optional<BoundingBox> box;
  };
  std::vector<Row> rows(size_t(spec.n_train) + spec.n_val + spec.n_test);

  for (const SplitPlan& plan : plans)
    std::filesystem::create_directories(out_dir / plan.name);

  size_t base = 0;
  for (const SplitPlan& plan : plans) {
    const uint32_t quota = detail::positive_quota(plan.count, spec.positive_fraction);
    parallel_for(plan.count, workers, [&, base](size_t i) {
      SplitMix64 rng = SplitMix64::derive(spec.seed, plan.stream_base | uint64_t(i));
      const bool positive = i < quota;
      const TestbedSample sample = generate_sample(spec, *plan.pool, positive, rng);

      Row& row = rows[base + i];
      row.image_id = detail::sample_id(plan.name, i);
      row.split = plan.name;
      row.positive = positive;
      if (!sample.target_boxes.empty()) row.box = sample.target_boxes.front();
      write_png(out_dir / plan.name / (row.image_id + ".png"), sample.canvas);
    });
    base += plan.count;
  }

  std::ofstream labels_csv(out_dir / "labels.csv", std::ios::binary);
  if (!labels_csv)
    throw std::runtime_error("generate_dataset: cannot open " +
                             (out_dir / "labels.csv").string());
  labels_csv << "image_id,label\n";
  for (const Row& row : rows) labels_csv << row.image_id << "," << (row.positive ? 1 : 0) << "\n";
  labels_csv.close();

  IngestManifest manifest;
  manifest.root_dir = out_dir;
  LabelMapping labels;
  labels.class_names[1] = "3";
  std::vector<WeakAnnotation> annos;
  annos.reserve(rows.size());
  for (const Row& row : rows) {
    ImageRecord rec;
    rec.image_id = row.image_id;
    rec.path = out_dir / row.split / (row.image_id + ".png");
    rec.camera_id = row.split;
    rec.width = spec.canvas_side;
    rec.height = spec.canvas_side;
    manifest.images.push_back(std::move(rec));
    labels.entries[row.image_id] = row.positive ? 1 : 0;

    WeakAnnotation anno;
    anno.image_id = row.image_id;
    if (row.box) {
      anno.class_id = 1;
      anno.box = row.box;
      anno.status = AnnotationStatus::BOX_AND_ANIMAL;
    }
    annos.push_back(std::move(anno));
  }
  write_coco(build_coco_document(annos, manifest, labels), out_dir / "boxes.json");

  nlohmann::json counts;
  for (const SplitPlan& plan : plans) {
    const uint32_t quota = detail::positive_quota(plan.count, spec.positive_fraction);
    counts[plan.name] = {{"total", plan.count},
                         {"positive", quota},
                         {"negative", plan.count - quota}};
  }
  const nlohmann::json doc = {{"counts", counts},
                              {"spec",
                               {{"o2i", spec.o2i},
                                {"canvas_side", spec.canvas_side},
                                {"digit_count", spec.digit_count},
                                {"n_train", spec.n_train},
                                {"n_val", spec.n_val},
                                {"n_test", spec.n_test},
                                {"positive_fraction", spec.positive_fraction},
                                {"seed", spec.seed},
                                {"max_pair_overlap_iou", spec.max_pair_overlap_iou}}}};
  std::ofstream manifest_out(out_dir / "manifest.json", std::ios::binary);
  if (!manifest_out)
    throw std::runtime_error("generate_dataset: cannot open " +
                             (out_dir / "manifest.json").string());
  manifest_out << doc.dump(2) << "\n";
  return doc;
}

}  // namespace burstbox
