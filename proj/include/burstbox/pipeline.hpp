#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "burstbox/annotate.hpp"
#include "burstbox/io/coco.hpp"
#include "burstbox/io/image_codec.hpp"
#include "burstbox/io/ingest.hpp"
#include "burstbox/io/mapping.hpp"
#include "burstbox/io/training_manifest.hpp"
#include "burstbox/localizer.hpp"
#include "burstbox/parallel.hpp"
#include "burstbox/split.hpp"

namespace burstbox {

struct PipelineConfig {
  std::filesystem::path image_root;
  std::filesystem::path mapping_path;
  std::filesystem::path out_dir;
  LocalizerConfig localizer;
  IngestConfig ingest;
  FnPolicy fn_policy = FnPolicy::KEEP_AS_UNLOCALIZED;
  std::set<std::string> test_cameras;
  double val_fraction = 0.05;
  uint64_t seed = 1;
  size_t workers = 1;
  std::filesystem::path debug_dump_dir;  // empty: no per-step image dump
};

/// Overlay settings from a key-sorted JSON config onto cfg. Only known keys
/// are accepted; paths given on the command line win over the file.
inline void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "image_root") cfg.image_root = value.get<std::string>();
    else if (key == "mapping") cfg.mapping_path = value.get<std::string>();
    else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
    else if (key == "threshold_t") cfg.localizer.threshold_t = value.get<double>();
    else if (key == "erosion_kernel") cfg.localizer.erosion_kernel = value.get<uint32_t>();
    else if (key == "dilation_kernel") cfg.localizer.dilation_kernel = value.get<uint32_t>();
    else if (key == "connectivity") cfg.localizer.connectivity = value.get<int>();
    else if (key == "min_component_area")
      cfg.localizer.min_component_area = value.get<uint64_t>();
    else if (key == "max_components") cfg.localizer.max_components = value.get<size_t>();
    else if (key == "tighten_boxes") cfg.localizer.tighten_boxes = value.get<bool>();
    else if (key == "timestamp_regex") cfg.ingest.timestamp_regex = value.get<std::string>();
    else if (key == "use_mtime") cfg.ingest.use_mtime = value.get<bool>();
    else if (key == "gap_seconds") cfg.ingest.gap_seconds = value.get<double>();
    else if (key == "max_burst") cfg.ingest.max_burst = value.get<size_t>();
    else if (key == "fn_policy") {
      const std::string policy = value.get<std::string>();
      if (policy == "keep_as_unlocalized") cfg.fn_policy = FnPolicy::KEEP_AS_UNLOCALIZED;
      else if (policy == "exclude") cfg.fn_policy = FnPolicy::EXCLUDE;
      else throw std::runtime_error("config: unknown fn_policy '" + policy + "'");
    } else if (key == "test_cameras") {
      cfg.test_cameras.clear();
      for (const auto& cam : value) cfg.test_cameras.insert(cam.get<std::string>());
    } else if (key == "val_fraction") cfg.val_fraction = value.get<double>();
    else if (key == "seed") cfg.seed = value.get<uint64_t>();
    else if (key == "workers") cfg.workers = value.get<size_t>();
    else if (key == "debug_dump_dir") cfg.debug_dump_dir = value.get<std::string>();
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
}

inline nlohmann::json config_to_json(const PipelineConfig& cfg) {
  return {{"image_root", cfg.image_root.generic_string()},
          {"mapping", cfg.mapping_path.generic_string()},
          {"out_dir", cfg.out_dir.generic_string()},
          {"threshold_t", cfg.localizer.threshold_t},
          {"erosion_kernel", cfg.localizer.erosion_kernel},
          {"dilation_kernel", cfg.localizer.dilation_kernel},
          {"connectivity", cfg.localizer.connectivity},
          {"min_component_area", cfg.localizer.min_component_area},
          {"max_components", cfg.localizer.max_components},
          {"tighten_boxes", cfg.localizer.tighten_boxes},
          {"timestamp_regex", cfg.ingest.timestamp_regex},
          {"use_mtime", cfg.ingest.use_mtime},
          {"gap_seconds", cfg.ingest.gap_seconds},
          {"max_burst", cfg.ingest.max_burst},
          {"fn_policy",
           cfg.fn_policy == FnPolicy::EXCLUDE ? "exclude" : "keep_as_unlocalized"},
          {"test_cameras", cfg.test_cameras},
          {"val_fraction", cfg.val_fraction},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"debug_dump_dir", cfg.debug_dump_dir.generic_string()}};
}

struct RunSummary {
  size_t images_scanned = 0;
  size_t images_decoded = 0;
  size_t images_skipped = 0;
  size_t bursts = 0;
  size_t train = 0;
  size_t val = 0;
  size_t test = 0;
  double seconds = 0.0;
  double images_per_sec = 0.0;
};

/// Full annotation run: scan, group bursts, localize (burst-parallel),
/// correct against the mapping, split by camera, and write the three COCO
/// files plus split report, training manifest, and run log.
inline RunSummary run_annotate(const PipelineConfig& cfg) {
  cfg.localizer.validate();
  const auto t0 = std::chrono::steady_clock::now();

  IngestManifest manifest = scan_directory(cfg.image_root, cfg.ingest);
  manifest.bursts = group_bursts(manifest.images, cfg.ingest.gap_seconds, cfg.ingest.max_burst);

  LabelMapping labels = parse_mapping(cfg.mapping_path);
  if (labels.entries.empty())
    throw std::runtime_error("run_annotate: no labels in " + cfg.mapping_path.string());

  std::map<std::string, size_t> image_index;
  for (size_t i = 0; i < manifest.images.size(); ++i)
    image_index[manifest.images[i].image_id] = i;

  // localize burst-by-burst; every result lands in its own slot so worker
  // count never affects output order
  std::vector<std::vector<FrameLocalization>> per_burst(manifest.bursts.size());
  std::vector<std::vector<std::string>> burst_warnings(manifest.bursts.size());
  parallel_for(manifest.bursts.size(), cfg.workers, [&](size_t b) {
    const BurstRecord& record = manifest.bursts[b];
    BurstSequence burst;
    burst.camera_id = record.camera_id;
    for (const std::string& image_id : record.image_ids) {
      ImageRecord& rec = manifest.images[image_index.at(image_id)];
      BurstFrame frame;
      frame.image_id = image_id;
      frame.timestamp = rec.timestamp;
      try {
        frame.image = decode_image(rec.path);
      } catch (const std::exception& e) {
        burst_warnings[b].push_back(std::string("skipped: ") + e.what());
        continue;
      }
      rec.width = frame.image.width;
      rec.height = frame.image.height;
      burst.frames.push_back(std::move(frame));
    }
    if (burst.frames.empty()) return;
    try {
      if (!cfg.debug_dump_dir.empty()) {
        per_burst[b] =
            dump_localization(burst, cfg.localizer, cfg.debug_dump_dir / record.burst_id).frames;
      } else {
        per_burst[b] = localize(burst, cfg.localizer).frames;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("run_annotate: burst " + record.burst_id + ": " + e.what());
    }
  });

  LocalizationResult all;
  for (std::vector<FrameLocalization>& frames : per_burst)
    for (FrameLocalization& frame : frames) all.frames.push_back(std::move(frame));

  RunSummary summary;
  summary.images_scanned = manifest.images.size();
  summary.images_decoded = all.frames.size();
  summary.images_skipped = summary.images_scanned - summary.images_decoded;
  summary.bursts = manifest.bursts.size();

  const std::vector<WeakAnnotation> annos = correct(all, labels, cfg.fn_policy);

  std::map<std::string, std::string> camera_of, burst_of;
  for (const ImageRecord& rec : manifest.images) camera_of[rec.image_id] = rec.camera_id;
  for (const BurstRecord& rec : manifest.bursts)
    for (const std::string& image_id : rec.image_ids) burst_of[image_id] = rec.burst_id;

  const DatasetSplit split = split_by_camera(annos, camera_of, burst_of, cfg.test_cameras,
                                             cfg.val_fraction, cfg.seed);
  summary.train = split.train.size();
  summary.val = split.val.size();
  summary.test = split.test.size();

  std::filesystem::create_directories(cfg.out_dir);
  write_coco(build_coco_document(split.train, manifest, labels), cfg.out_dir / "train.json");
  write_coco(build_coco_document(split.val, manifest, labels), cfg.out_dir / "val.json");
  write_coco(build_coco_document(split.test, manifest, labels), cfg.out_dir / "test.json");
  export_training_manifest(cfg.out_dir / "training_manifest.json");

  nlohmann::json report;
  for (const auto& [camera, counts] : split.report.per_camera)
    report["per_camera"][camera] = {{"train", counts[0]}, {"val", counts[1]}, {"test", counts[2]}};
  for (const auto& [class_id, counts] : split.report.per_class)
    report["per_class"][std::to_string(class_id)] = {{"train", counts[0]},
                                                     {"val", counts[1]},
                                                     {"test", counts[2]}};
  report["images"] = {{"scanned", summary.images_scanned},
                      {"decoded", summary.images_decoded},
                      {"skipped", summary.images_skipped}};
  {
    std::ofstream out(cfg.out_dir / "split_report.json", std::ios::binary);
    if (!out) throw std::runtime_error("run_annotate: cannot write split_report.json");
    out << report.dump(2) << "\n";
  }

  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  summary.images_per_sec =
      summary.seconds > 0 ? double(summary.images_decoded) / summary.seconds : 0.0;

  std::ofstream log(cfg.out_dir / "run.log", std::ios::binary);
  if (log) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    log << "run_annotate at epoch "
        << std::chrono::duration_cast<std::chrono::seconds>(now).count() << "s\n"
        << "image_root " << cfg.image_root.string() << "\n"
        << "images scanned " << summary.images_scanned << ", decoded " << summary.images_decoded
        << ", skipped " << summary.images_skipped << "\n"
        << "bursts " << summary.bursts << "\n";
    for (const std::string& w : manifest.warnings) log << "warning: " << w << "\n";
    for (const std::vector<std::string>& ws : burst_warnings)
      for (const std::string& w : ws) log << "warning: " << w << "\n";
    log << "split train/val/test " << summary.train << "/" << summary.val << "/" << summary.test
        << "\n"
        << "elapsed " << summary.seconds << "s, " << summary.images_per_sec << " images/sec\n";
  }
  return summary;
}

}  // namespace burstbox
