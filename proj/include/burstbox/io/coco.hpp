#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "burstbox/annotate.hpp"
#include "burstbox/io/ingest.hpp"

namespace burstbox {

struct CocoImage {
  int64_t id = 0;
  std::string file_name;
  uint32_t width = 0;
  uint32_t height = 0;
};

struct CocoCategory {
  int64_t id = 0;
  std::string name;
};

struct CocoAnnotation {
  int64_t id = 0;
  int64_t image_id = 0;
  int64_t category_id = 0;
  std::array<uint32_t, 4> bbox = {0, 0, 0, 0};  // x, y, w, h
  uint64_t area = 0;
  int iscrowd = 0;
};

struct CocoDocument {
  std::vector<CocoImage> images;
  std::vector<CocoCategory> categories;
  std::vector<CocoAnnotation> annotations;
};

/// Assemble a COCO document from annotations. Every annotated image appears
/// in `images` (sorted by image_id, ids assigned 1..N); only BOX_AND_ANIMAL
/// annotations produce records in `annotations`. Categories cover every class
/// >= 1 known to the mapping so ids stay consistent across split files.
inline CocoDocument build_coco_document(const std::vector<WeakAnnotation>& annos,
                                        const IngestManifest& manifest,
                                        const LabelMapping& labels) {
  std::map<std::string, const ImageRecord*> records;
  for (const ImageRecord& rec : manifest.images) records[rec.image_id] = &rec;

  std::vector<const WeakAnnotation*> ordered;
  ordered.reserve(annos.size());
  for (const WeakAnnotation& anno : annos) ordered.push_back(&anno);
  std::sort(ordered.begin(), ordered.end(),
            [](const WeakAnnotation* a, const WeakAnnotation* b) {
              return a->image_id < b->image_id;
            });

  CocoDocument doc;
  std::map<std::string, int64_t> image_ids;
  for (const WeakAnnotation* anno : ordered) {
    const auto it = records.find(anno->image_id);
    if (it == records.end())
      throw std::runtime_error("export_coco: image '" + anno->image_id + "' not in manifest");
    const ImageRecord& rec = *it->second;
    CocoImage img;
    img.id = static_cast<int64_t>(doc.images.size()) + 1;
    img.file_name =
        std::filesystem::relative(rec.path, manifest.root_dir).generic_string();
    img.width = rec.width;
    img.height = rec.height;
    image_ids[rec.image_id] = img.id;
    doc.images.push_back(std::move(img));
  }

  std::map<int64_t, std::string> categories;
  for (const auto& [_, class_id] : labels.entries)
    if (class_id >= 1) categories[class_id];
  for (const auto& [class_id, name] : labels.class_names)
    if (class_id >= 1) categories[class_id] = name;
  for (auto& [id, name] : categories) {
    if (name.empty()) name = std::to_string(id);
    doc.categories.push_back(CocoCategory{id, name});
  }

  for (const WeakAnnotation* anno : ordered) {
    if (anno->status != AnnotationStatus::BOX_AND_ANIMAL) continue;
    const BoundingBox& box = *anno->box;
    CocoAnnotation record;
    record.id = static_cast<int64_t>(doc.annotations.size()) + 1;
    record.image_id = image_ids.at(anno->image_id);
    record.category_id = anno->class_id;
    record.bbox = {box.x, box.y, box.w, box.h};
    record.area = box.area();
    doc.annotations.push_back(record);
  }
  return doc;
}

/// Serialize with sorted keys and fixed integer formatting; identical
/// documents always produce identical bytes.
inline void write_coco(const CocoDocument& doc, const std::filesystem::path& path) {
  nlohmann::json j;
  j["images"] = nlohmann::json::array();
  for (const CocoImage& img : doc.images)
    j["images"].push_back({{"id", img.id},
                           {"file_name", img.file_name},
                           {"width", img.width},
                           {"height", img.height}});
  j["categories"] = nlohmann::json::array();
  for (const CocoCategory& cat : doc.categories)
    j["categories"].push_back({{"id", cat.id}, {"name", cat.name}});
  j["annotations"] = nlohmann::json::array();
  for (const CocoAnnotation& a : doc.annotations)
    j["annotations"].push_back({{"id", a.id},
                                {"image_id", a.image_id},
                                {"category_id", a.category_id},
                                {"bbox", a.bbox},
                                {"area", a.area},
                                {"iscrowd", a.iscrowd}});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_coco: cannot open " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write_coco: write failed for " + path.string());
}

inline CocoDocument parse_coco(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_coco: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("parse_coco: " + path.string() + ": " + e.what());
  }

  CocoDocument doc;
  try {
    for (const auto& img : j.at("images"))
      doc.images.push_back(CocoImage{img.at("id").get<int64_t>(),
                                     img.at("file_name").get<std::string>(),
                                     img.at("width").get<uint32_t>(),
                                     img.at("height").get<uint32_t>()});
    for (const auto& cat : j.at("categories"))
      doc.categories.push_back(
          CocoCategory{cat.at("id").get<int64_t>(), cat.at("name").get<std::string>()});
    for (const auto& a : j.at("annotations")) {
      CocoAnnotation record;
      record.id = a.at("id").get<int64_t>();
      record.image_id = a.at("image_id").get<int64_t>();
      record.category_id = a.at("category_id").get<int64_t>();
      const auto& bbox = a.at("bbox");
      if (bbox.size() != 4)
        throw std::runtime_error("parse_coco: " + path.string() + ": bbox must have 4 elements");
      for (size_t i = 0; i < 4; ++i) record.bbox[i] = bbox.at(i).get<uint32_t>();
      record.area = a.at("area").get<uint64_t>();
      record.iscrowd = a.at("iscrowd").get<int>();
      doc.annotations.push_back(record);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("parse_coco: " + path.string() + ": " + e.what());
  }
  return doc;
}

}  // namespace burstbox
