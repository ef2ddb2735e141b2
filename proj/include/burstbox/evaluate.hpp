#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "burstbox/annotate.hpp"
#include "burstbox/io/mapping.hpp"
#include "burstbox/localizer.hpp"

namespace burstbox {

struct PredictionRecord {
  std::string image_id;
  uint32_t predicted_class = 0;
  double posterior = 0.0;
};

// Image-level outcome counts: presence errors (animal vs empty confusions),
// taxa errors (right presence, wrong species), and exact matches.
struct ClassificationReport {
  uint64_t total = 0;
  uint64_t presence_fn_count = 0;  // truth has an animal, predicted empty
  uint64_t presence_fp_count = 0;  // truth empty, predicted an animal
  uint64_t taxa_error_count = 0;   // both animals, different taxa
  uint64_t correct_count = 0;
  std::map<uint32_t, std::map<uint32_t, uint64_t>> confusion;  // truth -> predicted -> count

  double presence_fn_pct() const { return total ? 100.0 * presence_fn_count / total : 0.0; }
  double presence_fp_pct() const { return total ? 100.0 * presence_fp_count / total : 0.0; }
  double taxa_error_pct() const { return total ? 100.0 * taxa_error_count / total : 0.0; }
  double accuracy_pct() const { return total ? 100.0 * correct_count / total : 0.0; }
};

inline ClassificationReport classification_report(const std::vector<PredictionRecord>& preds,
                                                  const LabelMapping& truth) {
  ClassificationReport report;
  report.total = preds.size();
  for (const PredictionRecord& pred : preds) {
    const auto it = truth.entries.find(pred.image_id);
    if (it == truth.entries.end())
      throw std::runtime_error("classification_report: no truth for image " + pred.image_id);
    const uint32_t t = it->second;
    const uint32_t p = pred.predicted_class;
    report.confusion[t][p] += 1;
    if (t >= 1 && p == 0)
      report.presence_fn_count += 1;
    else if (t == 0 && p >= 1)
      report.presence_fp_count += 1;
    else if (t != p)
      report.taxa_error_count += 1;
    else
      report.correct_count += 1;
  }
  return report;
}

/// Image ids ordered least-confident first so reviewers start where the
/// model is most unsure. Ties fall back to lexicographic id order.
inline std::vector<std::string> review_queue(std::vector<PredictionRecord> preds) {
  std::sort(preds.begin(), preds.end(), [](const PredictionRecord& a, const PredictionRecord& b) {
    if (a.posterior != b.posterior) return a.posterior < b.posterior;
    return a.image_id < b.image_id;
  });
  std::vector<std::string> ids;
  ids.reserve(preds.size());
  for (const PredictionRecord& p : preds) ids.push_back(p.image_id);
  return ids;
}

struct LocalizationTruth {
  std::string image_id;
  std::optional<BoundingBox> box;  // absent: the frame truly holds no animal
  std::string tag;                 // optional challenge tag (blur, tiny, ...)
};

struct LocalizationReport {
  uint64_t total = 0;
  uint64_t correct_count = 0;
  uint64_t fp_count = 0;
  uint64_t fn_count = 0;
  // tag -> {correct, fp, fn} counts, for truth files carrying a tag column
  std::map<std::string, std::array<uint64_t, 3>> per_tag;

  double correct_pct() const { return total ? 100.0 * correct_count / total : 0.0; }
  double fp_pct() const { return total ? 100.0 * fp_count / total : 0.0; }
  double fn_pct() const { return total ? 100.0 * fn_count / total : 0.0; }
};

/// Frame-level localization quality: a frame is correct when a predicted box
/// overlaps the truth box at IoU >= iou_min or both sides are boxless; FP is
/// a box on a truly empty frame; FN covers missed and mislocalized animals.
inline LocalizationReport localization_report(const LocalizationResult& loc,
                                              const std::vector<LocalizationTruth>& truth,
                                              double iou_min = 0.5) {
  std::map<std::string, const LocalizationTruth*> by_id;
  for (const LocalizationTruth& t : truth) by_id[t.image_id] = &t;

  LocalizationReport report;
  report.total = loc.frames.size();
  for (const FrameLocalization& frame : loc.frames) {
    const auto it = by_id.find(frame.image_id);
    if (it == by_id.end())
      throw std::runtime_error("localization_report: no truth for image " + frame.image_id);
    const LocalizationTruth& t = *it->second;

    int bucket;  // 0 correct, 1 fp, 2 fn
    if (t.box) {
      double best = 0.0;
      for (const BoundingBox& box : frame.boxes) best = std::max(best, box_iou(box, *t.box));
      bucket = best >= iou_min ? 0 : 2;
    } else {
      bucket = frame.boxes.empty() ? 0 : 1;
    }
    if (bucket == 0)
      report.correct_count += 1;
    else if (bucket == 1)
      report.fp_count += 1;
    else
      report.fn_count += 1;
    if (!t.tag.empty()) report.per_tag[t.tag][bucket] += 1;
  }
  return report;
}

/// Parse the predictions file: CSV `image_id,predicted_class,posterior`.
inline std::vector<PredictionRecord> parse_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_predictions: cannot open " + path.string());
  auto fail = [&](size_t line_no, const std::string& what) -> std::runtime_error {
    return std::runtime_error("parse_predictions: " + path.string() + ":" +
                              std::to_string(line_no) + ": " + what);
  };

  std::vector<PredictionRecord> preds;
  std::map<std::string, size_t> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (line_no == 1) {
      if (fields.size() != 3 || fields[0] != "image_id" || fields[1] != "predicted_class" ||
          fields[2] != "posterior")
        throw fail(line_no, "expected header `image_id,predicted_class,posterior`");
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 3)
      throw fail(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    PredictionRecord rec;
    rec.image_id = fields[0];
    if (rec.image_id.empty()) throw fail(line_no, "empty image_id");
    if (!detail::parse_u32(fields[1], rec.predicted_class))
      throw fail(line_no, "invalid predicted_class '" + fields[1] + "'");
    try {
      size_t used = 0;
      rec.posterior = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw fail(line_no, "invalid posterior '" + fields[2] + "'");
    }
    if (rec.posterior < 0.0 || rec.posterior > 1.0)
      throw fail(line_no, "posterior out of [0,1]: '" + fields[2] + "'");
    if (!seen.emplace(rec.image_id, line_no).second)
      throw fail(line_no, "duplicate image_id '" + rec.image_id + "'");
    preds.push_back(std::move(rec));
  }
  return preds;
}

namespace detail {

inline std::optional<BoundingBox> parse_box_fields(const std::vector<std::string>& fields,
                                                   size_t offset) {
  const bool all_empty = fields[offset].empty() && fields[offset + 1].empty() &&
                         fields[offset + 2].empty() && fields[offset + 3].empty();
  if (all_empty) return std::nullopt;
  std::array<uint32_t, 4> v;
  for (size_t i = 0; i < 4; ++i)
    if (!parse_u32(fields[offset + i], v[i]))
      throw std::invalid_argument("invalid box field '" + fields[offset + i] + "'");
  if (v[2] == 0 || v[3] == 0) throw std::invalid_argument("box w and h must be >= 1");
  return BoundingBox{v[0], v[1], v[2], v[3]};
}

}  // namespace detail

/// Parse a box file: CSV `image_id,x,y,w,h[,tag]`. Empty box fields declare a
/// frame with no box. Multiple rows per image are allowed (multiple boxes);
/// used both for localization truth and for predicted boxes.
inline std::vector<LocalizationTruth> parse_boxes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_boxes: cannot open " + path.string());
  auto fail = [&](size_t line_no, const std::string& what) -> std::runtime_error {
    return std::runtime_error("parse_boxes: " + path.string() + ":" + std::to_string(line_no) +
                              ": " + what);
  };

  std::vector<LocalizationTruth> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (line_no == 1) {
      if (fields.size() < 5 || fields[0] != "image_id" || fields[1] != "x" || fields[2] != "y" ||
          fields[3] != "w" || fields[4] != "h")
        throw fail(line_no, "expected header `image_id,x,y,w,h[,tag]`");
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 5 && fields.size() != 6)
      throw fail(line_no, "expected 5 or 6 fields, got " + std::to_string(fields.size()));
    LocalizationTruth row;
    row.image_id = fields[0];
    if (row.image_id.empty()) throw fail(line_no, "empty image_id");
    try {
      row.box = detail::parse_box_fields(fields, 1);
    } catch (const std::invalid_argument& e) {
      throw fail(line_no, e.what());
    }
    if (fields.size() == 6) row.tag = fields[5];
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Group parsed box rows into a LocalizationResult (one frame per image id,
/// in first-appearance order; boxless rows contribute an empty frame).
inline LocalizationResult boxes_to_result(const std::vector<LocalizationTruth>& rows) {
  LocalizationResult result;
  std::map<std::string, size_t> index;
  for (const LocalizationTruth& row : rows) {
    const auto [it, inserted] = index.emplace(row.image_id, result.frames.size());
    if (inserted) result.frames.push_back(FrameLocalization{row.image_id, {}, {}});
    FrameLocalization& frame = result.frames[it->second];
    if (row.box) {
      frame.boxes.push_back(*row.box);
      frame.component_areas.push_back(row.box->area());
    }
  }
  return result;
}

namespace detail {

inline std::string pct_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", v);
  return buf;
}

inline void append_row(std::string& out, const std::string& label, const std::string& value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "  %-14s %10s\n", label.c_str(), value.c_str());
  out += buf;
}

}  // namespace detail

inline std::string render_text(const ClassificationReport& report) {
  std::string out = "classification report\n";
  detail::append_row(out, "images", std::to_string(report.total));
  detail::append_row(out, "accuracy", detail::pct_str(report.accuracy_pct()));
  detail::append_row(out, "presence FN", detail::pct_str(report.presence_fn_pct()));
  detail::append_row(out, "presence FP", detail::pct_str(report.presence_fp_pct()));
  detail::append_row(out, "taxa error", detail::pct_str(report.taxa_error_pct()));
  return out;
}

inline nlohmann::json to_json(const ClassificationReport& report) {
  nlohmann::json confusion = nlohmann::json::array();
  for (const auto& [t, row] : report.confusion)
    for (const auto& [p, count] : row)
      confusion.push_back({{"truth", t}, {"predicted", p}, {"count", count}});
  return {{"total", report.total},
          {"accuracy_pct", report.accuracy_pct()},
          {"presence_fn_pct", report.presence_fn_pct()},
          {"presence_fp_pct", report.presence_fp_pct()},
          {"taxa_error_pct", report.taxa_error_pct()},
          {"counts",
           {{"correct", report.correct_count},
            {"presence_fn", report.presence_fn_count},
            {"presence_fp", report.presence_fp_count},
            {"taxa_error", report.taxa_error_count}}},
          {"confusion", confusion}};
}

inline std::string render_text(const LocalizationReport& report) {
  std::string out = "localization report\n";
  detail::append_row(out, "frames", std::to_string(report.total));
  detail::append_row(out, "correct", detail::pct_str(report.correct_pct()));
  detail::append_row(out, "FP", detail::pct_str(report.fp_pct()));
  detail::append_row(out, "FN", detail::pct_str(report.fn_pct()));
  for (const auto& [tag, counts] : report.per_tag) {
    detail::append_row(out, tag,
                       std::to_string(counts[0]) + "/" + std::to_string(counts[1]) + "/" +
                           std::to_string(counts[2]));
  }
  return out;
}

inline nlohmann::json to_json(const LocalizationReport& report) {
  nlohmann::json per_tag = nlohmann::json::object();
  for (const auto& [tag, counts] : report.per_tag)
    per_tag[tag] = {{"correct", counts[0]}, {"fp", counts[1]}, {"fn", counts[2]}};
  return {{"total", report.total},
          {"correct_pct", report.correct_pct()},
          {"fp_pct", report.fp_pct()},
          {"fn_pct", report.fn_pct()},
          {"counts",
           {{"correct", report.correct_count},
            {"fp", report.fp_count},
            {"fn", report.fn_count}}},
          {"per_tag", per_tag}};
}

}  // namespace burstbox
