#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <regex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace burstbox {

struct ImageRecord {
  std::string image_id;
  std::filesystem::path path;
  std::string camera_id;
  double timestamp = 0;  // seconds; epoch-based when parsed from a datetime
  uint32_t width = 0;    // filled in once the file is decoded
  uint32_t height = 0;
};

struct BurstRecord {
  std::string burst_id;
  std::string camera_id;
  std::vector<std::string> image_ids;  // in timestamp order
};

struct IngestManifest {
  std::filesystem::path root_dir;
  std::vector<ImageRecord> images;  // sorted by (camera_id, timestamp, image_id)
  std::vector<BurstRecord> bursts;
  std::vector<std::string> warnings;
};

struct IngestConfig {
  // first capture group supplies the timestamp; a 14-digit capture is read as
  // YYYYMMDDhhmmss, anything else as integer seconds
  std::string timestamp_regex = R"((\d{6,}))";
  bool use_mtime = false;  // true: skip the filename regex entirely
  double gap_seconds = 5.0;
  size_t max_burst = 3;
};

namespace detail {

inline int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline bool datetime_to_seconds(const std::string& digits, double& out) {
  if (digits.size() != 14) return false;
  auto num = [&](size_t pos, size_t len) {
    int64_t v = 0;
    for (size_t i = pos; i < pos + len; ++i) v = v * 10 + (digits[i] - '0');
    return v;
  };
  const int64_t year = num(0, 4), month = num(4, 2), day = num(6, 2);
  const int64_t hh = num(8, 2), mm = num(10, 2), ss = num(12, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hh > 23 || mm > 59 || ss > 59)
    return false;
  out = static_cast<double>(
      days_from_civil(year, unsigned(month), unsigned(day)) * 86400 + hh * 3600 + mm * 60 + ss);
  return true;
}

inline double file_mtime_seconds(const std::filesystem::path& path) {
  const auto t = std::filesystem::last_write_time(path);
  const auto sys = std::chrono::file_clock::to_sys(t);
  return std::chrono::duration<double>(sys.time_since_epoch()).count();
}

inline bool has_image_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace detail

/// Walk root_dir for PNG/JPEG files. The camera id is the file's directory
/// relative to the root; the image id is the filename stem. Timestamps come
/// from the filename pattern, falling back to file mtime with a warning.
inline IngestManifest scan_directory(const std::filesystem::path& root_dir,
                                     const IngestConfig& cfg = {}) {
  if (!std::filesystem::is_directory(root_dir))
    throw std::runtime_error("scan_directory: not a directory: " + root_dir.string());

  IngestManifest manifest;
  manifest.root_dir = root_dir;
  const std::regex ts_regex(cfg.timestamp_regex);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root_dir)) {
    if (!entry.is_regular_file() || !detail::has_image_extension(entry.path())) continue;
    ImageRecord rec;
    rec.path = entry.path();
    rec.image_id = entry.path().stem().string();
    rec.camera_id = std::filesystem::relative(entry.path().parent_path(), root_dir).string();

    std::smatch match;
    const std::string stem = rec.image_id;
    if (!cfg.use_mtime && std::regex_search(stem, match, ts_regex) && match.size() > 1) {
      const std::string digits = match[1].str();
      if (!detail::datetime_to_seconds(digits, rec.timestamp))
        rec.timestamp = std::stod(digits);
    } else {
      rec.timestamp = detail::file_mtime_seconds(rec.path);
      if (!cfg.use_mtime)
        manifest.warnings.push_back("no timestamp in filename, using mtime: " +
                                    entry.path().string());
    }
    manifest.images.push_back(std::move(rec));
  }

  std::sort(manifest.images.begin(), manifest.images.end(),
            [](const ImageRecord& a, const ImageRecord& b) {
              return std::tie(a.camera_id, a.timestamp, a.image_id) <
                     std::tie(b.camera_id, b.timestamp, b.image_id);
            });
  for (size_t i = 1; i < manifest.images.size(); ++i)
    if (manifest.images[i].image_id == manifest.images[i - 1].image_id)
      throw std::runtime_error("scan_directory: duplicate image_id '" +
                               manifest.images[i].image_id + "'");
  return manifest;
}

/// Greedy burst grouping: consecutive images of one camera join a burst while
/// the inter-frame gap stays within gap_seconds, up to max_burst frames.
inline std::vector<BurstRecord> group_bursts(const std::vector<ImageRecord>& images,
                                             double gap_seconds = 5.0, size_t max_burst = 3) {
  if (max_burst == 0) throw std::invalid_argument("group_bursts: max_burst must be >= 1");
  std::vector<ImageRecord> sorted = images;
  std::sort(sorted.begin(), sorted.end(), [](const ImageRecord& a, const ImageRecord& b) {
    return std::tie(a.camera_id, a.timestamp, a.image_id) <
           std::tie(b.camera_id, b.timestamp, b.image_id);
  });

  std::vector<BurstRecord> bursts;
  size_t camera_counter = 0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const ImageRecord& img = sorted[i];
    const bool same_camera = !bursts.empty() && bursts.back().camera_id == img.camera_id;
    const bool open_new = !same_camera || bursts.back().image_ids.size() >= max_burst ||
                          img.timestamp - sorted[i - 1].timestamp > gap_seconds;
    if (open_new) {
      if (!same_camera) camera_counter = 0;
      BurstRecord burst;
      char tag[16];
      std::snprintf(tag, sizeof(tag), "_b%04zu", camera_counter++);
      burst.burst_id = img.camera_id + tag;
      burst.camera_id = img.camera_id;
      bursts.push_back(std::move(burst));
    }
    bursts.back().image_ids.push_back(img.image_id);
  }
  return bursts;
}

}  // namespace burstbox
