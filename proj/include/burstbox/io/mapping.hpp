#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstbox/annotate.hpp"

namespace burstbox {

namespace detail {

inline std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline bool parse_u32(const std::string& s, uint32_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

/// Parse the image-level label file: CSV with header
/// `image_id,class_id[,class_name]`, class 0 meaning empty.
inline LabelMapping parse_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_mapping: cannot open " + path.string());

  auto fail = [&](size_t line_no, const std::string& what) -> std::runtime_error {
    return std::runtime_error("parse_mapping: " + path.string() + ":" + std::to_string(line_no) +
                              ": " + what);
  };

  LabelMapping mapping;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (line_no == 1) {
      if (fields.size() < 2 || fields[0] != "image_id" || fields[1] != "class_id")
        throw fail(line_no, "expected header `image_id,class_id[,class_name]`");
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() != 2 && fields.size() != 3)
      throw fail(line_no, "expected 2 or 3 fields, got " + std::to_string(fields.size()));
    const std::string& image_id = fields[0];
    if (image_id.empty()) throw fail(line_no, "empty image_id");
    uint32_t class_id = 0;
    if (!detail::parse_u32(fields[1], class_id))
      throw fail(line_no, "invalid class_id '" + fields[1] + "'");
    if (!mapping.entries.emplace(image_id, class_id).second)
      throw fail(line_no, "duplicate image_id '" + image_id + "'");
    if (fields.size() == 3 && !fields[2].empty()) {
      const auto [it, inserted] = mapping.class_names.emplace(class_id, fields[2]);
      if (!inserted && it->second != fields[2])
        throw fail(line_no, "class " + std::to_string(class_id) + " name '" + fields[2] +
                                "' conflicts with '" + it->second + "'");
    }
  }
  return mapping;
}

}  // namespace burstbox
