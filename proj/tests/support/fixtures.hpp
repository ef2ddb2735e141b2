#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "burstbox/image.hpp"
#include "burstbox/io/idx.hpp"
#include "burstbox/io/image_codec.hpp"
#include "burstbox/rng.hpp"
#include "burstbox/synthetic.hpp"

namespace burstbox::testsupport {

// ---------------------------------------------------------------------------
// temp directories

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("burstbox_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// file and tree helpers

inline std::vector<uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

inline std::map<std::string, std::filesystem::path> tree_files(
    const std::filesystem::path& root) {
  std::map<std::string, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() == ".log") continue;  // timestamped, never compared
    files[std::filesystem::relative(entry.path(), root).generic_string()] = entry.path();
  }
  return files;
}

/// Byte-compare two directory trees, ignoring *.log. Returns a description of
/// the first difference, or nullopt when identical.
inline std::optional<std::string> compare_trees(const std::filesystem::path& a,
                                                const std::filesystem::path& b) {
  const auto fa = tree_files(a);
  const auto fb = tree_files(b);
  for (const auto& [rel, _] : fa)
    if (!fb.count(rel)) return "only in first tree: " + rel;
  for (const auto& [rel, _] : fb)
    if (!fa.count(rel)) return "only in second tree: " + rel;
  for (const auto& [rel, path] : fa)
    if (read_bytes(path) != read_bytes(fb.at(rel))) return "files differ: " + rel;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// procedural digit glyphs (stand-in for the MNIST files, same IDX format)

namespace detail {

// 5x7 bitmap font rows for digits 0-9, five bits per row, MSB left
inline constexpr uint8_t kDigitFont[10][7] = {
    {0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110},  // 0
    {0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110},  // 1
    {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111},  // 2
    {0b01110, 0b10001, 0b00001, 0b00110, 0b00001, 0b10001, 0b01110},  // 3
    {0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010},  // 4
    {0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110},  // 5
    {0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110},  // 6
    {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000},  // 7
    {0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110},  // 8
    {0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100},  // 9
};

}  // namespace detail

/// Render one 28x28 digit glyph: the 5x7 font scaled x4 (20x28), shifted by a
/// seeded horizontal jitter, at a seeded intensity.
inline DigitSample make_glyph(uint8_t digit, uint64_t variant, uint64_t seed = 99) {
  SplitMix64 rng = SplitMix64::derive(seed, uint64_t(digit) * 1000 + variant);
  DigitSample sample;
  sample.label = digit;
  sample.image = ImageBuffer(28, 28, 1);
  const uint32_t x_off = uint32_t(rng.below(9));  // glyph is 20 wide
  const uint8_t intensity = uint8_t(190 + rng.below(66));
  for (uint32_t gy = 0; gy < 7; ++gy)
    for (uint32_t gx = 0; gx < 5; ++gx) {
      if (!((detail::kDigitFont[digit][gy] >> (4 - gx)) & 1)) continue;
      for (uint32_t sy = 0; sy < 4; ++sy)
        for (uint32_t sx = 0; sx < 4; ++sx)
          sample.image.at(x_off + gx * 4 + sx, gy * 4 + sy) = intensity;
    }
  return sample;
}

inline std::vector<DigitSample> make_glyph_pool(size_t per_digit, uint64_t seed = 99) {
  std::vector<DigitSample> pool;
  pool.reserve(per_digit * 10);
  for (uint8_t d = 0; d < 10; ++d)
    for (size_t v = 0; v < per_digit; ++v) pool.push_back(make_glyph(d, v, seed));
  return pool;
}

struct GlyphIdxPaths {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

/// Write a train pool and a disjoint test pool as IDX file pairs.
inline GlyphIdxPaths write_glyph_idx(const std::filesystem::path& dir, size_t train_per_digit = 12,
                                     size_t test_per_digit = 5) {
  GlyphIdxPaths paths{dir / "train-images-idx3", dir / "train-labels-idx1",
                      dir / "test-images-idx3", dir / "test-labels-idx1"};
  write_idx(paths.train_images, paths.train_labels, make_glyph_pool(train_per_digit, 99));
  write_idx(paths.test_images, paths.test_labels, make_glyph_pool(test_per_digit, 104729));
  return paths;
}

// ---------------------------------------------------------------------------
// toy two-camera capture tree

struct ToyFixture {
  std::filesystem::path root;     // image tree: <root>/<camera>/<stem>.png
  std::filesystem::path mapping;  // image_id,class_id,class_name CSV
  std::vector<std::string> image_ids;
  std::map<std::string, std::string> camera_of;
  // images that belong together; burst grouping must keep each set whole
  std::vector<std::vector<std::string>> expected_bursts;
};

/// Two cameras, two bursts each (one with a moving object, one static), three
/// frames per burst. Frame stems carry YYYYMMDDhhmmss timestamps.
inline ToyFixture write_toy_fixture(const std::filesystem::path& dir) {
  ToyFixture fixture;
  fixture.root = dir / "images";
  fixture.mapping = dir / "mapping.csv";

  struct BurstPlan {
    const char* camera;
    const char* stamp_base;  // YYYYMMDDhhmms, last second digit appended
    uint32_t object_size;
    uint32_t class_id;
    uint64_t seed;
  };
  const BurstPlan plans[] = {
      {"camA", "2024010108000", 24, 1, 11},
      {"camA", "2024010109000", 0, 0, 12},
      {"camB", "2024010208000", 24, 2, 21},
      {"camB", "2024010209000", 0, 0, 22},
  };

  std::ofstream mapping(fixture.mapping, std::ios::binary);
  mapping << "image_id,class_id,class_name\n";
  for (const BurstPlan& plan : plans) {
    SyntheticBurstSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.n_frames = 3;
    spec.object_size = plan.object_size;
    spec.displacement = 30;
    spec.seed = plan.seed;
    const SyntheticBurst burst = generate_burst(spec);

    const std::filesystem::path camera_dir = fixture.root / plan.camera;
    std::filesystem::create_directories(camera_dir);
    std::vector<std::string> burst_ids;
    for (size_t f = 0; f < burst.burst.frames.size(); ++f) {
      const std::string stem =
          std::string(plan.camera) + "_" + plan.stamp_base + std::to_string(f);
      write_png(camera_dir / (stem + ".png"), burst.burst.frames[f].image);
      mapping << stem << "," << plan.class_id << ","
              << (plan.class_id == 1 ? "cuscus" : plan.class_id == 2 ? "rat" : "") << "\n";
      fixture.image_ids.push_back(stem);
      fixture.camera_of[stem] = plan.camera;
      burst_ids.push_back(stem);
    }
    fixture.expected_bursts.push_back(std::move(burst_ids));
  }
  return fixture;
}

}  // namespace burstbox::testsupport
