#include <catch_amalgamated.hpp>

#include <algorithm>

#include "burstbox/localizer.hpp"
#include "burstbox/rng.hpp"

using namespace burstbox;

namespace {

BurstSequence make_burst(const std::vector<ImageBuffer>& images) {
  BurstSequence burst;
  burst.camera_id = "cam";
  for (size_t i = 0; i < images.size(); ++i)
    burst.frames.push_back({"f" + std::to_string(i), images[i], double(i)});
  return burst;
}

// Reference median: sort each sample's values and take the lower middle.
uint8_t median_oracle(std::vector<uint8_t> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

}  // namespace

TEST_CASE("background of one frame is that frame") {
  ImageBuffer img(3, 2, 1);
  for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = uint8_t(i * 11);
  const ImageBuffer bg = compute_background(make_burst({img}));
  CHECK(bg.data == img.data);
}

TEST_CASE("three-frame median picks the middle value per sample") {
  ImageBuffer a(1, 1, 1, 10), b(1, 1, 1, 20), c(1, 1, 1, 200);
  const ImageBuffer bg = compute_background(make_burst({a, b, c}));
  CHECK(bg.data[0] == 20);
}

TEST_CASE("even stack uses the lower of the middle pair") {
  ImageBuffer a(1, 1, 1, 5), b(1, 1, 1, 40), c(1, 1, 1, 9), d(1, 1, 1, 11);
  // sorted: 5 9 11 40, lower middle = 9
  const ImageBuffer bg = compute_background(make_burst({a, b, c, d}));
  CHECK(bg.data[0] == 9);
}

TEST_CASE("median matches a sort-based oracle on random stacks") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = 1 + rng.below(5);
    std::vector<ImageBuffer> images(n, ImageBuffer(8, 6, 3));
    for (ImageBuffer& img : images)
      for (uint8_t& v : img.data) v = uint8_t(rng.below(256));
    const ImageBuffer bg = compute_background(make_burst(images));
    for (size_t i = 0; i < bg.data.size(); ++i) {
      std::vector<uint8_t> column;
      for (const ImageBuffer& img : images) column.push_back(img.data[i]);
      REQUIRE(bg.data[i] == median_oracle(column));
    }
  }
}

TEST_CASE("background of an empty sequence is rejected") {
  BurstSequence burst;
  burst.camera_id = "cam";
  CHECK_THROWS_WITH(compute_background(burst), Catch::Matchers::ContainsSubstring("empty sequence"));
}

TEST_CASE("motion map of identical images is zero") {
  ImageBuffer img(4, 4, 3, 77);
  const FloatMap m = motion_map(img, img);
  for (float v : m.values) CHECK(v == 0.0f);
}

TEST_CASE("motion map reaches one at full-scale difference") {
  ImageBuffer white(2, 2, 3, 255), black(2, 2, 3, 0);
  const FloatMap m = motion_map(white, black);
  for (float v : m.values) CHECK(v == 1.0f);
}

TEST_CASE("single-channel extreme difference also reaches one") {
  ImageBuffer white(2, 2, 1, 255), black(2, 2, 1, 0);
  const FloatMap m = motion_map(white, black);
  for (float v : m.values) CHECK(v == 1.0f);
}

TEST_CASE("one-channel-only difference normalizes by the full color norm") {
  ImageBuffer red(1, 1, 3, 0), black(1, 1, 3, 0);
  red.at(0, 0, 0) = 255;
  const FloatMap m = motion_map(red, black);
  // 255 / (255 * sqrt(3)) = 1/sqrt(3)
  CHECK_THAT(m.at(0, 0), Catch::Matchers::WithinAbs(0.57735, 1e-4));
}

TEST_CASE("motion map rejects mismatched shapes") {
  ImageBuffer a(4, 4, 3), b(4, 5, 3);
  CHECK_THROWS_AS(motion_map(a, b), std::invalid_argument);
}

TEST_CASE("threshold is inclusive at the cut value") {
  FloatMap m(2, 1);
  m.at(0, 0) = 0.12f;
  m.at(1, 0) = 0.1199f;
  const BinaryMask mask = threshold(m, 0.12);
  CHECK(mask.at(0, 0) == 1);
  CHECK(mask.at(1, 0) == 0);
}

TEST_CASE("threshold rejects cut values outside the open unit interval") {
  const FloatMap m(2, 2);
  CHECK_THROWS_AS(threshold(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(threshold(m, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(threshold(m, -0.5), std::invalid_argument);
}

TEST_CASE("raising the threshold never adds pixels") {
  SplitMix64 rng(11);
  FloatMap m(16, 16);
  for (float& v : m.values) v = float(rng.unit());
  uint64_t prev = threshold(m, 0.05).count_true();
  for (double t : {0.12, 0.3, 0.6, 0.9}) {
    const uint64_t cur = threshold(m, t).count_true();
    CHECK(cur <= prev);
    prev = cur;
  }
}
