#include <catch_amalgamated.hpp>

#include "burstbox/connected.hpp"
#include "burstbox/rng.hpp"

using namespace burstbox;

TEST_CASE("empty mask yields no components") {
  CHECK(connected_components(BinaryMask(12, 8), 8).empty());
  CHECK(connected_components(BinaryMask(12, 8), 4).empty());
}

TEST_CASE("a solid block reports its exact box and area") {
  BinaryMask mask(12, 12);
  for (uint32_t y = 3; y < 8; ++y)
    for (uint32_t x = 2; x < 7; ++x) mask.at(x, y) = 1;
  const auto comps = connected_components(mask, 8);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].box == BoundingBox{2, 3, 5, 5});
  CHECK(comps[0].area == 25);
}

TEST_CASE("diagonal neighbors join under 8-connectivity only") {
  BinaryMask mask(4, 4);
  mask.at(1, 1) = 1;
  mask.at(2, 2) = 1;
  const auto eight = connected_components(mask, 8);
  REQUIRE(eight.size() == 1);
  CHECK(eight[0].area == 2);
  CHECK(eight[0].box == BoundingBox{1, 1, 2, 2});
  const auto four = connected_components(mask, 4);
  CHECK(four.size() == 2);
}

TEST_CASE("components come out largest first, ties by position") {
  BinaryMask mask(20, 10);
  // area 4 at (10,1), area 4 at (1,1), area 9 at (5,6)
  for (uint32_t y = 1; y < 3; ++y)
    for (uint32_t x = 10; x < 12; ++x) mask.at(x, y) = 1;
  for (uint32_t y = 1; y < 3; ++y)
    for (uint32_t x = 1; x < 3; ++x) mask.at(x, y) = 1;
  for (uint32_t y = 6; y < 9; ++y)
    for (uint32_t x = 5; x < 8; ++x) mask.at(x, y) = 1;
  const auto comps = connected_components(mask, 8);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0].area == 9);
  CHECK(comps[1].box.x == 1);   // same area, smaller x wins at equal y
  CHECK(comps[2].box.x == 10);
}

TEST_CASE("label grid is compact and consistent with the component list") {
  BinaryMask mask(9, 5);
  mask.at(0, 0) = 1;
  mask.at(8, 4) = 1;
  mask.at(4, 2) = 1;
  std::vector<uint32_t> labels;
  const auto comps = label_components(mask, 8, &labels);
  REQUIRE(comps.size() == 3);
  REQUIRE(labels.size() == mask.bits.size());
  // Labels are 1..N in raster order of first appearance; 0 is background.
  CHECK(labels[0] == 1);
  CHECK(labels[2 * 9 + 4] == 2);
  CHECK(labels[4 * 9 + 8] == 3);
  uint64_t nonzero = 0;
  for (uint32_t l : labels) {
    CHECK(l <= 3);
    if (l) ++nonzero;
  }
  CHECK(nonzero == 3);
}

TEST_CASE("component areas sum to the mask population") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    BinaryMask mask(31, 17);
    for (uint8_t& b : mask.bits) b = rng.chance(0.35) ? 1 : 0;
    for (int conn : {4, 8}) {
      const auto comps = connected_components(mask, conn);
      uint64_t total = 0;
      for (const Component& c : comps) {
        total += c.area;
        CHECK(c.area <= c.box.area());
      }
      CHECK(total == mask.count_true());
    }
  }
}

TEST_CASE("a ring is one component with the full outer box") {
  BinaryMask mask(10, 10);
  for (uint32_t i = 2; i < 8; ++i) {
    mask.at(i, 2) = 1;
    mask.at(i, 7) = 1;
    mask.at(2, i) = 1;
    mask.at(7, i) = 1;
  }
  const auto comps = connected_components(mask, 4);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].box == BoundingBox{2, 2, 6, 6});
  CHECK(comps[0].area == 20);
}

TEST_CASE("connectivity other than 4 or 8 is rejected") {
  CHECK_THROWS_AS(connected_components(BinaryMask(2, 2), 6), std::invalid_argument);
}
