#include <catch_amalgamated.hpp>

#include <fstream>

#include "burstbox/evaluate.hpp"
#include "burstbox/rng.hpp"
#include "support/fixtures.hpp"

using namespace burstbox;
using burstbox::testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

LabelMapping truth_of(std::initializer_list<std::pair<const char*, uint32_t>> pairs) {
  LabelMapping m;
  for (const auto& [id, cls] : pairs) m.entries[id] = cls;
  return m;
}

fs::path write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("perfect predictions score perfect accuracy") {
  const std::vector<PredictionRecord> preds = {{"a", 2, 0.9}, {"b", 0, 0.8}, {"c", 5, 0.7}};
  const ClassificationReport r =
      classification_report(preds, truth_of({{"a", 2}, {"b", 0}, {"c", 5}}));
  CHECK(r.total == 3);
  CHECK(r.correct_count == 3);
  CHECK(r.accuracy_pct() == 100.0);
  CHECK(r.presence_fn_count == 0);
  CHECK(r.presence_fp_count == 0);
  CHECK(r.taxa_error_count == 0);
  CHECK(r.confusion.at(2).at(2) == 1);
}

TEST_CASE("the four outcome kinds are told apart") {
  const std::vector<PredictionRecord> preds = {
      {"hit", 3, 0.9},     // truth 3: correct
      {"missed", 0, 0.6},  // truth 4: animal called empty
      {"phantom", 2, 0.7}, // truth 0: empty called animal
      {"confused", 1, 0.8} // truth 2: wrong species
  };
  const LabelMapping truth =
      truth_of({{"hit", 3}, {"missed", 4}, {"phantom", 0}, {"confused", 2}});
  const ClassificationReport r = classification_report(preds, truth);
  CHECK(r.total == 4);
  CHECK(r.correct_count == 1);
  CHECK(r.presence_fn_count == 1);
  CHECK(r.presence_fp_count == 1);
  CHECK(r.taxa_error_count == 1);
  CHECK(r.accuracy_pct() == 25.0);
  CHECK(r.taxa_error_pct() == 25.0);
}

TEST_CASE("empty-to-empty predictions are correct, not presence errors") {
  const std::vector<PredictionRecord> preds = {{"a", 0, 0.5}};
  const ClassificationReport r = classification_report(preds, truth_of({{"a", 0}}));
  CHECK(r.correct_count == 1);
}

TEST_CASE("outcome buckets partition any prediction set") {
  SplitMix64 rng(3);
  std::vector<PredictionRecord> preds;
  LabelMapping truth;
  for (int i = 0; i < 1000; ++i) {
    const std::string id = "p" + std::to_string(i);
    preds.push_back({id, uint32_t(rng.below(5)), rng.unit()});
    truth.entries[id] = uint32_t(rng.below(5));
  }
  const ClassificationReport r = classification_report(preds, truth);
  CHECK(r.total == 1000);
  CHECK(r.correct_count + r.presence_fn_count + r.presence_fp_count + r.taxa_error_count == 1000);
  uint64_t confusion_total = 0;
  for (const auto& [_, row] : r.confusion)
    for (const auto& [__, count] : row) confusion_total += count;
  CHECK(confusion_total == 1000);
}

TEST_CASE("predictions without truth are an error") {
  const std::vector<PredictionRecord> preds = {{"mystery", 1, 0.5}};
  CHECK_THROWS_WITH(classification_report(preds, truth_of({{"other", 1}})),
                    Catch::Matchers::ContainsSubstring("mystery"));
}

TEST_CASE("review queue surfaces the least confident images first") {
  const std::vector<PredictionRecord> preds = {{"a", 1, 0.9}, {"b", 0, 0.3}, {"c", 2, 0.6}};
  CHECK(review_queue(preds) == std::vector<std::string>{"b", "c", "a"});
}

TEST_CASE("review queue breaks posterior ties by id") {
  const std::vector<PredictionRecord> preds = {{"zeb", 1, 0.5}, {"ant", 0, 0.5}, {"mid", 2, 0.5}};
  CHECK(review_queue(preds) == std::vector<std::string>{"ant", "mid", "zeb"});
  CHECK(review_queue({}).empty());
}

TEST_CASE("review queue output does not depend on input order") {
  SplitMix64 rng(9);
  std::vector<PredictionRecord> preds;
  for (int i = 0; i < 50; ++i)
    preds.push_back({"img" + std::to_string(i), 0, rng.below(10) / 10.0});
  std::vector<PredictionRecord> shuffled = preds;
  shuffle(shuffled, rng);
  CHECK(review_queue(preds) == review_queue(shuffled));
}

// ---------------------------------------------------------------------------
// localization scoring

namespace {

LocalizationResult frames_of(
    std::initializer_list<std::pair<const char*, std::vector<BoundingBox>>> items) {
  LocalizationResult result;
  for (const auto& [id, boxes] : items) {
    FrameLocalization f;
    f.image_id = id;
    f.boxes = boxes;
    for (const BoundingBox& b : boxes) f.component_areas.push_back(b.area());
    result.frames.push_back(std::move(f));
  }
  return result;
}

}  // namespace

TEST_CASE("localization outcomes split into correct, fp and fn") {
  const LocalizationResult loc = frames_of({
      {"good", {{10, 10, 20, 20}}},
      {"empty_ok", {}},
      {"phantom", {{5, 5, 8, 8}}},
      {"missed", {}},
      {"offside", {{90, 90, 5, 5}}},
  });
  const std::vector<LocalizationTruth> truth = {
      {"good", BoundingBox{10, 10, 20, 20}, ""},
      {"empty_ok", std::nullopt, ""},
      {"phantom", std::nullopt, ""},
      {"missed", BoundingBox{40, 40, 10, 10}, ""},
      {"offside", BoundingBox{10, 10, 10, 10}, ""},  // box exists but nowhere near
  };
  const LocalizationReport r = localization_report(loc, truth);
  CHECK(r.total == 5);
  CHECK(r.correct_count == 2);
  CHECK(r.fp_count == 1);
  CHECK(r.fn_count == 2);
  CHECK(r.correct_pct() == 40.0);
}

TEST_CASE("the best box per frame decides the outcome") {
  const LocalizationResult loc =
      frames_of({{"multi", {{0, 0, 4, 4}, {10, 10, 20, 20}}}});
  const std::vector<LocalizationTruth> truth = {{"multi", BoundingBox{10, 10, 20, 20}, ""}};
  CHECK(localization_report(loc, truth).correct_count == 1);
}

TEST_CASE("the IoU floor decides between correct and mislocalized") {
  const LocalizationResult loc = frames_of({{"a", {{0, 0, 10, 10}}}});
  const std::vector<LocalizationTruth> truth = {{"a", BoundingBox{5, 0, 10, 10}, ""}};
  // IoU = 50/150 = 1/3
  CHECK(localization_report(loc, truth, 0.5).fn_count == 1);
  CHECK(localization_report(loc, truth, 0.3).correct_count == 1);
}

TEST_CASE("per-tag counts accumulate by challenge kind") {
  const LocalizationResult loc = frames_of({
      {"t1", {{0, 0, 10, 10}}},
      {"t2", {}},
      {"t3", {{50, 50, 4, 4}}},
      {"t4", {}},
  });
  const std::vector<LocalizationTruth> truth = {
      {"t1", BoundingBox{0, 0, 10, 10}, "tiny"},
      {"t2", BoundingBox{5, 5, 6, 6}, "tiny"},
      {"t3", std::nullopt, "rain"},
      {"t4", std::nullopt, ""},
  };
  const LocalizationReport r = localization_report(loc, truth);
  REQUIRE(r.per_tag.size() == 2);  // untagged rows stay out of the breakdown
  CHECK(r.per_tag.at("tiny") == std::array<uint64_t, 3>{1, 0, 1});
  CHECK(r.per_tag.at("rain") == std::array<uint64_t, 3>{0, 1, 0});
}

TEST_CASE("frames without truth rows are an error") {
  const LocalizationResult loc = frames_of({{"stray", {}}});
  CHECK_THROWS_WITH(localization_report(loc, {}),
                    Catch::Matchers::ContainsSubstring("stray"));
}

// ---------------------------------------------------------------------------
// file parsers

TEST_CASE("prediction files parse ids, classes and posteriors") {
  TempDir tmp("eval");
  const fs::path p = write_text(tmp.path() / "p.csv",
                                "image_id,predicted_class,posterior\n"
                                "img_a,3,0.75\n"
                                "img_b,0,1.0\n");
  const std::vector<PredictionRecord> preds = parse_predictions(p);
  REQUIRE(preds.size() == 2);
  CHECK(preds[0].image_id == "img_a");
  CHECK(preds[0].predicted_class == 3);
  CHECK(preds[0].posterior == 0.75);
  CHECK(preds[1].posterior == 1.0);
}

TEST_CASE("prediction file defects are line-addressed") {
  TempDir tmp("eval");
  SECTION("bad header") {
    const fs::path p = write_text(tmp.path() / "p.csv", "id,class,p\n");
    CHECK_THROWS_WITH(parse_predictions(p), Catch::Matchers::ContainsSubstring(":1:"));
  }
  SECTION("posterior not a number") {
    const fs::path p = write_text(tmp.path() / "p.csv",
                                  "image_id,predicted_class,posterior\nimg,1,high\n");
    CHECK_THROWS_WITH(parse_predictions(p),
                      Catch::Matchers::ContainsSubstring("invalid posterior"));
  }
  SECTION("posterior out of range") {
    const fs::path p = write_text(tmp.path() / "p.csv",
                                  "image_id,predicted_class,posterior\nimg,1,1.5\n");
    CHECK_THROWS_WITH(parse_predictions(p),
                      Catch::Matchers::ContainsSubstring("out of [0,1]"));
  }
  SECTION("duplicate image") {
    const fs::path p = write_text(
        tmp.path() / "p.csv",
        "image_id,predicted_class,posterior\nimg,1,0.5\nimg,2,0.6\n");
    CHECK_THROWS_WITH(parse_predictions(p), Catch::Matchers::ContainsSubstring(":3:") &&
                                                Catch::Matchers::ContainsSubstring("duplicate"));
  }
}

TEST_CASE("box files mix boxed, boxless and tagged rows") {
  TempDir tmp("eval");
  const fs::path p = write_text(tmp.path() / "b.csv",
                                "image_id,x,y,w,h,tag\n"
                                "img_a,4,6,20,10,blur\n"
                                "img_b,,,,,\n"
                                "img_a,50,50,5,5,\n");
  const std::vector<LocalizationTruth> rows = parse_boxes(p);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].box == BoundingBox{4, 6, 20, 10});
  CHECK(rows[0].tag == "blur");
  CHECK_FALSE(rows[1].box.has_value());
  CHECK(rows[2].image_id == "img_a");
  CHECK(rows[2].tag.empty());

  const LocalizationResult grouped = boxes_to_result(rows);
  REQUIRE(grouped.frames.size() == 2);  // first-appearance order
  CHECK(grouped.frames[0].image_id == "img_a");
  CHECK(grouped.frames[0].boxes.size() == 2);
  CHECK(grouped.frames[1].image_id == "img_b");
  CHECK(grouped.frames[1].boxes.empty());
}

TEST_CASE("box file defects are rejected") {
  TempDir tmp("eval");
  SECTION("zero-size box") {
    const fs::path p = write_text(tmp.path() / "b.csv", "image_id,x,y,w,h\nimg,1,1,0,5\n");
    CHECK_THROWS_WITH(parse_boxes(p), Catch::Matchers::ContainsSubstring("w and h"));
  }
  SECTION("half-empty box fields") {
    const fs::path p = write_text(tmp.path() / "b.csv", "image_id,x,y,w,h\nimg,1,,5,5\n");
    CHECK_THROWS_WITH(parse_boxes(p), Catch::Matchers::ContainsSubstring("invalid box field"));
  }
  SECTION("wrong header") {
    const fs::path p = write_text(tmp.path() / "b.csv", "image,x,y,w,h\n");
    CHECK_THROWS_WITH(parse_boxes(p), Catch::Matchers::ContainsSubstring("expected header"));
  }
}

// ---------------------------------------------------------------------------
// rendering

TEST_CASE("text and json renderings carry the same numbers") {
  const std::vector<PredictionRecord> preds = {
      {"a", 1, 0.9}, {"b", 0, 0.8}, {"c", 2, 0.7}, {"d", 0, 0.6}};
  const ClassificationReport r =
      classification_report(preds, truth_of({{"a", 1}, {"b", 2}, {"c", 0}, {"d", 0}}));
  const std::string text = render_text(r);
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("accuracy") &&
                       Catch::Matchers::ContainsSubstring("50.00%"));
  const nlohmann::json j = to_json(r);
  CHECK(j["total"] == 4);
  CHECK(j["counts"]["correct"] == 2);
  CHECK(j["counts"]["presence_fn"] == 1);
  CHECK(j["counts"]["presence_fp"] == 1);

  const LocalizationResult loc = frames_of({{"x", {}}});
  const std::vector<LocalizationTruth> truth = {{"x", std::nullopt, "night"}};
  const LocalizationReport lr = localization_report(loc, truth);
  CHECK_THAT(render_text(lr), Catch::Matchers::ContainsSubstring("night"));
  CHECK(to_json(lr)["per_tag"]["night"]["correct"] == 1);
}
