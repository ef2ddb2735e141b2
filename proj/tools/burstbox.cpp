#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "burstbox/evaluate.hpp"
#include "burstbox/pipeline.hpp"
#include "burstbox/testbed.hpp"

namespace {

int cmd_annotate(const burstbox::PipelineConfig& cfg) {
  const burstbox::RunSummary summary = burstbox::run_annotate(cfg);
  std::printf("images   %zu scanned, %zu decoded, %zu skipped\n", summary.images_scanned,
              summary.images_decoded, summary.images_skipped);
  std::printf("bursts   %zu\n", summary.bursts);
  std::printf("split    train %zu / val %zu / test %zu\n", summary.train, summary.val,
              summary.test);
  std::printf("elapsed  %.2fs (%.2f images/sec)\n", summary.seconds, summary.images_per_sec);
  return 0;
}

int cmd_testbed(const burstbox::TestbedSpec& spec, const std::string& train_images,
                const std::string& train_labels, const std::string& test_images,
                const std::string& test_labels, const std::string& out_dir, size_t workers) {
  const std::vector<burstbox::DigitSample> train_pool =
      burstbox::parse_idx(train_images, train_labels);
  const std::vector<burstbox::DigitSample> test_pool =
      burstbox::parse_idx(test_images, test_labels);
  const nlohmann::json manifest =
      burstbox::generate_dataset(spec, train_pool, test_pool, out_dir, workers);
  std::printf("wrote %u train / %u val / %u test canvases (side %u, %u digits, o2i %.4f)\n",
              spec.n_train, spec.n_val, spec.n_test, spec.canvas_side, spec.digit_count,
              spec.o2i);
  std::printf("outputs: labels.csv, boxes.json, manifest.json under %s\n", out_dir.c_str());
  return 0;
}

int cmd_evaluate(const std::string& predictions_path, const std::string& truth_path,
                 const std::string& mode, double iou_min, std::string json_path) {
  if (json_path.empty()) json_path = predictions_path + ".report.json";
  nlohmann::json report_json;
  std::string text;
  if (mode == "classification") {
    const auto preds = burstbox::parse_predictions(predictions_path);
    const burstbox::LabelMapping truth = burstbox::parse_mapping(truth_path);
    const burstbox::ClassificationReport report = burstbox::classification_report(preds, truth);
    text = burstbox::render_text(report);
    report_json = burstbox::to_json(report);
  } else {
    const burstbox::LocalizationResult loc =
        burstbox::boxes_to_result(burstbox::parse_boxes(predictions_path));
    const auto truth = burstbox::parse_boxes(truth_path);
    const burstbox::LocalizationReport report =
        burstbox::localization_report(loc, truth, iou_min);
    text = burstbox::render_text(report);
    report_json = burstbox::to_json(report);
  }
  std::fputs(text.c_str(), stdout);
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + json_path);
  out << report_json.dump(2) << "\n";
  return 0;
}

int cmd_review(const std::string& predictions_path, size_t top) {
  const auto preds = burstbox::parse_predictions(predictions_path);
  const std::vector<std::string> queue = burstbox::review_queue(preds);
  const size_t n = top > 0 ? std::min(top, queue.size()) : queue.size();
  for (size_t i = 0; i < n; ++i) std::puts(queue[i].c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"motion-based weak annotation for camera-trap bursts"};
  app.require_subcommand(1);

  // ---- annotate ----------------------------------------------------------
  auto* annotate = app.add_subcommand("annotate", "localize bursts and write COCO splits");
  std::string an_images, an_mapping, an_out, an_config, an_fn_policy, an_debug_dump;
  burstbox::PipelineConfig pipeline;
  double an_threshold = pipeline.localizer.threshold_t;
  uint32_t an_erosion = pipeline.localizer.erosion_kernel;
  uint32_t an_dilation = pipeline.localizer.dilation_kernel;
  int an_connectivity = pipeline.localizer.connectivity;
  uint64_t an_min_area = pipeline.localizer.min_component_area;
  size_t an_max_components = pipeline.localizer.max_components;
  bool an_tighten = false;
  std::string an_ts_regex = pipeline.ingest.timestamp_regex;
  bool an_use_mtime = false;
  double an_gap = pipeline.ingest.gap_seconds;
  size_t an_max_burst = pipeline.ingest.max_burst;
  std::vector<std::string> an_test_cameras;
  double an_val_fraction = pipeline.val_fraction;
  uint64_t an_seed = pipeline.seed;
  size_t an_workers = pipeline.workers;
  annotate->add_option("--images", an_images, "image root directory");
  annotate->add_option("--mapping", an_mapping, "image_id,class_id CSV");
  annotate->add_option("--out", an_out, "output directory");
  annotate->add_option("--config", an_config, "JSON config file (flags override it)");
  annotate->add_option("--threshold", an_threshold, "motion threshold t in (0,1)");
  annotate->add_option("--erosion-kernel", an_erosion, "odd erosion kernel");
  annotate->add_option("--dilation-kernel", an_dilation, "odd dilation kernel");
  annotate->add_option("--connectivity", an_connectivity, "component connectivity, 4 or 8");
  annotate->add_option("--min-component-area", an_min_area, "discard smaller components");
  annotate->add_option("--max-components", an_max_components, "boxes kept per frame");
  annotate->add_flag("--tighten-boxes", an_tighten, "shrink boxes to thresholded pixels");
  annotate->add_option("--timestamp-regex", an_ts_regex, "capture group giving the timestamp");
  annotate->add_flag("--use-mtime", an_use_mtime, "take timestamps from file mtime");
  annotate->add_option("--gap-seconds", an_gap, "max in-burst frame gap");
  annotate->add_option("--max-burst", an_max_burst, "max frames per burst");
  annotate->add_option("--fn-policy", an_fn_policy,
                       "keep_as_unlocalized | exclude (unlocalized animal images)");
  annotate->add_option("--test-camera", an_test_cameras, "camera id held out for testing")
      ->take_all();
  annotate->add_option("--val-fraction", an_val_fraction, "fraction of bursts for validation");
  annotate->add_option("--seed", an_seed, "split shuffle seed");
  annotate->add_option("--workers", an_workers, "worker threads over bursts");
  annotate->add_option("--debug-dump", an_debug_dump, "write per-step images here");

  // ---- testbed -----------------------------------------------------------
  auto* testbed = app.add_subcommand("testbed", "generate the tiny-object digit testbed");
  int tb_spec = 0;
  uint32_t tb_digits = 0, tb_side = 0, tb_train = 0, tb_val = 0, tb_test = 0;
  uint64_t tb_seed = 1;
  size_t tb_workers = 1;
  std::string tb_train_images, tb_train_labels, tb_test_images, tb_test_labels, tb_out;
  testbed->add_option("--spec", tb_spec, "standard spec 1-4");
  testbed->add_option("--digits", tb_digits, "digits per canvas (custom spec)");
  testbed->add_option("--side", tb_side, "canvas side in pixels (custom spec)");
  testbed->add_option("--n-train", tb_train, "override train count");
  testbed->add_option("--n-val", tb_val, "override val count");
  testbed->add_option("--n-test", tb_test, "override test count");
  testbed->add_option("--seed", tb_seed, "generation seed");
  testbed->add_option("--workers", tb_workers, "worker threads over samples");
  testbed->add_option("--train-images", tb_train_images, "IDX images for train/val digits")
      ->required();
  testbed->add_option("--train-labels", tb_train_labels, "IDX labels for train/val digits")
      ->required();
  testbed->add_option("--test-images", tb_test_images, "IDX images for test digits")->required();
  testbed->add_option("--test-labels", tb_test_labels, "IDX labels for test digits")->required();
  testbed->add_option("--out", tb_out, "output directory")->required();

  // ---- evaluate ----------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against truth");
  std::string ev_predictions, ev_truth, ev_mode = "classification", ev_json;
  double ev_iou = 0.5;
  evaluate->add_option("--predictions", ev_predictions, "predictions CSV")->required();
  evaluate->add_option("--truth", ev_truth, "truth file (mapping CSV or box CSV)")->required();
  evaluate->add_option("--mode", ev_mode, "classification | localization")
      ->check(CLI::IsMember({"classification", "localization"}));
  evaluate->add_option("--iou-min", ev_iou, "IoU for a correct localization");
  evaluate->add_option("--json", ev_json, "report JSON path (default: <predictions>.report.json)");

  // ---- review ------------------------------------------------------------
  auto* review = app.add_subcommand("review", "list images least-confident first");
  std::string rv_predictions;
  size_t rv_top = 0;
  review->add_option("--predictions", rv_predictions, "predictions CSV")->required();
  review->add_option("--top", rv_top, "print only the first N ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (annotate->parsed()) {
      if (!an_config.empty()) {
        std::ifstream in(an_config);
        if (!in) throw std::runtime_error("cannot open config " + an_config);
        nlohmann::json j;
        in >> j;
        burstbox::apply_config_json(pipeline, j);
      }
      auto passed = [&](const std::string& flag) { return annotate->count(flag) > 0; };
      if (passed("--images")) pipeline.image_root = an_images;
      if (passed("--mapping")) pipeline.mapping_path = an_mapping;
      if (passed("--out")) pipeline.out_dir = an_out;
      if (passed("--threshold")) pipeline.localizer.threshold_t = an_threshold;
      if (passed("--erosion-kernel")) pipeline.localizer.erosion_kernel = an_erosion;
      if (passed("--dilation-kernel")) pipeline.localizer.dilation_kernel = an_dilation;
      if (passed("--connectivity")) pipeline.localizer.connectivity = an_connectivity;
      if (passed("--min-component-area")) pipeline.localizer.min_component_area = an_min_area;
      if (passed("--max-components")) pipeline.localizer.max_components = an_max_components;
      if (passed("--tighten-boxes")) pipeline.localizer.tighten_boxes = an_tighten;
      if (passed("--timestamp-regex")) pipeline.ingest.timestamp_regex = an_ts_regex;
      if (passed("--use-mtime")) pipeline.ingest.use_mtime = an_use_mtime;
      if (passed("--gap-seconds")) pipeline.ingest.gap_seconds = an_gap;
      if (passed("--max-burst")) pipeline.ingest.max_burst = an_max_burst;
      if (passed("--fn-policy")) {
        if (an_fn_policy == "keep_as_unlocalized")
          pipeline.fn_policy = burstbox::FnPolicy::KEEP_AS_UNLOCALIZED;
        else if (an_fn_policy == "exclude")
          pipeline.fn_policy = burstbox::FnPolicy::EXCLUDE;
        else
          throw std::runtime_error("unknown --fn-policy '" + an_fn_policy + "'");
      }
      if (passed("--test-camera"))
        pipeline.test_cameras = {an_test_cameras.begin(), an_test_cameras.end()};
      if (passed("--val-fraction")) pipeline.val_fraction = an_val_fraction;
      if (passed("--seed")) pipeline.seed = an_seed;
      if (passed("--workers")) pipeline.workers = an_workers;
      if (passed("--debug-dump")) pipeline.debug_dump_dir = an_debug_dump;
      if (pipeline.image_root.empty() || pipeline.mapping_path.empty() ||
          pipeline.out_dir.empty())
        throw std::runtime_error("annotate needs --images, --mapping, and --out");
      return cmd_annotate(pipeline);
    }

    if (testbed->parsed()) {
      burstbox::TestbedSpec spec;
      if (testbed->count("--spec")) {
        if (tb_spec < 1 || tb_spec > 4) {
          std::cerr << "invalid --spec " << tb_spec
                    << ": valid specs are 1 (side 64, 3 digits), 2 (side 128, 6 digits), "
                       "3 (side 256, 26 digits), 4 (side 512, 101 digits)\n";
          return 2;
        }
        spec = burstbox::standard_specs(tb_seed)[size_t(tb_spec) - 1];
      } else {
        if (tb_side == 0 || tb_digits == 0)
          throw std::runtime_error("custom testbed needs --side and --digits (or use --spec)");
        spec = burstbox::standard_specs(tb_seed)[0];
      }
      if (testbed->count("--side")) spec.canvas_side = tb_side;
      if (testbed->count("--digits")) spec.digit_count = tb_digits;
      spec.o2i = 784.0 / (double(spec.canvas_side) * spec.canvas_side);
      if (testbed->count("--n-train")) spec.n_train = tb_train;
      if (testbed->count("--n-val")) spec.n_val = tb_val;
      if (testbed->count("--n-test")) spec.n_test = tb_test;
      spec.seed = tb_seed;
      return cmd_testbed(spec, tb_train_images, tb_train_labels, tb_test_images, tb_test_labels,
                         tb_out, tb_workers);
    }

    if (evaluate->parsed())
      return cmd_evaluate(ev_predictions, ev_truth, ev_mode, ev_iou, ev_json);
    if (review->parsed()) return cmd_review(rv_predictions, rv_top);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
