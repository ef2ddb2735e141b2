#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace burstbox {

// Hyperparameters for the downstream detector and the classifier baseline.
// This artifact only emits the configuration; training itself is external.
struct TrainingManifest {
  struct Schedule {
    int epochs = 0;
    int batch_size = 32;
    std::string optimizer = "SGD";
    double lr_initial = 1e-3;
    int lr_decay_factor = 10;
    std::vector<int> lr_decay_epochs;
  };
  Schedule detector{200, 32, "SGD", 1e-3, 10, {100, 170, 190}};
  Schedule classifier_baseline{50, 32, "SGD", 1e-3, 10, {20, 40}};

  void validate() const {
    for (const Schedule& s : {detector, classifier_baseline}) {
      int prev = 0;
      for (int e : s.lr_decay_epochs) {
        if (e <= prev || e >= s.epochs)
          throw std::invalid_argument(
              "TrainingManifest: decay epochs must be strictly increasing and < epochs");
        prev = e;
      }
    }
  }
};

inline void export_training_manifest(const std::filesystem::path& path,
                                     const TrainingManifest& manifest = {}) {
  manifest.validate();
  auto schedule_json = [](const TrainingManifest::Schedule& s) {
    return nlohmann::json{{"epochs", s.epochs},
                          {"batch_size", s.batch_size},
                          {"optimizer", s.optimizer},
                          {"lr_initial", s.lr_initial},
                          {"lr_decay_factor", s.lr_decay_factor},
                          {"lr_decay_epochs", s.lr_decay_epochs}};
  };
  const nlohmann::json j = {{"detector", schedule_json(manifest.detector)},
                            {"classifier_baseline", schedule_json(manifest.classifier_baseline)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_training_manifest: cannot open " + path.string());
  out << j.dump(2) << "\n";
  if (!out)
    throw std::runtime_error("export_training_manifest: write failed for " + path.string());
}

}  // namespace burstbox
