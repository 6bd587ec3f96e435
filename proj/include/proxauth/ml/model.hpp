#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "proxauth/ml/forest.hpp"
#include "proxauth/ml/metrics.hpp"
#include "proxauth/ml/tree.hpp"

namespace proxauth::ml {

using Model = std::variant<DecisionTree, RandomForest>;

Label predict(const DecisionTree& tree, const FeatureVector& x);
Label predict(const RandomForest& forest, const FeatureVector& x);
Label predict(const Model& model, const FeatureVector& x);

/// Throws MlError("EmptyTestSet").
ConfusionMatrix evaluate(const Model& model, std::span<const EncodedSample> test);

/// "dt" or "rf".
std::string_view model_kind(const Model& model);

/// How the training partition was carved out of its source dataset, so a
/// later evaluation can reproduce the held-out partition.
struct TrainingSplit {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  bool operator==(const TrainingSplit&) const = default;
};

/// Everything needed to score raw observations: the classifier and the
/// encoder it was trained behind.
struct TrainedModel {
  Model model;
  FeatureEncoder encoder;
  std::optional<TrainingSplit> split;

  Label predict(DeviceRole role, const BeaconObservation& obs) const {
    return ml::predict(model, encoder.encode(role, obs));
  }
};

inline constexpr std::string_view kModelFormat = "proxauth-model";
inline constexpr int kModelFormatVersion = 1;

/// Versioned, field-named JSON document.  Thresholds are written with
/// round-trip precision, so `model_from_json(model_to_json(m))` is lossless.
nlohmann::json model_to_json(const TrainedModel& model);
/// Throws MlError("ModelFormatError").
TrainedModel model_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
/// Throws MlError("FileNotFound") / MlError("ModelFormatError").
TrainedModel load_model(const std::filesystem::path& path);

nlohmann::json tree_params_to_json(const TreeParams& params);
TreeParams tree_params_from_json(const nlohmann::json& doc, TreeParams defaults = {});
nlohmann::json forest_params_to_json(const ForestParams& params);
ForestParams forest_params_from_json(const nlohmann::json& doc, ForestParams defaults = {});

}  // namespace proxauth::ml
