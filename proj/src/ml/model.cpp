#include <fstream>

#include "proxauth/ml/model.hpp"

namespace proxauth::ml {

using nlohmann::json;

Label predict(const DecisionTree& tree, const FeatureVector& x) { return tree.predict(x); }

Label predict(const RandomForest& forest, const FeatureVector& x) { return forest.predict(x); }

Label predict(const Model& model, const FeatureVector& x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

ConfusionMatrix evaluate(const Model& model, std::span<const EncodedSample> test) {
  if (test.empty()) throw MlError("EmptyTestSet", "cannot evaluate on zero samples");
  ConfusionMatrix cm;
  for (const auto& s : test) {
    const bool predicted_authentic = predict(model, s.x) == Label::Authentic;
    if (s.label == Label::Authentic) {
      ++(predicted_authentic ? cm.tp : cm.fn);
    } else {
      ++(predicted_authentic ? cm.fp : cm.tn);
    }
  }
  return cm;
}

std::string_view model_kind(const Model& model) {
  return std::holds_alternative<DecisionTree>(model) ? "dt" : "rf";
}

json tree_params_to_json(const TreeParams& params) {
  return {{"max_depth", params.max_depth ? json(*params.max_depth) : json(nullptr)},
          {"min_samples_split", params.min_samples_split},
          {"min_samples_leaf", params.min_samples_leaf}};
}

TreeParams tree_params_from_json(const json& doc, TreeParams p) {
  if (doc.contains("max_depth")) {
    const auto& depth = doc.at("max_depth");
    if (depth.is_null() || (depth.is_string() && depth.get<std::string>() == "unbounded")) {
      p.max_depth.reset();
    } else {
      p.max_depth = depth.get<std::size_t>();
    }
  }
  p.min_samples_split = doc.value("min_samples_split", p.min_samples_split);
  p.min_samples_leaf = doc.value("min_samples_leaf", p.min_samples_leaf);
  p.validate();
  return p;
}

json forest_params_to_json(const ForestParams& params) {
  return {{"n_trees", params.n_trees},
          {"bootstrap", params.bootstrap},
          {"features_per_split", params.features_per_split},
          {"seed", params.seed},
          {"tree_params", tree_params_to_json(params.tree_params)}};
}

ForestParams forest_params_from_json(const json& doc, ForestParams p) {
  p.n_trees = doc.value("n_trees", p.n_trees);
  p.bootstrap = doc.value("bootstrap", p.bootstrap);
  p.features_per_split = doc.value("features_per_split", p.features_per_split);
  p.seed = doc.value("seed", p.seed);
  if (doc.contains("tree_params")) {
    p.tree_params = tree_params_from_json(doc.at("tree_params"), p.tree_params);
  }
  p.validate();
  return p;
}

namespace {

json tree_to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    json node = {{"label", std::string(to_string(n.label))},
                 {"counts", {n.counts.authentic, n.counts.unauthorized}}};
    if (!n.is_leaf()) {
      node["feature"] = n.feature;
      node["threshold"] = n.threshold;
      node["left"] = n.left;
      node["right"] = n.right;
    }
    nodes.push_back(std::move(node));
  }
  return {{"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const json& doc, const TreeParams& params) {
  std::vector<DecisionTree::Node> nodes;
  for (const auto& j : doc.at("nodes")) {
    DecisionTree::Node n;
    const auto label = parse_label(j.at("label").get<std::string>());
    if (!label) throw MlError("ModelFormatError", "unknown node label");
    n.label = *label;
    n.counts.authentic = j.at("counts").at(0).get<std::size_t>();
    n.counts.unauthorized = j.at("counts").at(1).get<std::size_t>();
    if (j.contains("feature")) {
      n.feature = j.at("feature").get<int>();
      if (n.feature < 0) throw MlError("ModelFormatError", "negative feature index");
      n.threshold = j.at("threshold").get<double>();
      n.left = j.at("left").get<std::int32_t>();
      n.right = j.at("right").get<std::int32_t>();
    }
    nodes.push_back(n);
  }
  return DecisionTree(std::move(nodes), params);
}

}  // namespace

json model_to_json(const TrainedModel& m) {
  json doc = {{"format", kModelFormat},
              {"version", kModelFormatVersion},
              {"kind", model_kind(m.model)},
              {"encoder",
               {{"vocabulary", m.encoder.vocabulary()},
                {"frequency_min_hz", m.encoder.frequency_min_hz()},
                {"frequency_max_hz", m.encoder.frequency_max_hz()}}}};
  if (m.split) {
    doc["training_split"] = {{"test_fraction", m.split->test_fraction}, {"seed", m.split->seed}};
  }
  json trees = json::array();
  if (const auto* tree = std::get_if<DecisionTree>(&m.model)) {
    doc["tree_params"] = tree_params_to_json(tree->params());
    trees.push_back(tree_to_json(*tree));
  } else {
    const auto& forest = std::get<RandomForest>(m.model);
    doc["forest_params"] = forest_params_to_json(forest.params());
    for (const auto& t : forest.trees()) trees.push_back(tree_to_json(t));
  }
  doc["trees"] = std::move(trees);
  return doc;
}

TrainedModel model_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) {
      throw MlError("ModelFormatError", "not a proxauth model document");
    }
    if (const int version = doc.at("version").get<int>(); version != kModelFormatVersion) {
      throw MlError("ModelFormatError", "unsupported model version " + std::to_string(version));
    }
    const auto& enc = doc.at("encoder");
    FeatureEncoder encoder(enc.at("vocabulary").get<std::vector<std::string>>(),
                           enc.at("frequency_min_hz").get<std::int64_t>(),
                           enc.at("frequency_max_hz").get<std::int64_t>());

    const auto kind = doc.at("kind").get<std::string>();
    std::optional<ForestParams> forest_params;
    TreeParams tree_params;
    if (kind == "rf") {
      forest_params = forest_params_from_json(doc.at("forest_params"));
      tree_params = forest_params->tree_params;
    } else if (kind == "dt") {
      tree_params = tree_params_from_json(doc.at("tree_params"));
    } else {
      throw MlError("ModelFormatError", "unknown model kind \"" + kind + "\"");
    }
    std::vector<DecisionTree> trees;
    for (const auto& t : doc.at("trees")) trees.push_back(tree_from_json(t, tree_params));

    std::optional<TrainingSplit> split;
    if (doc.contains("training_split")) {
      split = TrainingSplit{doc["training_split"].at("test_fraction").get<double>(),
                            doc["training_split"].at("seed").get<std::uint64_t>()};
    }

    if (forest_params) {
      return TrainedModel{RandomForest(std::move(trees), *forest_params), std::move(encoder), split};
    }
    if (trees.size() != 1) throw MlError("ModelFormatError", "dt model must hold one tree");
    return TrainedModel{std::move(trees.front()), std::move(encoder), split};
  } catch (const json::exception& e) {
    throw MlError("ModelFormatError", e.what());
  } catch (const MlError& e) {
    if (e.code() == "ModelFormatError") throw;
    throw MlError("ModelFormatError", e.what());
  } catch (const BeaconError& e) {
    throw MlError("ModelFormatError", e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MlError("FileNotWritable", "cannot write model " + path.string());
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw MlError("FileNotWritable", "write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MlError("FileNotFound", "cannot open model " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw MlError("ModelFormatError", path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace proxauth::ml
