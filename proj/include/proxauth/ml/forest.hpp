#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "proxauth/ml/tree.hpp"

namespace proxauth::ml {

struct ForestParams {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  /// floor(sqrt(4)) by default.
  std::size_t features_per_split = 2;
  TreeParams tree_params;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ForestParams&) const = default;
};

struct VoteCount {
  std::size_t authentic = 0;
  std::size_t unauthorized = 0;
};

class RandomForest {
public:
  RandomForest(std::vector<DecisionTree> trees, ForestParams params);

  /// Unweighted majority; ties go to Unauthorized.
  Label predict(const FeatureVector& x) const;
  VoteCount votes(const FeatureVector& x) const;

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  const ForestParams& params() const noexcept { return params_; }

  bool operator==(const RandomForest&) const = default;

private:
  std::vector<DecisionTree> trees_;
  ForestParams params_;
};

/// Tree i draws from Rng(Rng::derive_seed(params.seed, i)) only, so the
/// result does not depend on `threads` (0 = hardware concurrency).
/// Throws MlError("EmptyTrainingSet").
RandomForest train_random_forest(std::span<const EncodedSample> train, const ForestParams& params,
                                 unsigned threads = 0);

}  // namespace proxauth::ml
