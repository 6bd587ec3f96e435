#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "proxauth/ml/common.hpp"
#include "proxauth/random.hpp"

namespace proxauth::ml {

struct TreeParams {
  /// nullopt means unbounded depth.
  std::optional<std::size_t> max_depth = 16;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;

  void validate() const;
  bool operator==(const TreeParams&) const = default;
};

/// Gini impurity 1 - sum(p_c^2).  Throws MlError("EmptyNode") on (0, 0).
double gini_impurity(ClassCounts counts);

struct SplitCandidate {
  std::size_t feature_index = 0;
  double threshold = 0.0;
  double weighted_impurity = 0.0;
};

/// Best Gini split over `candidate_features`, thresholds at midpoints of
/// consecutive distinct values.  nullopt when no split strictly lowers the
/// impurity.  Ties resolve to the lowest feature index, then the lowest
/// threshold.  Both children must hold at least `min_samples_leaf` samples.
std::optional<SplitCandidate> best_split(std::span<const EncodedSample> samples,
                                         std::span<const std::size_t> candidate_features,
                                         std::size_t min_samples_leaf = 1);

/// Same search over `samples[rows[i]]`; `rows` may repeat indices.
std::optional<SplitCandidate> best_split(std::span<const EncodedSample> samples,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidate_features,
                                         std::size_t min_samples_leaf);

/// Binary CART tree stored as a flat node array; node 0 is the root.
/// Samples with x[feature] <= threshold go left.
class DecisionTree {
public:
  struct Node {
    /// -1 marks a leaf.
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    Label label = Label::Unauthorized;
    /// Training samples that reached this node.
    ClassCounts counts;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const Node&) const = default;
  };

  DecisionTree() = default;
  /// Validates the node graph; throws MlError("InvalidTree").
  /// `params` records the configuration the tree was grown with.
  explicit DecisionTree(std::vector<Node> nodes, TreeParams params = {});

  Label predict(const FeatureVector& x) const;
  /// Index of the leaf reached by `x`.
  std::size_t leaf_for(const FeatureVector& x) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const TreeParams& params() const noexcept { return params_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  bool operator==(const DecisionTree&) const = default;

private:
  std::vector<Node> nodes_;
  TreeParams params_;
};

/// Greedy CART over all features.  Throws MlError("EmptyTrainingSet").
/// `seed` is accepted for interface symmetry with forest trees; a
/// single tree that considers every feature at every split is deterministic.
DecisionTree train_decision_tree(std::span<const EncodedSample> train, const TreeParams& params,
                                 std::uint64_t seed = 0);

namespace detail {

/// Grows one tree on `samples[rows]`.  When `features_per_split` is below
/// the feature count, each node draws that many distinct features from `rng`.
DecisionTree grow_tree(std::span<const EncodedSample> samples, std::vector<std::size_t> rows,
                       const TreeParams& params, std::size_t features_per_split, Rng& rng);

}  // namespace detail

}  // namespace proxauth::ml
