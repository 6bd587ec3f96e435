#include <algorithm>
#include <cmath>
#include <numeric>

#include "proxauth/ml/tree.hpp"

namespace proxauth::ml {

namespace {

__extension__ using u128 = unsigned __int128;

// Split quality as an exact fraction.  For children L and R,
//   sum_child n_child * gini(child) = n - (q_L / n_L + q_R / n_R),  q = a^2 + u^2,
// so minimising weighted Gini means maximising q_L / n_L + q_R / n_R.
// Keeping that sum as num / den in 128-bit integers makes the tie rule
// exact instead of depending on floating-point rounding.
struct Score {
  u128 num = 0;
  u128 den = 1;

  bool beats(const Score& other) const { return num * other.den > other.num * den; }
};

constexpr std::size_t kMaxRows = std::size_t{1} << 24;

u128 sum_squares(const ClassCounts& c) {
  return static_cast<u128>(c.authentic) * c.authentic +
         static_cast<u128>(c.unauthorized) * c.unauthorized;
}

Score split_score(const ClassCounts& left, const ClassCounts& right) {
  const u128 n_left = left.total();
  const u128 n_right = right.total();
  return {sum_squares(left) * n_right + sum_squares(right) * n_left, n_left * n_right};
}

double weighted_impurity(const Score& s, std::size_t n) {
  const double sum = static_cast<double>(s.num) / static_cast<double>(s.den);
  return std::max(0.0, 1.0 - sum / static_cast<double>(n));
}

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

ClassCounts count_rows(std::span<const EncodedSample> samples, std::span<const std::size_t> rows) {
  ClassCounts c;
  for (auto r : rows) c.add(samples[r].label);
  return c;
}

}  // namespace

void TreeParams::validate() const {
  if (max_depth && *max_depth == 0) throw MlError("InvalidParams", "max_depth must be positive");
  if (min_samples_split < 2) throw MlError("InvalidParams", "min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw MlError("InvalidParams", "min_samples_leaf must be >= 1");
}

double gini_impurity(ClassCounts counts) {
  const auto n = counts.total();
  if (n == 0) throw MlError("EmptyNode", "gini impurity of an empty node");
  const double pa = static_cast<double>(counts.authentic) / static_cast<double>(n);
  const double pu = static_cast<double>(counts.unauthorized) / static_cast<double>(n);
  return 1.0 - (pa * pa + pu * pu);
}

std::optional<SplitCandidate> best_split(std::span<const EncodedSample> samples,
                                         std::span<const std::size_t> candidate_features,
                                         std::size_t min_samples_leaf) {
  std::vector<std::size_t> rows(samples.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return best_split(samples, rows, candidate_features, min_samples_leaf);
}

std::optional<SplitCandidate> best_split(std::span<const EncodedSample> samples,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidate_features,
                                         std::size_t min_samples_leaf) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;
  if (n >= kMaxRows) throw MlError("TooManySamples", "node exceeds 2^24 samples");
  min_samples_leaf = std::max<std::size_t>(min_samples_leaf, 1);

  const ClassCounts parent = count_rows(samples, rows);
  // Parent as a score with the same scale: q / n.
  const Score parent_score{sum_squares(parent), n};

  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());

  std::optional<SplitCandidate> best;
  Score best_score = parent_score;
  std::vector<std::size_t> order(rows.begin(), rows.end());

  for (const std::size_t f : features) {
    if (f >= feature::kCount) throw MlError("InvalidFeature", "feature index out of range");
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return samples[a].x[f] < samples[b].x[f]; });
    ClassCounts left;
    ClassCounts right = parent;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto& s = samples[order[i]];
      left.add(s.label);
      --(s.label == Label::Authentic ? right.authentic : right.unauthorized);
      const double here = s.x[f];
      const double next = samples[order[i + 1]].x[f];
      if (!(here < next)) continue;
      if (left.total() < min_samples_leaf || right.total() < min_samples_leaf) continue;
      const Score score = split_score(left, right);
      if (score.beats(best_score)) {
        best_score = score;
        best = SplitCandidate{f, midpoint(here, next), weighted_impurity(score, n)};
      }
    }
  }
  return best;
}

DecisionTree::DecisionTree(std::vector<Node> nodes, TreeParams params)
    : nodes_(std::move(nodes)), params_(std::move(params)) {
  if (nodes_.empty()) throw MlError("InvalidTree", "tree has no nodes");
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    if (node.is_leaf()) continue;
    if (node.feature >= static_cast<int>(feature::kCount) || !std::isfinite(node.threshold)) {
      throw MlError("InvalidTree", "node " + std::to_string(i) + " has an invalid split");
    }
    for (const auto child : {node.left, node.right}) {
      // Children always follow their parent, which rules out cycles.
      if (child <= static_cast<std::int32_t>(i) ||
          child >= static_cast<std::int32_t>(nodes_.size())) {
        throw MlError("InvalidTree", "node " + std::to_string(i) + " has a bad child index");
      }
      ++parents[static_cast<std::size_t>(child)];
    }
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) {
      throw MlError("InvalidTree", "node " + std::to_string(i) + " is not referenced exactly once");
    }
  }
}

std::size_t DecisionTree::leaf_for(const FeatureVector& x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const Node& node = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                     ? node.left
                                     : node.right);
  }
  return i;
}

Label DecisionTree::predict(const FeatureVector& x) const {
  return nodes_[leaf_for(x)].label;
}

std::size_t DecisionTree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

namespace detail {

namespace {

class TreeBuilder {
public:
  TreeBuilder(std::span<const EncodedSample> samples, const TreeParams& params,
              std::size_t features_per_split, Rng& rng)
      : samples_(samples), params_(params), features_per_split_(features_per_split), rng_(rng) {}

  std::int32_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    DecisionTree::Node node;
    node.counts = count_rows(samples_, rows);
    node.label = node.counts.majority();
    nodes_.push_back(node);

    const bool pure = node.counts.authentic == 0 || node.counts.unauthorized == 0;
    const bool at_depth_limit = params_.max_depth && depth >= *params_.max_depth;
    if (pure || at_depth_limit || rows.size() < params_.min_samples_split) return index;

    const auto features = draw_features();
    const auto split = best_split(samples_, rows, features, params_.min_samples_leaf);
    if (!split) return index;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (auto r : rows) {
      (samples_[r].x[split->feature_index] <= split->threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const auto left = grow(std::move(left_rows), depth + 1);
    const auto right = grow(std::move(right_rows), depth + 1);
    auto& parent = nodes_[static_cast<std::size_t>(index)];
    parent.feature = static_cast<int>(split->feature_index);
    parent.threshold = split->threshold;
    parent.left = left;
    parent.right = right;
    return index;
  }

  std::vector<DecisionTree::Node> take() { return std::move(nodes_); }

private:
  std::vector<std::size_t> draw_features() {
    std::vector<std::size_t> all(feature::kCount);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (features_per_split_ >= feature::kCount) return all;
    // Partial Fisher-Yates: the first k slots become a uniform k-subset.
    for (std::size_t i = 0; i < features_per_split_; ++i) {
      std::swap(all[i], all[i + rng_.below(feature::kCount - i)]);
    }
    all.resize(features_per_split_);
    return all;
  }

  std::span<const EncodedSample> samples_;
  const TreeParams& params_;
  std::size_t features_per_split_;
  Rng& rng_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

DecisionTree grow_tree(std::span<const EncodedSample> samples, std::vector<std::size_t> rows,
                       const TreeParams& params, std::size_t features_per_split, Rng& rng) {
  params.validate();
  if (rows.empty()) throw MlError("EmptyTrainingSet", "cannot train on zero samples");
  TreeBuilder builder(samples, params, features_per_split, rng);
  builder.grow(std::move(rows), 0);
  return DecisionTree(builder.take(), params);
}

}  // namespace detail

DecisionTree train_decision_tree(std::span<const EncodedSample> train, const TreeParams& params,
                                 std::uint64_t seed) {
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(seed);
  return detail::grow_tree(train, std::move(rows), params, feature::kCount, rng);
}

}  // namespace proxauth::ml
