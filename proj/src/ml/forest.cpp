#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "proxauth/ml/forest.hpp"

namespace proxauth::ml {

void ForestParams::validate() const {
  if (n_trees < 1) throw MlError("InvalidParams", "n_trees must be >= 1");
  if (features_per_split < 1 || features_per_split > feature::kCount) {
    throw MlError("InvalidParams", "features_per_split must lie in [1, 4]");
  }
  tree_params.validate();
}

RandomForest::RandomForest(std::vector<DecisionTree> trees, ForestParams params)
    : trees_(std::move(trees)), params_(std::move(params)) {
  params_.validate();
  if (trees_.size() != params_.n_trees) {
    throw MlError("InvalidForest", "forest holds " + std::to_string(trees_.size()) +
                                       " trees but n_trees is " + std::to_string(params_.n_trees));
  }
}

VoteCount RandomForest::votes(const FeatureVector& x) const {
  VoteCount v;
  for (const auto& tree : trees_) {
    ++(tree.predict(x) == Label::Authentic ? v.authentic : v.unauthorized);
  }
  return v;
}

Label RandomForest::predict(const FeatureVector& x) const {
  const auto v = votes(x);
  return v.authentic > v.unauthorized ? Label::Authentic : Label::Unauthorized;
}

namespace {

DecisionTree train_member(std::span<const EncodedSample> train, const ForestParams& params,
                          std::size_t index) {
  Rng rng(Rng::derive_seed(params.seed, index));
  std::vector<std::size_t> rows(train.size());
  if (params.bootstrap) {
    for (auto& r : rows) r = rng.below(train.size());
  } else {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  return detail::grow_tree(train, std::move(rows), params.tree_params, params.features_per_split,
                           rng);
}

}  // namespace

RandomForest train_random_forest(std::span<const EncodedSample> train, const ForestParams& params,
                                 unsigned threads) {
  params.validate();
  if (train.empty()) throw MlError("EmptyTrainingSet", "cannot train on zero samples");

  std::vector<DecisionTree> trees(params.n_trees);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, params.n_trees));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < params.n_trees && !failed; i = next++) {
      try {
        trees[i] = train_member(train, params, i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return RandomForest(std::move(trees), params);
}

}  // namespace proxauth::ml
