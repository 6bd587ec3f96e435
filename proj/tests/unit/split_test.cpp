#include <gtest/gtest.h>

#include <algorithm>

#include "proxauth/ml/common.hpp"
#include "fixtures.hpp"

namespace proxauth::ml {
namespace {

Dataset labeled(std::size_t authentic, std::size_t unauthorized) {
  Dataset d;
  std::size_t id = 0;
  const auto add = [&](Label label) {
    d.samples.push_back({DeviceRole::Mobile, testing::obs("S" + std::to_string(id), -static_cast<int>(id % 90)),
                         "L", label});
    ++id;
  };
  // Interleave so order preservation is observable.
  for (std::size_t i = 0; i < std::max(authentic, unauthorized); ++i) {
    if (i < authentic) add(Label::Authentic);
    if (i < unauthorized) add(Label::Unauthorized);
  }
  return d;
}

TEST(StratifiedSplit, PublishedCountsGiveFrozenPartitionSizes) {
  const auto [train, test] = stratified_split(labeled(2442, 2383), 0.2, 1);
  EXPECT_EQ(test.label_counts().authentic, 488u);
  EXPECT_EQ(test.label_counts().unauthorized, 477u);
  EXPECT_EQ(test.size(), 965u);
  EXPECT_EQ(train.size(), 3860u);
}

TEST(StratifiedSplit, TenSamplesGiveOnePerClass) {
  const auto [train, test] = stratified_split(labeled(5, 5), 0.2, 3);
  EXPECT_EQ(test.label_counts().authentic, 1u);
  EXPECT_EQ(test.label_counts().unauthorized, 1u);
  EXPECT_EQ(train.label_counts().authentic, 4u);
  EXPECT_EQ(train.label_counts().unauthorized, 4u);
}

TEST(StratifiedSplit, RoundsHalfUp) {
  // 0.5 * 5 = 2.5 -> 3 per class.
  const auto test = stratified_split(labeled(5, 5), 0.5, 0).second;
  EXPECT_EQ(test.label_counts().authentic, 3u);
}

TEST(StratifiedSplit, SameSeedSamePartitions) {
  const auto d = labeled(40, 37);
  const auto a = stratified_split(d, 0.2, 99);
  const auto b = stratified_split(d, 0.2, 99);
  EXPECT_EQ(a.first.samples, b.first.samples);
  EXPECT_EQ(a.second.samples, b.second.samples);
  const auto c = stratified_split(d, 0.2, 100);
  EXPECT_NE(a.second.samples, c.second.samples);
}

TEST(StratifiedSplit, DegenerateWhenAClassWouldEmptyASide) {
  try {
    stratified_split(labeled(2, 10), 0.2, 0);  // 0.4 rounds to 0
    FAIL();
  } catch (const MlError& e) {
    EXPECT_EQ(e.code(), "DegenerateSplit");
  }
  EXPECT_THROW(stratified_split(labeled(1, 10), 0.5, 0), MlError);  // 0.5 -> 1 = all
  EXPECT_THROW(stratified_split(labeled(0, 10), 0.2, 0), MlError);
}

TEST(StratifiedSplit, FractionMustBeOpenUnitInterval) {
  EXPECT_THROW(stratified_split(labeled(5, 5), 0.0, 0), MlError);
  EXPECT_THROW(stratified_split(labeled(5, 5), 1.0, 0), MlError);
}

TEST(StratifiedSplitProperty, PartitionIsOrderPreservingMultisetUnion) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = labeled(2 + rng.below(60), 2 + rng.below(60));
    const double fraction = rng.uniform(0.3, 0.7);
    const auto [train, test] = stratified_split(d, fraction, rng.next_u64());
    ASSERT_EQ(train.size() + test.size(), d.size());
    // Samples are distinct, so a merge by original position reconstructs d.
    std::size_t i = 0, j = 0;
    for (const auto& s : d.samples) {
      if (i < train.size() && train.samples[i] == s) {
        ++i;
      } else {
        ASSERT_LT(j, test.size());
        ASSERT_EQ(test.samples[j], s);
        ++j;
      }
    }
    for (Label label : {Label::Authentic, Label::Unauthorized}) {
      const auto total = static_cast<double>(std::count_if(
          d.samples.begin(), d.samples.end(), [&](const auto& s) { return s.label == label; }));
      const auto in_test = static_cast<double>(std::count_if(
          test.samples.begin(), test.samples.end(), [&](const auto& s) { return s.label == label; }));
      EXPECT_LE(std::abs(in_test - fraction * total), 0.5 + 1e-9);
    }
  }
}

}  // namespace
}  // namespace proxauth::ml
