#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "proxauth/beacon.hpp"
#include "proxauth/error.hpp"

namespace proxauth::ml {

class MlError : public Error {
public:
  MlError(std::string code, const std::string& detail) : Error("ml", std::move(code), detail) {}
};

struct EncodedSample {
  FeatureVector x;
  Label label = Label::Unauthorized;
};

std::vector<EncodedSample> encode_dataset(const FeatureEncoder& encoder, const Dataset& dataset);

struct ClassCounts {
  std::size_t authentic = 0;
  std::size_t unauthorized = 0;

  std::size_t total() const noexcept { return authentic + unauthorized; }
  void add(Label label) noexcept { ++(label == Label::Authentic ? authentic : unauthorized); }
  /// Ties go to Unauthorized.
  Label majority() const noexcept {
    return authentic > unauthorized ? Label::Authentic : Label::Unauthorized;
  }

  bool operator==(const ClassCounts&) const = default;
};

/// Splits each class independently: the test partition receives
/// round-half-up(test_fraction * count) samples of that class, picked by a
/// seeded Fisher-Yates shuffle.  Both partitions keep the input order.
/// Throws MlError("DegenerateSplit") if a class would leave either side empty.
std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed);

}  // namespace proxauth::ml
