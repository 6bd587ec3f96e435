#include <cmath>
#include <numeric>

#include "proxauth/ml/common.hpp"
#include "proxauth/random.hpp"

namespace proxauth::ml {

std::vector<EncodedSample> encode_dataset(const FeatureEncoder& encoder, const Dataset& dataset) {
  std::vector<EncodedSample> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) {
    out.push_back({encoder.encode(s.role, s.observation), s.label});
  }
  return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw MlError("InvalidFraction", "test fraction must lie in (0, 1), got " +
                                         std::to_string(test_fraction));
  }
  Rng rng(seed);
  std::vector<bool> in_test(dataset.size(), false);
  for (const Label cls : {Label::Authentic, Label::Unauthorized}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.samples[i].label == cls) members.push_back(i);
    }
    // Round half up; the epsilon absorbs products like 0.1 * 5 landing a
    // hair below the half.
    const double exact = test_fraction * static_cast<double>(members.size());
    const auto n_test = static_cast<std::size_t>(std::floor(exact + 0.5 + 1e-9));
    if (n_test == 0 || n_test >= members.size()) {
      throw MlError("DegenerateSplit",
                    "class " + std::string(to_string(cls)) + " has " +
                        std::to_string(members.size()) + " samples; a " +
                        std::to_string(test_fraction) + " split leaves one partition without it");
    }
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[rng.below(i + 1)]);
    }
    for (std::size_t k = 0; k < n_test; ++k) in_test[members[k]] = true;
  }

  std::pair<Dataset, Dataset> parts;
  parts.first.provenance = parts.second.provenance = dataset.provenance;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (in_test[i] ? parts.second : parts.first).samples.push_back(dataset.samples[i]);
  }
  return parts;
}

}  // namespace proxauth::ml
