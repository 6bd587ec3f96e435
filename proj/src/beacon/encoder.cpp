#include <algorithm>
#include <unordered_set>

#include "proxauth/beacon.hpp"

namespace proxauth {

FeatureEncoder::FeatureEncoder(std::vector<std::string> vocabulary, std::int64_t min_hz,
                               std::int64_t max_hz)
    : vocabulary_(std::move(vocabulary)), min_hz_(min_hz), max_hz_(max_hz) {
  if (min_hz_ > max_hz_) {
    throw BeaconError("InvalidEncoder", "frequency range is inverted");
  }
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (vocabulary_[i].empty()) throw BeaconError("InvalidEncoder", "empty SSID in vocabulary");
    if (!index_.emplace(vocabulary_[i], i + 1).second) {
      throw BeaconError("InvalidEncoder", "duplicate SSID \"" + vocabulary_[i] + "\" in vocabulary");
    }
  }
}

std::size_t FeatureEncoder::ssid_index(std::string_view ssid) const {
  const auto it = index_.find(std::string(ssid));
  return it == index_.end() ? 0 : it->second;
}

double FeatureEncoder::normalize_frequency(std::int64_t hz) const {
  if (min_hz_ == max_hz_) return 0.5;
  const double scaled = static_cast<double>(hz - min_hz_) / static_cast<double>(max_hz_ - min_hz_);
  return std::clamp(scaled, 0.0, 1.0);
}

FeatureVector FeatureEncoder::encode(DeviceRole role, const BeaconObservation& obs) const {
  FeatureVector v;
  v[feature::kRole] = role == DeviceRole::Mobile ? 0.0 : 1.0;
  v[feature::kSsidIndex] = static_cast<double>(ssid_index(obs.ssid));
  v[feature::kFrequency] = normalize_frequency(obs.frequency_hz);
  v[feature::kRssi] = static_cast<double>(obs.rssi_dbm);
  return v;
}

FeatureEncoder build_feature_encoder(const Dataset& dataset) {
  if (dataset.empty()) throw BeaconError("EmptyDataset", "cannot fit an encoder on no samples");
  std::vector<std::string> vocabulary;
  std::unordered_set<std::string_view> seen;
  std::int64_t lo = dataset.samples.front().observation.frequency_hz;
  std::int64_t hi = lo;
  for (const auto& s : dataset.samples) {
    if (seen.insert(s.observation.ssid).second) vocabulary.push_back(s.observation.ssid);
    lo = std::min(lo, s.observation.frequency_hz);
    hi = std::max(hi, s.observation.frequency_hz);
  }
  return FeatureEncoder(std::move(vocabulary), lo, hi);
}

}  // namespace proxauth
