#pragma once

#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "proxauth/auth/service.hpp"
#include "proxauth/ml/model.hpp"
#include "proxauth/random.hpp"

namespace proxauth::testing {

inline BeaconObservation obs(std::string ssid, int rssi, std::int64_t hz = 2437000000,
                             std::optional<std::string> bssid = std::nullopt) {
  BeaconObservation o{std::move(ssid), std::nullopt, hz, rssi};
  if (bssid) o.bssid = MacAddress::parse(*bssid);
  return o;
}

inline ScanSnapshot snapshot(std::string device, DeviceRole role, std::int64_t ts,
                             std::vector<BeaconObservation> observations) {
  return {std::move(device), role, ts, std::nullopt, std::move(observations)};
}

/// Random training set on a small integer grid so repeated values and ties
/// are common.  With `consistent`, no two samples share a feature vector.
inline std::vector<ml::EncodedSample> random_samples(Rng& rng, std::size_t n, bool consistent) {
  std::vector<ml::EncodedSample> out;
  std::set<std::array<double, 4>> seen;
  std::size_t attempts = 0;
  while (out.size() < n && attempts++ < 50 * n) {
    FeatureVector x;
    x[feature::kRole] = static_cast<double>(rng.below(2));
    x[feature::kSsidIndex] = static_cast<double>(rng.below(6));
    x[feature::kFrequency] = static_cast<double>(rng.below(5)) / 4.0;
    x[feature::kRssi] = -90.0 + static_cast<double>(rng.below(50));
    if (consistent && !seen.insert(x.values).second) continue;
    out.push_back({x, rng.below(2) == 0 ? Label::Authentic : Label::Unauthorized});
  }
  return out;
}

/// Random probe vectors spanning (and exceeding) the random_samples grid.
inline FeatureVector random_probe(Rng& rng) {
  FeatureVector x;
  x[feature::kRole] = static_cast<double>(rng.below(2));
  x[feature::kSsidIndex] = rng.uniform(-1.0, 7.0);
  x[feature::kFrequency] = rng.uniform(-0.2, 1.2);
  x[feature::kRssi] = rng.uniform(-100.0, -20.0);
  return x;
}

/// Classifier that calls an observation Authentic iff rssi > threshold.
inline std::shared_ptr<const ml::TrainedModel> rssi_threshold_model(double threshold = -60.0) {
  using Node = ml::DecisionTree::Node;
  std::vector<Node> nodes(3);
  nodes[0].feature = static_cast<int>(feature::kRssi);
  nodes[0].threshold = threshold;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].label = Label::Unauthorized;
  nodes[2].label = Label::Authentic;
  return std::make_shared<const ml::TrainedModel>(ml::TrainedModel{
      ml::DecisionTree(std::move(nodes)),
      FeatureEncoder({"A", "B", "C", "D"}, 2412000000, 5240000000), std::nullopt});
}

/// Manually advanced clock.
struct FakeClock {
  std::shared_ptr<std::atomic<std::int64_t>> now =
      std::make_shared<std::atomic<std::int64_t>>(1'700'000'000'000);

  auth::Clock clock() const {
    return [now = now] { return now->load(); };
  }
  void advance(std::int64_t ms) const { *now += ms; }
  std::int64_t get() const { return now->load(); }
};

inline constexpr unsigned kFastHashIterations = 1000;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("proxauth-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

}  // namespace proxauth::testing
