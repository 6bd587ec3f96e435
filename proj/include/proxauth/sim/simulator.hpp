#pragma once

// Synthetic regeneration of the desk-scale collection protocol: access
// points scattered over a square floor, log-distance path loss with
// Gaussian shadowing, and device pairs placed either within 7 ft of each
// other (authentic) or at least 7.5 ft apart (unauthorized).

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxauth/beacon.hpp"
#include "proxauth/error.hpp"
#include "proxauth/random.hpp"

namespace proxauth::sim {

class SimError : public Error {
public:
  SimError(std::string code, const std::string& detail) : Error("sim", std::move(code), detail) {}
};

inline constexpr double kFeetToMeters = 0.3048;
inline constexpr double kAuthenticMaxM = 7.0 * kFeetToMeters;      // 2.1336
inline constexpr double kUnauthorizedMinM = 7.5 * kFeetToMeters;   // 2.286

struct PathLossConfig {
  double p0_dbm = -40.0;
  double d0_m = 1.0;
  double exponent_n = 2.5;
  double noise_sigma_dbm = 2.0;
  int clamp_min_dbm = -100;
  int clamp_max_dbm = -20;

  void validate() const;
};

struct EnvironmentConfig {
  std::size_t n_aps = 10;
  double area_m = 30.0;
  /// "{index}" expands to the 1-based AP number, zero-padded to two digits.
  std::string ssid_pattern = "AP-{index}";
  std::vector<std::int64_t> frequency_set = {2412000000, 2437000000, 2462000000, 5180000000,
                                             5240000000};
  double detection_radius_m = 25.0;

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

struct AccessPoint {
  std::string ssid;
  MacAddress bssid;
  std::int64_t frequency_hz = 0;
  Point position;
};

/// One synthetic location: a fixed AP placement.
struct Layout {
  std::string location_tag;
  std::vector<AccessPoint> aps;
};

/// SSIDs and frequencies depend only on the AP index; positions and
/// BSSIDs on the location too.
Layout place_access_points(const EnvironmentConfig& env, std::size_t location_index, Rng& rng);

/// Layout of location `location_index` for a dataset generated with `seed`.
Layout location_layout(const EnvironmentConfig& env, std::uint64_t seed, std::size_t location_index);

enum class ScenarioKind { Authentic, Unauthorized };

/// Inter-device separation band.  Authentic draws from (min, max],
/// Unauthorized from [min, max]; the defaults leave the 7-7.5 ft gray area
/// out of both.
struct Scenario {
  ScenarioKind kind = ScenarioKind::Authentic;
  double min_m = 0.1;
  double max_m = kAuthenticMaxM;

  static Scenario authentic() { return {ScenarioKind::Authentic, 0.1, kAuthenticMaxM}; }
  static Scenario unauthorized() { return {ScenarioKind::Unauthorized, kUnauthorizedMinM, 10.0}; }

  Label label() const {
    return kind == ScenarioKind::Authentic ? Label::Authentic : Label::Unauthorized;
  }
  double draw_separation(Rng& rng) const;
  void validate() const;
};

/// round(p0 - 10 n log10(d / d0) + N(0, sigma)), clamped.  No noise draw is
/// consumed when sigma is zero.  Throws SimError("NonPositiveDistance").
int rssi_at_distance(const PathLossConfig& cfg, double distance_m, Rng& rng);

struct DeviceIds {
  std::string mobile = "sim-mobile";
  std::string login = "sim-login";
};

struct Session {
  ScanSnapshot mobile;
  ScanSnapshot login;
  Label true_label = Label::Authentic;
  double separation_m = 0.0;
  Point mobile_position;
  Point login_position;
};

/// Mobile device at a uniform anchor inside the area, login device at the
/// drawn separation on a uniform bearing.  Each device observes every AP
/// within the detection radius with independent shadowing.  The login scan
/// is stamped 0-999 ms after `timestamp_ms`.
/// Throws SimError("NoVisibleAp") if either device sees nothing.
Session generate_session(const Layout& layout, const EnvironmentConfig& env,
                         const PathLossConfig& loss, const Scenario& scenario, Rng& rng,
                         std::int64_t timestamp_ms = 0, const DeviceIds& ids = {});

inline constexpr int kMaxAnchorRetries = 100;

/// Re-draws the anchor on NoVisibleAp; throws SimError("ConfigurationError")
/// after kMaxAnchorRetries failures.
Session generate_session_retrying(const Layout& layout, const EnvironmentConfig& env,
                                  const PathLossConfig& loss, const Scenario& scenario, Rng& rng,
                                  std::int64_t timestamp_ms = 0, const DeviceIds& ids = {});

struct DatasetPlan {
  EnvironmentConfig env;
  PathLossConfig loss;
  Scenario authentic = Scenario::authentic();
  Scenario unauthorized = Scenario::unauthorized();
  std::size_t n_sessions_per_class = 121;
  std::size_t locations = 3;
  std::uint64_t seed = 0;
};

/// Session k of each class runs at location k mod `locations`.  Every
/// observation becomes one LabeledSample row; provenance is Simulated.
Dataset generate_dataset(const DatasetPlan& plan);

Dataset generate_dataset(const EnvironmentConfig& env, const PathLossConfig& loss,
                         std::size_t n_sessions_per_class, std::size_t locations,
                         std::uint64_t seed);

/// Sessions per class so a full-visibility run emits at least `target_rows`.
std::size_t sessions_for_rows(const EnvironmentConfig& env, std::size_t target_rows);

/// Smallest session count per class for which generate_dataset(plan) emits
/// at least `target_rows`, honoring partial AP visibility.
std::size_t sessions_for_rows(const DatasetPlan& plan, std::size_t target_rows);

std::string location_tag(std::size_t location_index);

nlohmann::json to_json(const PathLossConfig& cfg);
nlohmann::json to_json(const EnvironmentConfig& cfg);
nlohmann::json to_json(const Scenario& scenario);
PathLossConfig path_loss_from_json(const nlohmann::json& doc, PathLossConfig defaults = {});
EnvironmentConfig environment_from_json(const nlohmann::json& doc, EnvironmentConfig defaults = {});

/// Sidecar written next to a simulated CSV: configs, seed, counts.
nlohmann::json plan_metadata(const DatasetPlan& plan, const Dataset& dataset);
/// Reads the "environment", "path_loss", "locations" and scenario band
/// overrides of a simulator config document.
DatasetPlan plan_from_json(const nlohmann::json& doc, DatasetPlan defaults = {});

}  // namespace proxauth::sim
