#pragma once

// Beacon observations, device scans, the labeled CSV dataset, and the
// encoding of one observation into a fixed-length numeric feature vector.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "proxauth/error.hpp"

namespace proxauth {

enum class DeviceRole { Mobile, Login };
enum class Label { Authentic, Unauthorized };
enum class Provenance { RealCsv, Simulated };

std::string_view to_string(DeviceRole role);
std::string_view to_string(Label label);
std::string_view to_string(Provenance provenance);

/// Case-insensitive; accepts "authentic" / "unauthorized".
std::optional<Label> parse_label(std::string_view text);
/// Accepts "Mobile" / "Login" in any case.
std::optional<DeviceRole> parse_role(std::string_view text);

class BeaconError : public Error {
public:
  BeaconError(std::string code, const std::string& detail)
      : Error("beacon", std::move(code), detail) {}
};

/// Raised for a data row that cannot be parsed.  Row numbers are 1-based
/// and count the header as row 1.
class RowParseError : public BeaconError {
public:
  RowParseError(std::size_t row, std::string column, const std::string& detail);

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::string column_;
};

/// 48-bit BSSID, rendered as six colon-separated lowercase hex octets.
struct MacAddress {
  std::array<std::uint8_t, 6> octets{};

  static std::optional<MacAddress> parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const MacAddress&) const = default;
};

struct BeaconObservation {
  std::string ssid;
  std::optional<MacAddress> bssid;
  std::int64_t frequency_hz = 0;
  int rssi_dbm = 0;

  /// Throws BeaconError("InvalidObservation") when a field invariant fails.
  void validate() const;

  bool operator==(const BeaconObservation&) const = default;
};

struct ScanSnapshot {
  std::string device_id;
  DeviceRole role = DeviceRole::Mobile;
  std::int64_t timestamp_ms = 0;
  std::optional<std::string> location_tag;
  std::vector<BeaconObservation> observations;

  /// Checks every observation and rejects duplicate (ssid, bssid) pairs.
  void validate() const;

  bool operator==(const ScanSnapshot&) const = default;
};

struct LabeledSample {
  DeviceRole role = DeviceRole::Mobile;
  BeaconObservation observation;
  std::string location_tag;
  Label label = Label::Unauthorized;

  bool operator==(const LabeledSample&) const = default;
};

struct LabelCounts {
  std::size_t authentic = 0;
  std::size_t unauthorized = 0;

  std::size_t total() const noexcept { return authentic + unauthorized; }
  /// min/max class ratio >= 0.9.
  bool balanced() const noexcept;
};

struct Dataset {
  std::vector<LabeledSample> samples;
  Provenance provenance = Provenance::RealCsv;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  LabelCounts label_counts() const noexcept;
};

/// Maps the dataset's "RPI" column onto a device role.  A value containing
/// `mobile_token` is Mobile; otherwise one containing `login_token` is Login.
struct RoleMapping {
  std::string mobile_token = "1";
  std::string login_token = "2";

  std::optional<DeviceRole> map(std::string_view rpi_value) const;
  /// The RPI value written for `role`; chosen so `map` recovers the role.
  std::string render(DeviceRole role) const;
};

inline constexpr std::array<std::string_view, 6> kCsvColumns = {
    "RPI", "SSID", "Frequency (Hz)", "RSSI (dBm)", "Location", "Label"};

/// Parses the six-column dataset CSV.  Errors: MalformedHeader,
/// RowParseError, EmptyDataset.
Dataset parse_dataset_csv(std::istream& source, const RoleMapping& mapping = {});
Dataset load_dataset_csv(const std::filesystem::path& path, const RoleMapping& mapping = {});

void write_dataset_csv(std::ostream& sink, const Dataset& dataset, const RoleMapping& mapping = {});
void save_dataset_csv(const std::filesystem::path& path, const Dataset& dataset,
                      const RoleMapping& mapping = {});

namespace feature {
inline constexpr std::size_t kRole = 0;
inline constexpr std::size_t kSsidIndex = 1;
inline constexpr std::size_t kFrequency = 2;
inline constexpr std::size_t kRssi = 3;
inline constexpr std::size_t kCount = 4;
}  // namespace feature

/// [role_code, ssid_index, frequency_normalized, rssi_dbm]
struct FeatureVector {
  std::array<double, feature::kCount> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  static constexpr std::size_t size() noexcept { return feature::kCount; }

  bool operator==(const FeatureVector&) const = default;
};

class FeatureEncoder {
public:
  /// `vocabulary[i]` receives index i + 1.  Throws BeaconError on duplicate
  /// or empty SSIDs, or min_hz > max_hz.
  FeatureEncoder(std::vector<std::string> vocabulary, std::int64_t min_hz, std::int64_t max_hz);

  /// 0 for an SSID never seen in training.
  std::size_t ssid_index(std::string_view ssid) const;
  double normalize_frequency(std::int64_t hz) const;
  FeatureVector encode(DeviceRole role, const BeaconObservation& obs) const;

  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  std::int64_t frequency_min_hz() const noexcept { return min_hz_; }
  std::int64_t frequency_max_hz() const noexcept { return max_hz_; }

  bool operator==(const FeatureEncoder& other) const {
    return vocabulary_ == other.vocabulary_ && min_hz_ == other.min_hz_ && max_hz_ == other.max_hz_;
  }

private:
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::size_t> index_;
  std::int64_t min_hz_;
  std::int64_t max_hz_;
};

/// Vocabulary in first-appearance order; frequency range over the dataset.
/// Throws BeaconError("EmptyDataset").
FeatureEncoder build_feature_encoder(const Dataset& dataset);

inline FeatureVector encode_observation(const FeatureEncoder& encoder, DeviceRole role,
                                        const BeaconObservation& obs) {
  return encoder.encode(role, obs);
}

}  // namespace proxauth
