#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>
#include <utility>

#include "proxauth/beacon.hpp"

namespace proxauth {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(DeviceRole role) {
  return role == DeviceRole::Mobile ? "Mobile" : "Login";
}

std::string_view to_string(Label label) {
  return label == Label::Authentic ? "authentic" : "unauthorized";
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::RealCsv ? "real_csv" : "simulated";
}

std::optional<Label> parse_label(std::string_view text) {
  text = trim(text);
  if (iequals(text, "authentic")) return Label::Authentic;
  if (iequals(text, "unauthorized")) return Label::Unauthorized;
  return std::nullopt;
}

std::optional<DeviceRole> parse_role(std::string_view text) {
  text = trim(text);
  if (iequals(text, "mobile")) return DeviceRole::Mobile;
  if (iequals(text, "login")) return DeviceRole::Login;
  return std::nullopt;
}

RowParseError::RowParseError(std::size_t row, std::string column, const std::string& detail)
    : BeaconError("RowParseError",
                  "row " + std::to_string(row) + ", column \"" + column + "\": " + detail),
      row_(row),
      column_(std::move(column)) {}

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
  text = trim(text);
  if (text.size() != 17) return std::nullopt;
  MacAddress mac;
  for (std::size_t i = 0; i < 6; ++i) {
    const std::string_view octet = text.substr(i * 3, 2);
    if (i < 5 && text[i * 3 + 2] != ':') return std::nullopt;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(octet.data(), octet.data() + 2, value, 16);
    if (ec != std::errc{} || ptr != octet.data() + 2) return std::nullopt;
    mac.octets[i] = static_cast<std::uint8_t>(value);
  }
  return mac;
}

std::string MacAddress::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets[0], octets[1], octets[2],
                octets[3], octets[4], octets[5]);
  return buf;
}

void BeaconObservation::validate() const {
  if (ssid.empty()) throw BeaconError("InvalidObservation", "ssid is empty");
  if (frequency_hz <= 0) {
    throw BeaconError("InvalidObservation",
                      "frequency must be positive, got " + std::to_string(frequency_hz));
  }
  if (rssi_dbm > 0) {
    throw BeaconError("InvalidObservation",
                      "rssi must be <= 0 dBm, got " + std::to_string(rssi_dbm));
  }
}

void ScanSnapshot::validate() const {
  std::set<std::pair<std::string, std::optional<MacAddress>>> seen;
  for (const auto& obs : observations) {
    obs.validate();
    if (!seen.emplace(obs.ssid, obs.bssid).second) {
      throw BeaconError("DuplicateObservation",
                        "snapshot from " + device_id + " lists ssid \"" + obs.ssid + "\"" +
                            (obs.bssid ? " / " + obs.bssid->to_string() : std::string{}) +
                            " twice");
    }
  }
}

bool LabelCounts::balanced() const noexcept {
  const auto [lo, hi] = std::minmax(authentic, unauthorized);
  if (hi == 0) return false;
  return static_cast<double>(lo) / static_cast<double>(hi) >= 0.9;
}

LabelCounts Dataset::label_counts() const noexcept {
  LabelCounts counts;
  for (const auto& s : samples) {
    if (s.label == Label::Authentic) {
      ++counts.authentic;
    } else {
      ++counts.unauthorized;
    }
  }
  return counts;
}

std::optional<DeviceRole> RoleMapping::map(std::string_view rpi_value) const {
  if (!mobile_token.empty() && rpi_value.find(mobile_token) != std::string_view::npos) {
    return DeviceRole::Mobile;
  }
  if (!login_token.empty() && rpi_value.find(login_token) != std::string_view::npos) {
    return DeviceRole::Login;
  }
  return std::nullopt;
}

std::string RoleMapping::render(DeviceRole role) const {
  std::string value = "RPI" + (role == DeviceRole::Mobile ? mobile_token : login_token);
  if (map(value) != role) {
    throw BeaconError("AmbiguousRoleMapping", "RPI value \"" + value + "\" does not map back to " +
                                                  std::string(to_string(role)));
  }
  return value;
}

}  // namespace proxauth
