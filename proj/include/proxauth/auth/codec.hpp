#pragma once

// JSON encodings shared by the wire protocol and the on-disk store.  Field
// names mirror the C++ types: a snapshot is
//   {"device_id", "role", "timestamp", "location_tag", "observations":
//     [{"ssid", "bssid", "frequency", "rssi"}, ...]}
// with integer milliseconds, integer Hz and integer dBm.

#include <nlohmann/json.hpp>

#include "proxauth/auth/types.hpp"

namespace proxauth::auth {

nlohmann::json to_json(const BeaconObservation& obs);
nlohmann::json to_json(const ScanSnapshot& snapshot);
nlohmann::json to_json(const AuthDecision& decision);

/// Throw AuthError("InvalidSnapshot") on missing or ill-typed fields.
BeaconObservation observation_from_json(const nlohmann::json& doc);
ScanSnapshot snapshot_from_json(const nlohmann::json& doc);
/// Throws AuthError("InvalidRequest").
AuthDecision decision_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const PolicyConfig& policy);
/// Missing fields keep their defaults.  Throws AuthError("InvalidPolicy").
PolicyConfig policy_from_json(const nlohmann::json& doc, PolicyConfig defaults = {});

}  // namespace proxauth::auth
