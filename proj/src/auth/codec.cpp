#include "proxauth/auth/codec.hpp"

namespace proxauth::auth {

using nlohmann::json;

json to_json(const BeaconObservation& obs) {
  json j = {{"ssid", obs.ssid}, {"frequency", obs.frequency_hz}, {"rssi", obs.rssi_dbm}};
  if (obs.bssid) j["bssid"] = obs.bssid->to_string();
  return j;
}

json to_json(const ScanSnapshot& snapshot) {
  json observations = json::array();
  for (const auto& o : snapshot.observations) observations.push_back(to_json(o));
  json j = {{"device_id", snapshot.device_id},
            {"role", std::string(to_string(snapshot.role))},
            {"timestamp", snapshot.timestamp_ms},
            {"observations", std::move(observations)}};
  if (snapshot.location_tag) j["location_tag"] = *snapshot.location_tag;
  return j;
}

json to_json(const AuthDecision& d) {
  return {{"outcome", std::string(to_string(d.outcome))},
          {"reason", std::string(to_string(d.reason))},
          {"authentic_fraction", d.authentic_fraction ? json(*d.authentic_fraction) : json(nullptr)},
          {"decided_at", d.decided_at_ms}};
}

BeaconObservation observation_from_json(const json& doc) {
  try {
    BeaconObservation obs;
    obs.ssid = doc.at("ssid").get<std::string>();
    if (doc.contains("bssid") && !doc.at("bssid").is_null()) {
      const auto text = doc.at("bssid").get<std::string>();
      obs.bssid = MacAddress::parse(text);
      if (!obs.bssid) throw AuthError("InvalidSnapshot", "malformed bssid \"" + text + "\"");
    }
    obs.frequency_hz = doc.at("frequency").get<std::int64_t>();
    obs.rssi_dbm = doc.at("rssi").get<int>();
    return obs;
  } catch (const json::exception& e) {
    throw AuthError("InvalidSnapshot", std::string("observation: ") + e.what());
  }
}

ScanSnapshot snapshot_from_json(const json& doc) {
  try {
    ScanSnapshot s;
    s.device_id = doc.value("device_id", std::string{});
    const auto role = parse_role(doc.at("role").get<std::string>());
    if (!role) throw AuthError("InvalidSnapshot", "role must be Mobile or Login");
    s.role = *role;
    s.timestamp_ms = doc.at("timestamp").get<std::int64_t>();
    if (doc.contains("location_tag") && !doc.at("location_tag").is_null()) {
      s.location_tag = doc.at("location_tag").get<std::string>();
    }
    for (const auto& o : doc.at("observations")) s.observations.push_back(observation_from_json(o));
    return s;
  } catch (const json::exception& e) {
    throw AuthError("InvalidSnapshot", std::string("snapshot: ") + e.what());
  }
}

AuthDecision decision_from_json(const json& doc) {
  try {
    AuthDecision d;
    const auto outcome = parse_outcome(doc.at("outcome").get<std::string>());
    const auto reason = parse_reason(doc.at("reason").get<std::string>());
    if (!outcome || !reason) throw AuthError("InvalidRequest", "unknown outcome or reason");
    d.outcome = *outcome;
    d.reason = *reason;
    if (!doc.at("authentic_fraction").is_null()) {
      d.authentic_fraction = doc.at("authentic_fraction").get<double>();
    }
    d.decided_at_ms = doc.value("decided_at", std::int64_t{0});
    return d;
  } catch (const json::exception& e) {
    throw AuthError("InvalidRequest", std::string("decision: ") + e.what());
  }
}

}  // namespace proxauth::auth

namespace proxauth::auth {

nlohmann::json to_json(const PolicyConfig& p) {
  return {{"pairing_window_ms", p.pairing_window_ms},
          {"vote_threshold_tau", p.vote_threshold_tau},
          {"min_overlap_aps", p.min_overlap_aps},
          {"match_key", std::string(to_string(p.match_key))},
          {"session_timeout_ms", p.session_timeout_ms}};
}

PolicyConfig policy_from_json(const nlohmann::json& doc, PolicyConfig p) {
  if (!doc.is_object()) throw AuthError("InvalidPolicy", "policy must be a JSON object");
  try {
    if (doc.contains("pairing_window_ms")) p.pairing_window_ms = doc.at("pairing_window_ms").get<std::int64_t>();
    if (doc.contains("vote_threshold_tau")) p.vote_threshold_tau = doc.at("vote_threshold_tau").get<double>();
    if (doc.contains("min_overlap_aps")) p.min_overlap_aps = doc.at("min_overlap_aps").get<std::size_t>();
    if (doc.contains("session_timeout_ms")) p.session_timeout_ms = doc.at("session_timeout_ms").get<std::int64_t>();
    if (doc.contains("match_key")) {
      const auto key = parse_match_key(doc.at("match_key").get<std::string>());
      if (!key) throw AuthError("InvalidPolicy", "unknown match_key " + doc.at("match_key").dump());
      p.match_key = *key;
    }
  } catch (const nlohmann::json::exception& e) {
    throw AuthError("InvalidPolicy", e.what());
  }
  p.validate();
  return p;
}

}  // namespace proxauth::auth
