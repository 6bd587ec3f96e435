#include <algorithm>
#include <cmath>
#include <numbers>

#include "proxauth/sim/simulator.hpp"

namespace proxauth::sim {

using nlohmann::json;

namespace {

constexpr std::int64_t kEpochMs = 1'700'000'000'000;
constexpr std::uint64_t kLayoutStream = 0;
constexpr std::uint64_t kSessionStream = 1;
// Keeps observations out of the singular log at d = 0.
constexpr double kMinDistanceM = 0.01;

std::string expand_ssid(const std::string& pattern, std::size_t index) {
  std::string number = std::to_string(index);
  if (number.size() < 2) number.insert(0, 2 - number.size(), '0');
  std::string out = pattern;
  const std::string key = "{index}";
  if (const auto at = out.find(key); at != std::string::npos) {
    out.replace(at, key.size(), number);
  } else {
    out += number;
  }
  return out;
}

std::vector<BeaconObservation> observe(const Layout& layout, const EnvironmentConfig& env,
                                       const PathLossConfig& loss, Point where, Rng& rng) {
  std::vector<BeaconObservation> seen;
  for (const auto& ap : layout.aps) {
    const double d = distance(where, ap.position);
    if (d > env.detection_radius_m) continue;
    seen.push_back({ap.ssid, ap.bssid, ap.frequency_hz,
                    rssi_at_distance(loss, std::max(d, kMinDistanceM), rng)});
  }
  return seen;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void PathLossConfig::validate() const {
  if (!(d0_m > 0.0)) throw SimError("ConfigurationError", "d0_m must be positive");
  if (!(exponent_n > 0.0)) throw SimError("ConfigurationError", "exponent_n must be positive");
  if (!(noise_sigma_dbm >= 0.0)) {
    throw SimError("ConfigurationError", "noise_sigma_dbm must be non-negative");
  }
  if (!(clamp_min_dbm < clamp_max_dbm)) {
    throw SimError("ConfigurationError", "clamp min must be below clamp max");
  }
  if (clamp_max_dbm > 0) throw SimError("ConfigurationError", "clamp max must be <= 0 dBm");
}

void EnvironmentConfig::validate() const {
  if (n_aps < 1) throw SimError("ConfigurationError", "n_aps must be >= 1");
  if (!(area_m > 0.0)) throw SimError("ConfigurationError", "area_m must be positive");
  if (!(detection_radius_m > 0.0)) {
    throw SimError("ConfigurationError", "detection_radius_m must be positive");
  }
  if (frequency_set.empty()) throw SimError("ConfigurationError", "frequency_set is empty");
  for (const auto hz : frequency_set) {
    if (hz <= 0) throw SimError("ConfigurationError", "frequencies must be positive");
  }
}

std::string location_tag(std::size_t location_index) {
  std::string n = std::to_string(location_index + 1);
  if (n.size() < 2) n.insert(0, 2 - n.size(), '0');
  return "loc-" + n;
}

Layout place_access_points(const EnvironmentConfig& env, std::size_t location_index, Rng& rng) {
  env.validate();
  Layout layout;
  layout.location_tag = location_tag(location_index);
  for (std::size_t i = 0; i < env.n_aps; ++i) {
    AccessPoint ap;
    ap.ssid = expand_ssid(env.ssid_pattern, i + 1);
    // Locally administered unicast prefix 02:00.
    ap.bssid.octets = {0x02,
                       0x00,
                       static_cast<std::uint8_t>(location_index >> 8),
                       static_cast<std::uint8_t>(location_index),
                       static_cast<std::uint8_t>(i >> 8),
                       static_cast<std::uint8_t>(i)};
    ap.frequency_hz = env.frequency_set[i % env.frequency_set.size()];
    ap.position.x = rng.uniform(0.0, env.area_m);
    ap.position.y = rng.uniform(0.0, env.area_m);
    layout.aps.push_back(std::move(ap));
  }
  return layout;
}

Layout location_layout(const EnvironmentConfig& env, std::uint64_t seed,
                       std::size_t location_index) {
  Rng rng(Rng::derive_seed(Rng::derive_seed(seed, kLayoutStream), location_index));
  return place_access_points(env, location_index, rng);
}

double Scenario::draw_separation(Rng& rng) const {
  const double u = rng.uniform01();
  if (kind == ScenarioKind::Authentic) return max_m - (max_m - min_m) * u;  // (min, max]
  return min_m + (max_m - min_m) * u;                                      // [min, max)
}

void Scenario::validate() const {
  if (!(min_m > 0.0) || !(max_m > min_m)) {
    throw SimError("ConfigurationError", "scenario band must satisfy 0 < min < max");
  }
}

int rssi_at_distance(const PathLossConfig& cfg, double distance_m, Rng& rng) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw SimError("NonPositiveDistance", "distance must be a positive finite number of meters");
  }
  double value = cfg.p0_dbm - 10.0 * cfg.exponent_n * std::log10(distance_m / cfg.d0_m);
  if (cfg.noise_sigma_dbm > 0.0) value += rng.normal(0.0, cfg.noise_sigma_dbm);
  value = std::clamp(std::round(value), static_cast<double>(cfg.clamp_min_dbm),
                     static_cast<double>(cfg.clamp_max_dbm));
  return static_cast<int>(value);
}

Session generate_session(const Layout& layout, const EnvironmentConfig& env,
                         const PathLossConfig& loss, const Scenario& scenario, Rng& rng,
                         std::int64_t timestamp_ms, const DeviceIds& ids) {
  Session s;
  s.true_label = scenario.label();
  s.mobile_position = {rng.uniform(0.0, env.area_m), rng.uniform(0.0, env.area_m)};
  const double bearing = rng.uniform(0.0, 2.0 * std::numbers::pi);
  s.separation_m = scenario.draw_separation(rng);
  s.login_position = {s.mobile_position.x + s.separation_m * std::cos(bearing),
                      s.mobile_position.y + s.separation_m * std::sin(bearing)};

  s.mobile.device_id = ids.mobile;
  s.mobile.role = DeviceRole::Mobile;
  s.mobile.location_tag = layout.location_tag;
  s.mobile.observations = observe(layout, env, loss, s.mobile_position, rng);

  s.login.device_id = ids.login;
  s.login.role = DeviceRole::Login;
  s.login.location_tag = layout.location_tag;
  s.login.observations = observe(layout, env, loss, s.login_position, rng);

  s.mobile.timestamp_ms = timestamp_ms;
  s.login.timestamp_ms = timestamp_ms + static_cast<std::int64_t>(rng.below(1000));

  if (s.mobile.observations.empty() || s.login.observations.empty()) {
    throw SimError("NoVisibleAp", "a device at " + layout.location_tag + " sees no access point");
  }
  return s;
}

Session generate_session_retrying(const Layout& layout, const EnvironmentConfig& env,
                                  const PathLossConfig& loss, const Scenario& scenario, Rng& rng,
                                  std::int64_t timestamp_ms, const DeviceIds& ids) {
  for (int attempt = 0; attempt < kMaxAnchorRetries; ++attempt) {
    try {
      return generate_session(layout, env, loss, scenario, rng, timestamp_ms, ids);
    } catch (const SimError& e) {
      if (e.code() != "NoVisibleAp") throw;
    }
  }
  throw SimError("ConfigurationError",
                 "no anchor with visible access points after " +
                     std::to_string(kMaxAnchorRetries) + " attempts at " + layout.location_tag);
}

namespace {

void validate_plan(const DatasetPlan& plan) {
  plan.env.validate();
  plan.loss.validate();
  plan.authentic.validate();
  plan.unauthorized.validate();
  if (plan.locations < 1) throw SimError("ConfigurationError", "locations must be >= 1");
}

std::vector<Layout> plan_layouts(const DatasetPlan& plan) {
  std::vector<Layout> layouts;
  for (std::size_t loc = 0; loc < plan.locations; ++loc) {
    layouts.push_back(location_layout(plan.env, plan.seed, loc));
  }
  return layouts;
}

// Session k of both classes; independent of how many sessions the plan has.
void append_session_pair(const DatasetPlan& plan, const std::vector<Layout>& layouts,
                         std::size_t k, Dataset& dataset) {
  const Scenario* scenarios[] = {&plan.authentic, &plan.unauthorized};
  for (std::size_t c = 0; c < 2; ++c) {
    const Layout& layout = layouts[k % layouts.size()];
    Rng rng(Rng::derive_seed(Rng::derive_seed(plan.seed, kSessionStream + c), k));
    const auto ts = kEpochMs + static_cast<std::int64_t>(2 * k + c) * 60'000;
    const Session s = generate_session_retrying(layout, plan.env, plan.loss, *scenarios[c], rng, ts);
    for (const ScanSnapshot* snap : {&s.mobile, &s.login}) {
      for (const auto& obs : snap->observations) {
        dataset.samples.push_back({snap->role, obs, layout.location_tag, s.true_label});
      }
    }
  }
}

}  // namespace

Dataset generate_dataset(const DatasetPlan& plan) {
  validate_plan(plan);
  if (plan.n_sessions_per_class < 1) {
    throw SimError("ConfigurationError", "n_sessions_per_class must be >= 1");
  }
  const auto layouts = plan_layouts(plan);
  Dataset dataset;
  dataset.provenance = Provenance::Simulated;
  for (std::size_t k = 0; k < plan.n_sessions_per_class; ++k) {
    append_session_pair(plan, layouts, k, dataset);
  }
  return dataset;
}

std::size_t sessions_for_rows(const DatasetPlan& plan, std::size_t target_rows) {
  validate_plan(plan);
  const auto layouts = plan_layouts(plan);
  Dataset dataset;
  std::size_t k = 0;
  do {
    append_session_pair(plan, layouts, k++, dataset);
  } while (dataset.size() < target_rows);
  return k;
}

Dataset generate_dataset(const EnvironmentConfig& env, const PathLossConfig& loss,
                         std::size_t n_sessions_per_class, std::size_t locations,
                         std::uint64_t seed) {
  DatasetPlan plan;
  plan.env = env;
  plan.loss = loss;
  plan.n_sessions_per_class = n_sessions_per_class;
  plan.locations = locations;
  plan.seed = seed;
  return generate_dataset(plan);
}

std::size_t sessions_for_rows(const EnvironmentConfig& env, std::size_t target_rows) {
  const std::size_t rows_per_session_pair = 2 * 2 * std::max<std::size_t>(env.n_aps, 1);
  return std::max<std::size_t>(1, (target_rows + rows_per_session_pair - 1) / rows_per_session_pair);
}

json to_json(const PathLossConfig& cfg) {
  return {{"p0_dbm", cfg.p0_dbm},
          {"d0_m", cfg.d0_m},
          {"exponent_n", cfg.exponent_n},
          {"noise_sigma_dbm", cfg.noise_sigma_dbm},
          {"clamp_min_dbm", cfg.clamp_min_dbm},
          {"clamp_max_dbm", cfg.clamp_max_dbm}};
}

json to_json(const EnvironmentConfig& cfg) {
  return {{"n_aps", cfg.n_aps},
          {"area_m", cfg.area_m},
          {"ssid_pattern", cfg.ssid_pattern},
          {"frequency_set", cfg.frequency_set},
          {"detection_radius_m", cfg.detection_radius_m}};
}

json to_json(const Scenario& scenario) {
  return {{"kind", scenario.kind == ScenarioKind::Authentic ? "authentic" : "unauthorized"},
          {"min_m", scenario.min_m},
          {"max_m", scenario.max_m}};
}

PathLossConfig path_loss_from_json(const json& doc, PathLossConfig c) {
  c.p0_dbm = doc.value("p0_dbm", c.p0_dbm);
  c.d0_m = doc.value("d0_m", c.d0_m);
  c.exponent_n = doc.value("exponent_n", c.exponent_n);
  c.noise_sigma_dbm = doc.value("noise_sigma_dbm", c.noise_sigma_dbm);
  c.clamp_min_dbm = doc.value("clamp_min_dbm", c.clamp_min_dbm);
  c.clamp_max_dbm = doc.value("clamp_max_dbm", c.clamp_max_dbm);
  c.validate();
  return c;
}

EnvironmentConfig environment_from_json(const json& doc, EnvironmentConfig c) {
  c.n_aps = doc.value("n_aps", c.n_aps);
  c.area_m = doc.value("area_m", c.area_m);
  c.ssid_pattern = doc.value("ssid_pattern", c.ssid_pattern);
  c.frequency_set = doc.value("frequency_set", c.frequency_set);
  c.detection_radius_m = doc.value("detection_radius_m", c.detection_radius_m);
  c.validate();
  return c;
}

json plan_metadata(const DatasetPlan& plan, const Dataset& dataset) {
  const auto counts = dataset.label_counts();
  return {{"generator", "proxauth-sim"},
          {"version", 1},
          {"seed", plan.seed},
          {"n_sessions_per_class", plan.n_sessions_per_class},
          {"locations", plan.locations},
          {"environment", to_json(plan.env)},
          {"path_loss", to_json(plan.loss)},
          {"scenarios", {to_json(plan.authentic), to_json(plan.unauthorized)}},
          {"rows", dataset.size()},
          {"authentic_rows", counts.authentic},
          {"unauthorized_rows", counts.unauthorized}};
}

DatasetPlan plan_from_json(const json& doc, DatasetPlan plan) {
  try {
    if (doc.contains("environment")) plan.env = environment_from_json(doc.at("environment"), plan.env);
    if (doc.contains("path_loss")) plan.loss = path_loss_from_json(doc.at("path_loss"), plan.loss);
    plan.locations = doc.value("locations", plan.locations);
    if (doc.contains("authentic_band_m")) {
      plan.authentic.min_m = doc.at("authentic_band_m").at(0).get<double>();
      plan.authentic.max_m = doc.at("authentic_band_m").at(1).get<double>();
    }
    if (doc.contains("unauthorized_band_m")) {
      plan.unauthorized.min_m = doc.at("unauthorized_band_m").at(0).get<double>();
      plan.unauthorized.max_m = doc.at("unauthorized_band_m").at(1).get<double>();
    }
  } catch (const json::exception& e) {
    throw SimError("ConfigurationError", e.what());
  }
  plan.authentic.validate();
  plan.unauthorized.validate();
  return plan;
}

}  // namespace proxauth::sim
