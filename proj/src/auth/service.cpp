#include <chrono>
#include <cstdlib>

#include "proxauth/auth/credential.hpp"
#include "proxauth/auth/service.hpp"

namespace proxauth::auth {

std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::vector<RoleObservation> overlap_observations(const ScanSnapshot& mobile,
                                                  const ScanSnapshot& login,
                                                  const PolicyConfig& policy) {
  const auto& m = mobile.observations;
  const auto& l = login.observations;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> partner(m.size(), kNone);
  std::vector<bool> login_used(l.size(), false);

  const auto pair_by = [&](auto&& same) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (partner[i] != kNone) continue;
      for (std::size_t j = 0; j < l.size(); ++j) {
        if (!login_used[j] && same(m[i], l[j])) {
          partner[i] = j;
          login_used[j] = true;
          break;
        }
      }
    }
  };

  if (policy.match_key == MatchKey::BssidThenSsid) {
    pair_by([](const BeaconObservation& a, const BeaconObservation& b) {
      return a.bssid && b.bssid && *a.bssid == *b.bssid;
    });
  }
  pair_by([](const BeaconObservation& a, const BeaconObservation& b) { return a.ssid == b.ssid; });

  std::vector<RoleObservation> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (partner[i] == kNone) continue;
    out.push_back({DeviceRole::Mobile, m[i]});
    out.push_back({DeviceRole::Login, l[partner[i]]});
  }
  return out;
}

AuthService::AuthService(Store& store, std::shared_ptr<const ml::TrainedModel> model,
                         PolicyConfig policy, Clock clock, unsigned hash_iterations)
    : store_(store),
      model_(std::move(model)),
      policy_(policy),
      clock_(std::move(clock)),
      hash_iterations_(hash_iterations) {
  policy_.validate();
  if (!model_) throw AuthError("InvalidRequest", "authentication service needs a model");
}

UserRecord AuthService::enroll_user(const std::string& username, const std::string& secret,
                                    const std::string& mobile_device_id,
                                    const std::string& login_device_id) {
  if (username.empty() || mobile_device_id.empty() || login_device_id.empty()) {
    throw AuthError("InvalidRequest", "username and both device ids are required");
  }
  if (mobile_device_id == login_device_id) {
    throw AuthError("DuplicateDeviceId", "mobile and login devices must differ");
  }
  if (secret.size() < kMinSecretLength) {
    throw AuthError("WeakSecret",
                    "secret must be at least " + std::to_string(kMinSecretLength) + " characters");
  }
  if (store_.find_user(username)) {
    throw AuthError("DuplicateUser", "user \"" + username + "\" is already enrolled");
  }
  UserRecord record{username, hash_secret(secret, hash_iterations_), mobile_device_id,
                    login_device_id, clock_()};
  store_.add_user(record);
  return record;
}

AuthSession AuthService::begin_session(const std::string& username, const std::string& secret) {
  const auto user = store_.find_user(username);
  if (!user) throw AuthError("UnknownUser", "no enrolled user \"" + username + "\"");

  AuthSession session;
  session.session_id = random_token();
  session.username = username;
  session.created_at_ms = clock_();
  auto slot = open_slot(std::move(session));

  std::lock_guard lock(slot->mutex);
  if (!verify_secret(secret, user->credential_hash)) {
    record(*slot, AuthDecision::deny(DecisionReason::FirstFactorFailed, std::nullopt, clock_()));
  }
  return slot->session;
}

SubmitAck AuthService::submit_scan(const std::string& session_id, const std::string& device_id,
                                   ScanSnapshot snapshot) {
  auto slot = find_slot(session_id);
  std::lock_guard lock(slot->mutex);
  expire_if_stale(*slot);
  AuthSession& s = slot->session;
  if (s.state == SessionState::Decided) {
    throw AuthError("SessionDecided", "session " + session_id + " is already decided");
  }

  const auto user = store_.find_user(s.username);
  if (!user) throw AuthError("UnknownUser", "user \"" + s.username + "\" is no longer enrolled");
  DeviceRole role;
  if (device_id == user->mobile_device_id) {
    role = DeviceRole::Mobile;
  } else if (device_id == user->login_device_id) {
    role = DeviceRole::Login;
  } else {
    throw AuthError("ForeignDevice", "device \"" + device_id + "\" is not enrolled to " + s.username);
  }

  if (!snapshot.device_id.empty() && snapshot.device_id != device_id) {
    throw AuthError("InvalidSnapshot", "snapshot device_id does not match the submitting device");
  }
  if (snapshot.role != role) {
    throw AuthError("InvalidSnapshot", "device \"" + device_id + "\" is enrolled as " +
                                           std::string(to_string(role)));
  }
  try {
    snapshot.validate();
  } catch (const BeaconError& e) {
    throw AuthError("InvalidSnapshot", e.what());
  }
  snapshot.device_id = device_id;

  auto& target = role == DeviceRole::Mobile ? s.mobile_scan : s.login_scan;
  if (target) {
    throw AuthError("DuplicateRoleSubmission",
                    std::string(to_string(role)) + " scan already submitted for this session");
  }
  target = std::move(snapshot);

  SubmitAck ack;
  if (s.mobile_scan && s.login_scan) decide_locked(*slot);
  ack.state = s.state;
  ack.decision = s.decision;
  return ack;
}

AuthDecision AuthService::decide_session(const std::string& session_id) {
  auto slot = find_slot(session_id);
  std::lock_guard lock(slot->mutex);
  expire_if_stale(*slot);
  return decide_locked(*slot);
}

AuthSession AuthService::status(const std::string& session_id) {
  auto slot = find_slot(session_id);
  std::lock_guard lock(slot->mutex);
  expire_if_stale(*slot);
  return slot->session;
}

std::size_t AuthService::expire_stale_sessions() {
  std::vector<std::shared_ptr<Slot>> slots;
  {
    std::lock_guard lock(sessions_mutex_);
    for (const auto& [id, slot] : sessions_) slots.push_back(slot);
  }
  std::size_t expired = 0;
  for (const auto& slot : slots) {
    std::lock_guard lock(slot->mutex);
    const bool was_open = slot->session.state == SessionState::AwaitingScans;
    expire_if_stale(*slot);
    expired += was_open && slot->session.state == SessionState::Decided;
  }
  return expired;
}

std::shared_ptr<AuthService::Slot> AuthService::find_slot(const std::string& session_id) const {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw AuthError("UnknownSession", "no session \"" + session_id + "\"");
  return it->second;
}

std::shared_ptr<AuthService::Slot> AuthService::open_slot(AuthSession session) {
  auto slot = std::make_shared<Slot>();
  slot->session = std::move(session);
  std::lock_guard lock(sessions_mutex_);
  sessions_.emplace(slot->session.session_id, slot);
  return slot;
}

void AuthService::expire_if_stale(Slot& slot) {
  const AuthSession& s = slot.session;
  if (s.state != SessionState::AwaitingScans) return;
  if (clock_() - s.created_at_ms > policy_.session_timeout_ms) {
    record(slot, AuthDecision::deny(DecisionReason::MissingScan, std::nullopt, clock_()));
  }
}

AuthDecision AuthService::decide_locked(Slot& slot) {
  AuthSession& s = slot.session;
  if (s.decision) return *s.decision;
  if (!s.mobile_scan || !s.login_scan) {
    throw AuthError("MissingScan", "session " + s.session_id + " lacks a " +
                                       (s.mobile_scan ? "login" : "mobile") + " scan");
  }

  const auto now = clock_();
  const auto gap = std::llabs(s.mobile_scan->timestamp_ms - s.login_scan->timestamp_ms);
  if (gap > policy_.pairing_window_ms) {
    record(slot, AuthDecision::deny(DecisionReason::StaleScans, std::nullopt, now));
    return *s.decision;
  }

  const auto overlap = overlap_observations(*s.mobile_scan, *s.login_scan, policy_);
  if (overlap.size() < policy_.min_overlap_aps * 2) {
    record(slot, AuthDecision::deny(DecisionReason::NoOverlap, std::nullopt, now));
    return *s.decision;
  }

  std::size_t authentic = 0;
  for (const auto& o : overlap) {
    authentic += model_->predict(o.role, o.observation) == Label::Authentic;
  }
  const double fraction = static_cast<double>(authentic) / static_cast<double>(overlap.size());
  record(slot, fraction >= policy_.vote_threshold_tau
                   ? AuthDecision::grant(fraction, policy_.vote_threshold_tau, now)
                   : AuthDecision::deny(DecisionReason::ClassifierUnauthorized, fraction, now));
  return *s.decision;
}

void AuthService::record(Slot& slot, AuthDecision decision) {
  AuthSession& s = slot.session;
  if (s.decision) throw AuthError("SessionDecided", "decision already recorded");
  s.decision = decision;
  s.state = SessionState::Decided;
  store_.append_audit({s.session_id, s.username, decision, s.mobile_scan, s.login_scan});
}

}  // namespace proxauth::auth
