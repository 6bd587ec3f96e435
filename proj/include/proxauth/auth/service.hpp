#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "proxauth/auth/store.hpp"
#include "proxauth/auth/types.hpp"
#include "proxauth/ml/model.hpp"

namespace proxauth::auth {

struct RoleObservation {
  DeviceRole role = DeviceRole::Mobile;
  BeaconObservation observation;

  bool operator==(const RoleObservation&) const = default;
};

/// Observations of access points heard by both devices, as (mobile, login)
/// pairs in mobile-scan order.  With BssidThenSsid, APs are first paired by
/// BSSID where both sides carry one; whatever is left is paired by SSID.
/// Each observation is used at most once.
std::vector<RoleObservation> overlap_observations(const ScanSnapshot& mobile,
                                                  const ScanSnapshot& login,
                                                  const PolicyConfig& policy);

struct SubmitAck {
  SessionState state = SessionState::AwaitingScans;
  std::optional<AuthDecision> decision;
};

/// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;
std::int64_t system_clock_ms();

/// The authentication server's state machine:
///
///   begin_session --(bad secret)--> Decided/Deny(FirstFactorFailed)
///        |
///        v
///   AwaitingScans --submit_scan x2--> decide --> Decided
///        |
///        +--(timeout without both scans)--> Decided/Deny(MissingScan)
///
/// Sessions of different users proceed concurrently; submissions to one
/// session are serialized.  A decision, once recorded, never changes.
class AuthService {
public:
  AuthService(Store& store, std::shared_ptr<const ml::TrainedModel> model, PolicyConfig policy,
              Clock clock = system_clock_ms, unsigned hash_iterations = 100'000);

  /// Errors: DuplicateUser, DuplicateDeviceId, WeakSecret, InvalidRequest.
  UserRecord enroll_user(const std::string& username, const std::string& secret,
                         const std::string& mobile_device_id, const std::string& login_device_id);

  /// Errors: UnknownUser.  A wrong secret still opens a session, already
  /// decided as Deny(FirstFactorFailed).
  AuthSession begin_session(const std::string& username, const std::string& secret);

  /// Errors: UnknownSession, SessionDecided, ForeignDevice,
  /// DuplicateRoleSubmission, InvalidSnapshot.
  SubmitAck submit_scan(const std::string& session_id, const std::string& device_id,
                        ScanSnapshot snapshot);

  /// Decides a session holding both scans; returns the existing decision
  /// if already decided.  Errors: UnknownSession, MissingScan.
  AuthDecision decide_session(const std::string& session_id);

  /// Errors: UnknownSession.  Applies the session timeout first.
  AuthSession status(const std::string& session_id);

  /// Denies every timed-out session still awaiting scans; returns how many.
  std::size_t expire_stale_sessions();

  const PolicyConfig& policy() const noexcept { return policy_; }
  const Store& store() const noexcept { return store_; }

private:
  struct Slot {
    std::mutex mutex;
    AuthSession session;
  };

  std::shared_ptr<Slot> find_slot(const std::string& session_id) const;
  std::shared_ptr<Slot> open_slot(AuthSession session);
  void expire_if_stale(Slot& slot);
  AuthDecision decide_locked(Slot& slot);
  void record(Slot& slot, AuthDecision decision);

  Store& store_;
  std::shared_ptr<const ml::TrainedModel> model_;
  PolicyConfig policy_;
  Clock clock_;
  unsigned hash_iterations_;

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

}  // namespace proxauth::auth
