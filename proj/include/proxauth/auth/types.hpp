#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "proxauth/beacon.hpp"
#include "proxauth/error.hpp"

namespace proxauth::auth {

/// `code()` values double as the wire protocol's `error` field.
class AuthError : public Error {
public:
  AuthError(std::string code, const std::string& detail) : Error("auth", std::move(code), detail) {}
};

struct UserRecord {
  std::string username;
  /// Encoded salted hash; see credential.hpp.
  std::string credential_hash;
  std::string mobile_device_id;
  std::string login_device_id;
  std::int64_t enrolled_at_ms = 0;

  bool operator==(const UserRecord&) const = default;
};

enum class MatchKey { BssidThenSsid, SsidOnly };

struct PolicyConfig {
  std::int64_t pairing_window_ms = 10'000;
  double vote_threshold_tau = 0.6;
  std::size_t min_overlap_aps = 1;
  MatchKey match_key = MatchKey::BssidThenSsid;
  /// A session still missing a scan this long after it began is denied
  /// with MissingScan.
  std::int64_t session_timeout_ms = 60'000;

  void validate() const;
};

enum class SessionState { AwaitingScans, Decided };
enum class Outcome { Grant, Deny };
enum class DecisionReason {
  ClassifierAuthentic,
  ClassifierUnauthorized,
  NoOverlap,
  StaleScans,
  MissingScan,
  FirstFactorFailed,
};

inline constexpr DecisionReason kAllReasons[] = {
    DecisionReason::ClassifierAuthentic, DecisionReason::ClassifierUnauthorized,
    DecisionReason::NoOverlap,           DecisionReason::StaleScans,
    DecisionReason::MissingScan,         DecisionReason::FirstFactorFailed,
};

std::string_view to_string(SessionState state);
std::string_view to_string(Outcome outcome);
std::string_view to_string(DecisionReason reason);
std::string_view to_string(MatchKey key);
std::optional<SessionState> parse_session_state(std::string_view text);
std::optional<Outcome> parse_outcome(std::string_view text);
std::optional<DecisionReason> parse_reason(std::string_view text);
std::optional<MatchKey> parse_match_key(std::string_view text);

struct AuthDecision {
  Outcome outcome = Outcome::Deny;
  DecisionReason reason = DecisionReason::MissingScan;
  std::optional<double> authentic_fraction;
  std::int64_t decided_at_ms = 0;

  /// The only way to build a Grant; throws AuthError("InvalidDecision")
  /// unless fraction >= tau.
  static AuthDecision grant(double fraction, double tau, std::int64_t now_ms);
  /// Throws AuthError("InvalidDecision") for reason ClassifierAuthentic.
  static AuthDecision deny(DecisionReason reason, std::optional<double> fraction,
                           std::int64_t now_ms);

  bool operator==(const AuthDecision&) const = default;
};

struct AuthSession {
  std::string session_id;
  std::string username;
  SessionState state = SessionState::AwaitingScans;
  std::optional<ScanSnapshot> mobile_scan;
  std::optional<ScanSnapshot> login_scan;
  std::int64_t created_at_ms = 0;
  std::optional<AuthDecision> decision;
};

}  // namespace proxauth::auth
