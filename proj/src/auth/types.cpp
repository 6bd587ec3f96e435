#include <array>
#include <utility>

#include "proxauth/auth/types.hpp"

namespace proxauth::auth {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table,
                           std::string_view text) {
  for (const auto& [value, name] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table,
                         Enum value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<SessionState, std::string_view>, 2> kStates{{
    {SessionState::AwaitingScans, "AwaitingScans"},
    {SessionState::Decided, "Decided"},
}};

constexpr std::array<std::pair<Outcome, std::string_view>, 2> kOutcomes{{
    {Outcome::Grant, "Grant"},
    {Outcome::Deny, "Deny"},
}};

constexpr std::array<std::pair<DecisionReason, std::string_view>, 6> kReasons{{
    {DecisionReason::ClassifierAuthentic, "ClassifierAuthentic"},
    {DecisionReason::ClassifierUnauthorized, "ClassifierUnauthorized"},
    {DecisionReason::NoOverlap, "NoOverlap"},
    {DecisionReason::StaleScans, "StaleScans"},
    {DecisionReason::MissingScan, "MissingScan"},
    {DecisionReason::FirstFactorFailed, "FirstFactorFailed"},
}};

constexpr std::array<std::pair<MatchKey, std::string_view>, 2> kMatchKeys{{
    {MatchKey::BssidThenSsid, "BssidThenSsid"},
    {MatchKey::SsidOnly, "SsidOnly"},
}};

}  // namespace

std::string_view to_string(SessionState state) { return name_of(kStates, state); }
std::string_view to_string(Outcome outcome) { return name_of(kOutcomes, outcome); }
std::string_view to_string(DecisionReason reason) { return name_of(kReasons, reason); }
std::string_view to_string(MatchKey key) { return name_of(kMatchKeys, key); }

std::optional<SessionState> parse_session_state(std::string_view t) { return lookup(kStates, t); }
std::optional<Outcome> parse_outcome(std::string_view t) { return lookup(kOutcomes, t); }
std::optional<DecisionReason> parse_reason(std::string_view t) { return lookup(kReasons, t); }
std::optional<MatchKey> parse_match_key(std::string_view t) { return lookup(kMatchKeys, t); }

void PolicyConfig::validate() const {
  if (!(vote_threshold_tau > 0.0 && vote_threshold_tau <= 1.0)) {
    throw AuthError("InvalidPolicy", "vote_threshold_tau must lie in (0, 1]");
  }
  if (min_overlap_aps < 1) throw AuthError("InvalidPolicy", "min_overlap_aps must be >= 1");
  if (pairing_window_ms < 0) throw AuthError("InvalidPolicy", "pairing_window_ms must be >= 0");
  if (session_timeout_ms <= 0) throw AuthError("InvalidPolicy", "session_timeout_ms must be > 0");
}

AuthDecision AuthDecision::grant(double fraction, double tau, std::int64_t now_ms) {
  if (!(fraction >= tau)) {
    throw AuthError("InvalidDecision", "grant requires authentic fraction >= tau");
  }
  return {Outcome::Grant, DecisionReason::ClassifierAuthentic, fraction, now_ms};
}

AuthDecision AuthDecision::deny(DecisionReason reason, std::optional<double> fraction,
                                std::int64_t now_ms) {
  if (reason == DecisionReason::ClassifierAuthentic) {
    throw AuthError("InvalidDecision", "ClassifierAuthentic is a grant reason");
  }
  return {Outcome::Deny, reason, fraction, now_ms};
}

}  // namespace proxauth::auth
