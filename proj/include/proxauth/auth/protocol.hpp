#pragma once

// Request/response documents, one compact JSON object per line.
//
//   {"op":"enroll","username":u,"secret":s,"mobile_device_id":m,"login_device_id":l}
//   {"op":"begin","username":u,"secret":s}
//   {"op":"submit_scan","session_id":id,"device_id":d,"snapshot":{...}}
//   {"op":"status","session_id":id}
//
// Success: {"ok":true,"result":{...}}.  Session results carry session_id,
// username, state, and once decided outcome, reason, authentic_fraction.
// Failure: {"ok":false,"error":<code>,"message":<text>}.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "proxauth/auth/service.hpp"

namespace proxauth::auth {

inline constexpr std::size_t kMaxMessageBytes = 1 << 20;

nlohmann::json session_view(const AuthSession& session);

/// Never throws; every failure becomes an error response.
nlohmann::json handle_request(AuthService& service, const nlohmann::json& request);

/// Parses one line, dispatches it, and serializes the response.
std::string handle_line(AuthService& service, std::string_view line);

nlohmann::json error_response(std::string_view code, std::string_view message);

}  // namespace proxauth::auth
