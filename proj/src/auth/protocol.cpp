#include "proxauth/auth/codec.hpp"
#include "proxauth/auth/protocol.hpp"

namespace proxauth::auth {

using nlohmann::json;

namespace {

std::string require_string(const json& request, const char* field) {
  const auto it = request.find(field);
  if (it == request.end() || !it->is_string()) {
    throw AuthError("InvalidRequest", std::string("missing string field \"") + field + "\"");
  }
  return it->get<std::string>();
}

json ok(json result) { return {{"ok", true}, {"result", std::move(result)}}; }

}  // namespace

json error_response(std::string_view code, std::string_view message) {
  return {{"ok", false}, {"error", code}, {"message", message}};
}

json session_view(const AuthSession& s) {
  json j = {{"session_id", s.session_id},
            {"username", s.username},
            {"state", std::string(to_string(s.state))},
            {"created_at", s.created_at_ms},
            {"has_mobile_scan", s.mobile_scan.has_value()},
            {"has_login_scan", s.login_scan.has_value()}};
  if (s.decision) j.update(to_json(*s.decision));
  return j;
}

json handle_request(AuthService& service, const json& request) {
  try {
    if (!request.is_object()) throw AuthError("InvalidRequest", "request must be a JSON object");
    const auto op = require_string(request, "op");
    if (op == "enroll") {
      const auto record = service.enroll_user(
          require_string(request, "username"), require_string(request, "secret"),
          require_string(request, "mobile_device_id"), require_string(request, "login_device_id"));
      return ok({{"username", record.username},
                 {"mobile_device_id", record.mobile_device_id},
                 {"login_device_id", record.login_device_id},
                 {"enrolled_at", record.enrolled_at_ms}});
    }
    if (op == "begin") {
      return ok(session_view(service.begin_session(require_string(request, "username"),
                                                   require_string(request, "secret"))));
    }
    if (op == "submit_scan") {
      const auto session_id = require_string(request, "session_id");
      const auto device_id = require_string(request, "device_id");
      if (!request.contains("snapshot")) throw AuthError("InvalidRequest", "missing snapshot");
      service.submit_scan(session_id, device_id, snapshot_from_json(request.at("snapshot")));
      return ok(session_view(service.status(session_id)));
    }
    if (op == "status") {
      return ok(session_view(service.status(require_string(request, "session_id"))));
    }
    throw AuthError("InvalidRequest", "unknown op \"" + op + "\"");
  } catch (const AuthError& e) {
    return error_response(e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response("InternalError", e.what());
  }
}

std::string handle_line(AuthService& service, std::string_view line) {
  json response;
  if (line.size() > kMaxMessageBytes) {
    response = error_response("InvalidRequest", "message too large");
  } else {
    json request = json::parse(line, nullptr, false);
    response = request.is_discarded() ? error_response("InvalidRequest", "malformed JSON")
                                      : handle_request(service, request);
  }
  return response.dump();
}

}  // namespace proxauth::auth
