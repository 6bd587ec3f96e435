#include <fstream>
#include <mutex>

#include "proxauth/auth/codec.hpp"
#include "proxauth/auth/store.hpp"

namespace proxauth::auth {

using nlohmann::json;

namespace {

constexpr const char* kUsersFile = "users.json";
constexpr const char* kAuditFile = "audit.jsonl";

}  // namespace

json to_json(const UserRecord& r) {
  return {{"username", r.username},
          {"credential_hash", r.credential_hash},
          {"mobile_device_id", r.mobile_device_id},
          {"login_device_id", r.login_device_id},
          {"enrolled_at", r.enrolled_at_ms}};
}

UserRecord user_from_json(const json& doc) {
  return {doc.at("username").get<std::string>(), doc.at("credential_hash").get<std::string>(),
          doc.at("mobile_device_id").get<std::string>(),
          doc.at("login_device_id").get<std::string>(), doc.at("enrolled_at").get<std::int64_t>()};
}

json to_json(const AuditEntry& e) {
  json j = {{"session_id", e.session_id}, {"username", e.username}, {"decision", to_json(e.decision)}};
  j["mobile_scan"] = e.mobile_scan ? to_json(*e.mobile_scan) : json(nullptr);
  j["login_scan"] = e.login_scan ? to_json(*e.login_scan) : json(nullptr);
  return j;
}

AuditEntry audit_from_json(const json& doc) {
  AuditEntry e;
  e.session_id = doc.at("session_id").get<std::string>();
  e.username = doc.at("username").get<std::string>();
  e.decision = decision_from_json(doc.at("decision"));
  if (!doc.at("mobile_scan").is_null()) e.mobile_scan = snapshot_from_json(doc.at("mobile_scan"));
  if (!doc.at("login_scan").is_null()) e.login_scan = snapshot_from_json(doc.at("login_scan"));
  return e;
}

Store::Store(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(*dir_, ec);
  if (ec) throw AuthError("StoreError", "cannot create store directory " + dir_->string());
  try {
    if (std::ifstream in(*dir_ / kUsersFile); in) {
      const json doc = json::parse(in);
      for (const auto& u : doc.at("users")) {
        auto record = user_from_json(u);
        users_.emplace(record.username, std::move(record));
      }
    }
    if (std::ifstream in(*dir_ / kAuditFile); in) {
      for (std::string line; std::getline(in, line);) {
        if (!line.empty()) audit_.push_back(audit_from_json(json::parse(line)));
      }
    }
  } catch (const json::exception& e) {
    throw AuthError("StoreError", "corrupt store in " + dir_->string() + ": " + e.what());
  }
}

void Store::add_user(const UserRecord& record) {
  std::unique_lock lock(mutex_);
  if (users_.contains(record.username)) {
    throw AuthError("DuplicateUser", "user \"" + record.username + "\" is already enrolled");
  }
  for (const auto& [name, u] : users_) {
    for (const auto& id : {record.mobile_device_id, record.login_device_id}) {
      if (id == u.mobile_device_id || id == u.login_device_id) {
        throw AuthError("DuplicateDeviceId", "device \"" + id + "\" is enrolled to " + name);
      }
    }
  }
  users_.emplace(record.username, record);
  try {
    persist_users();
  } catch (...) {
    users_.erase(record.username);
    throw;
  }
}

std::optional<UserRecord> Store::find_user(const std::string& username) const {
  std::shared_lock lock(mutex_);
  const auto it = users_.find(username);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

std::size_t Store::user_count() const {
  std::shared_lock lock(mutex_);
  return users_.size();
}

void Store::append_audit(const AuditEntry& entry) {
  std::unique_lock lock(mutex_);
  if (dir_) {
    std::ofstream out(*dir_ / kAuditFile, std::ios::app | std::ios::binary);
    out << to_json(entry).dump() << '\n';
    out.flush();
    if (!out) throw AuthError("StoreError", "cannot append to audit log in " + dir_->string());
  }
  audit_.push_back(entry);
}

std::vector<AuditEntry> Store::audit_log() const {
  std::shared_lock lock(mutex_);
  return audit_;
}

void Store::persist_users() const {
  if (!dir_) return;
  json users = json::array();
  for (const auto& [name, u] : users_) users.push_back(to_json(u));
  const auto target = *dir_ / kUsersFile;
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    out << json{{"version", 1}, {"users", std::move(users)}}.dump(1) << '\n';
    if (!out) throw AuthError("StoreError", "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw AuthError("StoreError", "cannot replace " + target.string());
}

}  // namespace proxauth::auth
