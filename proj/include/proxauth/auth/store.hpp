#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxauth/auth/types.hpp"

namespace proxauth::auth {

/// One decided session.  Carries the submitted scans but never credential
/// material.
struct AuditEntry {
  std::string session_id;
  std::string username;
  AuthDecision decision;
  std::optional<ScanSnapshot> mobile_scan;
  std::optional<ScanSnapshot> login_scan;
};

/// Enrollment records plus an append-only audit log.
///
/// With a directory, users live in `users.json` (rewritten atomically on
/// every enrollment) and the audit log in `audit.jsonl` (one decision per
/// line).  Reads may run concurrently; writes are serialized.
class Store {
public:
  /// In-memory only.
  Store() = default;
  /// Loads existing state from `dir`, creating it if needed.
  explicit Store(std::filesystem::path dir);

  /// Throws AuthError DuplicateUser / DuplicateDeviceId.
  void add_user(const UserRecord& record);
  std::optional<UserRecord> find_user(const std::string& username) const;
  std::size_t user_count() const;

  void append_audit(const AuditEntry& entry);
  std::vector<AuditEntry> audit_log() const;

  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

private:
  void persist_users() const;

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, UserRecord> users_;
  std::vector<AuditEntry> audit_;
};

nlohmann::json to_json(const UserRecord& record);
UserRecord user_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AuditEntry& entry);
AuditEntry audit_from_json(const nlohmann::json& doc);

}  // namespace proxauth::auth
