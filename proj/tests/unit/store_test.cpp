#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "proxauth/auth/store.hpp"
#include "fixtures.hpp"

namespace proxauth::auth {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Store, PersistsUsersAndAuditAcrossReload) {
  testing::TempDir dir;
  const std::string secret = "hunter2-hunter2";
  const testing::FakeClock clock;
  std::string session_id;
  {
    Store store(dir.path());
    AuthService svc(store, testing::rssi_threshold_model(), {}, clock.clock(),
                    testing::kFastHashIterations);
    svc.enroll_user("alice", secret, "phone", "laptop");
    const auto s = svc.begin_session("alice", secret);
    session_id = s.session_id;
    svc.submit_scan(s.session_id, "phone",
                    testing::snapshot("phone", DeviceRole::Mobile, clock.get(), {testing::obs("A", -40)}));
    svc.submit_scan(s.session_id, "laptop",
                    testing::snapshot("laptop", DeviceRole::Login, clock.get(), {testing::obs("A", -40)}));
    svc.begin_session("alice", "wrong-secret-attempt");
  }
  Store reloaded(dir.path());
  EXPECT_EQ(reloaded.user_count(), 1u);
  EXPECT_EQ(reloaded.find_user("alice")->mobile_device_id, "phone");
  const auto log = reloaded.audit_log();
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[0].session_id, session_id);
  EXPECT_EQ(log[0].decision.outcome, Outcome::Grant);
  ASSERT_TRUE(log[0].login_scan);
  EXPECT_EQ(log[0].login_scan->observations[0].ssid, "A");
  EXPECT_EQ(log[1].decision.reason, DecisionReason::FirstFactorFailed);

  for (const char* file : {"users.json", "audit.jsonl"}) {
    const auto text = slurp(dir / file);
    EXPECT_EQ(text.find(secret), std::string::npos) << file;
    EXPECT_EQ(text.find("wrong-secret-attempt"), std::string::npos) << file;
  }
  EXPECT_NE(slurp(dir / "users.json").find("pbkdf2-sha256$"), std::string::npos);
}

TEST(Store, DeviceIdsAreGloballyUnique) {
  Store store;
  store.add_user({"alice", "h", "phone", "laptop", 0});
  try {
    store.add_user({"bob", "h", "tablet", "phone", 0});
    FAIL();
  } catch (const AuthError& e) {
    EXPECT_EQ(e.code(), "DuplicateDeviceId");
  }
  EXPECT_THROW(store.add_user({"alice", "h", "x", "y", 0}), AuthError);
  EXPECT_EQ(store.user_count(), 1u);
}

TEST(Store, CorruptFileIsStoreError) {
  testing::TempDir dir;
  std::ofstream(dir / "users.json") << "{ not json";
  try {
    Store store(dir.path());
    FAIL();
  } catch (const AuthError& e) {
    EXPECT_EQ(e.code(), "StoreError");
  }
}

TEST(Store, InMemoryHasNoDirectory) {
  Store store;
  EXPECT_FALSE(store.directory());
  store.append_audit({"s", "u", AuthDecision::deny(DecisionReason::NoOverlap, std::nullopt, 5),
                      std::nullopt, std::nullopt});
  EXPECT_EQ(store.audit_log().size(), 1u);
}

TEST(StoreJson, AuditEntryRoundTrips) {
  AuditEntry e{"sid", "alice", AuthDecision::grant(0.75, 0.6, 123),
               testing::snapshot("m", DeviceRole::Mobile, 7,
                                 {testing::obs("A", -50, 2412000000, "02:00:00:00:00:01")}),
               std::nullopt};
  const auto back = audit_from_json(to_json(e));
  EXPECT_EQ(back.decision, e.decision);
  EXPECT_EQ(back.mobile_scan->observations, e.mobile_scan->observations);
  EXPECT_FALSE(back.login_scan);
}

}  // namespace
}  // namespace proxauth::auth
