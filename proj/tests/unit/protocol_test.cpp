#include <gtest/gtest.h>

#include <thread>

#include "proxauth/auth/codec.hpp"
#include "proxauth/auth/net.hpp"
#include "proxauth/auth/protocol.hpp"
#include "fixtures.hpp"

namespace proxauth::auth {
namespace {

using nlohmann::json;

json scan(const std::string& device, const std::string& role, std::int64_t ts, int rssi) {
  return {{"device_id", device},
          {"role", role},
          {"timestamp", ts},
          {"observations", json::array({{{"ssid", "A"}, {"frequency", 2412000000}, {"rssi", rssi}}})}};
}

class ProtocolTest : public ::testing::Test {
protected:
  ProtocolTest()
      : svc_(store_, testing::rssi_threshold_model(), {}, clock_.clock(),
             testing::kFastHashIterations) {}

  static json enroll_request() {
    return {{"op", "enroll"},
            {"username", "alice"},
            {"secret", "open sesame"},
            {"mobile_device_id", "m"},
            {"login_device_id", "l"}};
  }
  json enroll() { return handle_request(svc_, enroll_request()); }

  Store store_;
  testing::FakeClock clock_;
  AuthService svc_;
};

TEST_F(ProtocolTest, FullRoundTripUsesWireFieldNames) {
  ASSERT_TRUE(enroll().at("ok").get<bool>());
  const auto begin = handle_request(svc_, {{"op", "begin"}, {"username", "alice"}, {"secret", "open sesame"}});
  ASSERT_TRUE(begin.at("ok").get<bool>()) << begin.dump();
  const auto sid = begin.at("result").at("session_id").get<std::string>();
  EXPECT_EQ(begin.at("result").at("state"), "AwaitingScans");
  EXPECT_FALSE(begin.at("result").contains("outcome"));

  const auto first = handle_request(
      svc_, {{"op", "submit_scan"}, {"session_id", sid}, {"device_id", "m"}, {"snapshot", scan("m", "Mobile", clock_.get(), -40)}});
  EXPECT_EQ(first.at("result").at("has_mobile_scan"), true);
  const auto second = handle_request(
      svc_, {{"op", "submit_scan"}, {"session_id", sid}, {"device_id", "l"}, {"snapshot", scan("l", "Login", clock_.get(), -40)}});
  const auto& r = second.at("result");
  EXPECT_EQ(r.at("state"), "Decided");
  EXPECT_EQ(r.at("outcome"), "Grant");
  EXPECT_EQ(r.at("reason"), "ClassifierAuthentic");
  EXPECT_EQ(r.at("authentic_fraction"), 1.0);
  EXPECT_EQ(r.at("username"), "alice");

  const auto status = handle_request(svc_, {{"op", "status"}, {"session_id", sid}});
  EXPECT_EQ(status.at("result"), r);
}

TEST_F(ProtocolTest, ErrorsCarryServiceCodes) {
  enroll();
  const auto code = [&](const json& req) {
    const auto resp = handle_request(svc_, req);
    EXPECT_FALSE(resp.at("ok").get<bool>());
    EXPECT_TRUE(resp.at("message").is_string());
    return resp.at("error").get<std::string>();
  };
  EXPECT_EQ(code(enroll_request()), "DuplicateUser");
  EXPECT_EQ(code({{"op", "begin"}, {"username", "bob"}, {"secret", "x"}}), "UnknownUser");
  EXPECT_EQ(code({{"op", "status"}, {"session_id", "nope"}}), "UnknownSession");
  EXPECT_EQ(code({{"op", "fly"}}), "InvalidRequest");
  EXPECT_EQ(code({{"username", "alice"}}), "InvalidRequest");
  EXPECT_EQ(code(json::array()), "InvalidRequest");
  const auto sid = handle_request(svc_, {{"op", "begin"}, {"username", "alice"}, {"secret", "open sesame"}})
                       .at("result").at("session_id").get<std::string>();
  EXPECT_EQ(code({{"op", "submit_scan"}, {"session_id", sid}, {"device_id", "zz"}, {"snapshot", scan("zz", "Mobile", 0, -40)}}),
            "ForeignDevice");
  EXPECT_EQ(code({{"op", "submit_scan"}, {"session_id", sid}, {"device_id", "m"}, {"snapshot", {{"role", "Tablet"}}}}),
            "InvalidSnapshot");
  EXPECT_EQ(code({{"op", "submit_scan"}, {"session_id", sid}, {"device_id", "m"}}), "InvalidRequest");
}

TEST_F(ProtocolTest, WrongSecretDecidesImmediately) {
  enroll();
  const auto r = handle_request(svc_, {{"op", "begin"}, {"username", "alice"}, {"secret", "nope nope"}});
  ASSERT_TRUE(r.at("ok").get<bool>());
  EXPECT_EQ(r.at("result").at("outcome"), "Deny");
  EXPECT_EQ(r.at("result").at("reason"), "FirstFactorFailed");
  EXPECT_TRUE(r.at("result").at("authentic_fraction").is_null());
}

TEST_F(ProtocolTest, HandleLineRejectsMalformedJson) {
  const auto r = json::parse(handle_line(svc_, "{not json"));
  EXPECT_EQ(r.at("ok"), false);
  EXPECT_EQ(r.at("error"), "InvalidRequest");
  const auto big = json::parse(handle_line(svc_, std::string(kMaxMessageBytes + 1, ' ')));
  EXPECT_EQ(big.at("error"), "InvalidRequest");
  EXPECT_EQ(handle_line(svc_, R"({"op":"status","session_id":"x"})").find('\n'), std::string::npos);
}

TEST(SnapshotJson, RoundTrips) {
  auto s = testing::snapshot("m", DeviceRole::Login, 42,
                             {testing::obs("A", -50, 2412000000, "02:00:00:00:00:0a"),
                              testing::obs("B", -70)});
  s.location_tag = "loc-01";
  const auto back = snapshot_from_json(to_json(s));
  EXPECT_EQ(back.device_id, s.device_id);
  EXPECT_EQ(back.role, s.role);
  EXPECT_EQ(back.timestamp_ms, 42);
  EXPECT_EQ(back.location_tag, s.location_tag);
  EXPECT_EQ(back.observations, s.observations);
  EXPECT_THROW(snapshot_from_json({{"role", "Mobile"}}), AuthError);
}

TEST(PolicyJson, RoundTripsAndValidates) {
  PolicyConfig p;
  p.pairing_window_ms = 5000;
  p.match_key = MatchKey::SsidOnly;
  const auto back = policy_from_json(to_json(p));
  EXPECT_EQ(back.pairing_window_ms, 5000);
  EXPECT_EQ(back.match_key, MatchKey::SsidOnly);
  EXPECT_EQ(policy_from_json({{"vote_threshold_tau", 0.8}}).vote_threshold_tau, 0.8);
  EXPECT_THROW(policy_from_json({{"vote_threshold_tau", 0.0}}), AuthError);
  EXPECT_THROW(policy_from_json({{"match_key", "Nope"}}), AuthError);
}

TEST(Endpoint, Parse) {
  const auto e = Endpoint::parse("127.0.0.1:7400");
  EXPECT_EQ(e.host, "127.0.0.1");
  EXPECT_EQ(e.port, 7400);
  EXPECT_EQ(e.to_string(), "127.0.0.1:7400");
  for (const char* bad : {"", "localhost", "1.2.3.4:", "1.2.3.4:70000", ":80x"}) {
    EXPECT_THROW(Endpoint::parse(bad), AuthError) << bad;
  }
}

TEST_F(ProtocolTest, TcpServerAndClient) {
  Server server(svc_, Endpoint{"127.0.0.1", 0});
  ASSERT_NE(server.port(), 0);
  std::jthread loop([&] { server.serve(); });
  {
    Client a(Endpoint{"127.0.0.1", server.port()});
    Client b(Endpoint{"127.0.0.1", server.port()});
    EXPECT_TRUE(a.call({{"op", "enroll"},
                        {"username", "alice"},
                        {"secret", "open sesame"},
                        {"mobile_device_id", "m"},
                        {"login_device_id", "l"}})
                    .at("ok")
                    .get<bool>());
    const auto sid = a.call({{"op", "begin"}, {"username", "alice"}, {"secret", "open sesame"}})
                         .at("result").at("session_id").get<std::string>();
    a.call({{"op", "submit_scan"}, {"session_id", sid}, {"device_id", "m"}, {"snapshot", scan("m", "Mobile", clock_.get(), -80)}});
    const auto r = b.call({{"op", "submit_scan"}, {"session_id", sid}, {"device_id", "l"}, {"snapshot", scan("l", "Login", clock_.get(), -80)}});
    EXPECT_EQ(r.at("result").at("outcome"), "Deny");
    EXPECT_EQ(r.at("result").at("reason"), "ClassifierUnauthorized");
    EXPECT_EQ(b.call({{"op", "status"}, {"session_id", "x"}}).at("error"), "UnknownSession");
  }
  server.stop();
}

TEST(Client, RefusedConnectionIsConnectionError) {
  Store store;
  AuthService svc(store, testing::rssi_threshold_model(), {});
  std::uint16_t port;
  {
    Server s(svc, Endpoint{"127.0.0.1", 0});
    port = s.port();
  }
  try {
    Client c(Endpoint{"127.0.0.1", port});
    c.call({{"op", "status"}});
    FAIL();
  } catch (const AuthError& e) {
    EXPECT_EQ(e.code(), "ConnectionError");
  }
}

}  // namespace
}  // namespace proxauth::auth
