#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "proxauth/auth/net.hpp"
#include "proxauth/cli.hpp"
#include "fixtures.hpp"

namespace proxauth::cli {
namespace {

template <typename T>
T parse_as(const std::vector<std::string>& args) {
  return std::get<T>(parse_args(args).action);
}

std::string usage_flag(const std::vector<std::string>& args) {
  try {
    parse_args(args);
  } catch (const UsageError& e) {
    EXPECT_EQ(e.qualified_code(), "cli.UsageError");
    return e.flag();
  }
  return "none";
}

struct RunResult {
  int status;
  std::string out;
  std::string err;
};

RunResult run_args(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = run(parse_args(args), out, err);
  return {status, out.str(), err.str()};
}

TEST(ParseArgs, TrainMapsFlags) {
  const auto t = parse_as<Train>({"train", "--data", "d.csv", "--model", "rf", "--seed", "7", "--out", "m.model"});
  EXPECT_EQ(t.data, "d.csv");
  EXPECT_EQ(t.kind, ModelKind::RandomForest);
  EXPECT_EQ(t.seed, 7u);
  EXPECT_EQ(t.out, "m.model");
  EXPECT_FALSE(t.params);
  EXPECT_EQ(parse_as<Train>({"train", "--data", "d", "--model", "dt", "--seed", "1", "--out", "o"}).kind,
            ModelKind::DecisionTree);
}

TEST(ParseArgs, EvaluateDefaultsToTwentyPercent) {
  const auto e = parse_as<Evaluate>({"evaluate", "--model", "m.model", "--data", "d.csv"});
  EXPECT_EQ(e.split, 0.2);
  EXPECT_FALSE(e.seed);
  EXPECT_EQ(parse_as<Evaluate>({"evaluate", "--model", "m", "--data", "d", "--seed", "4"}).seed, 4u);
}

TEST(ParseArgs, UnknownModelKindNamesFlag) {
  EXPECT_EQ(usage_flag({"train", "--data", "d", "--model", "xgb", "--seed", "1", "--out", "o"}), "--model");
}

TEST(ParseArgs, UsageErrorsNameOffendingFlag) {
  EXPECT_EQ(usage_flag({"train", "--data", "d", "--out", "o"}), "--seed");
  EXPECT_EQ(usage_flag({"simulate", "--out", "x.csv"}), "--seed");
  EXPECT_EQ(usage_flag({"evaluate", "--model", "m", "--data", "d", "--split", "1.5"}), "--split");
  EXPECT_EQ(usage_flag({"attempt", "--username", "u", "--secret", "s", "--scenario", "middle"}), "--scenario");
  EXPECT_NE(usage_flag({"fly"}), "none");
  EXPECT_NE(usage_flag({}), "none");
}

TEST(ParseArgs, ServeAndAttemptDefaults) {
  const auto s = parse_as<Serve>({"serve", "--model", "m"});
  EXPECT_EQ(s.listen, "127.0.0.1:7400");
  const auto a = parse_as<Attempt>({"attempt", "--username", "u", "--secret", "s", "--scenario", "far"});
  EXPECT_EQ(a.scenario, AttemptScenario::Far);
  EXPECT_EQ(a.server, "127.0.0.1:7400");
}

TEST(ParseArgs, JsonFlagAndHelp) {
  EXPECT_TRUE(parse_args({"--json", "ingest", "--data", "d"}).json);
  EXPECT_FALSE(parse_args({"ingest", "--data", "d"}).json);
  EXPECT_TRUE(std::holds_alternative<Help>(parse_args({"--help"}).action));
}

TEST(Run, EvaluateMissingFileNamesPath) {
  const auto r = run_args({"evaluate", "--model", "/nonexistent/m.model", "--data", "/nonexistent/d.csv"});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("/nonexistent/m.model"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("ml.FileNotFound"), std::string::npos) << r.err;
}

TEST(Run, PipelineSimulateTrainEvaluateAttempt) {
  testing::TempDir dir;
  const auto csv = (dir / "d.csv").string();
  const auto model = (dir / "m.model").string();

  auto r = run_args({"simulate", "--rows", "600", "--seed", "3", "--out", csv});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(csv + ".meta.json"));

  r = run_args({"ingest", "--data", csv});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("rows: "), std::string::npos);

  r = run_args({"train", "--data", csv, "--model", "dt", "--seed", "3", "--out", model});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("training time: "), std::string::npos);

  r = run_args({"evaluate", "--model", model, "--data", csv});
  ASSERT_EQ(r.status, 0) << r.err;
  for (const char* line : {"confusion matrix: ", "accuracy: 0.", "sensitivity: ", "specificity: ",
                           "precision: ", "f1: ", "test samples: "}) {
    EXPECT_NE(r.out.find(line), std::string::npos) << line << "\n" << r.out;
  }

  r = run_args({"--json", "evaluate", "--model", model, "--data", csv});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("command"), "evaluate");
  const auto& cm = doc.at("confusion_matrix");
  EXPECT_EQ(cm.at("tp").get<std::size_t>() + cm.at("tn").get<std::size_t>() +
                cm.at("fp").get<std::size_t>() + cm.at("fn").get<std::size_t>(),
            doc.at("test_samples").get<std::size_t>());
  EXPECT_TRUE(doc.at("accuracy").is_number());

  auth::Store store;
  auth::AuthService svc(store, std::make_shared<const ml::TrainedModel>(ml::load_model(model)), {},
                        auth::system_clock_ms, testing::kFastHashIterations);
  auth::Server server(svc, auth::Endpoint{"127.0.0.1", 0});
  std::jthread loop([&] { server.serve(); });
  const auto addr = "127.0.0.1:" + std::to_string(server.port());
  r = run_args({"attempt", "--server", addr, "--username", "carol", "--secret", "long enough",
                "--scenario", "near", "--seed", "5", "--env-seed", "3"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("outcome: "), std::string::npos);
  r = run_args({"--json", "attempt", "--server", addr, "--username", "carol", "--secret", "wrong secret",
                "--scenario", "far"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto attempt = nlohmann::json::parse(r.out);
  EXPECT_EQ(attempt.at("outcome"), "Deny");
  EXPECT_EQ(attempt.at("reason"), "FirstFactorFailed");
  server.stop();
}

TEST(Run, AttemptWithoutServerFails) {
  const auto r = run_args({"attempt", "--server", "127.0.0.1:1", "--username", "u", "--secret",
                           "long enough", "--scenario", "near"});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("auth.ConnectionError"), std::string::npos) << r.err;
}

TEST(Run, SimulateIsDeterministic) {
  testing::TempDir dir;
  for (const char* name : {"a.csv", "b.csv"}) {
    ASSERT_EQ(run_args({"simulate", "--rows", "300", "--seed", "8", "--out", (dir / name).string()}).status, 0);
  }
  std::ifstream a(dir / "a.csv"), b(dir / "b.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

}  // namespace
}  // namespace proxauth::cli
