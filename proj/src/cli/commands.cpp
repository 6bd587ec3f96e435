#include <signal.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "proxauth/auth/codec.hpp"
#include "proxauth/auth/net.hpp"
#include "proxauth/auth/store.hpp"
#include "proxauth/cli.hpp"
#include "proxauth/ml/model.hpp"
#include "proxauth/sim/simulator.hpp"

namespace proxauth::cli {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json read_json_file(const Path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cli", "FileNotFound", "cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error("cli", "InvalidConfig", path.string() + " is not valid JSON");
  return doc;
}

std::string fixed3(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

json metric_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json counts_json(const LabelCounts& c) {
  return {{"authentic", c.authentic}, {"unauthorized", c.unauthorized}};
}

std::string counts_text(const LabelCounts& c) {
  return "authentic " + std::to_string(c.authentic) + ", unauthorized " +
         std::to_string(c.unauthorized);
}

json model_summary(const ml::Model& model) {
  return std::visit(
      overloaded{
          [](const ml::DecisionTree& t) {
            return json{{"kind", "dt"}, {"depth", t.depth()}, {"leaves", t.leaf_count()}};
          },
          [](const ml::RandomForest& f) {
            std::size_t depth_sum = 0;
            std::size_t max_depth = 0;
            std::size_t leaves = 0;
            for (const auto& t : f.trees()) {
              depth_sum += t.depth();
              max_depth = std::max(max_depth, t.depth());
              leaves += t.leaf_count();
            }
            const double n = static_cast<double>(f.trees().size());
            return json{{"kind", "rf"},
                        {"trees", f.trees().size()},
                        {"mean_depth", static_cast<double>(depth_sum) / n},
                        {"max_depth", max_depth},
                        {"mean_leaves", static_cast<double>(leaves) / n}};
          }},
      model);
}

std::string summary_text(const json& s) {
  std::ostringstream os;
  if (s.at("kind") == "dt") {
    os << "decision tree, depth " << s.at("depth") << ", " << s.at("leaves") << " leaves";
  } else {
    os << "random forest, " << s.at("trees") << " trees, mean depth "
       << fixed3(s.at("mean_depth").get<double>()) << ", max depth " << s.at("max_depth")
       << ", mean leaves " << fixed3(s.at("mean_leaves").get<double>());
  }
  return os.str();
}

int run_simulate(const Simulate& cmd, bool as_json, std::ostream& out) {
  sim::DatasetPlan plan = cmd.config ? sim::plan_from_json(read_json_file(*cmd.config))
                                     : sim::DatasetPlan{};
  if (cmd.locations) plan.locations = *cmd.locations;
  plan.seed = cmd.seed;
  plan.n_sessions_per_class = sim::sessions_for_rows(plan, cmd.rows);
  const Dataset dataset = sim::generate_dataset(plan);
  save_dataset_csv(cmd.out, dataset);

  Path meta_path = cmd.out;
  meta_path += ".meta.json";
  const json meta = sim::plan_metadata(plan, dataset);
  std::ofstream meta_out(meta_path);
  meta_out << meta.dump(2) << "\n";
  if (!meta_out) throw Error("cli", "WriteFailed", "cannot write " + meta_path.string());

  const auto counts = dataset.label_counts();
  if (as_json) {
    out << json{{"command", "simulate"},
                {"rows", dataset.size()},
                {"labels", counts_json(counts)},
                {"sessions_per_class", plan.n_sessions_per_class},
                {"locations", plan.locations},
                {"seed", plan.seed},
                {"out", cmd.out.string()},
                {"metadata", meta_path.string()}}
               .dump()
        << "\n";
    return 0;
  }
  out << "rows: " << dataset.size() << " (" << counts_text(counts) << ")\n"
      << "sessions per class: " << plan.n_sessions_per_class << " over " << plan.locations
      << " locations\n"
      << "seed: " << plan.seed << "\n"
      << "wrote " << cmd.out.string() << " and " << meta_path.string() << "\n";
  return 0;
}

int run_ingest(const Ingest& cmd, bool as_json, std::ostream& out) {
  const Dataset dataset = load_dataset_csv(cmd.data);
  const auto counts = dataset.label_counts();
  std::set<std::string> ssids;
  std::size_t mobile = 0;
  std::int64_t fmin = dataset.samples.front().observation.frequency_hz, fmax = fmin;
  int rmin = dataset.samples.front().observation.rssi_dbm, rmax = rmin;
  for (const auto& s : dataset.samples) {
    ssids.insert(s.observation.ssid);
    mobile += s.role == DeviceRole::Mobile;
    fmin = std::min(fmin, s.observation.frequency_hz);
    fmax = std::max(fmax, s.observation.frequency_hz);
    rmin = std::min(rmin, s.observation.rssi_dbm);
    rmax = std::max(rmax, s.observation.rssi_dbm);
  }
  if (as_json) {
    out << json{{"command", "ingest"},
                {"rows", dataset.size()},
                {"labels", counts_json(counts)},
                {"balanced", counts.balanced()},
                {"roles", {{"mobile", mobile}, {"login", dataset.size() - mobile}}},
                {"distinct_ssids", ssids.size()},
                {"frequency_hz", {fmin, fmax}},
                {"rssi_dbm", {rmin, rmax}}}
               .dump()
        << "\n";
    return 0;
  }
  out << "rows: " << dataset.size() << " (" << counts_text(counts) << ")\n"
      << "balanced: " << (counts.balanced() ? "yes" : "no") << "\n"
      << "roles: mobile " << mobile << ", login " << dataset.size() - mobile << "\n"
      << "distinct ssids: " << ssids.size() << "\n"
      << "frequency range: " << fmin << " .. " << fmax << " Hz\n"
      << "rssi range: " << rmin << " .. " << rmax << " dBm\n";
  return 0;
}

int run_train(const Train& cmd, bool as_json, std::ostream& out) {
  const Dataset dataset = load_dataset_csv(cmd.data);
  const auto [train, test] = ml::stratified_split(dataset, cmd.split, cmd.seed);
  FeatureEncoder encoder = build_feature_encoder(train);
  const auto samples = ml::encode_dataset(encoder, train);
  const json params = cmd.params ? read_json_file(*cmd.params) : json::object();

  const auto started = std::chrono::steady_clock::now();
  ml::Model model = [&]() -> ml::Model {
    if (cmd.kind == ModelKind::DecisionTree) {
      return ml::train_decision_tree(samples, ml::tree_params_from_json(params), cmd.seed);
    }
    ml::ForestParams fp = ml::forest_params_from_json(params);
    fp.seed = cmd.seed;
    return ml::train_random_forest(samples, fp);
  }();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const ml::TrainedModel trained{std::move(model), std::move(encoder),
                                 ml::TrainingSplit{cmd.split, cmd.seed}};
  ml::save_model(cmd.out, trained);

  const json summary = model_summary(trained.model);
  if (as_json) {
    out << json{{"command", "train"},
                {"model", summary},
                {"train_samples", train.size()},
                {"train_labels", counts_json(train.label_counts())},
                {"held_out_samples", test.size()},
                {"split", cmd.split},
                {"seed", cmd.seed},
                {"training_seconds", seconds},
                {"out", cmd.out.string()}}
               .dump()
        << "\n";
    return 0;
  }
  out << "model: " << summary_text(summary) << "\n"
      << "training samples: " << train.size() << " (" << counts_text(train.label_counts())
      << ")\n"
      << "held out: " << test.size() << " samples (fraction " << cmd.split << ", seed "
      << cmd.seed << ")\n"
      << "training time: " << fixed3(seconds) << " s\n"
      << "wrote " << cmd.out.string() << "\n";
  return 0;
}

int run_evaluate(const Evaluate& cmd, bool as_json, std::ostream& out) {
  const ml::TrainedModel trained = ml::load_model(cmd.model);
  const Dataset dataset = load_dataset_csv(cmd.data);
  const std::uint64_t seed = cmd.seed ? *cmd.seed : trained.split ? trained.split->seed : 0;
  const auto test = ml::stratified_split(dataset, cmd.split, seed).second;
  const auto cm = ml::evaluate(trained.model, ml::encode_dataset(trained.encoder, test));
  const auto m = ml::compute_metrics(cm);

  if (as_json) {
    out << json{{"command", "evaluate"},
                {"model", model_summary(trained.model)},
                {"test_samples", test.size()},
                {"test_labels", counts_json(test.label_counts())},
                {"split", cmd.split},
                {"seed", seed},
                {"confusion_matrix", {{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}}},
                {"accuracy", metric_json(m.accuracy)},
                {"sensitivity", metric_json(m.sensitivity)},
                {"specificity", metric_json(m.specificity)},
                {"precision", metric_json(m.precision)},
                {"f1", metric_json(m.f1)}}
               .dump()
        << "\n";
    return 0;
  }
  out << "model: " << summary_text(model_summary(trained.model)) << "\n"
      << "test samples: " << test.size() << " (" << counts_text(test.label_counts())
      << "), split " << cmd.split << ", seed " << seed << "\n"
      << "confusion matrix: " << cm << "\n"
      << "accuracy: " << ml::format_metric(m.accuracy) << "\n"
      << "sensitivity: " << ml::format_metric(m.sensitivity) << "\n"
      << "specificity: " << ml::format_metric(m.specificity) << "\n"
      << "precision: " << ml::format_metric(m.precision) << "\n"
      << "f1: " << ml::format_metric(m.f1) << "\n";
  return 0;
}

int run_serve(const Serve& cmd, bool as_json, std::ostream& out) {
  auto model = std::make_shared<const ml::TrainedModel>(ml::load_model(cmd.model));
  const auto policy = cmd.policy ? auth::policy_from_json(read_json_file(*cmd.policy))
                                 : auth::PolicyConfig{};
  const char* dir = std::getenv("PROXAUTH_DATA_DIR");
  const Path data_dir = dir && *dir ? Path(dir) : Path("proxauth-data");

  // Block the termination signals before any thread exists so only the
  // waiter below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auth::Store store(data_dir);
  auth::AuthService service(store, model, policy);
  auth::Server server(service, auth::Endpoint::parse(cmd.listen));
  const std::string host = auth::Endpoint::parse(cmd.listen).host;

  if (as_json) {
    out << json{{"command", "serve"},
                {"listen", host + ":" + std::to_string(server.port())},
                {"data_dir", data_dir.string()},
                {"policy", auth::to_json(policy)}}
               .dump()
        << std::endl;
  } else {
    out << "listening on " << host << ":" << server.port() << " (store " << data_dir.string()
        << ")" << std::endl;
  }

  std::jthread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
  });
  server.serve();
  return 0;
}

json call_ok(auth::Client& client, const json& request) {
  json response = client.call(request);
  if (!response.value("ok", false)) {
    throw auth::AuthError(response.value("error", std::string("InternalError")),
                          response.value("message", std::string("request failed")));
  }
  return response.at("result");
}

int run_attempt(const Attempt& cmd, bool as_json, std::ostream& out) {
  const sim::DatasetPlan plan = cmd.config ? sim::plan_from_json(read_json_file(*cmd.config))
                                           : sim::DatasetPlan{};
  const sim::Layout layout = sim::location_layout(plan.env, cmd.env_seed, cmd.location);
  const sim::Scenario scenario =
      cmd.scenario == AttemptScenario::Near ? plan.authentic : plan.unauthorized;
  const sim::DeviceIds ids{cmd.username + "-mobile", cmd.username + "-login"};
  Rng rng(cmd.seed);
  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  const sim::Session session =
      sim::generate_session_retrying(layout, plan.env, plan.loss, scenario, rng, now, ids);

  auth::Client client(auth::Endpoint::parse(cmd.server));
  try {
    call_ok(client, {{"op", "enroll"},
                     {"username", cmd.username},
                     {"secret", cmd.secret},
                     {"mobile_device_id", ids.mobile},
                     {"login_device_id", ids.login}});
  } catch (const auth::AuthError& e) {
    if (e.code() != "DuplicateUser") throw;
  }
  json state = call_ok(client, {{"op", "begin"}, {"username", cmd.username}, {"secret", cmd.secret}});
  const std::string session_id = state.at("session_id");
  if (state.at("state") != "Decided") {
    call_ok(client, {{"op", "submit_scan"},
                     {"session_id", session_id},
                     {"device_id", ids.mobile},
                     {"snapshot", auth::to_json(session.mobile)}});
    state = call_ok(client, {{"op", "submit_scan"},
                             {"session_id", session_id},
                             {"device_id", ids.login},
                             {"snapshot", auth::to_json(session.login)}});
  }

  if (as_json) {
    out << json{{"command", "attempt"},
                {"session_id", session_id},
                {"scenario", cmd.scenario == AttemptScenario::Near ? "near" : "far"},
                {"separation_m", session.separation_m},
                {"outcome", state.value("outcome", json(nullptr))},
                {"reason", state.value("reason", json(nullptr))},
                {"authentic_fraction", state.value("authentic_fraction", json(nullptr))}}
               .dump()
        << "\n";
    return 0;
  }
  out << "session: " << session_id << "\n"
      << "separation: " << fixed3(session.separation_m) << " m\n"
      << "outcome: " << state.value("outcome", std::string("pending")) << "\n"
      << "reason: " << state.value("reason", std::string("-")) << "\n";
  if (state.contains("authentic_fraction") && state["authentic_fraction"].is_number()) {
    out << "authentic fraction: " << fixed3(state["authentic_fraction"].get<double>()) << "\n";
  }
  return 0;
}

}  // namespace

int run(const Command& command, std::ostream& out, std::ostream& err) {
  try {
    return std::visit(
        overloaded{[&](const Simulate& c) { return run_simulate(c, command.json, out); },
                   [&](const Ingest& c) { return run_ingest(c, command.json, out); },
                   [&](const Train& c) { return run_train(c, command.json, out); },
                   [&](const Evaluate& c) { return run_evaluate(c, command.json, out); },
                   [&](const Serve& c) { return run_serve(c, command.json, out); },
                   [&](const Attempt& c) { return run_attempt(c, command.json, out); },
                   [&](const Help& h) {
                     out << h.text;
                     return 0;
                   }},
        command.action);
  } catch (const Error& e) {
    err << "error: " << e.qualified_code() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

int main(int argc, char** argv) {
  Command command;
  try {
    command = parse_args(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.qualified_code() << " (" << e.flag() << "): " << e.what() << "\n"
              << "run with --help for usage\n";
    return 2;
  }
  return run(command, std::cout, std::cerr);
}

}  // namespace proxauth::cli
