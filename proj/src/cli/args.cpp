#include <map>
#include <regex>

#include <CLI11.hpp>

#include "proxauth/cli.hpp"

namespace proxauth::cli {

namespace {

std::string offending_flag(const std::string& message, const std::string& fallback) {
  static const std::regex flag(R"(--[A-Za-z][A-Za-z0-9-]*)");
  std::smatch m;
  if (std::regex_search(message, m, flag)) return m.str();
  return fallback;
}

void check_fraction(double value, const char* flag) {
  if (!(value > 0.0 && value < 1.0)) {
    throw UsageError(flag, std::string(flag) + " must lie strictly between 0 and 1");
  }
}

template <class T>
T pick(const std::map<std::string, T>& choices, const std::string& value, const char* flag) {
  if (const auto it = choices.find(value); it != choices.end()) return it->second;
  std::string names;
  for (const auto& [name, _] : choices) names += (names.empty() ? "" : " or ") + name;
  throw UsageError(flag, std::string(flag) + " must be " + names + ", got \"" + value + "\"");
}

}  // namespace

Command parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Co-location second factor: simulate, train, evaluate, serve", "proxauth"};
  app.require_subcommand(1);
  app.fallthrough();

  Command command;
  app.add_flag("--json", command.json, "Emit the report as a JSON document");

  Simulate simulate;
  std::string config;
  auto* sim = app.add_subcommand("simulate", "Generate a labeled synthetic dataset");
  sim->add_option("--config", config, "Simulator config (JSON)")->check(CLI::ExistingFile);
  sim->add_option("--rows", simulate.rows, "Target row count")->check(CLI::PositiveNumber);
  sim->add_option("--seed", simulate.seed, "Generator seed")->required();
  sim->add_option("--out", simulate.out, "Output CSV path")->required();
  std::size_t locations = 0;
  auto* loc_opt = sim->add_option("--locations", locations, "Number of AP layouts")
                      ->check(CLI::PositiveNumber);

  Ingest ingest;
  auto* ing = app.add_subcommand("ingest", "Parse and summarize a dataset CSV");
  ing->add_option("--data", ingest.data, "Dataset CSV")->required();

  Train train;
  std::string params;
  const std::map<std::string, ModelKind> kinds{{"dt", ModelKind::DecisionTree},
                                               {"rf", ModelKind::RandomForest}};
  auto* tr = app.add_subcommand("train", "Train a decision tree or random forest");
  tr->add_option("--data", train.data, "Dataset CSV")->required();
  std::string kind = "rf";
  tr->add_option("--model", kind, "dt or rf");
  tr->add_option("--params", params, "Hyperparameters (JSON)")->check(CLI::ExistingFile);
  tr->add_option("--seed", train.seed, "Split and training seed")->required();
  tr->add_option("--out", train.out, "Output model path")->required();
  tr->add_option("--split", train.split, "Held-out fraction");

  Evaluate evaluate;
  std::uint64_t eval_seed = 0;
  auto* ev = app.add_subcommand("evaluate", "Score a model on the held-out partition");
  ev->add_option("--model", evaluate.model, "Model path")->required();
  ev->add_option("--data", evaluate.data, "Dataset CSV")->required();
  ev->add_option("--split", evaluate.split, "Held-out fraction");
  auto* eval_seed_opt = ev->add_option("--seed", eval_seed, "Split seed (default: model's)");

  Serve serve;
  std::string policy;
  auto* sv = app.add_subcommand("serve", "Run the authentication server");
  sv->add_option("--model", serve.model, "Model path")->required();
  sv->add_option("--policy", policy, "Policy (JSON)")->check(CLI::ExistingFile);
  sv->add_option("--listen", serve.listen, "host:port");

  Attempt attempt;
  std::string attempt_config;
  const std::map<std::string, AttemptScenario> scenarios{{"near", AttemptScenario::Near},
                                                         {"far", AttemptScenario::Far}};
  auto* at = app.add_subcommand("attempt", "Drive one simulated login against a server");
  at->add_option("--server", attempt.server, "host:port");
  at->add_option("--username", attempt.username, "Account name")->required();
  at->add_option("--secret", attempt.secret, "First-factor secret")->required();
  std::string scenario;
  at->add_option("--scenario", scenario, "near or far")->required();
  at->add_option("--seed", attempt.seed, "Scan generator seed");
  at->add_option("--config", attempt_config, "Simulator config (JSON)")->check(CLI::ExistingFile);
  at->add_option("--env-seed", attempt.env_seed, "Seed of the dataset whose layout to reuse");
  at->add_option("--location", attempt.location, "Layout index");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    return {Help{parsed.empty() ? app.help() : parsed.front()->help()}, command.json};
  } catch (const CLI::ParseError& e) {
    const auto parsed = app.get_subcommands();
    const std::string where = parsed.empty() ? "<command>" : parsed.front()->get_name();
    throw UsageError(offending_flag(e.what(), where), e.what());
  }

  if (sim->parsed()) {
    if (!config.empty()) simulate.config = config;
    if (loc_opt->count() > 0) simulate.locations = locations;
    command.action = simulate;
  } else if (ing->parsed()) {
    command.action = ingest;
  } else if (tr->parsed()) {
    check_fraction(train.split, "--split");
    train.kind = pick(kinds, kind, "--model");
    if (!params.empty()) train.params = params;
    command.action = train;
  } else if (ev->parsed()) {
    check_fraction(evaluate.split, "--split");
    if (eval_seed_opt->count() > 0) evaluate.seed = eval_seed;
    command.action = evaluate;
  } else if (sv->parsed()) {
    if (!policy.empty()) serve.policy = policy;
    command.action = serve;
  } else {
    attempt.scenario = pick(scenarios, scenario, "--scenario");
    if (!attempt_config.empty()) attempt.config = attempt_config;
    command.action = attempt;
  }
  return command;
}

}  // namespace proxauth::cli
