#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "proxauth/error.hpp"

namespace proxauth::cli {

class UsageError : public Error {
public:
  UsageError(std::string flag, const std::string& hint)
      : Error("cli", "UsageError", hint), flag_(std::move(flag)) {}

  /// The offending flag or subcommand, e.g. "--model".
  const std::string& flag() const noexcept { return flag_; }

private:
  std::string flag_;
};

using Path = std::filesystem::path;

struct Simulate {
  std::optional<Path> config;
  std::size_t rows = 4825;
  std::uint64_t seed = 0;
  Path out;
  std::optional<std::size_t> locations;
};

struct Ingest {
  Path data;
};

enum class ModelKind { DecisionTree, RandomForest };

struct Train {
  Path data;
  ModelKind kind = ModelKind::RandomForest;
  std::optional<Path> params;
  std::uint64_t seed = 0;
  Path out;
  double split = 0.2;
};

struct Evaluate {
  Path model;
  Path data;
  double split = 0.2;
  /// Defaults to the seed the model was trained with.
  std::optional<std::uint64_t> seed;
};

struct Serve {
  Path model;
  std::optional<Path> policy;
  std::string listen = "127.0.0.1:7400";
};

enum class AttemptScenario { Near, Far };

struct Attempt {
  std::string server = "127.0.0.1:7400";
  std::string username;
  std::string secret;
  AttemptScenario scenario = AttemptScenario::Near;
  std::uint64_t seed = 0;
  /// Simulator config and dataset seed/location fixing the AP layout, so
  /// attempts can reproduce the environment a model was trained on.
  std::optional<Path> config;
  std::uint64_t env_seed = 0;
  std::size_t location = 0;
};

struct Help {
  std::string text;
};

struct Command {
  std::variant<Simulate, Ingest, Train, Evaluate, Serve, Attempt, Help> action;
  /// Emit the report as one JSON document instead of text.
  bool json = false;
};

/// `args` excludes the program name.  Throws UsageError.
Command parse_args(const std::vector<std::string>& args);

/// Returns the process exit status.  Module errors are reported on `err`
/// as "error: <module>.<code>: <detail>".
int run(const Command& command, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace proxauth::cli
