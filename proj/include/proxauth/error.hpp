#pragma once

#include <stdexcept>
#include <string>

namespace proxauth {

/// Base for every error raised by the library.  `code()` is the bare error
/// name (e.g. "RowParseError"); `qualified_code()` prefixes the owning
/// module ("beacon.RowParseError") for operator-facing reports.
class Error : public std::runtime_error {
public:
  Error(std::string module, std::string code, const std::string& detail)
      : std::runtime_error(detail), module_(std::move(module)), code_(std::move(code)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& code() const noexcept { return code_; }
  std::string qualified_code() const { return module_ + "." + code_; }

private:
  std::string module_;
  std::string code_;
};

}  // namespace proxauth
