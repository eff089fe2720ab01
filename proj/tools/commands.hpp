#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "run_config.hpp"

namespace subscat::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kInternalError = 4 };

/// Failure carrying the process exit code.
class CommandError : public std::runtime_error {
 public:
  CommandError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct CommandOptions {
  std::filesystem::path out = ".";
  bool oracle = false;
  std::string profile = "default";
};

/// Each command writes its artifacts under options.out and returns kOk or
/// kNumericalFailure (artifacts are written either way).
int cmd_solve(const RunConfig& config, const CommandOptions& options);
int cmd_decompose(const RunConfig& config, const CommandOptions& options);
int cmd_evolve(const RunConfig& config, const CommandOptions& options);
int cmd_times(const RunConfig& config, const CommandOptions& options);
int cmd_larmor(const RunConfig& config, const CommandOptions& options);

}  // namespace subscat::cli
