#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace packetvision::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kIoError = 3 };

inline constexpr const char* kSeedEnvVar = "PACKETVISION_SEED";

struct CommandOutcome {
  int exit_code = kSuccess;
  std::string summary;
  std::vector<std::filesystem::path> outputs;
};

struct Environment {
  std::optional<std::string> seed_override;

  static Environment from_process();
};

/// Runs one subcommand. `args` excludes the program name. The summary is
/// also written to `out`; diagnostics go to `err`.
CommandOutcome run(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err, const Environment& env = Environment::from_process());

}  // namespace packetvision::cli
