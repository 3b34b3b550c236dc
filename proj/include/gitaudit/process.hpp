#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gitaudit {

struct ProcessOptions {
  std::filesystem::path cwd;  // empty: inherit
  std::optional<std::chrono::milliseconds> timeout;
  std::vector<std::pair<std::string, std::string>> env;  // added/overridden variables
  std::string stdin_data;
};

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;

  bool ok() const noexcept { return exit_code == 0 && !timed_out; }
};

/// Runs argv[0] (looked up on PATH) with the given arguments, capturing stdout
/// and stderr. The child runs in its own process group so a timeout kills any
/// helpers it spawned. Throws std::system_error if the process cannot start.
ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& opts = {});

}  // namespace gitaudit
