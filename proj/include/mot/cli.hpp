#pragma once

// Command dispatch behind the `motlab` executable. Kept in the library so the
// reports can be tested without spawning processes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mot/io.hpp"
#include "mot/lp.hpp"

namespace mot::cli {

struct RunFlags {
  std::string mode = "rational";
  std::optional<std::string> eps;
  std::vector<std::string> eps_ladder;
  std::size_t nmax_cycles = 3;
  std::uint64_t seed = 0;
  std::size_t guard_entries = kDefaultGuardEntries;
  bool timing = false;
  std::vector<std::size_t> shape{2, 2, 2};  // generate only
};

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kError = 2 };

struct RunResult {
  nlohmann::json report;
  int exit_code = kPass;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"solve", "certify", "truncate",
                                              "entropic", "oracle", "generate"};
  return names;
}

/// Runs `command` on the problem document text. `generate` ignores the text
/// and returns a random problem document instead of a report.
RunResult run(const std::string& command, const RunFlags& flags, const std::string& document);

}  // namespace mot::cli
