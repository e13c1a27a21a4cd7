#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace quadkit::testing {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

/// Runs the quadkit executable with `args` (shell-quoted) in `dir`, capturing both streams.
CliResult run_cli(const std::vector<std::string>& args, const std::filesystem::path& dir,
                  const std::string& env = "");

std::string read_file(const std::filesystem::path& path);

}  // namespace quadkit::testing
