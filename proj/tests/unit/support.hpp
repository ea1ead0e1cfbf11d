#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "battlemix/logmodel.hpp"

namespace testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Random but valid game log touching every record kind; built with its own
/// std::mt19937_64 stream so it stays independent of the library generator.
battlemix::GameLog random_log(std::uint64_t seed);

struct CliResult {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Runs the command-line tool with `args` (shell-quoted here) inside `cwd`.
CliResult run_cli(const std::vector<std::string>& args, const std::filesystem::path& cwd);

std::string slurp(const std::filesystem::path& p);

/// Splits a CSV text into rows of fields.
std::vector<std::vector<std::string>> csv_rows(const std::string& text);

}  // namespace testing
