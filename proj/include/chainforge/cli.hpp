#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chainforge/io.hpp"

namespace chainforge::cli {

enum ExitCode { kOk = 0, kInvariantFailure = 1, kInputError = 2 };

struct RunConfig {
  std::string command;
  std::string chain, complex, function, metric, mesh, cycle, ambient, out_dir;
  std::string json_out;
  std::optional<int> p;
  std::optional<std::string> epsilon;
  std::optional<std::string> r;
  std::optional<std::string> scale;
  int max_dim = 2;
  bool relaxed = false;
  bool exact = false;
  bool greedy = false;
  bool profile = false;
  bool spectrum = false;
  bool serial = false;
  std::string rule = "reach";
  std::string strategy = "index";
  std::string edge_metric = "euclidean";
  std::size_t restarts = 4;
  std::uint64_t seed = 0;
  std::vector<std::size_t> sizes{12, 24, 48};
  std::size_t budget = 2'000'000;
};

struct RunResult {
  int exit_code = kOk;
  Json report;
};

/// Throws InputError on invalid settings or missing files.
void validate(const RunConfig& config);

/// Dispatches one subcommand. Input problems surface as InputError,
/// failed certificates as InvariantError; a failed inequality check
/// returns kInvariantFailure with the report.
RunResult run(const RunConfig& config);

/// Full command line handling: parsing, config file merge, report output
/// and exit codes.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace chainforge::cli
