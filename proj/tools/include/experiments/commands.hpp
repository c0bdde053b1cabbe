#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace experiments {

// One parsed invocation. Unset optionals take per-command defaults; the
// resolved values are echoed back as a `# config:` comment line in every
// output, so a file identifies the run that produced it.
struct RunConfig {
  std::string command;  // spectrum | evolve | gap-scaling | classical | crosscheck | randomized
  std::optional<int> n;
  double alpha = 0.35355339059327373;  // 1/sqrt(8)
  std::uint64_t seed = 1;
  std::optional<double> epsilon;
  double kappa = 1.0;
  std::optional<double> T;
  std::optional<int> grid;
  std::optional<int> trials;
  std::uint64_t max_queries = 1000000;
  std::optional<std::string> schedule;  // linear | gap-adapted
  std::string out;                      // empty: stdout
};

// Runs one subcommand, writing CSV to os and diagnostics to err. Output is
// byte-identical across repeated runs with the same config (12 significant
// digits, \n endings). Returns the process exit code: 0 success, 1 usage
// error, 2 numerical failure.
int run_command(const RunConfig& config, std::ostream& os, std::ostream& err);

}  // namespace experiments
