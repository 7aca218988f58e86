#ifndef GIBBS_RUNNER_HPP
#define GIBBS_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gibbs {

// Configuration mistakes carry the JSON path of the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::optional<uint64_t> seed_override;
  std::optional<std::string> out_override;
  int jobs = 0;  // 0 = leave the OpenMP default
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 config error, 3 check failure
  std::string run_dir;
  std::string message;
};

RunResult run_experiment(const std::string& config_path,
                         const RunOptions& options, std::ostream& log);

// `check` subcommand: prints one line per identity, nonzero on failure.
int run_checks_cli(const std::string& suite, std::ostream& os);

uint64_t fnv1a64(const std::string& text);

}  // namespace gibbs

#endif
