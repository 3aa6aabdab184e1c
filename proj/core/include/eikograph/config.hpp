#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "eikograph/harness.hpp"

namespace eikograph {

// Thrown on malformed run configs; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SweepConfig sweep;        // manifold/boundary/kernel + sweep parameters
  SolverConfig solver;      // used by the solve subcommand
  std::size_t sample_n = 1000;     // used by gen/solve
  std::size_t mc_n = 2000;         // used by mc-cover
  std::size_t mc_trials = 200;
  std::string canonical;    // config re-serialized with defaults applied
  std::string hash;         // 16-hex FNV-1a of `canonical`
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

}  // namespace eikograph
