#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "kamlab/solver.hpp"

namespace kamlab::io {

/// Options shared by every subcommand; a JSON config file may set any of
/// them and command-line flags override it. Unknown keys are rejected before
/// any compute starts.
struct RunConfig {
    std::string system = "fig1";       // registry name or inline JSON object
    double lambda = kExampleLambda;
    int grid_points = 256;
    double period = kTwoPi;
    solver::SolverParams solver{};
    int threads = 0;                   // 0: KAMLAB_THREADS env or hardware
};

/// Loads and validates a JSON config file. Missing file or unknown keys
/// raise ConfigError.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace kamlab::io
