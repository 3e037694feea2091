#pragma once

#include "cavityflow/io/config.hpp"

#include <iosfwd>
#include <optional>

namespace cavityflow {

/// Exit codes shared by the CLI subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

struct CliOptions {
    std::string config_path;
    std::string cache_dir;  // empty = no caching
    std::string out_path;   // empty = config decides
    std::optional<std::uint64_t> seed;
};

int run_modes(const CliOptions& opts, std::ostream& log);
int run_simulate(const CliOptions& opts, std::ostream& log);
int run_stability(const CliOptions& opts, std::ostream& log);
int run_atlas(const CliOptions& opts, std::ostream& log);

/// Tensors for a config, via the cache directory when provided (stores on miss).
CouplingTensors obtain_tensors(const RunConfig& cfg, const std::string& cache_dir,
                               std::ostream& log);

} // namespace cavityflow
