#pragma once

#include "plap/cli/config.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>

namespace plap::cli {

enum ExitCode : int {
    kSuccess = 0,
    kCheckFailed = 1,
    kNonConvergence = 2,
    kPrecondition = 3,
    kHypothesis = 4,
};

/// --out, then the config's output.dir, then $PLAP_OUT_DIR, then "plap_out".
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const std::optional<std::string>& flag);

/// Runs `body`, mapping library exceptions to exit codes and printing the
/// message to `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

/// Square of a random combination of four sine modes (times sin(πy/ly) in 2D):
/// smooth, nonnegative, zero on the boundary.
NodalField random_nonnegative_field(const Mesh& mesh, std::mt19937_64& rng);

int cmd_eigen(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_branch(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_picone(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);

}  // namespace plap::cli
