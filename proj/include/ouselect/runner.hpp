#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ouselect/report_io.hpp"

namespace ouselect {

/// Process exit codes of the runner.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitAudit = 4 };

struct ExperimentConfig {
    std::string command = "estimate";
    std::string signal = "expcos";
    NoiseParams noise{-1.0, 1.0, 1.0, 1.0, JumpLaw::rademacher};
    FamilyBounds bounds;
    std::string family = "single";  // single | box | pair
    std::vector<int> n_list{200};
    double dt = 1.0 / 64.0;
    int replicates = 500;
    std::uint64_t seed = 42;
    std::string rho = "auto";       // "auto" (rho_n) or a number in (0, 1/3)
    std::string sigma = "both";     // known | estimated | both
    std::string engine = "spectral";
    int threads = 1;
    std::string out = "out";
    std::string input;              // ingest: observation CSV
    int j_max = 8;                  // audit-conditions
    std::vector<int> indices{1, 2, 3, 4};  // moments: basis indices
    double sigma_star = 0.0;        // efficiency: 0 -> rho* of the noise

    /// Throws std::invalid_argument on any field outside its module's preconditions.
    void validate() const;
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& file);

std::vector<std::string> runner_commands();

/// Runs one experiment and writes artifacts, summary.txt and manifest.json into
/// config.out. Returns an ExitCode; errors are reported on `log`.
int run(const ExperimentConfig& config, std::ostream& log);

/// Re-runs the experiment recorded in a manifest into `out_dir` and compares
/// every artifact checksum. Returns kExitOk iff all match.
int replay(const std::string& manifest_file, const std::string& out_dir, std::ostream& log);

/// The family a config describes (single member, 3x3 box, or Brownian + OU pair).
FamilyGrid family_from_config(const ExperimentConfig& c);

} // namespace ouselect
