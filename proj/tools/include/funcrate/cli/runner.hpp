#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "funcrate/cli/config.hpp"
#include "funcrate/estimate.hpp"
#include "funcrate/theory.hpp"

namespace funcrate::cli {

enum ExitCode : int {
    kExitPass = 0,
    kExitError = 1,
    kExitStatisticalFailure = 2,
};

/// Worker count from FUNCRATE_THREADS, else the hardware concurrency.
/// Throws Errc::config when the variable is set but not a positive integer.
unsigned workers_from_env();

struct RunOutcome {
    int exit_code = kExitPass;
    std::string message;
    std::optional<ErrorSummary> summary;
    std::optional<RateFit> fit;
    std::optional<MomentDiagnostic> moments;
    std::vector<std::pair<std::string, bool>> checks;
};

/// Runs one experiment and writes summary.csv, summary.json and curve.dat
/// (moment.csv and summary.json in moment-check mode) into config.output.
/// Library errors propagate as funcrate::Error.
RunOutcome run_experiment(const ExperimentConfig& config, unsigned workers, std::ostream& log);

/// One table row per summary.json found under `inputs` (directories or files).
/// Throws Errc::io when an input cannot be read.
void report(const std::vector<std::filesystem::path>& inputs, std::ostream& out);

struct ConstantsRequest {
    std::string model = "brownian";
    double gamma = 0.5;
    double alpha = 2.0;
    double T = 1.0;
    double sigma = 1.0;
    double scale = 1.0;
    double holder_norm = 1.0;
    std::vector<std::size_t> ns{100};
};

void print_constants(const ConstantsRequest& request, std::ostream& out);

}  // namespace funcrate::cli
