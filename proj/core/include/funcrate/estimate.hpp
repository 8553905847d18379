#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "funcrate/funcs.hpp"
#include "funcrate/model.hpp"
#include "funcrate/simulate.hpp"

namespace funcrate {

/// (T/n) * sum_{k<n} h(path[k]) with compensated summation. `path` holds
/// exactly n + 1 points of `dimension` coordinates; the last is unused.
double riemann_sum(std::span<const double> path, double T, std::size_t n, const HolderFunction& h,
                   std::size_t dimension = 1);

/// Fine-grid proxy for the time integral: riemann_sum at n = n_ref.
double reference_integral(std::span<const double> path, const GridSpec& grid, const HolderFunction& h,
                          std::size_t dimension = 1);

/// Squared coupled errors (reference - riemann_sum at n)^2 for every n in
/// grid.eval_ns(), all computed from the same fine path in one pass.
std::vector<double> coupled_errors(std::span<const double> path, const GridSpec& grid,
                                   const HolderFunction& h, std::size_t dimension = 1);

/// Throws Errc::gamma_too_large unless gamma < alpha/2, or gamma == alpha/2
/// with alpha == 2.
void check_gamma_admissible(double gamma, double alpha);

struct ErrorRow {
    std::size_t n = 0;
    double mse = 0.0;
    double std_error = 0.0;
    std::size_t path_count = 0;
    std::optional<double> bound;  // theoretical bound, when the model is certified
};

struct ErrorSummary {
    std::vector<ErrorRow> rows;  // ascending n
    std::string model;
    std::string function;
    double gamma = 0.0;
    double alpha = 0.0;
    double T = 0.0;
    std::size_t n_ref = 0;
    std::uint64_t master_seed = 0;
    bool certified = false;
    bool exact_law = true;
};

struct MseOptions {
    unsigned workers = 1;
    /// Paths per reduction block. Part of the result's identity: changing it
    /// changes floating-point summation order, changing workers does not.
    std::size_t block_size = 256;
};

/// Monte Carlo mean and standard error of the coupled squared error at every
/// n in grid.eval_ns() over `path_count` paths.
ErrorSummary mse_curve(const ProcessModel& model, const GridSpec& grid, const HolderFunction& h,
                       std::size_t path_count, std::uint64_t master_seed, const MseOptions& options = {});

/// CSV with header `n,mse,std_error,M,bound,certified`; doubles in %.17g.
void write_summary_csv(std::ostream& out, const ErrorSummary& summary);

struct MomentRow {
    double delta = 0.0;
    double ratio = 0.0;      // mean |X_delta - x0|^{2 gamma} / delta^{2 gamma / alpha}
    double std_error = 0.0;
};

struct MomentDiagnostic {
    std::vector<MomentRow> rows;
    double gamma = 0.0;
    double bound = 0.0;          // C_T * q_moment(cert, gamma)
    double weighted_mean = 0.0;  // inverse-variance weighted mean of the ratios
    bool within_bound = false;   // every ratio <= bound + 3 SE
    bool constant = false;       // every |ratio - weighted_mean| <= 3 SE
};

inline constexpr std::uint64_t kMomentFamily = 0x4D4F4D454E54ULL;

/// Checks E|X_delta - x0|^{2 gamma} <= C_T delta^{2 gamma/alpha} q_moment with
/// `path_count` exact-law increments per delta, one substream per delta.
MomentDiagnostic moment_diagnostic(const ProcessModel& model, const DensityBoundCertificate& cert,
                                   double gamma, std::span<const double> deltas, std::size_t path_count,
                                   std::uint64_t master_seed);

}  // namespace funcrate
