#include "funcrate/estimate.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "funcrate/compensated_sum.hpp"
#include "funcrate/error.hpp"
#include "funcrate/parallel.hpp"

namespace funcrate {

namespace {

// Evaluates h at the first `count` points of `path` into `out`.
void evaluate_points(std::span<const double> path, std::size_t count, std::size_t dimension,
                     const HolderFunction& h, std::span<double> out) {
    if (dimension == 1) {
        h.visit([&](const auto& f) {
            for (std::size_t k = 0; k < count; ++k) {
                out[k] = f(path[k]);
            }
        });
        return;
    }
    h.visit([&](const auto& f) {
        for (std::size_t k = 0; k < count; ++k) {
            out[k] = f(path.subspan(k * dimension, dimension));
        }
    });
}

double strided_sum(std::span<const double> values, std::size_t count, std::size_t stride) {
    CompensatedSum sum;
    for (std::size_t k = 0; k < count; ++k) {
        sum += values[k * stride];
    }
    return sum.value();
}

double step_weight(double T, std::size_t n) {
    return T / static_cast<double>(n);
}

void coupled_errors_into(std::span<const double> path, const GridSpec& grid, const HolderFunction& h,
                         std::size_t dimension, std::span<double> hv, std::span<double> errors) {
    const std::size_t n_ref = grid.n_ref();
    evaluate_points(path, n_ref, dimension, h, hv);
    const double reference = step_weight(grid.T(), n_ref) * strided_sum(hv, n_ref, 1);
    const auto& ns = grid.eval_ns();
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const double coarse = step_weight(grid.T(), ns[j]) * strided_sum(hv, ns[j], grid.stride(ns[j]));
        const double diff = reference - coarse;
        errors[j] = diff * diff;
    }
}

}  // namespace

double riemann_sum(std::span<const double> path, double T, std::size_t n, const HolderFunction& h,
                   std::size_t dimension) {
    require(n >= 1, Errc::domain, "riemann sum needs n >= 1");
    require(path.size() == (n + 1) * dimension, Errc::domain,
            "riemann sum at n = " + std::to_string(n) + " needs n + 1 path points");
    std::vector<double> hv(n);
    evaluate_points(path, n, dimension, h, hv);
    return step_weight(T, n) * strided_sum(hv, n, 1);
}

double reference_integral(std::span<const double> path, const GridSpec& grid, const HolderFunction& h,
                          std::size_t dimension) {
    return riemann_sum(path, grid.T(), grid.n_ref(), h, dimension);
}

std::vector<double> coupled_errors(std::span<const double> path, const GridSpec& grid,
                                   const HolderFunction& h, std::size_t dimension) {
    require(path.size() == (grid.n_ref() + 1) * dimension, Errc::domain, "path does not match the fine grid");
    std::vector<double> hv(grid.n_ref());
    std::vector<double> errors(grid.eval_ns().size());
    coupled_errors_into(path, grid, h, dimension, hv, errors);
    return errors;
}

void check_gamma_admissible(double gamma, double alpha) {
    const double half = 0.5 * alpha;
    const bool ok = gamma > 0.0 && (gamma < half || (gamma == half && alpha == 2.0));
    if (!ok) {
        fail(Errc::gamma_too_large, "holder exponent gamma = " + std::to_string(gamma) +
                                        " is outside the admissible range for alpha = " +
                                        std::to_string(alpha) +
                                        " (need gamma < alpha/2, or gamma = 1 when alpha = 2)");
    }
}

ErrorSummary mse_curve(const ProcessModel& model, const GridSpec& grid, const HolderFunction& h,
                       std::size_t path_count, std::uint64_t master_seed, const MseOptions& options) {
    check_gamma_admissible(h.gamma(), model.alpha());
    require(path_count >= 100, Errc::domain, "mse_curve needs at least 100 paths");
    require(options.block_size >= 1, Errc::domain, "block size must be positive");

    const PathBatch batch(model, grid, path_count, master_seed);
    const std::size_t d = model.dimension();
    const std::size_t count = grid.eval_ns().size();
    const std::size_t blocks = (path_count + options.block_size - 1) / options.block_size;

    struct BlockSums {
        std::vector<CompensatedSum> sum;
        std::vector<CompensatedSum> sum_sq;
    };
    std::vector<BlockSums> partial(blocks);

    struct Scratch {
        std::vector<double> path;
        std::vector<double> hv;
        std::vector<double> errors;
    };
    const unsigned workers = std::max(1u, options.workers);
    std::vector<Scratch> scratch(workers);

    run_blocks(blocks, workers, [&](std::size_t b, unsigned w) {
        Scratch& s = scratch[w];
        if (s.path.empty()) {
            s.path.resize(batch.path_length());
            s.hv.resize(grid.n_ref());
            s.errors.resize(count);
        }
        BlockSums& out = partial[b];
        out.sum.assign(count, CompensatedSum{});
        out.sum_sq.assign(count, CompensatedSum{});
        const std::size_t begin = b * options.block_size;
        const std::size_t end = std::min(path_count, begin + options.block_size);
        for (std::size_t i = begin; i < end; ++i) {
            batch.generate(i, s.path);
            coupled_errors_into(s.path, grid, h, d, s.hv, s.errors);
            for (std::size_t j = 0; j < count; ++j) {
                out.sum[j] += s.errors[j];
                out.sum_sq[j] += s.errors[j] * s.errors[j];
            }
        }
    });

    std::vector<CompensatedSum> sum(count);
    std::vector<CompensatedSum> sum_sq(count);
    for (const BlockSums& block : partial) {
        for (std::size_t j = 0; j < count; ++j) {
            sum[j] += block.sum[j];
            sum_sq[j] += block.sum_sq[j];
        }
    }

    ErrorSummary summary;
    summary.model = model.describe();
    summary.function = h.describe();
    summary.gamma = h.gamma();
    summary.alpha = model.alpha();
    summary.T = grid.T();
    summary.n_ref = grid.n_ref();
    summary.master_seed = master_seed;
    summary.exact_law = model.exact_law();
    summary.certified = is_certifiable(model);
    const double m = static_cast<double>(path_count);
    for (std::size_t j = 0; j < count; ++j) {
        const double mean = sum[j].value() / m;
        const double variance = std::max(0.0, (sum_sq[j].value() - m * mean * mean) / (m - 1.0));
        summary.rows.push_back({grid.eval_ns()[j], mean, std::sqrt(variance / m), path_count, std::nullopt});
    }
    return summary;
}

void write_summary_csv(std::ostream& out, const ErrorSummary& summary) {
    out << "n,mse,std_error,M,bound,certified\n";
    char line[256];
    for (const ErrorRow& row : summary.rows) {
        char bound[64] = "nan";
        if (row.bound) {
            std::snprintf(bound, sizeof bound, "%.17g", *row.bound);
        }
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%zu,%s,%s\n", row.n, row.mse, row.std_error,
                      row.path_count, bound, summary.certified ? "true" : "false");
        out << line;
    }
}

MomentDiagnostic moment_diagnostic(const ProcessModel& model, const DensityBoundCertificate& cert,
                                   double gamma, std::span<const double> deltas, std::size_t path_count,
                                   std::uint64_t master_seed) {
    require(path_count >= 2, Errc::domain, "moment diagnostic needs at least 2 samples");
    require(!deltas.empty(), Errc::domain, "moment diagnostic needs at least one delta");
    require(cert.alpha() == model.alpha(), Errc::domain, "certificate does not belong to this model");

    MomentDiagnostic result;
    result.gamma = gamma;
    result.bound = cert.c_T() * q_moment(cert, gamma);

    const std::size_t d = model.dimension();
    const double m = static_cast<double>(path_count);
    std::vector<double> increment(d);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        const double delta = deltas[j];
        require(delta > 0.0 && delta <= cert.horizon(), Errc::domain,
                "moment diagnostic deltas must lie in (0, T]");
        RandomStream stream({master_seed, kMomentFamily + j, 0});
        CompensatedSum sum;
        CompensatedSum sum_sq;
        for (std::size_t i = 0; i < path_count; ++i) {
            sample_increment(model, delta, stream, increment);
            double r2 = 0.0;
            for (double v : increment) {
                r2 += v * v;
            }
            const double value = std::pow(r2, gamma);  // |X_delta - x0|^{2 gamma}
            sum += value;
            sum_sq += value * value;
        }
        const double mean = sum.value() / m;
        const double variance = std::max(0.0, (sum_sq.value() - m * mean * mean) / (m - 1.0));
        const double scale = std::pow(delta, 2.0 * gamma / model.alpha());
        result.rows.push_back({delta, mean / scale, std::sqrt(variance / m) / scale});
    }

    double weight_sum = 0.0;
    double weighted = 0.0;
    for (const MomentRow& row : result.rows) {
        const double w = row.std_error > 0.0 ? 1.0 / (row.std_error * row.std_error) : 1.0;
        weight_sum += w;
        weighted += w * row.ratio;
    }
    result.weighted_mean = weighted / weight_sum;
    result.within_bound = true;
    result.constant = true;
    for (const MomentRow& row : result.rows) {
        result.within_bound = result.within_bound && row.ratio <= result.bound + 3.0 * row.std_error;
        result.constant = result.constant && std::abs(row.ratio - result.weighted_mean) <= 3.0 * row.std_error;
    }
    return result;
}

}  // namespace funcrate
