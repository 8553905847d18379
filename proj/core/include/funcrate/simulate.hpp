#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "funcrate/model.hpp"
#include "funcrate/rng.hpp"

namespace funcrate {

/// Fine grid t_k = k T / n_ref (n_ref a power of two) together with the
/// coarse step counts at which errors are evaluated.
class GridSpec {
public:
    /// Fine steps per coarsest-grid step required for the reference sum.
    static constexpr std::size_t kDefaultBiasRatio = 64;

    /// Throws Errc::domain unless T > 0, n_ref is a power of two, eval_ns is
    /// sorted, positive and satisfies max(eval_ns) * min_ratio <= n_ref;
    /// Errc::not_nested when some n does not divide n_ref.
    GridSpec(double T, std::size_t n_ref, std::vector<std::size_t> eval_ns,
             std::size_t min_ratio = kDefaultBiasRatio);

    [[nodiscard]] double T() const noexcept { return T_; }
    [[nodiscard]] std::size_t n_ref() const noexcept { return n_ref_; }
    [[nodiscard]] const std::vector<std::size_t>& eval_ns() const noexcept { return eval_ns_; }
    [[nodiscard]] double dt() const noexcept { return T_ / static_cast<double>(n_ref_); }
    [[nodiscard]] double time(std::size_t k) const noexcept {
        return T_ * static_cast<double>(k) / static_cast<double>(n_ref_);
    }

    /// n_ref / n; throws Errc::not_nested if n does not divide n_ref.
    [[nodiscard]] std::size_t stride(std::size_t n) const;

private:
    double T_;
    std::size_t n_ref_;
    std::vector<std::size_t> eval_ns_;
};

/// Standard symmetric alpha-stable variate (characteristic function
/// exp(-|xi|^alpha)) by the Chambers-Mallows-Stuck transform.
class StableSampler {
public:
    explicit StableSampler(double alpha);

    double operator()(RandomStream& stream) const noexcept;

private:
    double alpha_;
    double inv_alpha_;
    double tail_exponent_;  // (1 - alpha) / alpha
};

/// Exact-law increment over dt for Brownian and stable models.
/// Throws Errc::unsupported for Euler models (stepped inside simulate_path).
void sample_increment(const ProcessModel& model, double dt, RandomStream& stream, std::span<double> out);
double sample_increment(const ProcessModel& model, double dt, RandomStream& stream);

/// Writes n_ref + 1 points (each of model.dimension() coordinates) into `out`,
/// starting at x0. Throws Errc::non_finite naming the stream key on overflow.
void simulate_path(const ProcessModel& model, const GridSpec& grid, RandomStream& stream,
                   std::span<double> out);
std::vector<double> simulate_path(const ProcessModel& model, const GridSpec& grid, RandomStream& stream);

/// Values at fine indices k * (n_ref / n), k = 0..n. Throws Errc::not_nested.
std::vector<double> subsample(std::span<const double> path, const GridSpec& grid, std::size_t n,
                              std::size_t dimension = 1);

/// M paths of one model on one grid; path i depends only on (master_seed, i).
class PathBatch {
public:
    static constexpr std::uint64_t kPathFamily = 0;

    PathBatch(ProcessModel model, GridSpec grid, std::size_t path_count, std::uint64_t master_seed);

    [[nodiscard]] const ProcessModel& model() const noexcept { return model_; }
    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return path_count_; }
    [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
    [[nodiscard]] bool exact_law() const noexcept { return model_.exact_law(); }

    /// Doubles per path: (n_ref + 1) * dimension.
    [[nodiscard]] std::size_t path_length() const noexcept {
        return (grid_.n_ref() + 1) * model_.dimension();
    }

    [[nodiscard]] StreamKey key(std::size_t i) const noexcept { return {master_seed_, kPathFamily, i}; }

    void generate(std::size_t i, std::span<double> out) const;
    [[nodiscard]] std::vector<double> path(std::size_t i) const;

    /// Streams paths [begin, end) in index order through visitor(i, path),
    /// reusing a single buffer.
    template <class Visitor>
    void for_each(std::size_t begin, std::size_t end, Visitor&& visitor) const {
        std::vector<double> buffer(path_length());
        for (std::size_t i = begin; i < end; ++i) {
            generate(i, buffer);
            visitor(i, std::span<const double>(buffer));
        }
    }

private:
    ProcessModel model_;
    GridSpec grid_;
    std::size_t path_count_;
    std::uint64_t master_seed_;
};

}  // namespace funcrate
