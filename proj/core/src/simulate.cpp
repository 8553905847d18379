#include "funcrate/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "funcrate/error.hpp"

namespace funcrate {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

GridSpec::GridSpec(double T, std::size_t n_ref, std::vector<std::size_t> eval_ns, std::size_t min_ratio)
    : T_(T), n_ref_(n_ref), eval_ns_(std::move(eval_ns)) {
    require(T > 0.0 && std::isfinite(T), Errc::domain, "grid horizon T must be > 0");
    require(n_ref >= 1 && std::has_single_bit(n_ref), Errc::domain,
            "n_ref must be a power of two, got " + std::to_string(n_ref));
    require(!eval_ns_.empty(), Errc::domain, "eval_ns must not be empty");
    require(std::is_sorted(eval_ns_.begin(), eval_ns_.end()) &&
                std::adjacent_find(eval_ns_.begin(), eval_ns_.end()) == eval_ns_.end(),
            Errc::domain, "eval_ns must be strictly increasing");
    require(eval_ns_.front() >= 1, Errc::domain, "eval_ns entries must be positive");
    for (std::size_t n : eval_ns_) {
        (void)stride(n);
    }
    require(eval_ns_.back() * std::max<std::size_t>(min_ratio, 1) <= n_ref, Errc::domain,
            "n_ref must be at least " + std::to_string(min_ratio) + " * max(eval_ns)");
}

std::size_t GridSpec::stride(std::size_t n) const {
    require(n >= 1 && n_ref_ % n == 0, Errc::not_nested,
            std::to_string(n) + " does not divide n_ref = " + std::to_string(n_ref_));
    return n_ref_ / n;
}

// ---------------------------------------------------------------------------

StableSampler::StableSampler(double alpha)
    : alpha_(alpha), inv_alpha_(1.0 / alpha), tail_exponent_((1.0 - alpha) / alpha) {
    require(alpha > 0.0 && alpha <= 2.0, Errc::domain, "stable sampler needs alpha in (0, 2]");
}

// S = sin(alpha U) / cos(U)^{1/alpha} * (cos((1 - alpha) U) / E)^{(1 - alpha)/alpha},
// U uniform on (-pi/2, pi/2), E unit exponential.
double StableSampler::operator()(RandomStream& stream) const noexcept {
    const double u = std::numbers::pi * (stream.uniform() - 0.5);
    const double e = stream.exponential();
    if (alpha_ == 1.0) {
        return std::tan(u);
    }
    const double log_scale = -inv_alpha_ * std::log(std::cos(u)) +
                             tail_exponent_ * (std::log(std::cos((1.0 - alpha_) * u)) - std::log(e));
    return std::sin(alpha_ * u) * std::exp(log_scale);
}

// ---------------------------------------------------------------------------

void sample_increment(const ProcessModel& model, double dt, RandomStream& stream, std::span<double> out) {
    require(dt > 0.0, Errc::domain, "increment needs dt > 0");
    require(out.size() == model.dimension(), Errc::domain, "increment buffer dimension mismatch");
    std::visit(overloaded{
                   [&](const BrownianScaled& b) {
                       const double sd = b.sigma * std::sqrt(dt);
                       for (double& v : out) {
                           v = sd * stream.normal();
                       }
                   },
                   [&](const SymmetricStable& s) {
                       out[0] = s.scale * std::pow(dt, 1.0 / s.alpha) * StableSampler(s.alpha)(stream);
                   },
                   [](const EulerDiffusion&) {
                       fail(Errc::unsupported, "euler models have no exact-law increment");
                   },
               },
               model.kind());
}

double sample_increment(const ProcessModel& model, double dt, RandomStream& stream) {
    double v = 0.0;
    sample_increment(model, dt, stream, std::span<double>(&v, 1));
    return v;
}

namespace {

[[noreturn]] void report_non_finite(const RandomStream& stream, std::size_t step) {
    std::ostringstream msg;
    msg << "non-finite path value at step " << step << " (master_seed=" << stream.key().master_seed
        << ", family=" << stream.key().family << ", path=" << stream.key().index << ")";
    fail(Errc::non_finite, msg.str());
}

// One-dimensional walk with increments drawn by `step(x)`.
template <class Step>
void walk(std::span<double> out, double x0, RandomStream& stream, Step&& step) {
    double x = x0;
    out[0] = x;
    for (std::size_t k = 1; k < out.size(); ++k) {
        x += step(x);
        if (!std::isfinite(x)) {
            report_non_finite(stream, k);
        }
        out[k] = x;
    }
}

}  // namespace

void simulate_path(const ProcessModel& model, const GridSpec& grid, RandomStream& stream,
                   std::span<double> out) {
    const std::size_t d = model.dimension();
    require(out.size() == (grid.n_ref() + 1) * d, Errc::domain, "path buffer has the wrong length");
    const double dt = grid.dt();
    const auto x0 = model.x0();

    std::visit(overloaded{
                   [&](const BrownianScaled& b) {
                       const double sd = b.sigma * std::sqrt(dt);
                       if (d == 1) {
                           walk(out, x0[0], stream, [&](double) { return sd * stream.normal(); });
                           return;
                       }
                       std::copy(x0.begin(), x0.end(), out.begin());
                       for (std::size_t k = 1; k <= grid.n_ref(); ++k) {
                           for (std::size_t i = 0; i < d; ++i) {
                               const double x = out[(k - 1) * d + i] + sd * stream.normal();
                               if (!std::isfinite(x)) {
                                   report_non_finite(stream, k);
                               }
                               out[k * d + i] = x;
                           }
                       }
                   },
                   [&](const SymmetricStable& s) {
                       const StableSampler sampler(s.alpha);
                       const double width = s.scale * std::pow(dt, 1.0 / s.alpha);
                       walk(out, x0[0], stream, [&](double) { return width * sampler(stream); });
                   },
                   [&](const EulerDiffusion& e) {
                       const double sqrt_dt = std::sqrt(dt);
                       walk(out, x0[0], stream, [&](double x) {
                           return e.drift(x) * dt + e.diffusion(x) * sqrt_dt * stream.normal();
                       });
                   },
               },
               model.kind());
}

std::vector<double> simulate_path(const ProcessModel& model, const GridSpec& grid, RandomStream& stream) {
    std::vector<double> out((grid.n_ref() + 1) * model.dimension());
    simulate_path(model, grid, stream, out);
    return out;
}

std::vector<double> subsample(std::span<const double> path, const GridSpec& grid, std::size_t n,
                              std::size_t dimension) {
    const std::size_t stride = grid.stride(n);
    require(path.size() == (grid.n_ref() + 1) * dimension, Errc::domain,
            "path does not match the fine grid");
    std::vector<double> out((n + 1) * dimension);
    for (std::size_t k = 0; k <= n; ++k) {
        const auto src = path.subspan(k * stride * dimension, dimension);
        std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(k * dimension));
    }
    return out;
}

// ---------------------------------------------------------------------------

PathBatch::PathBatch(ProcessModel model, GridSpec grid, std::size_t path_count, std::uint64_t master_seed)
    : model_(std::move(model)), grid_(std::move(grid)), path_count_(path_count), master_seed_(master_seed) {}

void PathBatch::generate(std::size_t i, std::span<double> out) const {
    RandomStream stream(key(i));
    simulate_path(model_, grid_, stream, out);
}

std::vector<double> PathBatch::path(std::size_t i) const {
    std::vector<double> out(path_length());
    generate(i, out);
    return out;
}

}  // namespace funcrate
