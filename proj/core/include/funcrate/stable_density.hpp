#pragma once

#include <optional>
#include <vector>

namespace funcrate {

/// Standard symmetric alpha-stable law with characteristic function
/// exp(-|xi|^alpha), evaluated through its time-extended family
///
///   G_j(u) = (1/pi) * integral_0^inf cos(u xi) (-xi^alpha)^j exp(-xi^alpha) dxi,
///
/// so that G_0 is the density at unit time and G_j is the j-th time
/// derivative of p_t(0, u) at t = 1.  Small |u| uses a cached composite
/// Gauss-Legendre rule on the Fourier integral; large |u| uses the
/// Bergstrom tail series once it converges.
///
/// Instances are immutable and shared through `standard()`.
class StableDensity {
public:
    static constexpr double kMinAlpha = 0.5;
    static constexpr int kMaxOrder = 2;

    /// Cached instance for `alpha` in [kMinAlpha, 2]. Thread-safe.
    static const StableDensity& standard(double alpha);

    [[nodiscard]] double alpha() const noexcept { return alpha_; }

    [[nodiscard]] double density(double u) const { return time_derivative(u, 0); }

    /// G_order(u) for order in {0, 1, 2}.
    [[nodiscard]] double time_derivative(double u, int order) const;

    /// Integral of G_0 over the real line, computed numerically
    /// (quadrature on [-switch, switch] plus the integrated tail series).
    [[nodiscard]] double total_mass() const;

    /// |u| beyond which the tail series is used.
    [[nodiscard]] double series_threshold() const noexcept { return series_from_; }

    explicit StableDensity(double alpha);

private:
    [[nodiscard]] double fourier(double u, int order) const;
    [[nodiscard]] double fourier_uncached(double u, int order) const;
    [[nodiscard]] std::optional<double> tail_series(double u, int order) const;
    [[nodiscard]] std::optional<double> tail_mass_series(double u) const;

    double alpha_;
    double xi_max_;
    double series_from_;
    std::vector<double> nodes_;
    std::vector<double> weights_[kMaxOrder + 1];
};

}  // namespace funcrate
