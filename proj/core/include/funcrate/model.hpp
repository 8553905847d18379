#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace funcrate {

/// sigma * W_t in R^d.
struct BrownianScaled {
    double sigma = 1.0;
};

/// Symmetric alpha-stable Levy process with E exp(i xi X_t) = exp(-t scale^alpha |xi|^alpha).
struct SymmetricStable {
    double alpha = 1.5;
    double scale = 1.0;
};

/// dX = drift(X) dt + diffusion(X) dW, simulated with the Euler scheme only.
struct EulerDiffusion {
    std::function<double(double)> drift;
    std::function<double(double)> diffusion;
    std::string description;
};

using ProcessKind = std::variant<BrownianScaled, SymmetricStable, EulerDiffusion>;

class ProcessModel {
public:
    static ProcessModel brownian(double sigma, std::vector<double> x0 = {0.0});
    static ProcessModel stable(double alpha, double scale = 1.0, double x0 = 0.0);
    static ProcessModel euler(std::function<double(double)> drift,
                              std::function<double(double)> diffusion,
                              double x0 = 0.0,
                              std::string description = "euler");

    [[nodiscard]] const ProcessKind& kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return x0_.size(); }
    [[nodiscard]] std::span<const double> x0() const noexcept { return x0_; }

    /// Stability index: 2 for Brownian and Euler models.
    [[nodiscard]] double alpha() const noexcept;

    /// False when paths only approximate the law (Euler).
    [[nodiscard]] bool exact_law() const noexcept;

    /// Same process started elsewhere.
    [[nodiscard]] ProcessModel with_start(std::vector<double> x0) const;

    /// Short human-readable descriptor, e.g. "stable(alpha=1.5,scale=1)".
    [[nodiscard]] std::string describe() const;

private:
    ProcessModel(ProcessKind kind, std::vector<double> x0);

    ProcessKind kind_;
    std::vector<double> x0_;
};

/// Q(z) = c1 exp(-c2 |z|^2).
struct GaussianKernel {
    double c1 = 0.0;
    double c2 = 0.0;

    /// Normalised kernel with covariance `variance` * I in `dimension` dims.
    static GaussianKernel with_variance(double variance, std::size_t dimension = 1);
};

/// Q = density of the standard symmetric alpha-stable law (one-dimensional).
struct StableKernel {
    double alpha = 1.5;
};

using QKernel = std::variant<GaussianKernel, StableKernel>;

/// Constants (alpha, C_T, Q) for which, for all t <= horizon,
///   |d^j/dt^j p_t(x, y)| <= C_T t^{-j-d/alpha} Q(t^{-1/alpha}(x - y)),  j = 0, 1, 2.
class DensityBoundCertificate {
public:
    /// Validates alpha in (0, 2], c_T >= 1, horizon > 0 and that the kernel
    /// integrates to one within 1e-8.
    static DensityBoundCertificate make(double alpha, double c_T, double horizon,
                                        QKernel kernel, std::size_t dimension = 1);

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double c_T() const noexcept { return c_T_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] const QKernel& q_kernel() const noexcept { return kernel_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }

private:
    DensityBoundCertificate(double alpha, double c_T, double horizon, QKernel kernel,
                            std::size_t dimension)
        : alpha_(alpha), c_T_(c_T), horizon_(horizon), kernel_(kernel), dimension_(dimension) {}

    double alpha_;
    double c_T_;
    double horizon_;
    QKernel kernel_;
    std::size_t dimension_;
};

/// Relative margin added on top of the numerically maximised C_T.
inline constexpr double kCertificateMargin = 1e-6;

/// True when certificate_for returns a certificate: Brownian models, and
/// stable models whose density can be evaluated (alpha >= 0.5).
bool is_certifiable(const ProcessModel& model) noexcept;

/// Certificate with numerically maximised C_T, or nullopt (not certified)
/// for Euler models and stable models with alpha < 0.5. Throws Errc::domain for T <= 0.
std::optional<DensityBoundCertificate> certificate_for(const ProcessModel& model, double T);

/// Integral of |z|^{2 gamma} Q(z) dz.
/// Throws Errc::infinite_moment for a stable kernel with 2 gamma >= alpha.
double q_moment(const DensityBoundCertificate& cert, double gamma);

/// Q(z).
double kernel_density(const QKernel& kernel, std::span<const double> z);
double kernel_density(const QKernel& kernel, double z);

/// Numerical integral of Q over R^d.
double kernel_mass(const QKernel& kernel, std::size_t dimension);

/// p_t(x, y). Throws Errc::unsupported for Euler models.
double transition_density(const ProcessModel& model, double t,
                          std::span<const double> x, std::span<const double> y);
double transition_density(const ProcessModel& model, double t, double x, double y);

/// d^order/dt^order p_t(x, y) for order in {0, 1, 2}, from closed forms.
double transition_density_dt(const ProcessModel& model, int order, double t,
                             std::span<const double> x, std::span<const double> y);
double transition_density_dt(const ProcessModel& model, int order, double t, double x, double y);

}  // namespace funcrate
