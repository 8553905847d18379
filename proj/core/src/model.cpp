#include "funcrate/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "funcrate/compensated_sum.hpp"
#include "funcrate/error.hpp"
#include "funcrate/stable_density.hpp"

namespace funcrate {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// ---------------------------------------------------------------------------
// ProcessModel

ProcessModel::ProcessModel(ProcessKind kind, std::vector<double> x0)
    : kind_(std::move(kind)), x0_(std::move(x0)) {}

ProcessModel ProcessModel::brownian(double sigma, std::vector<double> x0) {
    require(sigma > 0.0 && std::isfinite(sigma), Errc::domain, "brownian sigma must be > 0");
    require(!x0.empty(), Errc::domain, "start point needs dimension >= 1");
    return ProcessModel(BrownianScaled{sigma}, std::move(x0));
}

ProcessModel ProcessModel::stable(double alpha, double scale, double x0) {
    require(alpha > 0.0 && alpha < 2.0, Errc::domain, "stable alpha must lie in (0, 2)");
    require(scale > 0.0 && std::isfinite(scale), Errc::domain, "stable scale must be > 0");
    return ProcessModel(SymmetricStable{alpha, scale}, {x0});
}

ProcessModel ProcessModel::euler(std::function<double(double)> drift,
                                 std::function<double(double)> diffusion, double x0,
                                 std::string description) {
    require(static_cast<bool>(drift) && static_cast<bool>(diffusion), Errc::domain,
            "euler model needs drift and diffusion functions");
    return ProcessModel(EulerDiffusion{std::move(drift), std::move(diffusion), std::move(description)},
                        {x0});
}

double ProcessModel::alpha() const noexcept {
    if (const auto* s = std::get_if<SymmetricStable>(&kind_)) {
        return s->alpha;
    }
    return 2.0;
}

bool ProcessModel::exact_law() const noexcept {
    return !std::holds_alternative<EulerDiffusion>(kind_);
}

ProcessModel ProcessModel::with_start(std::vector<double> x0) const {
    require(x0.size() == x0_.size(), Errc::domain, "start point dimension mismatch");
    return ProcessModel(kind_, std::move(x0));
}

std::string ProcessModel::describe() const {
    std::ostringstream out;
    out.precision(17);
    std::visit(overloaded{
                   [&](const BrownianScaled& b) { out << "brownian(sigma=" << b.sigma; },
                   [&](const SymmetricStable& s) {
                       out << "stable(alpha=" << s.alpha << ",scale=" << s.scale;
                   },
                   [&](const EulerDiffusion& e) { out << "euler(" << e.description; },
               },
               kind_);
    out << ",x0=";
    for (std::size_t i = 0; i < x0_.size(); ++i) {
        out << (i ? ":" : "") << x0_[i];
    }
    if (x0_.size() > 1) {
        out << ",d=" << x0_.size();
    }
    out << ")";
    return out.str();
}

// ---------------------------------------------------------------------------
// Kernels

GaussianKernel GaussianKernel::with_variance(double variance, std::size_t dimension) {
    require(variance > 0.0, Errc::domain, "kernel variance must be > 0");
    const double c2 = 0.5 / variance;
    return {std::pow(c2 / std::numbers::pi, 0.5 * static_cast<double>(dimension)), c2};
}

double kernel_density(const QKernel& kernel, double z) {
    return std::visit(overloaded{
                          [&](const GaussianKernel& g) { return g.c1 * std::exp(-g.c2 * z * z); },
                          [&](const StableKernel& s) {
                              return StableDensity::standard(s.alpha).density(z);
                          },
                      },
                      kernel);
}

double kernel_density(const QKernel& kernel, std::span<const double> z) {
    double r2 = 0.0;
    for (double v : z) {
        r2 += v * v;
    }
    if (std::holds_alternative<StableKernel>(kernel)) {
        require(z.size() == 1, Errc::unsupported, "stable kernel is one-dimensional");
    }
    return kernel_density(kernel, std::sqrt(r2));
}

namespace {

double unit_sphere_area(std::size_t d) {
    const double half = 0.5 * static_cast<double>(d);
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

// Composite 20-point Gauss-Legendre on [a, b] with `panels` panels.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    CompensatedSum sum;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double left = a + p * h;
        sum += Rule::integrate(f, left, left + h);
    }
    return sum.value();
}

}  // namespace

double kernel_mass(const QKernel& kernel, std::size_t dimension) {
    return std::visit(
        overloaded{
            [&](const GaussianKernel& g) {
                require(g.c1 > 0.0 && g.c2 > 0.0, Errc::domain, "gaussian kernel needs c1, c2 > 0");
                const double radius = std::sqrt(60.0 / g.c2);
                const double d = static_cast<double>(dimension);
                auto radial = [&](double r) { return std::pow(r, d - 1.0) * g.c1 * std::exp(-g.c2 * r * r); };
                return unit_sphere_area(dimension) * integrate_panels(radial, 0.0, radius, 64);
            },
            [&](const StableKernel& s) {
                require(dimension == 1, Errc::unsupported, "stable kernel is one-dimensional");
                return StableDensity::standard(s.alpha).total_mass();
            },
        },
        kernel);
}

// ---------------------------------------------------------------------------
// Certificates

DensityBoundCertificate DensityBoundCertificate::make(double alpha, double c_T, double horizon,
                                                      QKernel kernel, std::size_t dimension) {
    require(alpha > 0.0 && alpha <= 2.0, Errc::domain, "certificate alpha must lie in (0, 2]");
    require(c_T >= 1.0, Errc::domain, "certificate constant C_T must be >= 1");
    require(horizon > 0.0, Errc::domain, "certificate horizon must be > 0");
    require(dimension >= 1, Errc::domain, "dimension must be >= 1");
    if (const auto* s = std::get_if<StableKernel>(&kernel)) {
        require(s->alpha == alpha, Errc::domain, "stable kernel index must match alpha");
    }
    const double mass = kernel_mass(kernel, dimension);
    require(std::abs(mass - 1.0) <= 1e-8, Errc::domain,
            "kernel Q must integrate to 1, got " + std::to_string(mass));
    return DensityBoundCertificate(alpha, c_T, horizon, kernel, dimension);
}

namespace {

// Maximises a nonnegative ratio over [grid.front(), grid.back()]: scan the
// grid, then polish every interior local maximum with Brent's method.
template <class F>
double maximize_on_grid(F&& f, const std::vector<double>& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = f(grid[i]);
    }
    double best = *std::max_element(values.begin(), values.end());
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (values[i] > values[i - 1] && values[i] >= values[i + 1]) {
            auto negated = [&](double u) { return -f(u); };
            const auto [arg, neg] =
                boost::math::tools::brent_find_minima(negated, grid[i - 1], grid[i + 1], 40);
            (void)arg;
            best = std::max(best, -neg);
        }
    }
    return best;
}

std::vector<double> scan_grid(double linear_end, double linear_step, double log_end, int log_points) {
    std::vector<double> grid;
    for (double u = 0.0; u < linear_end; u += linear_step) {
        grid.push_back(u);
    }
    const double ratio = std::pow(log_end / linear_end, 1.0 / log_points);
    double u = linear_end;
    for (int i = 0; i <= log_points; ++i, u *= ratio) {
        grid.push_back(u);
    }
    return grid;
}

// With Q(z) = c1 exp(-c2 |z|^2), c2 = 1/(4 sigma^2) and w = |z|^2/(2 sigma^2),
// the three ratios |d^j p| / (t^{-j-d/2} Q) are time free:
//   2^{d/2} |P_j(w)| exp(-w/2),  P_0 = 1, P_1 = w - d/2, P_2 = (w - d/2)^2 + d/2 - 2w.
DensityBoundCertificate brownian_certificate(const BrownianScaled& b, std::size_t dimension, double T) {
    const double d = static_cast<double>(dimension);
    const double variance = 2.0 * b.sigma * b.sigma;
    const GaussianKernel kernel = GaussianKernel::with_variance(variance, dimension);

    const double prefactor = std::pow(2.0, 0.5 * d);
    auto ratio = [&](int order) {
        return [=](double w) {
            double poly = 1.0;
            if (order == 1) {
                poly = w - 0.5 * d;
            } else if (order == 2) {
                poly = (w - 0.5 * d) * (w - 0.5 * d) + 0.5 * d - 2.0 * w;
            }
            return prefactor * std::abs(poly) * std::exp(-0.5 * w);
        };
    };
    const auto grid = scan_grid(20.0, 1e-3, 400.0, 400);
    double c_T = 1.0;
    for (int order = 0; order <= 2; ++order) {
        c_T = std::max(c_T, maximize_on_grid(ratio(order), grid));
    }
    return DensityBoundCertificate::make(2.0, c_T * (1.0 + kCertificateMargin), T, kernel, dimension);
}

// With Q = G_0 (unit-scale stable density) and u = t^{-1/alpha}(x - y), the
// ratios are |G_j(u/scale)| / (scale G_0(u)). As u -> infinity the j = 0, 1
// ratios tend to scale^alpha and the j = 2 ratio to 0.
DensityBoundCertificate stable_certificate(const SymmetricStable& s, double T) {
    const StableDensity& g = StableDensity::standard(s.alpha);
    auto ratio = [&](int order) {
        return [&g, order, &s](double u) {
            return std::abs(g.time_derivative(u / s.scale, order)) / (s.scale * g.density(u));
        };
    };
    const auto grid = scan_grid(8.0, 0.01, 1e6, 600);
    double c_T = std::max(1.0, std::pow(s.scale, s.alpha));
    for (int order = 0; order <= 2; ++order) {
        c_T = std::max(c_T, maximize_on_grid(ratio(order), grid));
    }
    return DensityBoundCertificate::make(s.alpha, c_T * (1.0 + kCertificateMargin), T,
                                         StableKernel{s.alpha}, 1);
}

}  // namespace

bool is_certifiable(const ProcessModel& model) noexcept {
    if (const auto* s = std::get_if<SymmetricStable>(&model.kind())) {
        return s->alpha >= StableDensity::kMinAlpha;
    }
    return model.exact_law();
}

std::optional<DensityBoundCertificate> certificate_for(const ProcessModel& model, double T) {
    require(T > 0.0 && std::isfinite(T), Errc::domain, "certificate horizon T must be > 0");
    if (!is_certifiable(model)) {
        return std::nullopt;
    }
    return std::visit(
        overloaded{
            [&](const BrownianScaled& b) -> std::optional<DensityBoundCertificate> {
                return brownian_certificate(b, model.dimension(), T);
            },
            [&](const SymmetricStable& s) -> std::optional<DensityBoundCertificate> {
                return stable_certificate(s, T);
            },
            [](const EulerDiffusion&) -> std::optional<DensityBoundCertificate> { return std::nullopt; },
        },
        model.kind());
}

double q_moment(const DensityBoundCertificate& cert, double gamma) {
    require(gamma > 0.0 && std::isfinite(gamma), Errc::domain, "gamma must be > 0");
    const double p = 2.0 * gamma;
    return std::visit(
        overloaded{
            [&](const GaussianKernel& g) {
                // c1 * |S^{d-1}| * integral r^{p+d-1} exp(-c2 r^2) dr
                const double half_d = 0.5 * static_cast<double>(cert.dimension());
                return g.c1 * std::pow(std::numbers::pi, half_d) * std::tgamma(gamma + half_d) /
                       (std::tgamma(half_d) * std::pow(g.c2, gamma + half_d));
            },
            [&](const StableKernel& s) {
                require(p < s.alpha, Errc::infinite_moment,
                        "stable kernel moment of order 2*gamma = " + std::to_string(p) +
                            " diverges for alpha = " + std::to_string(s.alpha));
                // E|S|^p = 2^p Gamma((1+p)/2) Gamma(1 - p/alpha) / (sqrt(pi) Gamma(1 - p/2))
                return std::pow(2.0, p) * std::tgamma(0.5 * (1.0 + p)) * std::tgamma(1.0 - p / s.alpha) /
                       (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - 0.5 * p));
            },
        },
        cert.q_kernel());
}

// ---------------------------------------------------------------------------
// Transition densities

double transition_density_dt(const ProcessModel& model, int order, double t,
                             std::span<const double> x, std::span<const double> y) {
    require(order >= 0 && order <= 2, Errc::domain, "time derivative order must be 0, 1 or 2");
    require(t > 0.0, Errc::domain, "transition density needs t > 0");
    require(x.size() == model.dimension() && y.size() == model.dimension(), Errc::domain,
            "point dimension does not match the model");
    return std::visit(
        overloaded{
            [&](const BrownianScaled& b) {
                const double d = static_cast<double>(model.dimension());
                double r2 = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    r2 += (x[i] - y[i]) * (x[i] - y[i]);
                }
                const double s2 = b.sigma * b.sigma;
                const double w = r2 / (2.0 * s2 * t);
                const double p = std::pow(2.0 * std::numbers::pi * s2 * t, -0.5 * d) * std::exp(-w);
                if (order == 0) {
                    return p;
                }
                if (order == 1) {
                    return p * (w - 0.5 * d) / t;
                }
                return p * ((w - 0.5 * d) * (w - 0.5 * d) + 0.5 * d - 2.0 * w) / (t * t);
            },
            [&](const SymmetricStable& s) {
                const StableDensity& g = StableDensity::standard(s.alpha);
                const double tau = t * std::pow(s.scale, s.alpha);
                const double width = std::pow(tau, 1.0 / s.alpha);
                const double value = g.time_derivative((y[0] - x[0]) / width, order) / width;
                return value * std::pow(s.scale, s.alpha * order) / std::pow(tau, order);
            },
            [](const EulerDiffusion&) -> double {
                fail(Errc::unsupported, "euler models have no closed-form transition density");
            },
        },
        model.kind());
}

double transition_density_dt(const ProcessModel& model, int order, double t, double x, double y) {
    return transition_density_dt(model, order, t, std::span<const double>(&x, 1),
                                 std::span<const double>(&y, 1));
}

double transition_density(const ProcessModel& model, double t, std::span<const double> x,
                          std::span<const double> y) {
    return transition_density_dt(model, 0, t, x, y);
}

double transition_density(const ProcessModel& model, double t, double x, double y) {
    return transition_density_dt(model, 0, t, x, y);
}

}  // namespace funcrate
