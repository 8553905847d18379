#include "funcrate/stable_density.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "funcrate/compensated_sum.hpp"
#include "funcrate/error.hpp"

namespace funcrate {
namespace {

constexpr int kGaussPoints = 20;
// exp(-xi^alpha) * xi^{2 alpha} is below 1e-18 once xi^alpha reaches this.
constexpr double kFourierCutoff = 50.0;
constexpr int kGradedPanels = 48;
constexpr int kMaxSeriesTerms = 600;

using Rule = boost::math::quadrature::gauss<double, kGaussPoints>;

// Appends the Gauss-Legendre nodes and weights of [a, b].
void append_panel(double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            nodes.push_back(mid);
            weights.push_back(half * w[i]);
            continue;
        }
        nodes.push_back(mid - half * x[i]);
        weights.push_back(half * w[i]);
        nodes.push_back(mid + half * x[i]);
        weights.push_back(half * w[i]);
    }
}

// Panels for [0, xi_max]: geometric grading towards the xi^alpha cusp at
// the origin, then uniform panels of width h.
void build_rule(double h, double xi_max, std::vector<double>& nodes, std::vector<double>& weights) {
    double right = h;
    for (int k = 0; k < kGradedPanels; ++k) {
        const double left = 0.5 * right;
        append_panel(left, right, nodes, weights);
        right = left;
    }
    append_panel(0.0, right, nodes, weights);
    for (double a = h; a < xi_max; a += h) {
        append_panel(a, a + h, nodes, weights);
    }
}

double falling_factorial(int k, int order) {
    double f = 1.0;
    for (int i = 0; i < order; ++i) {
        f *= static_cast<double>(k - i);
    }
    return f;
}

}  // namespace

const StableDensity& StableDensity::standard(double alpha) {
    static std::mutex mutex;
    static std::map<double, std::unique_ptr<StableDensity>> cache;

    require(alpha >= kMinAlpha && alpha <= 2.0, Errc::unsupported,
            "stable density evaluation needs alpha in [0.5, 2], got " + std::to_string(alpha));
    std::lock_guard lock(mutex);
    auto& slot = cache[alpha];
    if (!slot) {
        slot = std::make_unique<StableDensity>(alpha);
    }
    return *slot;
}

StableDensity::StableDensity(double alpha)
    : alpha_(alpha), xi_max_(std::pow(kFourierCutoff, 1.0 / alpha)), series_from_(8.0) {
    // The tail series is asymptotic for alpha > 1; push the switch point out
    // until it converges there for every order.
    while (series_from_ < 1024.0) {
        bool converged = true;
        for (int order = 0; order <= kMaxOrder; ++order) {
            converged = converged && tail_series(series_from_, order).has_value();
        }
        if (converged && tail_mass_series(series_from_).has_value()) {
            break;
        }
        series_from_ *= 2.0;
    }

    std::vector<double> base_weights;
    build_rule(std::min(0.25, 2.0 / series_from_), xi_max_, nodes_, base_weights);
    for (int order = 0; order <= kMaxOrder; ++order) {
        weights_[order].resize(nodes_.size());
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double s = std::pow(nodes_[i], alpha_);
        const double w = base_weights[i] * std::exp(-s) / std::numbers::pi;
        weights_[0][i] = w;
        weights_[1][i] = -s * w;
        weights_[2][i] = s * s * w;
    }
}

double StableDensity::time_derivative(double u, int order) const {
    require(order >= 0 && order <= kMaxOrder, Errc::domain, "time derivative order must be 0, 1 or 2");
    u = std::abs(u);
    if (u <= series_from_) {
        return fourier(u, order);
    }
    if (auto s = tail_series(u, order)) {
        return *s;
    }
    return fourier_uncached(u, order);
}

double StableDensity::fourier(double u, int order) const {
    const auto& w = weights_[order];
    CompensatedSum sum;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        sum += std::cos(u * nodes_[i]) * w[i];
    }
    return sum.value();
}

double StableDensity::fourier_uncached(double u, int order) const {
    std::vector<double> nodes;
    std::vector<double> weights;
    build_rule(std::min(0.25, 2.0 / u), xi_max_, nodes, weights);
    CompensatedSum sum;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double s = std::pow(nodes[i], alpha_);
        double factor = 1.0;
        for (int j = 0; j < order; ++j) {
            factor *= -s;
        }
        sum += std::cos(u * nodes[i]) * factor * weights[i] * std::exp(-s);
    }
    return sum.value() / std::numbers::pi;
}

// G_j(u) = (1/pi) sum_k (-1)^{k+1} Gamma(alpha k + 1)/k! sin(k pi alpha / 2)
//          * k (k-1) ... (k-j+1) * u^{-alpha k - 1}
std::optional<double> StableDensity::tail_series(double u, int order) const {
    const double log_u = std::log(u);
    CompensatedSum sum;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kMaxSeriesTerms; ++k) {
        const double ak = alpha_ * k;
        const double ff = falling_factorial(k, order);
        const double log_mag = std::lgamma(ak + 1.0) - std::lgamma(k + 1.0) - (ak + 1.0) * log_u;
        const double magnitude = std::exp(log_mag) * std::abs(ff) / std::numbers::pi;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        sum += sign * std::sin(0.5 * k * std::numbers::pi * alpha_) * ff * std::exp(log_mag) /
               std::numbers::pi;
        if (ff != 0.0) {
            if (magnitude <= 1e-17 * std::abs(sum.value())) {
                return sum.value();
            }
            if (magnitude > previous && k > order + 2) {
                return std::nullopt;
            }
            previous = magnitude;
        }
    }
    return std::nullopt;
}

// integral_u^inf G_0 = (1/pi) sum_k (-1)^{k+1} Gamma(alpha k + 1)/k! sin(k pi alpha / 2) u^{-alpha k}/(alpha k)
std::optional<double> StableDensity::tail_mass_series(double u) const {
    const double log_u = std::log(u);
    CompensatedSum sum;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kMaxSeriesTerms; ++k) {
        const double ak = alpha_ * k;
        const double log_mag = std::lgamma(ak + 1.0) - std::lgamma(k + 1.0) - ak * log_u - std::log(ak);
        const double magnitude = std::exp(log_mag) / std::numbers::pi;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        sum += sign * std::sin(0.5 * k * std::numbers::pi * alpha_) * magnitude;
        if (magnitude <= 1e-17 * std::abs(sum.value())) {
            return sum.value();
        }
        if (magnitude > previous && k > 2) {
            return std::nullopt;
        }
        previous = magnitude;
    }
    return std::nullopt;
}

double StableDensity::total_mass() const {
    std::vector<double> nodes;
    std::vector<double> weights;
    for (double a = 0.0; a < series_from_; a += 0.25) {
        append_panel(a, std::min(a + 0.25, series_from_), nodes, weights);
    }
    CompensatedSum half;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        half += weights[i] * fourier(nodes[i], 0);
    }
    auto tail = tail_mass_series(series_from_);
    require(tail.has_value(), Errc::unsupported, "stable tail mass series did not converge");
    half += *tail;
    return 2.0 * half.value();
}

}  // namespace funcrate
