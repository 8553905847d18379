#include "funcrate/funcs.hpp"

#include <sstream>

#include "funcrate/error.hpp"

namespace funcrate {

namespace {

void check_gamma(double gamma) {
    require(gamma > 0.0 && gamma <= 1.0, Errc::domain,
            "holder exponent must lie in (0, 1], got " + std::to_string(gamma));
}

}  // namespace

HolderFunction HolderFunction::constant(double value, double gamma) {
    check_gamma(gamma);
    return {Constant{value}, gamma, 0.0};
}

HolderFunction HolderFunction::linear(double slope, double offset) {
    return {Linear{slope, offset}, 1.0, std::abs(slope)};
}

HolderFunction HolderFunction::power_abs(double gamma, double center) {
    return power_abs(gamma, std::vector<double>{center});
}

HolderFunction HolderFunction::power_abs(double gamma, std::vector<double> center) {
    check_gamma(gamma);
    require(!center.empty(), Errc::domain, "power function needs a center");
    // ||x|^g - |y|^g| <= ||x| - |y||^g <= |x - y|^g for g in (0, 1].
    return {PowerAbs{gamma, std::move(center)}, gamma, 1.0};
}

HolderFunction HolderFunction::sine(double frequency, double gamma) {
    check_gamma(gamma);
    require(frequency > 0.0, Errc::domain, "sine frequency must be > 0");
    // |sin a - sin b| <= min(2, w|a - b|) <= 2^{1-g} (w|a - b|)^g.
    return {Sine{frequency, 0.0}, gamma, std::pow(2.0, 1.0 - gamma) * std::pow(frequency, gamma)};
}

HolderFunction HolderFunction::clipped_power(double gamma, double center, double cap) {
    check_gamma(gamma);
    require(cap > 0.0, Errc::domain, "clipping cap must be > 0");
    // min(., cap) is 1-Lipschitz, so the norm of |x - c|^g carries over.
    return {ClippedPower{gamma, {center}, cap}, gamma, 1.0};
}

HolderFunction HolderFunction::scaled(double lambda) const {
    HolderFunction out = *this;
    out.amplitude_ *= lambda;
    out.holder_norm_ *= std::abs(lambda);
    return out;
}

HolderFunction HolderFunction::shifted(double shift) const {
    HolderFunction out = *this;
    std::visit(
        [shift](auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Linear>) {
                d.offset -= d.slope * shift;
            } else if constexpr (std::is_same_v<T, Sine>) {
                d.phase -= d.frequency * shift;
            } else if constexpr (std::is_same_v<T, PowerAbs> || std::is_same_v<T, ClippedPower>) {
                d.center[0] += shift;
            }
        },
        out.descriptor_);
    return out;
}

double HolderFunction::evaluate(double x) const {
    return visit([x](const auto& f) { return f(x); });
}

double HolderFunction::evaluate(std::span<const double> x) const {
    return visit([x](const auto& f) { return f(x); });
}

std::string HolderFunction::describe() const {
    std::ostringstream out;
    out.precision(17);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                out << "constant(value=" << d.value;
            } else if constexpr (std::is_same_v<T, Linear>) {
                out << "linear(slope=" << d.slope << ",offset=" << d.offset;
            } else if constexpr (std::is_same_v<T, PowerAbs>) {
                out << "power(gamma=" << d.gamma << ",center=" << d.center[0];
            } else if constexpr (std::is_same_v<T, Sine>) {
                out << "sine(frequency=" << d.frequency;
                if (d.phase != 0.0) {
                    out << ",phase=" << d.phase;
                }
            } else {
                out << "clipped_power(gamma=" << d.gamma << ",center=" << d.center[0] << ",cap=" << d.cap;
            }
        },
        descriptor_);
    if (amplitude_ != 1.0) {
        out << ",amplitude=" << amplitude_;
    }
    out << ")";
    return out.str();
}

double empirical_holder_check(const HolderFunction& h, Interval domain, int grid_points) {
    require(grid_points >= 2, Errc::domain, "holder check needs at least 2 grid points");
    require(domain.hi > domain.lo, Errc::domain, "holder check needs a nonempty interval");

    std::vector<double> xs(static_cast<std::size_t>(grid_points));
    std::vector<double> values(xs.size());
    const double step = (domain.hi - domain.lo) / (grid_points - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = domain.lo + step * static_cast<double>(i);
        values[i] = h.evaluate(xs[i]);
    }

    // Equispaced grid: the denominator depends only on the index gap.
    std::vector<double> inverse_gap(xs.size());
    for (std::size_t k = 1; k < xs.size(); ++k) {
        inverse_gap[k] = 1.0 / std::pow(step * static_cast<double>(k), h.gamma());
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            worst = std::max(worst, std::abs(values[i] - values[j]) * inverse_gap[j - i]);
        }
    }
    if (worst > h.holder_norm() + 1e-9) {
        fail(Errc::holder_violation, h.describe() + ": empirical holder ratio " + std::to_string(worst) +
                                         " exceeds declared norm " + std::to_string(h.holder_norm()));
    }
    return worst;
}

}  // namespace funcrate
