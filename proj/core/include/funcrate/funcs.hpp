#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace funcrate {

// Closed catalog of test functions. Every descriptor evaluates on a scalar
// (the one-dimensional fast path) and on a point of R^d. Linear and Sine act
// on the first coordinate; the power functions use the Euclidean distance.

struct Constant {
    double value = 0.0;
    double operator()(double) const noexcept { return value; }
    double operator()(std::span<const double>) const noexcept { return value; }
};

struct Linear {
    double slope = 1.0;
    double offset = 0.0;
    double operator()(double x) const noexcept { return slope * x + offset; }
    double operator()(std::span<const double> x) const noexcept { return slope * x[0] + offset; }
};

namespace detail {
inline double distance(std::span<const double> x, std::span<const double> center) noexcept {
    if (x.size() == 1) {
        return std::abs(x[0] - center[0]);
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - (i < center.size() ? center[i] : 0.0);
        r2 += dx * dx;
    }
    return std::sqrt(r2);
}

inline double power(double r, double gamma) noexcept {
    if (gamma == 0.5) {
        return std::sqrt(r);
    }
    if (gamma == 1.0) {
        return r;
    }
    return std::pow(r, gamma);
}
}  // namespace detail

/// |x - center|^gamma.
struct PowerAbs {
    double gamma = 0.5;
    std::vector<double> center{0.0};
    double operator()(double x) const noexcept { return detail::power(std::abs(x - center[0]), gamma); }
    double operator()(std::span<const double> x) const noexcept {
        return detail::power(detail::distance(x, center), gamma);
    }
};

/// sin(frequency * x + phase).
struct Sine {
    double frequency = 1.0;
    double phase = 0.0;
    double operator()(double x) const noexcept { return std::sin(frequency * x + phase); }
    double operator()(std::span<const double> x) const noexcept {
        return std::sin(frequency * x[0] + phase);
    }
};

/// min(|x - center|^gamma, cap).
struct ClippedPower {
    double gamma = 0.5;
    std::vector<double> center{0.0};
    double cap = 1.0;
    double operator()(double x) const noexcept {
        return std::min(detail::power(std::abs(x - center[0]), gamma), cap);
    }
    double operator()(std::span<const double> x) const noexcept {
        return std::min(detail::power(detail::distance(x, center), gamma), cap);
    }
};

using FunctionDescriptor = std::variant<Constant, Linear, PowerAbs, Sine, ClippedPower>;

/// A catalog function together with its Holder exponent and a certified
/// upper bound on its Holder seminorm. `amplitude` multiplies the values.
class HolderFunction {
public:
    static HolderFunction constant(double value, double gamma = 1.0);
    static HolderFunction linear(double slope, double offset = 0.0);
    static HolderFunction power_abs(double gamma, double center = 0.0);
    static HolderFunction power_abs(double gamma, std::vector<double> center);
    static HolderFunction sine(double frequency, double gamma = 1.0);
    static HolderFunction clipped_power(double gamma, double center, double cap);

    [[nodiscard]] const FunctionDescriptor& descriptor() const noexcept { return descriptor_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double holder_norm() const noexcept { return holder_norm_; }
    [[nodiscard]] double amplitude() const noexcept { return amplitude_; }

    /// lambda * h; the norm scales by |lambda|.
    [[nodiscard]] HolderFunction scaled(double lambda) const;

    /// Same function recentred by `shift` (power kinds) or with its argument
    /// shifted (other kinds): x -> h(x - shift).
    [[nodiscard]] HolderFunction shifted(double shift) const;

    [[nodiscard]] double evaluate(double x) const;
    [[nodiscard]] double evaluate(std::span<const double> x) const;

    [[nodiscard]] std::string describe() const;

    /// Calls `f(fn)` with a callable equal to this function, resolved once so
    /// hot loops are monomorphic.
    template <class F>
    decltype(auto) visit(F&& f) const {
        return std::visit(
            [&](const auto& d) {
                const double a = amplitude_;
                if (a == 1.0) {
                    return f(d);
                }
                return f([&d, a](auto x) { return a * d(x); });
            },
            descriptor_);
    }

private:
    HolderFunction(FunctionDescriptor d, double gamma, double norm)
        : descriptor_(std::move(d)), gamma_(gamma), holder_norm_(norm) {}

    FunctionDescriptor descriptor_;
    double gamma_;
    double holder_norm_;
    double amplitude_ = 1.0;
};

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};

/// max over grid pairs of |h(x) - h(y)| / |x - y|^gamma on `grid_points`
/// equispaced points. Throws Errc::holder_violation when the ratio exceeds
/// the declared norm by more than 1e-9.
double empirical_holder_check(const HolderFunction& h, Interval domain, int grid_points);

}  // namespace funcrate
