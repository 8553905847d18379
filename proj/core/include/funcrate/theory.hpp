#pragma once

#include <cstddef>
#include <optional>

#include "funcrate/estimate.hpp"
#include "funcrate/model.hpp"

namespace funcrate {

enum class BoundBranch {
    generic,   // gamma != alpha/2: D C |h|^2 n^{-(1 + 2 gamma/alpha)}
    boundary,  // gamma == alpha/2: D |h|^2 n^{-2} ln n
};

struct TheoryBound {
    double gamma = 0.0;
    double alpha = 0.0;
    double T = 0.0;
    double holder_norm = 0.0;
    double d_constant = 0.0;
    std::optional<double> c_constant;  // absent in the boundary branch
    BoundBranch branch = BoundBranch::generic;
};

struct CGammaAlpha {
    double value = 0.0;
    double first_term = 0.0;   // (1 - 2g/a)^{-1} (2g/a)^{-1}
    double scan_max = 0.0;     // max_{n >= 1} (ln n)^2 / n^{1 - 2g/a}
    double scan_argmax = 1.0;  // integer maximiser (a double so huge maximisers fit)
};

/// The constant C_{gamma,alpha} with its two competing terms.
/// Requires 0 < gamma < alpha/2; Errc::undefined_at_boundary when equal.
CGammaAlpha c_gamma_alpha_terms(double gamma, double alpha);
double c_gamma_alpha(double gamma, double alpha);

/// 8 C_T^2 T^{2 + 2 gamma/alpha} q_moment(cert, gamma).
double d_constant(const DensityBoundCertificate& cert, double T, double gamma);

TheoryBound make_theory_bound(const DensityBoundCertificate& cert, double T, double gamma,
                              double holder_norm);

/// Upper bound on E|I_T(h) - I_{T,n}(h)|^2. Zero at n = 1 in the boundary branch.
double theoretical_bound(const TheoryBound& tb, std::size_t n);

/// -(1 + 2 gamma / alpha).
double theoretical_exponent(double gamma, double alpha) noexcept;

/// Exact E|int_0^T h(X_t) dt - I_{T,n}(h)|^2 for X = sigma W and
/// h(x) = slope x + offset: sigma^2 slope^2 T^3 / (3 n^2).
///
/// On [t_k, t_k + D] the error is slope * int_0^D (W_{t_k+s} - W_{t_k}) ds;
/// these pieces are independent across intervals and each has variance
/// sigma^2 int_0^D int_0^D min(s, u) ds du = sigma^2 D^3 / 3. Summing n of
/// them with D = T/n gives the formula.
double bm_linear_mse_oracle(double T, std::size_t n, double sigma = 1.0, double slope = 1.0);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    std::size_t rows_used = 0;
};

/// Second-smallest n of the summary (the smallest when there is only one).
std::size_t default_fit_n_min(const ErrorSummary& summary);

/// Weighted least squares of log(mse) on log(n) over rows with n >= n_min and
/// mse > 0, weights (mse / std_error)^2 (unit weights if any std_error is 0).
/// Throws Errc::degenerate_fit with fewer than 3 usable rows.
RateFit fit_rate(const ErrorSummary& summary, std::size_t n_min);

}  // namespace funcrate
