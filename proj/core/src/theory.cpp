#include "funcrate/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "funcrate/error.hpp"

namespace funcrate {

namespace {

// Largest maximiser handled by exhaustive integer scanning.
constexpr double kMaxExhaustiveScan = 1e7;

double log_ratio_term(double n, double exponent) {
    const double l = std::log(n);
    return l * l / std::pow(n, exponent);
}

}  // namespace

CGammaAlpha c_gamma_alpha_terms(double gamma, double alpha) {
    require(alpha > 0.0 && alpha <= 2.0, Errc::domain, "alpha must lie in (0, 2]");
    require(gamma > 0.0, Errc::domain, "gamma must be > 0");
    if (gamma == 0.5 * alpha) {
        fail(Errc::undefined_at_boundary, "C_{gamma,alpha} is undefined at gamma = alpha/2");
    }
    require(gamma < 0.5 * alpha, Errc::domain, "C_{gamma,alpha} needs gamma < alpha/2");

    const double rho = 2.0 * gamma / alpha;
    const double exponent = 1.0 - rho;
    CGammaAlpha c;
    c.first_term = 1.0 / (exponent * rho);

    // f(n) = (ln n)^2 n^{-e} has f'(n) = ln(n) n^{-e-1} (2 - e ln n), so f rises
    // up to n* = exp(2/e) and falls afterwards; no integer past n* can win.
    const double log_peak = 2.0 / exponent;
    const double peak = std::exp(log_peak);
    if (10.0 * std::ceil(peak) <= kMaxExhaustiveScan) {
        const auto limit = static_cast<std::uint64_t>(10.0 * std::ceil(peak));
        for (std::uint64_t n = 1; n <= limit; ++n) {
            const double v = log_ratio_term(static_cast<double>(n), exponent);
            if (v > c.scan_max) {
                c.scan_max = v;
                c.scan_argmax = static_cast<double>(n);
            }
        }
    } else if (std::isfinite(peak) && peak < 0x1p53) {
        // Unimodal: the integer maximum sits at floor(n*) or ceil(n*).
        const double lo = std::floor(peak);
        const double hi = std::ceil(peak);
        const double f_lo = log_ratio_term(lo, exponent);
        const double f_hi = log_ratio_term(hi, exponent);
        c.scan_max = std::max(f_lo, f_hi);
        c.scan_argmax = f_lo >= f_hi ? lo : hi;
    } else {
        // Integers near n* are not representable; f is flat there, so take
        // f(n*) = (2/e)^2 e^{-2} in log space.
        c.scan_max = std::exp(2.0 * std::log(log_peak) - 2.0);
        c.scan_argmax = peak;
    }
    c.value = std::max(c.first_term, c.scan_max);
    return c;
}

double c_gamma_alpha(double gamma, double alpha) {
    return c_gamma_alpha_terms(gamma, alpha).value;
}

double d_constant(const DensityBoundCertificate& cert, double T, double gamma) {
    require(T > 0.0 && T <= cert.horizon(), Errc::domain, "T must lie in (0, certificate horizon]");
    const double moment = q_moment(cert, gamma);
    return 8.0 * cert.c_T() * cert.c_T() * std::pow(T, 2.0 + 2.0 * gamma / cert.alpha()) * moment;
}

TheoryBound make_theory_bound(const DensityBoundCertificate& cert, double T, double gamma,
                              double holder_norm) {
    require(gamma > 0.0 && gamma <= 0.5 * cert.alpha(), Errc::gamma_too_large,
            "the bound needs gamma in (0, alpha/2]");
    require(holder_norm >= 0.0, Errc::domain, "holder norm must be >= 0");
    TheoryBound tb;
    tb.gamma = gamma;
    tb.alpha = cert.alpha();
    tb.T = T;
    tb.holder_norm = holder_norm;
    tb.d_constant = d_constant(cert, T, gamma);
    if (gamma == 0.5 * cert.alpha()) {
        tb.branch = BoundBranch::boundary;
    } else {
        tb.branch = BoundBranch::generic;
        tb.c_constant = c_gamma_alpha(gamma, cert.alpha());
    }
    return tb;
}

double theoretical_bound(const TheoryBound& tb, std::size_t n) {
    require(n >= 1, Errc::domain, "bound needs n >= 1");
    const double nd = static_cast<double>(n);
    const double norm2 = tb.holder_norm * tb.holder_norm;
    if (tb.branch == BoundBranch::boundary) {
        return tb.d_constant * norm2 * std::log(nd) / (nd * nd);
    }
    return tb.d_constant * tb.c_constant.value() * norm2 * std::pow(nd, theoretical_exponent(tb.gamma, tb.alpha));
}

double theoretical_exponent(double gamma, double alpha) noexcept {
    return -(1.0 + 2.0 * gamma / alpha);
}

double bm_linear_mse_oracle(double T, std::size_t n, double sigma, double slope) {
    require(n >= 1, Errc::domain, "oracle needs n >= 1");
    require(T > 0.0, Errc::domain, "oracle needs T > 0");
    const double nd = static_cast<double>(n);
    return sigma * sigma * slope * slope * T * T * T / (3.0 * nd * nd);
}

std::size_t default_fit_n_min(const ErrorSummary& summary) {
    require(!summary.rows.empty(), Errc::degenerate_fit, "empty error summary");
    return summary.rows.size() >= 2 ? summary.rows[1].n : summary.rows[0].n;
}

RateFit fit_rate(const ErrorSummary& summary, std::size_t n_min) {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;
    bool unit_weights = false;
    for (const ErrorRow& row : summary.rows) {
        if (row.n < n_min || !(row.mse > 0.0) || !std::isfinite(row.mse)) {
            continue;
        }
        x.push_back(std::log(static_cast<double>(row.n)));
        y.push_back(std::log(row.mse));
        if (row.std_error > 0.0) {
            const double rel = row.std_error / row.mse;
            w.push_back(1.0 / (rel * rel));
        } else {
            unit_weights = true;
            w.push_back(1.0);
        }
    }
    if (x.size() < 3) {
        fail(Errc::degenerate_fit, "rate fit needs at least 3 rows with n >= " + std::to_string(n_min) +
                                       " and mse > 0 (degenerate: zero error curve?)");
    }
    if (unit_weights) {
        std::fill(w.begin(), w.end(), 1.0);
    }

    double sw = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xbar = sx / sw;
    const double ybar = sy / sw;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
        syy += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    require(sxx > 0.0, Errc::degenerate_fit, "rate fit needs at least two distinct n");

    RateFit fit;
    fit.rows_used = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += w[i] * r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    const double dof = static_cast<double>(x.size() - 2);
    if (unit_weights) {
        fit.slope_stderr = std::sqrt(ss_res / dof / sxx);
    } else {
        // Known-variance weights, inflated when the residuals say the
        // straight line does not fit within the stated errors.
        fit.slope_stderr = std::sqrt(std::max(1.0, ss_res / dof) / sxx);
    }
    return fit;
}

}  // namespace funcrate
