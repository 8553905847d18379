#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace funcrate {

enum class Errc {
    domain,              // argument outside the documented range
    unsupported,         // operation not defined for this model
    infinite_moment,     // requested kernel moment diverges
    holder_violation,    // empirical Holder ratio above the declared norm
    non_finite,          // simulated path left the finite doubles
    not_nested,          // coarse grid does not divide the fine grid
    gamma_too_large,     // gamma outside (0, alpha/2]
    undefined_at_boundary,
    degenerate_fit,
    not_certified,
    config,
    io,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library; `code()` tells the failure apart.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool condition, Errc code, const std::string& what) {
    if (!condition) {
        fail(code, what);
    }
}

}  // namespace funcrate
