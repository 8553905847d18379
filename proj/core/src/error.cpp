#include "funcrate/error.hpp"

namespace funcrate {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::domain: return "Domain";
        case Errc::unsupported: return "Unsupported";
        case Errc::infinite_moment: return "InfiniteMoment";
        case Errc::holder_violation: return "HolderViolation";
        case Errc::non_finite: return "NonFinite";
        case Errc::not_nested: return "NotNested";
        case Errc::gamma_too_large: return "GammaTooLarge";
        case Errc::undefined_at_boundary: return "UndefinedAtBoundary";
        case Errc::degenerate_fit: return "DegenerateFit";
        case Errc::not_certified: return "NotCertified";
        case Errc::config: return "ConfigError";
        case Errc::io: return "IoError";
    }
    return "unknown";
}

}  // namespace funcrate
