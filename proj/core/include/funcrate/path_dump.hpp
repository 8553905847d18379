#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "funcrate/simulate.hpp"

namespace funcrate {

// Debug dump of simulated paths. Seven little-endian 64-bit header fields
// (magic, version, d, n_ref, T as IEEE-754 bits, M, master_seed) followed by
// M * (n_ref + 1) * d little-endian doubles, path-major.

inline constexpr std::uint64_t kPathDumpMagic = 0x31534854415052'46ULL;  // "FRPATHS1"
inline constexpr std::uint64_t kPathDumpVersion = 1;

struct PathDumpHeader {
    std::uint64_t dimension = 1;
    std::uint64_t n_ref = 0;
    double T = 0.0;
    std::uint64_t path_count = 0;
    std::uint64_t master_seed = 0;

    friend bool operator==(const PathDumpHeader&, const PathDumpHeader&) = default;
};

struct PathDump {
    PathDumpHeader header;
    std::vector<double> values;
};

/// Writes the first `path_count` paths of `batch`.
void write_path_dump(std::ostream& out, const PathBatch& batch, std::size_t path_count);

/// Throws Errc::io on a bad magic, unknown version or truncated payload.
PathDump read_path_dump(std::istream& in);

}  // namespace funcrate
