#include "funcrate/path_dump.hpp"

#include <bit>
#include <istream>
#include <ostream>

#include "funcrate/error.hpp"

namespace funcrate {
namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    require(in.gcount() == 8, Errc::io, "truncated path dump");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return v;
}

}  // namespace

void write_path_dump(std::ostream& out, const PathBatch& batch, std::size_t path_count) {
    require(path_count <= batch.size(), Errc::domain, "path dump asks for more paths than the batch has");
    put_u64(out, kPathDumpMagic);
    put_u64(out, kPathDumpVersion);
    put_u64(out, batch.model().dimension());
    put_u64(out, batch.grid().n_ref());
    put_u64(out, std::bit_cast<std::uint64_t>(batch.grid().T()));
    put_u64(out, path_count);
    put_u64(out, batch.master_seed());
    batch.for_each(0, path_count, [&](std::size_t, std::span<const double> path) {
        for (double v : path) {
            put_u64(out, std::bit_cast<std::uint64_t>(v));
        }
    });
    require(static_cast<bool>(out), Errc::io, "failed to write path dump");
}

PathDump read_path_dump(std::istream& in) {
    require(get_u64(in) == kPathDumpMagic, Errc::io, "not a path dump (bad magic)");
    const std::uint64_t version = get_u64(in);
    require(version == kPathDumpVersion, Errc::io, "unsupported path dump version " + std::to_string(version));
    PathDump dump;
    dump.header.dimension = get_u64(in);
    dump.header.n_ref = get_u64(in);
    dump.header.T = std::bit_cast<double>(get_u64(in));
    dump.header.path_count = get_u64(in);
    dump.header.master_seed = get_u64(in);
    const std::uint64_t count = dump.header.path_count * (dump.header.n_ref + 1) * dump.header.dimension;
    dump.values.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        dump.values.push_back(std::bit_cast<double>(get_u64(in)));
    }
    return dump;
}

}  // namespace funcrate
