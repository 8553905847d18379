#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace funcrate {

/// SplitMix64 finalizer; used to derive well-separated generator states.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += UINT64_C(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
}

/// Identifies one independent substream: (master seed, stream family, index).
/// Paths use family 0 and the path index; diagnostics use other families.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t family = 0;
    std::uint64_t index = 0;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// xoshiro256++ seeded from a StreamKey. Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(const StreamKey& key) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

/// Random variates drawn from one substream. Copying a stream clones its
/// state, so a copy replays the same draws.
class RandomStream {
public:
    explicit RandomStream(const StreamKey& key) noexcept : key_(key), engine_(key) {}

    [[nodiscard]] const StreamKey& key() const noexcept { return key_; }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via a 128-layer ziggurat.
    double normal() noexcept;

    /// Unit-mean exponential.
    double exponential() noexcept;

    std::uint64_t bits() noexcept { return engine_(); }

    friend bool operator==(const RandomStream&, const RandomStream&) = default;

private:
    double normal_tail(bool negative) noexcept;

    StreamKey key_;
    Xoshiro256pp engine_;
};

}  // namespace funcrate
