#include "funcrate/rng.hpp"

#include <cmath>

namespace funcrate {

Xoshiro256pp::Xoshiro256pp(const StreamKey& key) noexcept {
    // Chain the three key words through SplitMix64 so that nearby keys land
    // on unrelated states.
    std::uint64_t state = key.master_seed;
    state = splitmix64(state) ^ key.family;
    state = splitmix64(state) ^ key.index;
    for (auto& word : s_) {
        word = splitmix64(state);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
        s_[0] = 1;
    }
}

namespace {

// Doornik's ZIGNOR construction with C = 128 layers.
constexpr int kLayers = 128;
constexpr double kTailStart = 3.442619855899;
constexpr double kLayerVolume = 9.91256303526217e-3;

struct ZigguratTables {
    double x[kLayers + 1];
    double ratio[kLayers];

    ZigguratTables() {
        double f = std::exp(-0.5 * kTailStart * kTailStart);
        x[0] = kLayerVolume / f;
        x[1] = kTailStart;
        x[kLayers] = 0.0;
        for (int i = 2; i < kLayers; ++i) {
            x[i] = std::sqrt(-2.0 * std::log(kLayerVolume / x[i - 1] + f));
            f = std::exp(-0.5 * x[i] * x[i]);
        }
        for (int i = 0; i < kLayers; ++i) {
            ratio[i] = x[i + 1] / x[i];
        }
    }
};

const ZigguratTables& tables() {
    static const ZigguratTables t;
    return t;
}

}  // namespace

double RandomStream::normal_tail(bool negative) noexcept {
    double x = 0.0;
    double y = 0.0;
    do {
        x = std::log(uniform()) / kTailStart;
        y = std::log(uniform());
    } while (-2.0 * y < x * x);
    return negative ? x - kTailStart : kTailStart - x;
}

double RandomStream::normal() noexcept {
    const ZigguratTables& t = tables();
    for (;;) {
        const std::uint64_t r = engine_();
        // Top 53 bits give a signed uniform in (-1, 1); the low 7 bits pick the layer.
        const double u = 2.0 * ((static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53) - 1.0;
        const int i = static_cast<int>(r & (kLayers - 1));

        if (std::abs(u) < t.ratio[i]) {
            return u * t.x[i];
        }
        if (i == 0) {
            return normal_tail(u < 0.0);
        }
        const double x = u * t.x[i];
        const double f0 = std::exp(-0.5 * (t.x[i] * t.x[i] - x * x));
        const double f1 = std::exp(-0.5 * (t.x[i + 1] * t.x[i + 1] - x * x));
        if (f1 + uniform() * (f0 - f1) < 1.0) {
            return x;
        }
    }
}

double RandomStream::exponential() noexcept {
    return -std::log(uniform());
}

}  // namespace funcrate
