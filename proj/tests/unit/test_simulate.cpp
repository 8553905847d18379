#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "funcrate/compensated_sum.hpp"
#include "funcrate/error.hpp"
#include "funcrate/parallel.hpp"
#include "funcrate/path_dump.hpp"
#include "funcrate/simulate.hpp"

using namespace funcrate;

namespace {

template <class F>
Errc code_of(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io;
}

double quantile(std::vector<double> v, double p) {
    const auto k = static_cast<std::size_t>(p * static_cast<double>(v.size()));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_NOTHROW(GridSpec(1.0, 1 << 13, {8, 16, 32, 64, 128}));
    CHECK(code_of([] { GridSpec(1.0, 1000, {8}); }) == Errc::domain);
    CHECK(code_of([] { GridSpec(0.0, 1024, {8}); }) == Errc::domain);
    CHECK(code_of([] { GridSpec(1.0, 1024, {16, 8}); }) == Errc::domain);
    CHECK(code_of([] { GridSpec(1.0, 1024, {32}); }) == Errc::domain);  // 32 * 64 > 1024
    CHECK(code_of([] { GridSpec(1.0, 1 << 13, {3}); }) == Errc::not_nested);
    const GridSpec g(2.0, 1024, {4, 16});
    CHECK(g.time(512) == 1.0);
    CHECK(g.stride(16) == 64);
    CHECK(g.dt() == 2.0 / 1024);
}

TEST_CASE("subsample examples") {
    const GridSpec g(1.0, 4, {1, 2, 4}, 1);
    const std::vector<double> path{1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(subsample(path, g, 2) == std::vector<double>{1.0, 3.0, 5.0});
    CHECK(subsample(path, g, 4) == path);
    CHECK(subsample(path, g, 1) == std::vector<double>{1.0, 5.0});
    const GridSpec g8(1.0, 8, {1}, 1);
    CHECK(code_of([&] { (void)subsample(std::vector<double>(9, 0.0), g8, 3); }) == Errc::not_nested);
}

TEST_CASE("property: nested subsampling") {
    const GridSpec g(1.0, 1024, {1, 2, 4, 8, 16}, 1);
    RandomStream s({1, 0, 0});
    const auto path = simulate_path(ProcessModel::brownian(1.0), g, s);
    for (std::size_t n2 : {1024u, 256u, 64u, 16u}) {
        const GridSpec coarse(1.0, n2, {1}, 1);
        const auto p2 = subsample(path, g, n2);
        for (std::size_t n1 = 1; n1 <= n2; n1 *= 2) {
            CHECK(subsample(p2, coarse, n1) == subsample(path, g, n1));
        }
    }
    const ProcessModel bm2 = ProcessModel::brownian(1.0, {0.5, -0.5});
    RandomStream s2({1, 0, 1});
    const auto path2 = simulate_path(bm2, g, s2);
    const auto sub = subsample(path2, g, 4, 2);
    REQUIRE(sub.size() == 10);
    CHECK(sub[2] == path2[256 * 2]);
    CHECK(sub[3] == path2[256 * 2 + 1]);
}

TEST_CASE("Brownian increments: mean, variance and kurtosis over 1e6 draws") {
    const auto bm = ProcessModel::brownian(1.0);
    RandomStream s({77, 3, 0});
    constexpr int n = 1000000;
    CompensatedSum m1, m2, m4;
    for (int i = 0; i < n; ++i) {
        const double z = sample_increment(bm, 1.0, s);
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    const double mean = m1.value() / n;
    const double var = m2.value() / n - mean * mean;
    CHECK(std::abs(mean) < 4e-3);
    CHECK(std::abs(var - 1.0) < 1e-2);
    CHECK(std::abs((m4.value() / n) / ((m2.value() / n) * (m2.value() / n)) - 3.0) < 0.05);

    RandomStream a({5, 1, 2});
    RandomStream b = a;
    CHECK(sample_increment(bm, 0.3, a) == sample_increment(bm, 0.3, b));
    CHECK(code_of([&] { (void)sample_increment(bm, 0.0, a); }) == Errc::domain);
}

TEST_CASE("Brownian increments in R^3 have covariance sigma^2 dt I") {
    const auto bm = ProcessModel::brownian(2.0, {0.0, 0.0, 0.0});
    RandomStream s({8, 8, 8});
    constexpr int n = 200000;
    CompensatedSum xx, yy, xy;
    std::vector<double> v(3);
    for (int i = 0; i < n; ++i) {
        sample_increment(bm, 0.5, s, v);
        xx += v[0] * v[0];
        yy += v[1] * v[1];
        xy += v[0] * v[1];
    }
    // Var = 2; SE of the sample second moment is 2 * sqrt(2 / n) ~ 6.3e-3.
    CHECK(std::abs(xx.value() / n - 2.0) < 0.03);
    CHECK(std::abs(yy.value() / n - 2.0) < 0.03);
    CHECK(std::abs(xy.value() / n) < 0.03);
}

TEST_CASE("Cauchy increments have median zero") {
    const auto cauchy = ProcessModel::stable(1.0, 1.0);
    RandomStream s({11, 3, 0});
    std::vector<double> draws(1000000);
    for (auto& d : draws) {
        d = sample_increment(cauchy, 1.0, s);
    }
    CHECK(std::abs(quantile(draws, 0.5)) < 5e-3);
    // Upper quartile of the standard Cauchy law is 1.
    CHECK(std::abs(quantile(draws, 0.75) - 1.0) < 1e-2);
}

TEST_CASE("CMS sampler matches the stable law's quartile") {
    // P(|S| < 1) = 0.512684 for the standard symmetric 1.5-stable law
    // (independent CDF evaluation); the SE over 4e5 draws is 8e-4.
    StableSampler sampler(1.5);
    RandomStream s({12, 3, 0});
    std::vector<double> draws(400000);
    for (auto& d : draws) {
        d = sampler(s);
    }
    std::size_t below = 0;
    for (double d : draws) {
        below += std::abs(d) < 1.0 ? 1 : 0;
    }
    const double p = static_cast<double>(below) / static_cast<double>(draws.size());
    CHECK(std::abs(p - 0.512684) < 4e-3);
}

TEST_CASE("property: stable self-similarity of the 0.75-quantile") {
    const auto model = ProcessModel::stable(1.5, 1.0);
    std::vector<double> q;
    for (int k = 0; k <= 6; ++k) {
        const double dt = std::ldexp(1.0, -k);
        RandomStream s({21, 4, static_cast<std::uint64_t>(k)});
        std::vector<double> draws(200000);
        for (auto& d : draws) {
            d = sample_increment(model, dt, s);
        }
        q.push_back(quantile(draws, 0.75) / std::pow(dt, 1.0 / 1.5));
    }
    for (double v : q) {
        CHECK(std::abs(v / q.front() - 1.0) < 0.02);
    }
}

TEST_CASE("simulate_path examples") {
    const GridSpec g(1.0, 256, {4}, 1);
    const auto frozen = ProcessModel::euler([](double) { return 0.0; }, [](double) { return 0.0; }, 1.25);
    RandomStream s({1, 0, 0});
    const auto path = simulate_path(frozen, g, s);
    REQUIRE(path.size() == 257);
    CHECK(std::all_of(path.begin(), path.end(), [](double x) { return x == 1.25; }));

    const PathBatch batch(ProcessModel::stable(1.5, 1.0, 0.5), g, 10, 99);
    CHECK(batch.path(3) == batch.path(3));
    CHECK(batch.path(3) != batch.path(4));
    CHECK(batch.path(7).front() == 0.5);
    const PathBatch other_seed(ProcessModel::stable(1.5, 1.0, 0.5), g, 10, 100);
    CHECK(batch.path(3) != other_seed.path(3));
}

TEST_CASE("Euler scheme uses drift and diffusion") {
    // Pure drift: x_{k+1} = x_k + dt, so X_T = x0 + T.
    const GridSpec g(2.0, 64, {1}, 1);
    const auto drift = ProcessModel::euler([](double) { return 1.0; }, [](double) { return 0.0; }, 0.0);
    RandomStream s({0, 0, 0});
    CHECK(simulate_path(drift, g, s).back() == doctest::Approx(2.0).epsilon(1e-14));

    // Unit diffusion reproduces Brownian motion in law: Var(X_T) = T.
    const auto euler_bm = ProcessModel::euler([](double) { return 0.0; }, [](double) { return 1.0; });
    const PathBatch batch(euler_bm, GridSpec(1.0, 64, {1}, 1), 40000, 3);
    CompensatedSum m2;
    batch.for_each(0, batch.size(), [&](std::size_t, std::span<const double> p) { m2 += p.back() * p.back(); });
    CHECK(std::abs(m2.value() / 40000 - 1.0) < 4.0 * std::sqrt(2.0 / 40000));
    CHECK_FALSE(batch.exact_law());
}

TEST_CASE("non-finite paths abort with the seed in the message") {
    const auto blowup = ProcessModel::euler([](double x) { return 1e300 * x; }, [](double) { return 1.0; }, 1.0);
    const PathBatch batch(blowup, GridSpec(1.0, 64, {1}, 1), 4, 1234);
    try {
        (void)batch.path(2);
        FAIL("expected a non-finite error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::non_finite);
        const std::string what = e.what();
        CHECK(what.find("master_seed=1234") != std::string::npos);
        CHECK(what.find("path=2") != std::string::npos);
    }
}

TEST_CASE("Brownian Var(X_T) over 1e5 paths") {
    const PathBatch batch(ProcessModel::brownian(1.0), GridSpec(1.0, 64, {1}, 1), 100000, 2024);
    CompensatedSum m1, m2, m4;
    batch.for_each(0, batch.size(), [&](std::size_t, std::span<const double> p) {
        const double x = p.back();
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    });
    const double n = 1e5;
    const double mean = m1.value() / n;
    const double var = m2.value() / n - mean * mean;
    const double se = std::sqrt((m4.value() / n - (m2.value() / n) * (m2.value() / n)) / n);
    CHECK(std::abs(var - 1.0) <= 3.0 * se);
}

TEST_CASE("property: paths do not depend on the worker count") {
    const PathBatch batch(ProcessModel::stable(1.5, 1.0), GridSpec(1.0, 128, {2}), 64, 5);
    auto generate_all = [&](unsigned workers) {
        std::vector<std::vector<double>> out(batch.size());
        run_blocks(batch.size() / 4, workers, [&](std::size_t block, unsigned) {
            for (std::size_t i = 4 * block; i < 4 * block + 4; ++i) {
                out[i] = batch.path(i);
            }
        });
        return out;
    };
    const auto serial = generate_all(1);
    for (unsigned w : {2u, 3u, 8u}) {
        CHECK(generate_all(w) == serial);
    }
}

TEST_CASE("path dump round trip") {
    const PathBatch batch(ProcessModel::brownian(1.0, {0.0, 1.0}), GridSpec(0.5, 16, {1}, 1), 5, 42);
    std::stringstream buffer;
    write_path_dump(buffer, batch, 3);
    const std::string bytes = buffer.str();
    REQUIRE(bytes.size() == 7 * 8 + 3 * 17 * 2 * 8);
    // Little-endian magic spells the format tag.
    CHECK(bytes.substr(0, 8) == "FRPATHS1");

    const auto dump = read_path_dump(buffer);
    CHECK(dump.header == PathDumpHeader{2, 16, 0.5, 3, 42});
    const auto p1 = batch.path(1);
    CHECK(std::equal(p1.begin(), p1.end(), dump.values.begin() + 34));

    std::stringstream truncated(bytes.substr(0, bytes.size() - 8));
    CHECK(code_of([&] { (void)read_path_dump(truncated); }) == Errc::io);
    std::stringstream bad("not a dump at all, definitely not one");
    CHECK(code_of([&] { (void)read_path_dump(bad); }) == Errc::io);
}
