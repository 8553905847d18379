#include "doctest.h"

#include <cmath>
#include <set>

#include "funcrate/compensated_sum.hpp"
#include "funcrate/rng.hpp"

using namespace funcrate;

TEST_CASE("cloned stream replays the same draws") {
    RandomStream a({42, 0, 7});
    for (int i = 0; i < 5; ++i) {
        (void)a.normal();
    }
    RandomStream b = a;
    for (int i = 0; i < 100; ++i) {
        CHECK(a.normal() == b.normal());
        CHECK(a.uniform() == b.uniform());
    }
}

TEST_CASE("distinct keys give distinct streams") {
    std::set<std::uint64_t> first_words;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        for (std::uint64_t family = 0; family < 4; ++family) {
            for (std::uint64_t index = 0; index < 64; ++index) {
                RandomStream s({seed, family, index});
                first_words.insert(s.bits());
            }
        }
    }
    CHECK(first_words.size() == 4u * 4u * 64u);
}

TEST_CASE("uniform stays inside the open unit interval") {
    RandomStream s({1, 2, 3});
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("ziggurat normal: mean, variance and kurtosis over 1e6 draws") {
    RandomStream s({2024, 0, 0});
    constexpr int n = 1000000;
    CompensatedSum m1, m2, m4;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    const double mean = m1.value() / n;
    const double second = m2.value() / n;
    const double fourth = m4.value() / n;
    CHECK(std::abs(mean) < 4e-3);
    CHECK(std::abs(second - 1.0) < 1e-2);
    CHECK(std::abs(fourth / (second * second) - 3.0) < 0.05);
}

TEST_CASE("normal tail beyond the ziggurat base layer has the Gaussian mass") {
    // P(|Z| > 3.4426) = 5.7614e-4; over 4e6 draws the count has SD about 48.
    RandomStream s({5, 5, 5});
    constexpr int n = 4000000;
    int beyond = 0;
    for (int i = 0; i < n; ++i) {
        beyond += std::abs(s.normal()) > 3.442619855899 ? 1 : 0;
    }
    const double expected = n * std::erfc(3.442619855899 / std::sqrt(2.0));
    CHECK(std::abs(beyond - expected) < 4.0 * std::sqrt(expected));
}

TEST_CASE("exponential has unit mean") {
    RandomStream s({9, 9, 9});
    constexpr int n = 1000000;
    CompensatedSum sum;
    for (int i = 0; i < n; ++i) {
        sum += s.exponential();
    }
    CHECK(std::abs(sum.value() / n - 1.0) < 4e-3);
}

TEST_CASE("compensated sum recovers cancelled low-order bits") {
    CompensatedSum s;
    s += 1e16;
    for (int i = 0; i < 1000; ++i) {
        s += 1.0;
    }
    s += -1e16;
    CHECK(s.value() == 1000.0);

    CompensatedSum a, b, whole;
    for (int i = 0; i < 1000; ++i) {
        const double v = 1.0 / (i + 1);
        (i < 500 ? a : b) += v;
        whole += v;
    }
    a += b;
    CHECK(a.value() == doctest::Approx(whole.value()).epsilon(1e-15));
}
