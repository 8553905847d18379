#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "funcrate/compensated_sum.hpp"
#include "funcrate/error.hpp"
#include "funcrate/estimate.hpp"
#include "oracles.hpp"

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

}  // namespace

TEST_CASE("riemann_sum examples") {
    const std::vector<double> path{1.0, 3.0, 5.0};
    CHECK(riemann_sum(path, 1.0, 2, HolderFunction::linear(1.0)) == 2.0);
    CHECK(riemann_sum(std::vector<double>{0.0, 4.0, 9.0}, 2.0, 2, HolderFunction::power_abs(0.5)) == 2.0);
    const std::vector<double> any{0.3, -1.7, 2.2, 8.0, 1.0};
    CHECK(riemann_sum(any, 2.0, 4, HolderFunction::constant(0.1)) == 2.0 * 0.1);
    CHECK(riemann_sum(std::vector<double>{5.0, 1.0, 2.0, 3.0}, 1.5, 3, HolderFunction::constant(3.0)) == 4.5);
    CHECK(code_of([&] { (void)riemann_sum(path, 1.0, 3, HolderFunction::linear(1.0)); }) == Errc::domain);

    // Two-dimensional points, Euclidean distance to the centre.
    const std::vector<double> plane{3.0, 4.0, 0.0, 1.0, 9.9, 9.9};
    CHECK(riemann_sum(plane, 1.0, 2, HolderFunction::power_abs(1.0, std::vector<double>{0.0, 0.0}), 2) == 3.0);
}

TEST_CASE("reference_integral examples") {
    const GridSpec g(3.0, 64, {1});
    const std::vector<double> flat(65, 0.25);
    const auto h = HolderFunction::power_abs(0.5, -4.0);
    CHECK(reference_integral(flat, g, h) == doctest::Approx(3.0 * h.evaluate(0.25)).epsilon(1e-15));

    RandomStream s({1, 2, 3});
    const auto path = simulate_path(ProcessModel::stable(1.5, 1.0), g, s);
    CHECK(reference_integral(path, g, h) == riemann_sum(path, 3.0, 64, h));
}

TEST_CASE("Var(reference_integral) of Brownian motion is T^3/3") {
    const GridSpec g(1.0, 2048, {1});
    const PathBatch batch(ProcessModel::brownian(1.0), g, 100000, 17);
    const auto h = HolderFunction::linear(1.0);
    CompensatedSum m1, m2, m4;
    batch.for_each(0, batch.size(), [&](std::size_t, std::span<const double> p) {
        const double v = reference_integral(p, g, h);
        m1 += v;
        m2 += v * v;
        m4 += v * v * v * v;
    });
    const double n = 1e5;
    const double mean = m1.value() / n;
    const double var = m2.value() / n - mean * mean;
    const double se = std::sqrt((m4.value() / n - (m2.value() / n) * (m2.value() / n)) / n);
    CHECK(std::abs(var - 1.0 / 3.0) <= 3.0 * se);
}

TEST_CASE("coupled errors vanish at n_ref and for constants") {
    const GridSpec g(1.0, 256, {1, 4, 64, 256}, 1);
    const PathBatch batch(ProcessModel::stable(1.5, 2.0), g, 20, 8);
    batch.for_each(0, batch.size(), [&](std::size_t, std::span<const double> p) {
        CHECK(coupled_errors(p, g, HolderFunction::power_abs(0.5)).back() == 0.0);
        for (double e : coupled_errors(p, g, HolderFunction::constant(0.7))) {
            CHECK(e == 0.0);
        }
    });
}

TEST_CASE("mse_curve: constant h gives an exactly zero curve") {
    const GridSpec g(1.0, 4096, {2, 8, 64});
    for (const auto& model : {ProcessModel::brownian(1.0), ProcessModel::stable(1.5, 1.0)}) {
        const auto s = mse_curve(model, g, HolderFunction::constant(3.3, 0.5), 200, 1);
        for (const auto& row : s.rows) {
            CHECK(row.mse == 0.0);
            CHECK(row.std_error == 0.0);
        }
    }
}

TEST_CASE("mse_curve: eval_ns = {n_ref} is exactly zero") {
    const GridSpec g(1.0, 128, {128}, 1);
    const auto s = mse_curve(ProcessModel::brownian(1.0), g, HolderFunction::power_abs(0.5), 300, 2);
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].mse == 0.0);
}

TEST_CASE("mse_curve: Brownian linear functional against T^3/(3 n^2)") {
    const GridSpec g(1.0, 1 << 13, {8, 16});
    const auto s = mse_curve(ProcessModel::brownian(1.0), g, HolderFunction::linear(1.0), 100000, 2024,
                             {.workers = 1});
    REQUIRE(s.rows.size() == 2);
    for (const auto& row : s.rows) {
        const double exact = 1.0 / (3.0 * static_cast<double>(row.n * row.n));
        CHECK(std::abs(row.mse - exact) <= std::max(3.0 * row.std_error, 0.05 * exact));
        CHECK(row.path_count == 100000);
    }
    CHECK(s.certified);
    CHECK(s.exact_law);
    CHECK(s.n_ref == 8192);
    CHECK(s.alpha == 2.0);
    CHECK(s.gamma == 1.0);
}

TEST_CASE("mse_curve preconditions") {
    const GridSpec g(1.0, 1024, {4, 8});
    CHECK(code_of([&] {
        (void)mse_curve(ProcessModel::stable(1.5, 1.0), g, HolderFunction::power_abs(0.9), 100, 1);
    }) == Errc::gamma_too_large);
    CHECK(code_of([&] {
        (void)mse_curve(ProcessModel::stable(1.5, 1.0), g, HolderFunction::power_abs(0.75), 100, 1);
    }) == Errc::gamma_too_large);
    CHECK(code_of([&] { (void)mse_curve(ProcessModel::brownian(1.0), g, HolderFunction::linear(1.0), 99, 1); }) ==
          Errc::domain);
    CHECK_NOTHROW(check_gamma_admissible(1.0, 2.0));
    CHECK_NOTHROW(check_gamma_admissible(0.7499, 1.5));
    CHECK(code_of([] { check_gamma_admissible(0.0, 1.5); }) == Errc::gamma_too_large);
}

TEST_CASE("property: mse scales by lambda^2") {
    const GridSpec g(1.0, 2048, {4, 8, 16, 32});
    const auto model = ProcessModel::stable(1.5, 1.0);
    const auto h = HolderFunction::power_abs(0.5, 0.3);
    const auto base = mse_curve(model, g, h, 500, 9);
    for (double lambda : {2.0, 0.5, -4.0}) {
        const auto scaled = mse_curve(model, g, h.scaled(lambda), 500, 9);
        for (std::size_t j = 0; j < base.rows.size(); ++j) {
            CHECK(scaled.rows[j].mse == lambda * lambda * base.rows[j].mse);
        }
    }
    const auto tripled = mse_curve(model, g, h.scaled(3.0), 500, 9);
    for (std::size_t j = 0; j < base.rows.size(); ++j) {
        CHECK(tripled.rows[j].mse == doctest::Approx(9.0 * base.rows[j].mse).epsilon(1e-12));
    }

    // Path by path.
    const PathBatch batch(model, g, 50, 10);
    batch.for_each(0, batch.size(), [&](std::size_t, std::span<const double> p) {
        const auto e1 = coupled_errors(p, g, h);
        const auto e3 = coupled_errors(p, g, h.scaled(3.0));
        for (std::size_t j = 0; j < e1.size(); ++j) {
            CHECK(e3[j] == doctest::Approx(9.0 * e1[j]).epsilon(1e-12));
        }
    });
}

TEST_CASE("property: joint translation of start and centre leaves errors unchanged") {
    const GridSpec g(1.0, 1024, {2, 4, 8, 16});
    const PathBatch base(ProcessModel::brownian(1.0, {0.0}), g, 40, 31);
    const PathBatch moved(ProcessModel::brownian(1.0, {2.5}), g, 40, 31);
    const auto h = HolderFunction::power_abs(0.5, 0.0);
    const auto h_moved = h.shifted(2.5);
    for (std::size_t i = 0; i < 40; ++i) {
        const auto e0 = coupled_errors(base.path(i), g, h);
        const auto e1 = coupled_errors(moved.path(i), g, h_moved);
        for (std::size_t j = 0; j < e0.size(); ++j) {
            CHECK(e1[j] == doctest::Approx(e0[j]).epsilon(1e-6).scale(1e-12));
        }
    }
}

TEST_CASE("property: mse_curve is invariant to the worker count") {
    const GridSpec g(1.0, 1024, {2, 4, 8, 16});
    const auto model = ProcessModel::stable(1.5, 1.0);
    const auto h = HolderFunction::power_abs(0.5);
    const auto serial = mse_curve(model, g, h, 1000, 4, {.workers = 1, .block_size = 64});
    for (unsigned w : {2u, 3u, 8u}) {
        const auto parallel = mse_curve(model, g, h, 1000, 4, {.workers = w, .block_size = 64});
        std::ostringstream a, b;
        write_summary_csv(a, serial);
        write_summary_csv(b, parallel);
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("summary CSV layout") {
    ErrorSummary s;
    s.certified = true;
    s.rows.push_back({8, 0.1, 0.01, 100, 0.5});
    s.rows.push_back({16, 0.025, 0.0025, 100, std::nullopt});
    std::ostringstream out;
    write_summary_csv(out, s);
    CHECK(out.str() ==
          "n,mse,std_error,M,bound,certified\n"
          "8,0.10000000000000001,0.01,100,0.5,true\n"
          "16,0.025000000000000001,0.0025000000000000001,100,nan,true\n");
}

TEST_CASE("moment_diagnostic examples") {
    const std::vector<double> deltas{0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625};
    const auto bm = ProcessModel::brownian(1.0);
    const auto cert = certificate_for(bm, 1.0).value();

    const auto half = moment_diagnostic(bm, cert, 0.5, deltas, 100000, 1);
    const double abs_mean = oracle::normal_abs_moment(1.0);
    for (const auto& row : half.rows) {
        CHECK(std::abs(row.ratio - abs_mean) <= 4.0 * row.std_error);
    }
    CHECK(half.within_bound);
    CHECK(half.bound == doctest::Approx(cert.c_T() * q_moment(cert, 0.5)));

    const auto one = moment_diagnostic(bm, cert, 1.0, deltas, 100000, 2);
    for (const auto& row : one.rows) {
        CHECK(std::abs(row.ratio - 1.0) <= 4.0 * row.std_error);
    }
    CHECK(one.within_bound);

    const auto stable = ProcessModel::stable(1.5, 1.0);
    const auto stable_cert = certificate_for(stable, 1.0).value();
    const auto st = moment_diagnostic(stable, stable_cert, 0.5, deltas, 100000, 3);
    CHECK(st.constant);
    CHECK(st.within_bound);
    CHECK(code_of([&] { (void)moment_diagnostic(stable, stable_cert, 0.75, deltas, 100, 3); }) ==
          Errc::infinite_moment);
    const std::vector<double> too_long{2.0};
    CHECK(code_of([&] { (void)moment_diagnostic(bm, cert, 0.5, too_long, 100, 3); }) == Errc::domain);
}
