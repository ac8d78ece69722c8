#include "twomode/depth.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "twomode/bounds.hpp"

namespace {

// Shared table covering the dense half-integer range and one sparse decade.
const twomode::BoundTable& shared_table() {
    static const twomode::BoundTable table = [] {
        twomode::TableSettings settings;
        settings.two_s_max = 600;
        settings.dense_two_s_max = 90;
        settings.cs_per_decade = 48;
        settings.zeta_per_decade = 16;
        settings.with_zeta = true;
        return twomode::build_bound_table(settings);
    }();
    return table;
}

const twomode::BoundTable& no_zeta_table() {
    static const twomode::BoundTable table = [] {
        twomode::TableSettings settings;
        settings.two_s_max = 20;
        settings.dense_two_s_max = 20;
        settings.with_zeta = false;
        return twomode::build_bound_table(settings);
    }();
    return table;
}

double node_c_tilde(std::int64_t two_s) {
    for (const auto& e : shared_table().entries) {
        if (std::llround(e.two_s) == two_s) return e.c_tilde;
    }
    FAIL("missing node ", two_s);
    return 0.0;
}

double node_zeta2(std::int64_t two_s) {
    for (const auto& e : shared_table().entries) {
        if (std::llround(e.two_s) == two_s && e.has_zeta2) return e.zeta2;
    }
    FAIL("missing zeta node ", two_s);
    return 0.0;
}

}  // namespace

TEST_CASE("gates reject unqualified inputs") {
    const auto& table = shared_table();

    auto ent = twomode::infer_depth_entanglement(1.2, 1.0, table);
    CHECK_FALSE(ent.certified);
    CHECK(ent.n_lower_bound == 0);
    CHECK(ent.s0 == 0.0);
    CHECK(ent.e_hz == doctest::Approx(1.2));
    CHECK(ent.r == doctest::Approx(1.0));

    CHECK_FALSE(twomode::infer_depth_entanglement(0.5, 0.5, table).certified);

    // Steering needs both e_hz < 1/2 and e_hz/r < 1/2.
    CHECK_FALSE(twomode::infer_depth_steering(0.6, 1.0, table).certified);
    CHECK_FALSE(twomode::infer_depth_steering(0.4, 0.7, table).certified);

    CHECK_FALSE(twomode::infer_depth_pqs(0.55, 1.0, table).certified);
    CHECK_FALSE(twomode::infer_depth_pqs(0.5, 1.0, table).certified);

    CHECK_THROWS_AS(twomode::infer_depth_entanglement(0.3, 0.0, table),
                    std::invalid_argument);
    CHECK_THROWS_AS(twomode::infer_depth_steering(0.3, -1.0, table),
                    std::invalid_argument);
    CHECK_THROWS_AS(twomode::infer_depth_pqs(0.3, 0.0, table),
                    std::invalid_argument);
}

TEST_CASE("entanglement bracket below one certifies a single particle") {
    auto res = twomode::infer_depth_entanglement(0.7, 1.0, shared_table());
    CHECK(res.certified);
    CHECK(res.s0 == doctest::Approx(0.5));
    CHECK(res.n_lower_bound == 1);
    CHECK(res.kind == twomode::DepthKind::entanglement);
    CHECK(res.margin == doctest::Approx(0.3));

    // Just under the gate edge still counts.
    auto edge = twomode::infer_depth_entanglement(0.999, 1.0, shared_table());
    CHECK(edge.certified);
    CHECK(edge.n_lower_bound == 1);
}

TEST_CASE("steering bracket between the first two bounds") {
    // c_tilde(1/2) = 1/2 and c_tilde(1) = 7/16, so 0.45 pins s0 = 1/2.
    auto res = twomode::infer_depth_steering(0.45, 1.0, shared_table());
    CHECK(res.certified);
    CHECK(res.s0 == doctest::Approx(0.5));
    CHECK(res.n_lower_bound == 1);
    CHECK(res.kind == twomode::DepthKind::steering);
    CHECK(res.margin == doctest::Approx(0.05).epsilon(1e-6));

    auto deeper = twomode::infer_depth_steering(0.43, 1.0, shared_table());
    CHECK(deeper.n_lower_bound == 2);
    CHECK(deeper.margin == doctest::Approx(0.4375 - 0.43).epsilon(1e-6));
}

TEST_CASE("ratios straddling a node resolve to neighboring depths") {
    const double c10 = node_c_tilde(10);
    const double c9 = node_c_tilde(9);
    REQUIRE(c9 > c10);

    auto just_below = twomode::infer_depth_steering(c10 * (1.0 - 1e-6), 1.0,
                                                    shared_table());
    CHECK(just_below.certified);
    CHECK(just_below.n_lower_bound == 10);

    auto between = twomode::infer_depth_steering(0.5 * (c9 + c10), 1.0,
                                                 shared_table());
    CHECK(between.certified);
    CHECK(between.n_lower_bound == 9);
}

TEST_CASE("depth grows monotonically as the ratio shrinks") {
    const auto& table = shared_table();
    std::int64_t prev_ent = 0;
    std::int64_t prev_steer = 0;
    std::int64_t prev_pqs = 0;
    for (double ratio = 0.49; ratio > 0.08; ratio *= 0.97) {
        auto ent = twomode::infer_depth_entanglement(ratio, 1.0, table);
        auto steer = twomode::infer_depth_steering(ratio, 1.0, table);
        auto pqs = twomode::infer_depth_pqs(ratio, 1.0, table);
        REQUIRE(ent.certified);
        REQUIRE(steer.certified);
        REQUIRE(pqs.certified);
        CHECK(ent.n_lower_bound >= prev_ent);
        CHECK(steer.n_lower_bound >= prev_steer);
        CHECK(pqs.n_lower_bound >= prev_pqs);
        // Same ratio, same column: the two collective gates agree here.
        CHECK(ent.n_lower_bound == steer.n_lower_bound);
        prev_ent = ent.n_lower_bound;
        prev_steer = steer.n_lower_bound;
        prev_pqs = pqs.n_lower_bound;
    }
    CHECK(prev_steer > 20);
}

TEST_CASE("interpolated region rounds the certified size down") {
    const auto& table = shared_table();
    // 2s = 150 lies between sparse nodes; feeding its own interpolated value
    // back as the ratio cannot certify 150 (the bound is not strictly above).
    const double ratio = twomode::interpolate_c_tilde(table, 75.0);
    auto res = twomode::infer_depth_steering(ratio, 1.0, table);
    REQUIRE(res.certified);
    CHECK(res.n_lower_bound < 150);
    CHECK(res.n_lower_bound >= 140);
    CHECK(twomode::interpolate_c_tilde(table, res.s0) > ratio);
}

TEST_CASE("certified results satisfy the defining inequality") {
    const auto& table = shared_table();
    for (double ratio : {0.48, 0.31, 0.22, 0.17, 0.12}) {
        for (int kind = 0; kind < 3; ++kind) {
            twomode::DepthResult res;
            if (kind == 0) {
                res = twomode::infer_depth_entanglement(ratio, 1.0, table);
            } else if (kind == 1) {
                res = twomode::infer_depth_steering(ratio, 1.0, table);
            } else {
                res = twomode::infer_depth_pqs(ratio, 1.0, table);
            }
            REQUIRE(res.certified);
            CHECK(res.margin > 0.0);
            CHECK(res.n_lower_bound == std::llround(2.0 * res.s0));
            CHECK(std::nearbyint(2.0 * res.s0) == doctest::Approx(2.0 * res.s0));
            const double bound =
                (kind == 2) ? twomode::interpolate_zeta2(table, res.s0)
                            : twomode::interpolate_c_tilde(table, res.s0);
            CHECK(bound > ratio);
            CHECK(res.margin == doctest::Approx(bound - ratio).epsilon(1e-12));
        }
    }
}

TEST_CASE("planar certificates consult the zeta column") {
    const double z2 = node_zeta2(2);
    const double z1 = node_zeta2(1);
    REQUIRE(z1 == doctest::Approx(0.5).epsilon(1e-8));
    REQUIRE(z2 < z1);

    auto shallow = twomode::infer_depth_pqs(0.5 * (z1 + z2), 1.0, shared_table());
    CHECK(shallow.certified);
    CHECK(shallow.n_lower_bound == 1);
    CHECK(shallow.kind == twomode::DepthKind::steering_pqs);

    auto deeper = twomode::infer_depth_pqs(z2 * (1.0 - 1e-6), 1.0, shared_table());
    CHECK(deeper.certified);
    CHECK(deeper.n_lower_bound == 2);

    // The planar column dominates the variance column (equal at spin 1/2),
    // so at an equal ratio it certifies at least as many particles.
    const double ratio = 0.2;
    auto pqs = twomode::infer_depth_pqs(ratio, 1.0, shared_table());
    auto steer = twomode::infer_depth_steering(ratio, 1.0, shared_table());
    CHECK(pqs.n_lower_bound >= steer.n_lower_bound);

    CHECK_THROWS_AS(twomode::infer_depth_pqs(0.2, 1.0, no_zeta_table()),
                    std::invalid_argument);
}

TEST_CASE("ratio scaling uses both inputs") {
    // e_hz = 0.3, r = 0.75 -> ratio 0.4; same answer as (0.4, 1.0).
    auto scaled = twomode::infer_depth_steering(0.3, 0.75, shared_table());
    auto direct = twomode::infer_depth_steering(0.4, 1.0, shared_table());
    REQUIRE(scaled.certified);
    CHECK(scaled.n_lower_bound == direct.n_lower_bound);
    CHECK(scaled.e_hz == doctest::Approx(0.3));
    CHECK(scaled.r == doctest::Approx(0.75));

    // Entanglement gate works on the ratio, not e_hz alone.
    auto ent = twomode::infer_depth_entanglement(0.3, 0.35, shared_table());
    CHECK(ent.certified);
    CHECK(ent.n_lower_bound == 1);  // ratio ~0.857 sits in the bracket
}

TEST_CASE("certification depths for the benchmark interferometer ratios") {
    // Frozen against the independent tridiagonal oracle:
    //   bound(s = 21)   = 0.196280351650 > 0.1951 > bound(s = 21.5)
    //   bound(s = 43)   = 0.157345408185 > 0.1572 > bound(s = 43.5)
    // so the optimized ratios for N = 50 and N = 100 certify blocks of
    // 42 and 86 particles.
    auto n50 = twomode::infer_depth_steering(0.1951, 1.0, shared_table());
    REQUIRE(n50.certified);
    CHECK(n50.s0 == doctest::Approx(21.0));
    CHECK(n50.n_lower_bound == 42);
    CHECK(n50.margin ==
          doctest::Approx(0.196280351650 - 0.1951).epsilon(1e-6));

    auto n100 = twomode::infer_depth_steering(0.1572, 1.0, shared_table());
    REQUIRE(n100.certified);
    CHECK(n100.s0 == doctest::Approx(43.0));
    CHECK(n100.n_lower_bound == 86);
    CHECK(n100.margin ==
          doctest::Approx(0.157345408185 - 0.1572).epsilon(1e-6));
}

TEST_CASE("search saturates at the top of the table") {
    const auto& table = shared_table();
    const double tiny = 0.9 * table.entries.back().c_tilde;
    auto res = twomode::infer_depth_steering(tiny, 1.0, table);
    REQUIRE(res.certified);
    CHECK(res.n_lower_bound == 600);
}
