#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "slitgap/errors.hpp"
#include "slitgap/oracle.hpp"
#include "slitgap/report.hpp"

using namespace slitgap;
using testutil::unif;

TEST_CASE("oracle first return examples") {
    CHECK(oracle_first_return({omega_generator(0.5, 1, 0.2), {0.75, 0}}, SurfaceMode::AffineOnly) ==
          doctest::Approx(0.4));
    CHECK(oracle_first_return({p_ab(1, 1), {0.5, 0}}, SurfaceMode::AffineOnly) == doctest::Approx(2.0));
    CHECK(oracle_first_return({p_ab(0.6, 0.5), {0.5, 0.8}}, SurfaceMode::DoubledSlit) ==
          doctest::Approx(13.0 / 9));
    CHECK_THROWS_AS(oracle_first_return({Mat2{}, {0.5, 0.5}}, SurfaceMode::AffineOnly), NotOnTransversal);
}

TEST_CASE("oracle gap sequences") {
    for (double g : oracle_gap_sequence({Mat2{}, {0.5, 0}}, SurfaceMode::AffineOnly, 5))
        CHECK(g == doctest::Approx(2));
    for (double g : oracle_gap_sequence({Mat2{}, {}}, HolonomyParts{true, false, false}, 5))
        CHECK(g == doctest::Approx(1));

    // cumulative return times reproduce the strip slopes of the start
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const AffineLattice L = build_surface(testutil::random_omega(rng));
        const auto gaps = oracle_gap_sequence(L, SurfaceMode::AffineOnly, 100);
        double total = 0;
        for (double g : gaps) total += g;
        auto slopes = slopes_and_gaps(enumerate_strip(L, SurfaceMode::AffineOnly, total * 1.0000001 + 1e-9)).slopes;
        REQUIRE(slopes.size() >= 100);
        double cum = 0;
        for (std::size_t i = 0; i < 100; ++i) {
            cum += gaps[i];
            CHECK(std::abs(cum - slopes[i]) < 1e-7);
        }
    }
}

TEST_CASE("bcz orbit matches primitive strip gaps") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 3; ++trial) {
        const double a = unif(rng, 0.2, 1), b = unif(rng, 1 - a, 1);
        DeltaCoords d{a, b};
        const auto gaps = oracle_gap_sequence({p_ab(a, b), {}}, HolonomyParts{true, false, false}, 1000);
        for (int i = 0; i < 1000; ++i) {
            const double r = bcz_return_time(d);
            CHECK(std::abs(r - gaps[i]) <= 1e-9 * std::max(1.0, gaps[i]));
            d = bcz_return_map(d);
        }
    }
}

TEST_CASE("enlarging the cap never changes the minimum") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 300; ++i) {
        const AffineLattice L = build_surface(testutil::random_omega(rng));
        const SlopeHit h1 = min_strip_slope(L, parts_of(SurfaceMode::AffineOnly), 0.5);
        for (double cap : {2.0, 10.0, 100.0}) {
            const SlopeHit h2 = min_strip_slope(L, parts_of(SurfaceMode::AffineOnly), std::max(cap, h1.slope));
            CHECK(h2.slope == h1.slope);
        }
    }
}

TEST_CASE("doubled slit returns never exceed affine returns") {
    std::mt19937_64 rng(47);
    for (int i = 0; i < 2000; ++i) {
        const AffineLattice L = build_surface(testutil::random_omega(rng));
        CHECK(oracle_first_return(L, SurfaceMode::DoubledSlit) <=
              oracle_first_return(L, SurfaceMode::AffineOnly) + 1e-12);
    }
}

TEST_CASE("DeltaR difftest is clean") {
    const DiffReport r = diff_test(DiffRegion::DeltaR, 10000, 1, SurfaceMode::AffineOnly);
    CHECK(r.counterexample_count == 0);
    CHECK(r.max_rel_err < 1e-9);
}

TEST_CASE("OmegaR difftest failures are confined to two cells") {
    const DiffReport r = diff_test(DiffRegion::OmegaR, 10000, 1, SurfaceMode::AffineOnly);
    for (const auto& [cell, st] : r.cells) {
        INFO(cell);
        if (cell != "O2,j=0" && cell != "O4,j=1") CHECK(st.failures == 0);
    }
    // anchors are the worked examples and must all pass
    for (const auto& c : r.counterexamples) CHECK_FALSE(c.anchor);
    // every counterexample has a genuinely smaller oracle value
    for (const auto& c : r.counterexamples) CHECK(c.oracle < c.formula);
}

TEST_CASE("WslRho difftest reports the translate family") {
    const DiffReport r = diff_test(DiffRegion::WslRho, 10000, 1, SurfaceMode::AffineOnly);
    CHECK(r.counterexample_count > 0);
    bool anchor_found = false, family = false;
    for (const auto& c : r.counterexamples) {
        if (c.anchor && c.coords == std::vector<double>{0.6, 0.5, 0.3, 0.5}) {
            anchor_found = true;
            CHECK(c.formula == doctest::Approx(5.0 / 3));
            CHECK(c.oracle == doctest::Approx(5.0 / 9));
        }
        if (!c.anchor && c.coords[2] + c.coords[0] <= 1) family = true;
    }
    CHECK(anchor_found);
    CHECK(family);
    CHECK(is_known_discrepancy(DiffRegion::WslRho, SurfaceMode::AffineOnly));
}

TEST_CASE("difftest is deterministic for fixed seed and workers") {
    for (int workers : {1, 3}) {
        const auto a = to_json(diff_test(DiffRegion::WReturn, 3000, 7, SurfaceMode::DoubledSlit, workers)).dump();
        const auto b = to_json(diff_test(DiffRegion::WReturn, 3000, 7, SurfaceMode::DoubledSlit, workers)).dump();
        CHECK(a == b);
    }
}

TEST_CASE("region names") {
    CHECK(parse_region("OmegaR") == DiffRegion::OmegaR);
    CHECK_THROWS_AS(parse_region("Nope"), InvalidInput);
}
