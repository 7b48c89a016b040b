#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slitgap/closed_form.hpp"
#include "slitgap/errors.hpp"
#include "slitgap/measures.hpp"
#include "slitgap/oracle.hpp"
#include "slitgap/report.hpp"

using namespace slitgap;

namespace {
constexpr double kPi2over6 = std::numbers::pi * std::numbers::pi / 6;

auto always = [](const SamplePoint&) { return true; };

void check_monotone(const TailEstimate& e) {
    for (std::size_t i = 1; i < e.survival.size(); ++i)
        CHECK(e.survival[i] <= e.survival[i - 1] + 2 * std::max(e.ci_halfwidth[i], e.ci_halfwidth[i - 1]) + 1e-15);
}
}  // namespace

TEST_CASE("torsion samples sit on the torsion section") {
    const MeasureSpec m = parse_measure("torsion:2");
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        const WeightedSample ws = sample(m, rng);
        REQUIRE(std::holds_alternative<OmegaCoords>(ws.point));
        const auto p = std::get<OmegaCoords>(ws.point);
        CHECK(ws.weight == 1);
        CHECK(p.s == 0);
        CHECK(p.alpha == p.a / 2);
        CHECK(p.a + p.b > 1);
        CHECK(p.a <= 1);
        CHECK(p.b <= 1);
    }
}

TEST_CASE("omega mass") {
    const MassEstimate e = mc_mass(parse_measure("haar-omega"), 200000, 3, always);
    CHECK(std::abs(e.value - kPi2over6) < 3 * e.se);
}

TEST_CASE("omega three slice mass") {
    auto in_o3 = [](const SamplePoint& p) {
        return classify_omega(std::get<OmegaCoords>(p)) == OmegaRegion::O3;
    };
    const MassEstimate e = mc_mass(parse_measure("haar-omega"), 200000, 5, in_o3);
    CHECK(std::abs(e.value - (kPi2over6 - 1)) < 3 * e.se);
}

TEST_CASE("W mass and its SL share") {
    const MeasureSpec m = parse_measure("haar-w");
    const MassEstimate e = mc_mass(m, 200000, 7, always);
    CHECK(std::abs(e.value - w_total_mass()) < 3 * e.se);
    CHECK(w_total_mass() == doctest::Approx((3 + std::numbers::pi * std::numbers::pi) / 6).epsilon(1e-15));
    auto is_sl = [](const SamplePoint& p) {
        return std::holds_alternative<WPoint>(p) && std::holds_alternative<WPointSL>(std::get<WPoint>(p));
    };
    const MassEstimate sl = mc_mass(m, 200000, 7, is_sl);
    CHECK(std::abs(sl.value - 0.5) < 3 * sl.se + 1e-12);
}

TEST_CASE("survival at zero is one") {
    for (const char* name : {"haar-omega", "haar-w", "torsion:3"}) {
        INFO(std::string(name));
        const TailEstimate e = mc_tail(parse_measure(name), Engine::Formula, {0, 1}, 5000, 1);
        CHECK(e.survival[0] == doctest::Approx(1).epsilon(1e-12));
    }
}

TEST_CASE("periodic measure has a step survival") {
    const TailEstimate e = mc_tail(parse_measure("periodic:0.5,0.25"), Engine::Formula, {1, 1.9, 2.1, 3}, 2000, 4);
    CHECK(e.survival[0] == 1);
    CHECK(e.survival[1] == 1);
    CHECK(e.survival[2] == 0);
    CHECK(e.survival[3] == 0);
}

TEST_CASE("periodic point orbit") {
    CHECK(periodic_orbit({1, 1, 0, 0.5}).size() == 1);
    const TailEstimate e =
        mc_tail(parse_measure("periodic-point:1,1,0,0.5"), Engine::Formula, {1.5, 2.5}, 1000, 1);
    CHECK(e.survival[0] == 1);
    CHECK(e.survival[1] == 0);
}

TEST_CASE("survival curves are monotone") {
    std::vector<double> grid;
    for (double t = 0; t <= 6; t += 0.25) grid.push_back(t);
    for (const char* name : {"haar-omega", "haar-w", "torsion:2"}) {
        INFO(std::string(name));
        check_monotone(mc_tail(parse_measure(name), Engine::Formula, grid, 20000, 11));
    }
    check_monotone(mc_tail(parse_measure("haar-omega"), Engine::OracleAffineOnly, grid, 5000, 11));
}

TEST_CASE("torsion survival decays like t^-2") {
    std::vector<double> grid{8, 16, 32, 64};
    const TailEstimate e = mc_tail(parse_measure("torsion:2"), Engine::Formula, grid, 400000, 13);
    double lo = 1e300, hi = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(e.survival[i] > 0);
        const double v = grid[i] * grid[i] * e.survival[i];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 3);
}

TEST_CASE("support at zero at moderate sample size") {
    for (const char* name : {"haar-omega", "haar-w"}) {
        INFO(std::string(name));
        const TailEstimate e = mc_tail(parse_measure(name), Engine::Formula, {0.05, 0.1}, 100000, 17);
        CHECK(e.survival[0] < 1 - 10 * e.ci_halfwidth[0]);
        CHECK(e.survival[1] < 1 - 10 * e.ci_halfwidth[1]);
        // mass keeps accumulating between the two points
        CHECK(e.survival[0] > e.survival[1] + e.ci_halfwidth[0]);
    }
}

TEST_CASE("same inputs give identical estimates") {
    const MeasureSpec m = parse_measure("haar-w");
    for (int workers : {1, 2}) {
        const auto a = to_json(mc_tail(m, Engine::Formula, {0, 0.5, 1, 2}, 5000, 99, workers)).dump();
        const auto b = to_json(mc_tail(m, Engine::Formula, {0, 0.5, 1, 2}, 5000, 99, workers)).dump();
        CHECK(a == b);
    }
    CHECK_THROWS_AS(mc_tail(m, Engine::Formula, {0}, 999, 1), InvalidInput);
}

TEST_CASE("ergodic averages at the fixed point") {
    const SamplePoint fp = OmegaCoords{1, 1, 0, 0.5};
    for (std::size_t N : {1u, 10u, 100u}) {
        CHECK(ergodic_average(fp, Engine::Formula, N, parse_interval("(1.5,2.5)")) == 1.0);
        CHECK(ergodic_average(fp, Engine::Formula, N, parse_interval("(0,1)")) == 0.0);
    }
    CHECK_THROWS_AS(ergodic_average(fp, Engine::Formula, 0, parse_interval("(0,1]")), InvalidInput);
}

TEST_CASE("ergodic average of a random orbit matches the sampled mass") {
    Rng rng(23);
    double w = 0;
    const SamplePoint start = sample_haar_omega_point(rng, w);
    const Interval I = parse_interval("(0,1]");
    const double orbit = ergodic_average(start, Engine::OracleAffineOnly, 100000, I);
    const TailEstimate e = mc_tail(parse_measure("haar-omega"), Engine::OracleAffineOnly, {1}, 200000, 29);
    CHECK(std::abs(orbit - (1 - e.survival[0])) < 0.01);
}

TEST_CASE("measure and grid parsing") {
    CHECK(parse_measure("torsion:3").q == 3);
    CHECK_THROWS_AS(parse_measure("torsion:0"), InvalidInput);
    CHECK_THROWS_AS(parse_measure("torsion:1.5"), InvalidInput);
    CHECK_THROWS_AS(parse_measure("periodic:1.5,0.2"), InvalidInput);
    CHECK_THROWS_AS(parse_measure("periodic-point:0.5,0.1,0,0.5"), InvalidInput);
    CHECK_THROWS_AS(parse_measure("lebesgue"), InvalidInput);
    CHECK(to_string(parse_measure("torsion:2")) == "torsion:2");

    const auto g = parse_grid("0:1:0.25");
    REQUIRE(g.size() == 5);
    CHECK(g.back() == 1);
    CHECK_THROWS_AS(parse_grid("1:0:0.1"), InvalidInput);
    CHECK_THROWS_AS(parse_grid("0:1:0"), InvalidInput);
    CHECK_THROWS_AS(parse_grid("0:1"), InvalidInput);

    const Interval I = parse_interval("[1.5,2.5)");
    CHECK(I.contains(1.5));
    CHECK_FALSE(I.contains(2.5));
    CHECK_THROWS_AS(parse_interval("1,2"), InvalidInput);
    CHECK(parse_engine("oracle-doubled") == Engine::OracleDoubledSlit);
    CHECK_THROWS_AS(parse_engine("magic"), InvalidInput);
}
