#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gsl/gsl_sf_dilog.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slitgap/closed_form.hpp"
#include "slitgap/errors.hpp"
#include "slitgap/measures.hpp"

using namespace slitgap;

namespace {
constexpr double kPi = std::numbers::pi;
const double kG0 = (3 + kPi * kPi) / 6;

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) < 0) == (f(mid) < 0)) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> geometric(double lo, double hi, int n) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return t;
}
}  // namespace

TEST_CASE("dilog against an independent implementation") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-3, 1);
    for (int i = 0; i < 500; ++i) {
        const double x = U(rng);
        CHECK(dilog(x) == doctest::Approx(gsl_sf_dilog(x)).epsilon(1e-13));
    }
    CHECK(dilog(0) == 0);
    CHECK(dilog(1) == doctest::Approx(kPi * kPi / 6).epsilon(1e-15));
    CHECK(dilog(-1) == doctest::Approx(-kPi * kPi / 12).epsilon(1e-15));
    CHECK(dilog(0.5) == doctest::Approx(kPi * kPi / 12 - std::log(2.0) * std::log(2.0) / 2).epsilon(1e-15));
    CHECK_THROWS_AS(dilog(1.5), DomainError);
}

TEST_CASE("dilog reflection identity") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(1e-6, 1 - 1e-6);
    for (int i = 0; i < 100; ++i) {
        const double x = U(rng);
        CHECK(std::abs(dilog(x) + dilog(1 - x) - (kPi * kPi / 6 - std::log(x) * std::log(1 - x))) < 1e-12);
    }
}

TEST_CASE("tail anchors") {
    CHECK(std::abs(w_tail_closed_form(0) - kG0) < 1e-12);
    CHECK(std::abs(w_tail_closed_form(1) - (kG0 - 7.0 / 8)) < 1e-12);
    CHECK(std::abs(w_total_mass() - kG0) < 1e-15);
    CHECK(std::abs(w_tail_quadrature(0) - kG0) < 1e-8);
    CHECK(w_tail_closed_form(0.5) == doctest::Approx(w_tail_quadrature(0.5)).epsilon(1e-8));
    CHECK_THROWS_AS(w_tail_closed_form(-1), DomainError);
}

TEST_CASE("tail pieces and breakpoints") {
    const auto& bp = tail_breakpoints();
    CHECK(bp[2] == doctest::Approx(kGoldenSq));
    CHECK(kGoldenSq == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-15));
    CHECK(tail_piece(0.5) == 0);
    CHECK(tail_piece(1) == 0);
    CHECK(tail_piece(1.0000001) == 1);
    CHECK(tail_piece(3) == 3);
    CHECK(tail_piece(5) == 4);
    CHECK_THROWS_AS(tail_piece_value(7, 1), InvalidInput);
}

TEST_CASE("density values") {
    CHECK(w_density(0.5).value == doctest::Approx(0.875).epsilon(1e-6));
    CHECK(w_density(0.5, 1e-5, false, TailSource::ClosedForm, true).value ==
          doctest::Approx(0.875 / kG0).epsilon(1e-6));
    CHECK(0.875 / kG0 == doctest::Approx(0.40794).epsilon(1e-4));
    CHECK_THROWS_AS(w_density(1 + 1e-7), AmbiguityError);
    CHECK_THROWS_AS(w_density(4 - 1e-7), AmbiguityError);
    const DensityValue d = w_density(1, 1e-5, true);
    CHECK(d.one_sided);
    CHECK(d.left == doctest::Approx(0.875).epsilon(1e-4));
    CHECK_THROWS_AS(w_density(0), DomainError);
}

TEST_CASE("normalized density integrates to one") {
    // closed-form integral of the density is G(0)/G(0) minus the tail beyond the cut
    auto f = [](double t) {
        return w_density(t, 1e-4, true, TailSource::Quadrature, true, {1e-10, 30}).value;
    };
    const double head = integrate_split(f, 1e-6, 6, {1, 2, kGoldenSq, 4}, 1e-7, 20);
    const double rest = w_tail_quadrature(6) / kG0;
    CHECK(std::abs(head + rest + (1 - w_tail_quadrature(1e-6) / kG0) - 1) < 1e-4);
}

TEST_CASE("tail is nonincreasing") {
    double prev = 1e300;
    for (int i = 0; i <= 200; ++i) {
        const double t = 0.5 * i;
        const double g = w_tail(t, TailSource::Quadrature);
        CHECK(g <= prev + 1e-9);
        CHECK(g >= 0);
        prev = g;
    }
}

TEST_CASE("tail decays quadratically") {
    const auto t = geometric(8, 128, 9);
    std::vector<double> v;
    for (double x : t) v.push_back(w_tail(x, TailSource::Quadrature) / kG0);
    const double k = fit_decay_exponent(t, v);
    CHECK(k >= -2.3);
    CHECK(k <= -1.7);
}

TEST_CASE("decay fit") {
    const auto t = geometric(1, 100, 7);
    std::vector<double> a, b;
    for (double x : t) {
        a.push_back(1 / (x * x));
        b.push_back(3.5 / x);
    }
    CHECK(fit_decay_exponent(t, a) == doctest::Approx(-2).epsilon(1e-9));
    CHECK(fit_decay_exponent(t, b) == doctest::Approx(-1).epsilon(1e-9));
    CHECK_THROWS_AS(fit_decay_exponent({1, 2, 3}, {1, 2, 3}), InvalidInput);
    a[2] = 0;
    CHECK_THROWS_AS(fit_decay_exponent(t, a), DomainError);
}

TEST_CASE("cubic roots") {
    const double b2 = omega_cubic_root(2, 100);
    const double oracle = bisect([](double b) { return 100 * b * (1 - b) * (1 - b) - 2; }, 0, 1.0 / 3);
    CHECK(std::abs(b2 - oracle) < 1e-12);
    CHECK(std::abs(100 * b2 * (1 - b2) * (1 - b2) - 2) < 1e-6);
    CHECK(std::abs(b2 - 0.0207) < 5e-4);
    CHECK_THROWS_AS(omega_cubic_root(0, 10), OutOfRegime);
}

TEST_CASE("omega tail bounds bracket the right orders") {
    double l_lo = 1e300, l_hi = 0, u_lo = 1e300, u_hi = 0;
    for (double t : geometric(16, 128, 4)) {
        const TailBounds b = omega_tail_bounds(t);
        CHECK(b.lower <= b.upper);
        l_lo = std::min(l_lo, b.lower * t * t);
        l_hi = std::max(l_hi, b.lower * t * t);
        u_lo = std::min(u_lo, b.upper * t);
        u_hi = std::max(u_hi, b.upper * t);
    }
    CHECK(l_lo > 0);
    CHECK(l_hi / l_lo < 3);
    CHECK(u_hi / u_lo < 3);
}

TEST_CASE("torsion tails") {
    CHECK(torsion_tail_parts(1, 16).c1 == 0);
    for (int q : {1, 2, 3}) {
        double lo = 1e300, hi = 0;
        for (double t : geometric(8, 64, 4)) {
            const double v = torsion_tail(q, t) * t * t;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        INFO(q);
        CHECK(lo > 0);
        CHECK(hi / lo < 3);
    }
    CHECK_THROWS_AS(torsion_tail(3, 2), OutOfRegime);
    CHECK_THROWS_AS(torsion_tail(0, 10), InvalidInput);
}

TEST_CASE("torsion tail against Monte Carlo") {
    // quadrature is the Lebesgue mass on Delta (total 1/2); MC is a probability
    for (int q : {1, 2, 3}) {
        const TailEstimate e =
            mc_tail(parse_measure("torsion:" + std::to_string(q)), Engine::Formula, {16}, 1000000, 5);
        const double quad = torsion_tail(q, 16) / 0.5;
        const double sigma = e.ci_halfwidth[0] / 1.96;
        INFO(q);
        CHECK(std::abs(e.survival[0] - quad) < 3 * sigma);
    }
}

TEST_CASE("reproduction reports") {
    const auto pm = piece_mismatch_report(50, 1e-6);
    REQUIRE(pm.size() == 4);
    CHECK(pm[0].ok);
    CHECK(pm[1].ok);
    // the closed-form pieces on (2,4] disagree with the direct integral
    CHECK_FALSE(pm[2].ok);
    CHECK_FALSE(pm[3].ok);
    for (const auto& p : pm) CHECK(p.points == 50);

    const auto cc = continuity_report(1e-6);
    REQUIRE(cc.size() == 4);
    CHECK(cc[0].t == 1);
    CHECK(cc[0].ok);
    for (const auto& c : cc) CHECK(c.jump == doctest::Approx(std::abs(c.right - c.left)));
}
