#pragma once

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "slitgap/geometry.hpp"
#include "slitgap/transversal.hpp"

namespace testutil {

using namespace slitgap;

inline double unif(std::mt19937_64& rng, double lo = 0, double hi = 1) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Unimodular generator with moderate skew and a generic slit vector.
inline AffineLattice random_surface(std::mt19937_64& rng) {
    const double a = unif(rng, 0.3, 1.0);
    const double b = unif(rng, 1 - a + 1e-3, 1.0);
    const Mat2 g = horocycle(unif(rng, -2, 2)) * p_ab(a, b);
    const Vec2 v = g * Vec2{unif(rng), unif(rng)};
    return {g, v};
}

inline OmegaCoords random_omega(std::mt19937_64& rng) {
    const double a = unif(rng, 0.05, 1.0);
    const double b = unif(rng, 1 - a, 1.0);
    return {a, b, unif(rng, 0, 0.999 / (a * b)), unif(rng, 0.01, 1.0)};
}

// Naive scan over a square of coefficients; M must cover the region.
inline std::vector<Vec2> naive_strip(const AffineLattice& L, HolonomyParts parts, double S, long long M) {
    std::vector<Vec2> out;
    auto keep = [&](Vec2 w) { return in_strip(w, S); };
    for (long long m = -M; m <= M; ++m)
        for (long long n = -M; n <= M; ++n) {
            const Vec2 base = L.g * Vec2{static_cast<double>(m), static_cast<double>(n)};
            if (parts.primitive && std::gcd(m, n) == 1 && keep(base)) out.push_back(base);
            if (parts.coset && keep(base + L.v)) out.push_back(base + L.v);
            if (parts.neg_coset && keep(-(base + L.v))) out.push_back(-(base + L.v));
        }
    return out;
}

// Coefficient bound for the triangle (0,0),(1,0),(1,S) shifted by -v.
inline long long coeff_bound(const AffineLattice& L, double S) {
    const Mat2 gi = L.g.inverse();
    double mx = 0;
    for (Vec2 p : {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, S}})
        for (Vec2 q : {p - L.v, p + L.v, p}) {
            const Vec2 c = gi * q;
            mx = std::max({mx, std::abs(c.x), std::abs(c.y)});
        }
    return static_cast<long long>(std::ceil(mx)) + 2;
}

inline std::vector<double> sorted_slopes(const std::vector<Vec2>& pts) {
    return slopes_and_gaps(pts).slopes;
}

}  // namespace testutil
