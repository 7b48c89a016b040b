#include "slitgap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slitgap/errors.hpp"

namespace slitgap {

Mat2 Mat2::inverse() const {
    const double d = det();
    if (!(std::abs(d) >= 1e-9)) throw InvalidInput("singular matrix (|det| < 1e-9)");
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

Vec2 operator*(const Mat2& g, Vec2 p) {
    return {std::fma(g.a11, p.x, g.a12 * p.y), std::fma(g.a21, p.x, g.a22 * p.y)};
}

Mat2 operator*(const Mat2& g, const Mat2& h) {
    return {g.a11 * h.a11 + g.a12 * h.a21, g.a11 * h.a12 + g.a12 * h.a22,
            g.a21 * h.a11 + g.a22 * h.a21, g.a21 * h.a12 + g.a22 * h.a22};
}

Mat2 p_ab(double a, double b) { return {a, b, 0.0, 1.0 / a}; }
Mat2 horocycle(double u) { return {1.0, 0.0, -u, 1.0}; }
Mat2 geodesic(double t) { return {std::exp(t), 0.0, 0.0, std::exp(-t)}; }
Mat2 renormalize(double R) { return {1.0 / R, 0.0, 0.0, R}; }

Mat2 omega_generator(double a, double b, double s) {
    // h_s p_{a,b} written out so the second row is computed directly
    return {a, b, -s * a, 1.0 / a - s * b};
}

Mat2 vl_generator(double a, double s) { return {0.0, -1.0 / a, a, s / a}; }

HolonomyParts parts_of(SurfaceMode mode) {
    if (mode == SurfaceMode::AffineOnly) return {false, true, false};
    return {true, true, true};
}

Vec2 reduce_to_fundamental(const Mat2& g, Vec2 v) {
    Vec2 c = g.inverse() * v;
    c.x -= std::floor(c.x);
    c.y -= std::floor(c.y);
    if (c.x >= 1.0) c.x = 0.0;
    if (c.y >= 1.0) c.y = 0.0;
    return g * c;
}

AffineLattice reduce_to_fundamental(const AffineLattice& L) {
    return {L.g, reduce_to_fundamental(L.g, L.v)};
}

namespace {

// Interval of coordinate `other` where the line {coord k == value} meets Q.
bool slice(const std::vector<Vec2>& q, bool sweep_x, double value, double& lo, double& hi) {
    lo = INFINITY;
    hi = -INFINITY;
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = q[i], r = q[(i + 1) % n];
        const double pc = sweep_x ? p.x : p.y, rc = sweep_x ? r.x : r.y;
        const double po = sweep_x ? p.y : p.x, ro = sweep_x ? r.y : r.x;
        if ((pc - value) * (rc - value) > 0) continue;
        if (pc == rc) {
            lo = std::min({lo, po, ro});
            hi = std::max({hi, po, ro});
        } else {
            const double t = (value - pc) / (rc - pc);
            const double o = po + t * (ro - po);
            lo = std::min(lo, o);
            hi = std::max(hi, o);
        }
    }
    return lo <= hi;
}

double pad(double x) { return 1e-7 * (1.0 + std::abs(x)); }

}  // namespace

void for_each_candidate(const Mat2& g, Vec2 offset, const Polygon& poly,
                        const std::function<void(long long, long long, Vec2)>& visit) {
    const Mat2 gi = g.inverse();
    std::vector<Vec2> q;
    q.reserve(poly.vertices.size());
    double mlo = INFINITY, mhi = -INFINITY, nlo = INFINITY, nhi = -INFINITY;
    for (Vec2 p : poly.vertices) {
        Vec2 c = gi * (p - offset);
        q.push_back(c);
        mlo = std::min(mlo, c.x);
        mhi = std::max(mhi, c.x);
        nlo = std::min(nlo, c.y);
        nhi = std::max(nhi, c.y);
    }
    const bool sweep_m = (mhi - mlo) <= (nhi - nlo);
    const double slo = sweep_m ? mlo : nlo, shi = sweep_m ? mhi : nhi;
    const long long k0 = static_cast<long long>(std::floor(slo - pad(slo)));
    const long long k1 = static_cast<long long>(std::ceil(shi + pad(shi)));
    const Vec2 c1 = g.col(0), c2 = g.col(1);
    for (long long k = k0; k <= k1; ++k) {
        double lo, hi;
        // clamp the sweep value into the polygon's range so edge-touching
        // rows just outside still get a (padded) slice
        const double val = std::clamp(static_cast<double>(k), slo, shi);
        if (!slice(q, sweep_m, val, lo, hi)) continue;
        const long long j0 = static_cast<long long>(std::floor(lo - pad(lo)));
        const long long j1 = static_cast<long long>(std::ceil(hi + pad(hi)));
        for (long long j = j0; j <= j1; ++j) {
            const long long m = sweep_m ? k : j, n = sweep_m ? j : k;
            const double md = static_cast<double>(m), nd = static_cast<double>(n);
            const Vec2 w{std::fma(md, c1.x, std::fma(nd, c2.x, offset.x)),
                         std::fma(md, c1.y, std::fma(nd, c2.y, offset.y))};
            visit(m, n, w);
        }
    }
}

namespace {

long long gcd_ll(long long a, long long b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

void dedup(std::vector<Vec2>& pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 p, Vec2 q) { return p.x < q.x; });
    std::vector<Vec2> out;
    out.reserve(pts.size());
    for (Vec2 p : pts) {
        bool dup = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            const double tol = 1e-12 * (1.0 + std::abs(p.x));
            if (p.x - it->x > tol) break;
            if (std::abs(p.y - it->y) <= 1e-12 * (1.0 + std::abs(p.y))) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(p);
    }
    pts.swap(out);
}

}  // namespace

std::vector<Vec2> enumerate_region(const AffineLattice& surface, HolonomyParts parts,
                                   const Polygon& poly,
                                   const std::function<bool(Vec2)>& keep) {
    std::vector<Vec2> out;
    int pieces = 0;
    if (parts.primitive) {
        ++pieces;
        for_each_candidate(surface.g, {0, 0}, poly, [&](long long m, long long n, Vec2 w) {
            if (gcd_ll(m, n) == 1 && keep(w)) out.push_back(w);
        });
    }
    if (parts.coset) {
        ++pieces;
        for_each_candidate(surface.g, surface.v, poly, [&](long long, long long, Vec2 w) {
            if (keep(w)) out.push_back(w);
        });
    }
    if (parts.neg_coset) {
        ++pieces;
        for_each_candidate(surface.g, -surface.v, poly, [&](long long, long long, Vec2 w) {
            if (keep(w)) out.push_back(w);
        });
    }
    if (pieces > 1) dedup(out);
    return out;
}

bool in_strip(Vec2 w, double slope_max) {
    return w.x > kStripTol && w.x <= 1.0 + kStripTol && w.y > kStripTol && w.y / w.x <= slope_max;
}

std::vector<Vec2> enumerate_strip(const AffineLattice& surface, HolonomyParts parts,
                                  double slope_max) {
    if (!(slope_max > 0)) throw InvalidInput("slope_max must be positive");
    const Polygon tri{{{0, 0}, {1, 0}, {1, slope_max}}};
    return enumerate_region(surface, parts, tri, [&](Vec2 w) { return in_strip(w, slope_max); });
}

std::vector<Vec2> enumerate_strip(const AffineLattice& surface, SurfaceMode mode,
                                  double slope_max) {
    return enumerate_strip(surface, parts_of(mode), slope_max);
}

std::vector<Vec2> enumerate_primitive_strip(const Mat2& g, double slope_max) {
    return enumerate_strip(AffineLattice{g, {0, 0}}, HolonomyParts{true, false, false}, slope_max);
}

GapSeries slopes_and_gaps_from_slopes(std::vector<double> slopes) {
    std::sort(slopes.begin(), slopes.end());
    GapSeries gs;
    for (double s : slopes) {
        if (!gs.slopes.empty() && s - gs.slopes.back() <= 1e-12 * std::abs(s)) {
            ++gs.merged;
            continue;
        }
        gs.slopes.push_back(s);
    }
    for (std::size_t i = 1; i < gs.slopes.size(); ++i)
        gs.gaps.push_back(gs.slopes[i] - gs.slopes[i - 1]);
    gs.count = gs.slopes.size();
    return gs;
}

GapSeries slopes_and_gaps(const std::vector<Vec2>& points) {
    std::vector<double> s;
    s.reserve(points.size());
    for (Vec2 p : points) s.push_back(p.y / p.x);
    return slopes_and_gaps_from_slopes(std::move(s));
}

namespace {

std::vector<Vec2> box_points(const AffineLattice& surface, SurfaceMode mode, double R) {
    if (!(R > 0)) throw InvalidInput("R must be positive");
    const Polygon box{{{0, 0}, {R, 0}, {R, R}, {0, R}}};
    const double tol = kStripTol * R;
    return enumerate_region(surface, parts_of(mode), box, [&](Vec2 w) {
        return w.x > tol && w.x <= R + tol && w.y >= -tol && w.y <= R + tol;
    });
}

}  // namespace

GapSeries renormalized_box_gaps(const AffineLattice& surface, SurfaceMode mode, double R) {
    std::vector<double> s;
    for (Vec2 w : box_points(surface, mode, R)) s.push_back(R * R * (w.y / w.x));
    return slopes_and_gaps_from_slopes(std::move(s));
}

GapSeries image_strip_gaps(const AffineLattice& surface, SurfaceMode mode, double R) {
    if (!(R > 0)) throw InvalidInput("R must be positive");
    const Mat2 gr = renormalize(R);
    const AffineLattice img{gr * surface.g, gr * surface.v};
    const double H = R * R;
    const Polygon rect{{{0, 0}, {1, 0}, {1, H}, {0, H}}};
    const double ytol = kStripTol * R;
    auto pts = enumerate_region(img, parts_of(mode), rect, [&](Vec2 w) {
        return w.x > kStripTol / R && w.x <= 1.0 + kStripTol / R && w.y >= -ytol && w.y <= H + ytol;
    });
    return slopes_and_gaps(pts);
}

std::size_t count_box(const AffineLattice& surface, SurfaceMode mode, double R) {
    return box_points(surface, mode, R).size();
}

Vec2 horocycle_apply(double u, Vec2 w) { return {w.x, std::fma(-u, w.x, w.y)}; }

AffineLattice horocycle_apply(double u, const AffineLattice& L) {
    return {horocycle(u) * L.g, horocycle_apply(u, L.v)};
}

std::vector<Vec2> d_cover_holonomy(int d, const AffineLattice& surface, double slope_max) {
    if (d < 2) throw InvalidInput("d-symmetric cover needs d >= 2");
    return enumerate_strip(surface, SurfaceMode::DoubledSlit, slope_max);
}

Mat2 lattice_reduce(const Mat2& g) {
    Vec2 b1 = g.col(0), b2 = g.col(1);
    auto n2 = [](Vec2 p) { return p.x * p.x + p.y * p.y; };
    for (int iter = 0; iter < 200; ++iter) {
        if (n2(b1) > n2(b2)) {
            const Vec2 t = b1;
            b1 = b2;
            b2 = -t;  // rotation keeps det positive
        }
        const double mu = std::round((b1.x * b2.x + b1.y * b2.y) / n2(b1));
        if (mu == 0) break;
        b2 = b2 - mu * b1;
    }
    return {b1.x, b2.x, b1.y, b2.y};
}

bool same_coset(const AffineLattice& L1, const AffineLattice& L2, double tol) {
    const Mat2 gi = L1.g.inverse();
    const Mat2 M = gi * L2.g;
    auto near_int = [tol](double x) { return std::abs(x - std::round(x)) <= tol; };
    if (!(near_int(M.a11) && near_int(M.a12) && near_int(M.a21) && near_int(M.a22))) return false;
    if (std::abs(std::abs(M.det()) - 1.0) > tol) return false;
    const Vec2 c = gi * (L2.v - L1.v);
    return near_int(c.x) && near_int(c.y);
}

bool has_rational_slope(Vec2 v, int max_den, double tol) {
    if (std::abs(v.x) <= tol) return true;
    const double r = v.y / v.x;
    for (int q = 1; q <= max_den; ++q) {
        const double rq = r * q;
        if (std::abs(rq - std::round(rq)) <= tol * q * std::max(1.0, std::abs(r))) return true;
    }
    return false;
}

long long ext_gcd(long long a, long long b, long long& x, long long& y) {
    if (b == 0) {
        x = a >= 0 ? 1 : -1;
        y = 0;
        return a >= 0 ? a : -a;
    }
    long long x1, y1;
    const long long d = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return d;
}

}  // namespace slitgap
