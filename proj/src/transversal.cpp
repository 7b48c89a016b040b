#include "slitgap/transversal.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <algorithm>

#include "slitgap/errors.hpp"

namespace slitgap {

const char* to_string(OmegaRegion r) {
    switch (r) {
        case OmegaRegion::O1: return "O1";
        case OmegaRegion::O2: return "O2";
        case OmegaRegion::O3: return "O3";
        case OmegaRegion::O4: return "O4";
        case OmegaRegion::VL: return "VL";
    }
    return "?";
}

bool is_valid(const DeltaCoords& d) {
    return std::isfinite(d.a) && std::isfinite(d.b) && d.a > 0 && d.a <= 1 + kDomainTol &&
           d.b > 1 - d.a - kDomainTol && d.b <= 1 + kDomainTol && d.b > 0;
}

bool is_valid(const OmegaCoords& p) {
    if (!is_valid(DeltaCoords{p.a, p.b})) return false;
    const double smax = 1.0 / (p.a * p.b);
    return std::isfinite(p.s) && std::isfinite(p.alpha) && p.s >= -kDomainTol &&
           p.s < smax * (1 + kDomainTol) && p.alpha > 0 && p.alpha <= 1 + kDomainTol;
}

bool is_valid(const VLCoords& p) {
    return std::isfinite(p.a) && std::isfinite(p.s) && std::isfinite(p.alpha) && p.a > 0 &&
           p.a <= 1 + kDomainTol && p.s > 0 && p.s <= p.a * p.a * (1 + kDomainTol) &&
           p.alpha > 0 && p.alpha <= 1 + kDomainTol;
}

bool is_valid(const WPoint& w) {
    if (auto* sa = std::get_if<WPointSA>(&w)) return is_valid(sa->omega);
    const auto& sl = std::get<WPointSL>(w);
    if (!is_valid(sl.delta)) return false;
    if (!std::isfinite(sl.v.x) || !std::isfinite(sl.v.y)) return false;
    const Vec2 c = p_ab(sl.delta.a, sl.delta.b).inverse() * sl.v;
    const double tol = 1e-9;
    if (c.x >= -tol && c.x < 1 + tol && c.y >= -tol && c.y < 1 + tol) return true;
    // the box [0,a) x [0,1/a) is the other supported fundamental domain
    const double a = sl.delta.a;
    return sl.v.x >= -tol && sl.v.x < a + tol && sl.v.y >= -tol && sl.v.y < 1 / a + tol;
}

namespace {
std::string fmt(const char* f, double a, double b, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}
}  // namespace

void require_valid(const DeltaCoords& d) {
    if (!is_valid(d)) throw DomainError(fmt("(a,b)=(%.17g,%.17g) is not in Delta", d.a, d.b));
}
void require_valid(const OmegaCoords& p) {
    if (!is_valid(p))
        throw DomainError(fmt("(a,b,s,alpha)=(%.17g,%.17g,%.17g,%.17g) is not in Omega", p.a, p.b,
                              p.s, p.alpha));
}
void require_valid(const VLCoords& p) {
    if (!is_valid(p))
        throw DomainError(fmt("VL (a,s,alpha)=(%.17g,%.17g,%.17g) is invalid", p.a, p.s, p.alpha));
}
void require_valid(const WPoint& w) {
    if (!is_valid(w)) throw DomainError("W point is invalid: " + describe(w));
}

long long nudged_floor(double x) {
    return static_cast<long long>(std::floor(x + 1e-12 * std::max(1.0, std::abs(x))));
}

double bcz_return_time(const DeltaCoords& d) {
    require_valid(d);
    return 1.0 / (d.a * d.b);
}

DeltaCoords bcz_return_map(const DeltaCoords& d) {
    require_valid(d);
    const long long k = nudged_floor((1 + d.a) / d.b);
    return {d.b, std::fma(static_cast<double>(k), d.b, -d.a)};
}

OmegaRegion classify_omega(const OmegaCoords& p) {
    const double a = p.a, b = p.b, s = p.s, al = p.alpha;
    if (al > a) {
        const double th = (al - a) / (a * b * al);
        return s <= th ? OmegaRegion::O1 : OmegaRegion::O2;
    }
    return b + al <= 1 ? OmegaRegion::O3 : OmegaRegion::O4;
}

OmegaRegion classify_omega(const OmegaPoint& p) {
    if (std::holds_alternative<VLCoords>(p)) return OmegaRegion::VL;
    return classify_omega(std::get<OmegaCoords>(p));
}

namespace {
double positive_or_throw(double r, const char* where) {
    if (!(r > 0) || !std::isfinite(r))
        throw DegenerateInput(std::string("non-positive or infinite return time in ") + where);
    return r;
}
}  // namespace

double omega_return_time(const OmegaCoords& p, Omega4Variant variant) {
    require_valid(p);
    const double a = p.a, b = p.b, s = p.s, al = p.alpha;
    const OmegaRegion r = classify_omega(p);
    switch (r) {
        case OmegaRegion::O1:
            if (!(al - a > 0)) throw DegenerateInput("O1 with alpha = a");
            return positive_or_throw(s * a / (al - a), "O1");
        case OmegaRegion::O3:
            return positive_or_throw((1.0 / a - s * b) / (b + al), "O3");
        default: {
            const long long j = nudged_floor((1 + a - al) / b);
            const double den = al - a + static_cast<double>(j) * b;
            if (!(den > 0)) throw DegenerateInput("O2/O4 denominator vanishes");
            double num = static_cast<double>(j) * (1.0 / a - s * b);
            if (!(r == OmegaRegion::O4 && variant == Omega4Variant::DropSa)) num += s * a;
            return positive_or_throw(num / den, r == OmegaRegion::O2 ? "O2" : "O4");
        }
    }
}

double omega_return_time(const VLCoords& p) {
    require_valid(p);
    return p.a / p.alpha;
}

double omega_return_time(const OmegaPoint& p) {
    return std::visit([](const auto& q) { return omega_return_time(q); }, p);
}

AffineLattice build_surface(const OmegaCoords& p) {
    return {omega_generator(p.a, p.b, p.s), {p.alpha, 0.0}};
}
AffineLattice build_surface(const VLCoords& p) { return {vl_generator(p.a, p.s), {p.alpha, 0.0}}; }
AffineLattice build_surface(const OmegaPoint& p) {
    return std::visit([](const auto& q) { return build_surface(q); }, p);
}
AffineLattice build_surface(const WPoint& w) {
    if (auto* sa = std::get_if<WPointSA>(&w)) return build_surface(sa->omega);
    const auto& sl = std::get<WPointSL>(w);
    return {p_ab(sl.delta.a, sl.delta.b), sl.v};
}

namespace {

struct Hit {
    long long m, n;
    Vec2 w;
};

template <class Keep, class Better>
bool best_primitive(const Mat2& g, const Polygon& poly, Keep keep, Better better, Hit& out) {
    bool found = false;
    for_each_candidate(g, {0, 0}, poly, [&](long long m, long long n, Vec2 w) {
        if (std::gcd(m < 0 ? -m : m, n < 0 ? -n : n) != 1 || !keep(w)) return;
        if (!found || better(w, out.w)) {
            out = {m, n, w};
            found = true;
        }
    });
    return found;
}

// Completing (m,n) to a unimodular pair: returns (p,q) with m q - n p = 1.
void complete(long long m, long long n, long long& p, long long& q) {
    long long x, y;
    ext_gcd(m, n, x, y);  // m x + n y = 1 for primitive (m,n)
    q = x;
    p = -y;
}

// Shift b0 by multiples of a into (1-a, 1].
double shift_b(double b0, double a) {
    const double r = b0 - (1 - a);
    const double k = std::ceil(r / a) - 1;
    double b = b0 - k * a;
    if (b > 1 + 1e-12) b -= a;
    if (b <= 1 - a) b += a;
    return b;
}

bool short_horizontal_hit(const Mat2& g, Hit& h, double tol) {
    const Polygon box{{{0, -tol}, {1, -tol}, {1, tol}, {0, tol}}};
    return best_primitive(
        g, box,
        [tol](Vec2 w) { return w.x > kStripTol && w.x <= 1 + kStripTol && std::abs(w.y) <= tol; },
        [](Vec2 w, Vec2 best) { return w.x < best.x; }, h);
}

}  // namespace

bool find_short_horizontal(const Mat2& g, Vec2& out, double tol) {
    Hit h;
    if (!short_horizontal_hit(g, h, tol)) return false;
    out = h.w;
    return true;
}

bool find_horizontal_coset(const AffineLattice& L, double& alpha, double tol) {
    const Polygon box{{{0, -tol}, {1, -tol}, {1, tol}, {0, tol}}};
    bool found = false;
    for_each_candidate(L.g, L.v, box, [&](long long, long long, Vec2 w) {
        if (w.x > kStripTol && w.x <= 1 + kStripTol && std::abs(w.y) <= tol) {
            if (!found || w.x < alpha) alpha = std::min(w.x, 1.0);
            found = true;
        }
    });
    return found;
}

OmegaPoint recoordinatize_omega(const AffineLattice& L) {
    constexpr double tol = 1e-9;
    double alpha = 0;
    if (!find_horizontal_coset(L, alpha, tol))
        throw NotOnTransversal("no horizontal affine vector with x in (0,1]");

    // vertical lattice vector shorter than 1: the VL family
    Hit vert;
    const Polygon thin{{{-tol, 0}, {tol, 0}, {tol, 1}, {-tol, 1}}};
    if (best_primitive(
            L.g, thin,
            [tol](Vec2 w) { return std::abs(w.x) <= tol && w.y > kStripTol && w.y < 1 - tol; },
            [](Vec2 w, Vec2 best) { return w.y < best.y; }, vert)) {
        const double a = vert.w.y;
        long long p, q;
        complete(vert.m, vert.n, p, q);
        const Vec2 w2 = L.g * Vec2{static_cast<double>(p), static_cast<double>(q)};
        const double a2 = a * a;
        double s = a * w2.y;
        s -= a2 * (std::ceil(s / a2) - 1);
        if (s <= 1e-12 * a2) s = a2;
        if (s > a2) s = a2;
        return VLCoords{a, s, alpha};
    }

    // most recent horizontal crossing: max-slope vector with x in (0,1], y <= 0
    Hit h;
    bool found = false;
    for (double S = 1.0; S < 1e13 && !found; S *= 2) {
        const Polygon tri{{{0, 0}, {1, 0}, {1, -S}}};
        found = best_primitive(
            L.g, tri,
            [tol, S](Vec2 w) {
                return w.x > kStripTol && w.x <= 1 + kStripTol && w.y <= tol && -w.y <= S * w.x;
            },
            [](Vec2 w, Vec2 best) {
                const double sw = w.y / w.x, sb = best.y / best.x;
                return sw > sb || (sw == sb && w.x < best.x);
            },
            h);
    }
    if (!found) throw NotOnTransversal("no lattice vector below the horizontal in the strip");
    const double a = std::min(h.w.x, 1.0);
    const double s = std::max(0.0, -h.w.y / h.w.x);
    long long p, q;
    complete(h.m, h.n, p, q);
    const Vec2 w2 = L.g * Vec2{static_cast<double>(p), static_cast<double>(q)};
    const double b = std::min(shift_b(w2.x, a), 1.0);
    OmegaCoords out{a, b, s, alpha};
    if (!is_valid(out))
        throw NotOnTransversal("reconstructed coordinates leave Omega: " + describe(OmegaPoint{out}));
    return out;
}

OmegaPoint omega_flow_and_recoordinatize(const OmegaPoint& p, double time) {
    return recoordinatize_omega(horocycle_apply(time, build_surface(p)));
}

OmegaPoint omega_return_map(const OmegaPoint& p) {
    return omega_flow_and_recoordinatize(p, omega_return_time(p));
}

double rho_sl_to_sa(double a, double b, double v1, double v2) {
    if (!(v1 > 0)) throw DegenerateInput("rho needs v1 > 0");
    if (b + v1 <= 1) return v2 / v1;
    const double j = static_cast<double>(nudged_floor((a + 1 - v1) / b));
    return (v2 + j / a) / (v1 + j * b - a);
}

double w_return_time(const WPoint& w) {
    require_valid(w);
    if (auto* sl = std::get_if<WPointSL>(&w)) {
        const double a = sl->delta.a, b = sl->delta.b;
        if (!(sl->v.x > 0)) throw DegenerateInput("SL point with v1 <= 0");
        const double r = (b + sl->v.x <= 1) ? sl->v.y / sl->v.x : 1.0 / (a * b);
        return positive_or_throw(r, "W/SL");
    }
    const OmegaCoords& p = std::get<WPointSA>(w).omega;
    const double a = p.a, b = p.b, s = p.s, al = p.alpha;
    switch (classify_omega(p)) {
        case OmegaRegion::O1:
            if (!(al - a > 0)) throw DegenerateInput("O1 with alpha = a");
            return positive_or_throw(s * a / (al - a), "W/O1");
        case OmegaRegion::O3:
            return positive_or_throw((1.0 / a - s * b) / (b + al), "W/O3");
        default:
            return positive_or_throw(1.0 / (a * b) - s, "W/O2,O4");
    }
}

WPoint w_recoordinatize(const AffineLattice& L) {
    Hit h;
    if (short_horizontal_hit(L.g, h, 1e-9)) {
        const double a = std::min(h.w.x, 1.0);
        long long p, q;
        complete(h.m, h.n, p, q);
        const Vec2 w2 = L.g * Vec2{static_cast<double>(p), static_cast<double>(q)};
        const double b = std::min(shift_b(w2.x, a), 1.0);
        const Vec2 v = reduce_to_fundamental(p_ab(a, b), L.v);
        return WPointSL{{a, b}, v};
    }
    double alpha;
    for (const Vec2 v : {L.v, -L.v}) {
        const AffineLattice cand{L.g, v};
        if (!find_horizontal_coset(cand, alpha)) continue;
        OmegaPoint op = recoordinatize_omega(cand);
        if (auto* oc = std::get_if<OmegaCoords>(&op)) return WPointSA{*oc};
        throw NotOnTransversal("vertical-lattice configuration inside W is not parameterized");
    }
    throw NotOnTransversal("surface has no short horizontal saddle connection");
}

WPoint w_flow_and_recoordinatize(const WPoint& w, double time) {
    return w_recoordinatize(horocycle_apply(time, build_surface(w)));
}

WPoint w_return_map(const WPoint& w) { return w_flow_and_recoordinatize(w, w_return_time(w)); }

std::string describe(const OmegaPoint& p) {
    if (auto* o = std::get_if<OmegaCoords>(&p))
        return fmt("Omega(%.17g, %.17g, %.17g, %.17g)", o->a, o->b, o->s, o->alpha);
    const auto& v = std::get<VLCoords>(p);
    return fmt("VL(%.17g, %.17g, %.17g)", v.a, v.s, v.alpha);
}

std::string describe(const WPoint& w) {
    if (auto* sa = std::get_if<WPointSA>(&w))
        return fmt("SA(%.17g, %.17g, %.17g, %.17g)", sa->omega.a, sa->omega.b, sa->omega.s,
                   sa->omega.alpha);
    const auto& sl = std::get<WPointSL>(w);
    return fmt("SL(%.17g, %.17g; %.17g, %.17g)", sl.delta.a, sl.delta.b, sl.v.x, sl.v.y);
}

}  // namespace slitgap
