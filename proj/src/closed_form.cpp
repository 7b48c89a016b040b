#include "slitgap/closed_form.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <queue>
#include <cmath>
#include <numbers>

#include "slitgap/errors.hpp"

namespace slitgap {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPi2_6 = kPi * kPi / 6.0;

double dilog_series(double x) {
    // |x| <= 1/2: terms shrink at least like 2^-k / k^2
    double sum = 0, p = x;
    for (int k = 1; k < 200; ++k) {
        const double term = p / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
        p *= x;
    }
    return sum;
}
}  // namespace

double dilog(double x) {
    if (std::isnan(x) || x > 1) throw DomainError("dilog: real branch needs x <= 1");
    if (x == 1) return kPi2_6;
    if (x < -1) {
        const double l = std::log(-x);
        return -kPi2_6 - 0.5 * l * l - dilog(1 / x);
    }
    if (x < -0.5) {
        // Landen: maps [-1,-1/2) into (1/3,1/2]
        const double l = std::log1p(-x);
        return -dilog_series(x / (x - 1)) - 0.5 * l * l;
    }
    if (x <= 0.5) return dilog_series(x);
    return kPi2_6 - std::log(x) * std::log1p(-x) - dilog_series(1 - x);
}

double w_total_mass() { return (3 + kPi * kPi) / 6; }

const std::array<double, 4>& tail_breakpoints() {
    static const std::array<double, 4> b{1.0, 2.0, kGoldenSq, 4.0};
    return b;
}

int tail_piece(double t) {
    if (t <= 1) return 0;
    if (t <= 2) return 1;
    if (t <= kGoldenSq) return 2;
    if (t <= 4) return 3;
    return 4;
}

namespace {

double L(double x) { return std::log(x); }
double arccoth(double x) { return 0.5 * std::log((x + 1) / (x - 1)); }

double piece_1_2(double t) {
    const double D = dilog(1 / t) - dilog((t - 1) / t);
    return (1.0 / 24) * (24 * D - 12 * L(t) * L(t) + 24 * L(t - 1) * L(t) + 12 * L(t)) - 2.5 +
           1 / (6 * t * t) + (1.0 / 24) * t * (-24 * L(t - 1) + 24 * L(t) - 4) +
           (24 * L(t - 1) + 54 * L(t) + 51) / (24 * t);
}

double piece_2_phi(double t) {
    const double D = dilog(1 / t) - dilog((t - 1) / t);
    const double st = std::sqrt(t);
    return (1.0 / 48) * (-48 * D - 3 * L(t * t * t) - 24 * L(t) * L(t)) + 1 / (2 * std::pow(t, 1.5)) +
           (12 * L(1 - 1 / st) - 36 * L(t - 1) + 48 * L(t) - 12 * L(t - st)) / (48 * t * t) +
           (72 * arccoth(1 - 2 * t) - 18) / (48 * t * t) +
           (24 * L(1 - 1 / st) + 24 * L(t) - 36) / (48 * st) +
           (1.0 / 48) * (-12 * L(1 - 1 / st) - 3 * (7 + L(256)) * L(4 / t)) +
           (1.0 / 24) * (-63 - 45 * L(2) - L(8) * L(256)) +
           (1.0 / 48) * t * (-48 * L(t - 1) + 48 * L(t) - 16) +
           (-12 * L(1 - 1 / st) + 48 * L(t - 1) + 96 * L(t) + 192) / (48 * t) +
           (1.0 / 48) * (48 * L(t - 1) * L(t) + 24 * (3 + L(2)) * L(t));
}

double piece_phi_4(double t) {
    const double D = dilog(1 / t) - dilog((t - 1) / t);
    const double st = std::sqrt(t);
    // -12 log(1-t) + 12 log(-t): the i*pi parts cancel for t > 1
    const double complex_pair = -12 * L(t - 1) + 12 * L(t);
    return (1.0 / 48) * (-48 * D - 3 * L(t * t * t) - 24 * L(t) * L(t)) +
           (complex_pair - 24 * L(t - 1) + 24 * L(t)) / (48 * t * t) +
           (72 * arccoth(1 - 2 * t) - 24) / (48 * t * t) +
           (1.0 / 48) * (-12 * L(1 - 1 / st) - 144 - 2 * L(8) * (15 + L(256))) +
           (1.0 / 48) * (12 * L(st - 1) + 3 * (7 + L(256)) * L(4 / t)) +
           (24 * L(1 - 1 / st) - 24 * L(st - 1) + 12 * L(t)) / (48 * st) +
           (1.0 / 48) * t * (-48 * L(t - 1) + 48 * L(t) - 16) +
           (-12 * L(1 - 1 / st) + 12 * L(st - 1) + 24 * L(t - 1) + 24 * L((t - 1) / st)) / (48 * t) +
           (114 * L(t) + 198) / (48 * t) +
           (1.0 / 48) * (48 * L(t - 1) * L(t) + 6 * (13 + L(16)) * L(t));
}

}  // namespace

double tail_piece_value(int piece, double t) {
    switch (piece) {
        case 0: return w_total_mass() - 7 * t / 8;
        case 1: return piece_1_2(t);
        case 2: return piece_2_phi(t);
        case 3: return piece_phi_4(t);
        case 4: return w_tail_quadrature(t);
    }
    throw InvalidInput("piece index out of range");
}

double w_tail_closed_form(double t) {
    if (!(t >= 0)) throw DomainError("tail needs t >= 0");
    return tail_piece_value(tail_piece(t), t);
}

namespace {

struct Panel {
    double lo, hi, value, err, l1;
    unsigned depth;
    bool operator<(const Panel& o) const { return err < o.err; }
};

// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
Panel gk15(const std::function<double(double)>& f, double lo, double hi, unsigned depth) {
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& x = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double f0 = f(c);
    double k = wk[0] * f0, g = wg[0] * f0, l1 = wk[0] * std::abs(f0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fl = f(c - h * x[i]), fr = f(c + h * x[i]);
        k += wk[i] * (fl + fr);
        l1 += wk[i] * (std::abs(fl) + std::abs(fr));
        if (i % 2 == 0) g += wg[i / 2] * (fl + fr);
    }
    return {lo, hi, h * k, h * std::abs(k - g), h * l1, depth};
}

}  // namespace

// Globally adaptive: always bisect the panel with the largest error estimate.
// Unlike recursive schemes this cannot blow up on flat or sliver panels.
double integrate_split(const std::function<double(double)>& f, double lo, double hi,
                       std::vector<double> breaks, double rel_tol, unsigned max_depth, double* err_out) {
    constexpr std::size_t kMaxPanels = 4000;
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    std::priority_queue<Panel> open;
    double total = 0, err = 0, l1 = 0, done_err = 0;
    double prev = lo;
    for (double b : breaks) {
        if (!(b > prev) || b > hi) continue;
        Panel p = gk15(f, prev, b, 0);
        total += p.value;
        err += p.err;
        l1 += p.l1;
        open.push(p);
        prev = b;
    }
    std::size_t panels = open.size();
    while (!open.empty() && err > rel_tol * std::abs(total) && err > 1e-300 && panels < kMaxPanels) {
        Panel p = open.top();
        open.pop();
        const double mid = 0.5 * (p.lo + p.hi);
        if (p.depth >= max_depth || !(mid > p.lo && mid < p.hi)) {
            done_err += p.err;  // cannot refine further; keep its contribution
            continue;
        }
        const Panel l = gk15(f, p.lo, mid, p.depth + 1), r = gk15(f, mid, p.hi, p.depth + 1);
        total += l.value + r.value - p.value;
        err += l.err + r.err - p.err;
        l1 += l.l1 + r.l1 - p.l1;
        open.push(l);
        open.push(r);
        ++panels;
    }
    (void)done_err;
    if (err_out) *err_out = err;
    const double achieved = l1 > 0 ? err / l1 : 0.0;
    if (achieved > 1e3 * rel_tol && err > 1e-14)
        throw QuadratureError("adaptive quadrature did not converge", achieved);
    return total;
}

namespace {

// Inner integrand of the W tail at fixed (a,b): every s- and x-integral is
// a clamped length, so this is exact.
WTailBreakdown w_phi(double a, double b, double t) {
    WTailBreakdown r;
    const double amax = t == 0 ? 1.0 : std::min(1.0, 1 / (b * t));
    if (amax > a) {
        auto F = [&](double x) { return (1 / b) * (x - a * std::log(x)) - t * (x * x / 2 - a * x); };
        r.o1 = (F(amax) - F(a)) / a;
        r.o2 = (1 / b) * std::log(amax / a) - t * (amax - a);
    }
    const double m3 = t == 0 ? 1 - b : std::min(1 - b, 1 / (a * t) - b);
    if (m3 > 0) r.o3 = ((1 / a - t * b) * m3 - t * m3 * m3 / 2) / b;
    if (1 / (a * b) > t) r.o4 = (a - 1 + b) * (1 / (a * b) - t);

    // SL: v = p_{a,b}(x,y); long part x > l(y), short part x < min(l(y), k y)
    auto l = [&](double y) { return (1 - b - b * y) / a; };
    const double y0 = (1 - b) / b;
    std::vector<double> ys{0.0, 1.0};
    if (y0 > 0 && y0 < 1) ys.push_back(y0);
    auto trap = [](const std::vector<double>& pts, auto g) {
        std::vector<double> p = pts;
        std::sort(p.begin(), p.end());
        double s = 0;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) s += (p[i + 1] - p[i]) * (g(p[i]) + g(p[i + 1])) / 2;
        return s;
    };
    if (1 / (a * b) > t) r.sl_long = trap(ys, [&](double y) { return 1 - std::max(0.0, l(y)); });
    const double k = t == 0 ? INFINITY : 1 / (a * a * t) - b / a;
    if (k > 0) {
        std::vector<double> pts = ys;
        if (std::isfinite(k)) {
            const double yi = (1 - b) * a * t;  // where k y meets l(y)
            if (yi > 0 && yi < 1) pts.push_back(yi);
            r.sl_short = trap(pts, [&](double y) { return std::max(0.0, std::min(l(y), k * y)); });
        } else {
            r.sl_short = trap(pts, [&](double y) { return std::max(0.0, l(y)); });
        }
    }
    return r;
}

std::vector<double> in_open(std::initializer_list<double> xs, double lo, double hi) {
    std::vector<double> out;
    for (double x : xs)
        if (std::isfinite(x) && x > lo && x < hi) out.push_back(x);
    return out;
}

std::vector<double> w_b_breaks(double t) {
    std::vector<double> out{0.5};
    if (t > 0) {
        for (double c : in_open({1 / t, 1 - 1 / t, 1 - 1 / std::sqrt(t)}, 0, 1)) out.push_back(c);
        if (t >= 4) {
            const double r = std::sqrt(1 - 4 / t);
            for (double c : in_open({(1 - r) / 2, (1 + r) / 2}, 0, 1)) out.push_back(c);
        }
    }
    return out;
}

std::vector<double> w_a_breaks(double b, double t) {
    if (t <= 0) return {};
    return in_open({1 / (b * t), 1 / t, b < 1 ? 1 / ((1 - b) * t) : INFINITY}, 1 - b, 1);
}

}  // namespace

namespace {

// Integral over Delta = {0 < a,b <= 1, a+b > 1} of f(a,b). Both directions
// are taken in log coordinates (a = e^u, and 1-b = e^w on b > 1/2) so the
// 1/a growth near the corner (0,1) becomes smooth.
template <class F, class AB>
double integrate_delta(F f, const std::vector<double>& bbreaks, AB abreaks, const QuadratureSpec& q) {
    const double inner_tol = q.rel_tol * 1e-2;
    auto inner = [&](double b, double one_minus_b) {
        const double ulo = std::log(one_minus_b);
        std::vector<double> ub;
        for (double a : abreaks(b))
            if (a > 1 - b && a < 1) ub.push_back(std::log(a));
        return integrate_split([&](double u) { const double a = std::exp(u); return f(a, b) * a; }, ulo, 0,
                               ub, inner_tol, q.max_depth);
    };
    std::vector<double> lo_breaks, w_breaks;
    for (double b : bbreaks) {
        if (b > 0 && b < 0.5) lo_breaks.push_back(b);
        if (b > 0.5 && b < 1) w_breaks.push_back(std::log(1 - b));
    }
    constexpr double kWMin = -40;  // omits b within e^-40 of 1
    const double lower =
        integrate_split([&](double b) { return inner(b, 1 - b); }, 0, 0.5, lo_breaks, q.rel_tol, q.max_depth);
    const double upper = integrate_split(
        [&](double w) { const double c = std::exp(w); return inner(1 - c, c) * c; }, kWMin, std::log(0.5),
        w_breaks, q.rel_tol, q.max_depth);
    return lower + upper;
}

}  // namespace

WTailBreakdown w_tail_breakdown(double t, const QuadratureSpec& q) {
    if (!(t >= 0)) throw DomainError("tail needs t >= 0");
    if (!(q.rel_tol > 0)) throw InvalidInput("quadrature tolerance must be positive");
    WTailBreakdown out;
    double WTailBreakdown::*fields[] = {&WTailBreakdown::o1, &WTailBreakdown::o2,
                                        &WTailBreakdown::o3, &WTailBreakdown::o4,
                                        &WTailBreakdown::sl_long, &WTailBreakdown::sl_short};
    for (auto field : fields)
        out.*field = integrate_delta([&](double a, double b) { return w_phi(a, b, t).*field; }, w_b_breaks(t),
                                     [&](double b) { return w_a_breaks(b, t); }, q);
    return out;
}

double w_tail_quadrature(double t, const QuadratureSpec& q) {
    if (!(t >= 0)) throw DomainError("tail needs t >= 0");
    if (!(q.rel_tol > 0)) throw InvalidInput("quadrature tolerance must be positive");
    return integrate_delta([&](double a, double b) { return w_phi(a, b, t).total(); }, w_b_breaks(t),
                           [&](double b) { return w_a_breaks(b, t); }, q);
}

double w_tail(double t, TailSource src, const QuadratureSpec& q) {
    return src == TailSource::ClosedForm ? w_tail_closed_form(t) : w_tail_quadrature(t, q);
}

DensityValue w_density(double t, double h, bool allow_one_sided, TailSource src, bool normalized,
                       const QuadratureSpec& q) {
    if (!(t > 0)) throw DomainError("density needs t > 0");
    if (!(h > 0)) throw InvalidInput("step must be positive");
    const double scale = normalized ? 1 / w_total_mass() : 1.0;
    auto G = [&](double x) { return w_tail(x, src, q); };
    DensityValue d;
    for (double bp : tail_breakpoints()) {
        if (std::abs(t - bp) >= h) continue;
        if (!allow_one_sided)
            throw AmbiguityError("t is within h of a non-differentiability point");
        d.one_sided = true;
        d.left = -(G(bp) - G(bp - h)) / h * scale;
        d.right = -(G(bp + 2 * h) - G(bp + h)) / h * scale;
        d.value = 0.5 * (d.left + d.right);
        return d;
    }
    d.value = -(G(t + h) - G(t - h)) / (2 * h) * scale;
    d.left = d.right = d.value;
    return d;
}

double omega_cubic_root(int k, double t) {
    if (k < 0 || k > 2) throw InvalidInput("root index is 0, 1 or 2");
    const double c = 54 / (2 * t) - 1;
    if (!(t > 0) || c < -1 || c > 1) throw OutOfRegime("cubic roots are not all real for this t");
    return (2.0 / 3) * (std::cos(std::acos(c) / 3 - 2 * kPi * k / 3) + 1);
}

TailBounds omega_tail_bounds(double t, const QuadratureSpec& q) {
    if (!(t > 0)) throw DomainError("bounds need t > 0");
    TailBounds out;
    auto integrate_delta = [&](auto f, std::vector<double> bb, auto abreaks) {
        return slitgap::integrate_delta(f, bb, abreaks, q);
    };

    // Omega1 and Omega3 are shared exactly with the W tail
    out.o1 = integrate_delta([&](double a, double b) { return w_phi(a, b, t).o1; }, w_b_breaks(t),
                             [&](double b) { return w_a_breaks(b, t); });
    out.o3 = integrate_delta([&](double a, double b) { return w_phi(a, b, t).o3; }, w_b_breaks(t),
                             [&](double b) { return w_a_breaks(b, t); });

    // lower envelopes live on b < 1/t
    auto lower2 = [&](double a, double b) {
        const double c = 1 - b * t;
        return c > a ? std::log(c / a) / b : 0.0;
    };
    auto lower4 = [&](double a, double b) {
        return b < 1 / t ? (a - 1 + b) * (1 / b - t) / a : 0.0;
    };
    std::vector<double> bl = in_open({1 / t, 0.5 / t}, 0, 1);
    out.o2_lower = integrate_delta(lower2, bl, [&](double b) { return in_open({1 - b * t}, 1 - b, 1); });
    out.o4_lower = integrate_delta(lower4, bl, [&](double) { return std::vector<double>{}; });

    // upper envelope U = 2/(ab(1-b)) > t  <=>  a < 2/(t b (1-b))
    auto acut = [&](double b) { return b < 1 ? 2 / (t * b * (1 - b)) : INFINITY; };
    auto upper2 = [&](double a, double b) { return a < acut(b) ? -std::log(a) / b : 0.0; };
    auto upper4 = [&](double a, double b) { return a < acut(b) ? (a - 1 + b) / (a * b) : 0.0; };
    std::vector<double> bu{0.5};
    if (t >= 8) {
        const double r = std::sqrt(1 - 8 / t);
        for (double c : in_open({(1 - r) / 2, (1 + r) / 2}, 0, 1)) bu.push_back(c);
    }
    if (t >= 13.5)
        for (int k = 1; k <= 2; ++k)
            for (double c : in_open({omega_cubic_root(k, t)}, 0, 1)) bu.push_back(c);
    auto abu = [&](double b) { return in_open({acut(b)}, 1 - b, 1); };
    out.o2_upper = integrate_delta(upper2, bu, abu);
    out.o4_upper = integrate_delta(upper4, bu, abu);

    out.lower = out.o1 + out.o3 + out.o2_lower + out.o4_lower;
    out.upper = out.o1 + out.o3 + out.o2_upper + out.o4_upper;
    return out;
}

namespace {

// Length of {b in (1-a,1] : R(a,b,0,a/q) > t}, split into the b+alpha<=1
// part (C1) and the rest (C2).
void torsion_lengths(int q, double t, double a, double& c1, double& c2) {
    const double alpha = a / q;
    c1 = c2 = 0;
    const double lo = 1 - a;
    // C1: b + alpha <= 1, R = (1/a)/(b+alpha)
    const double hi1 = std::min(1.0, 1 - alpha);
    if (hi1 > lo) {
        const double cut = 1 / (a * t) - alpha;
        c1 = std::max(0.0, std::min(hi1, cut) - lo);
    }
    // C2: b + alpha > 1, R = (j/a)/(alpha - a + j b), monotone in b for fixed j
    const double lo2 = std::max(lo, 1 - alpha);
    if (!(1 > lo2)) return;
    const double c = 1 + a - alpha;
    if (a - alpha <= 0) {
        c2 = std::max(0.0, std::min(1.0, 1 / (a * t)) - lo2);
        return;
    }
    const long long j_lo = static_cast<long long>(std::floor(c / 1.0));
    const long long j_hi = static_cast<long long>(std::floor(c / lo2));
    for (long long j = std::max(1LL, j_lo); j <= j_hi; ++j) {
        // b range with floor(c/b) == j
        const double bl = std::max(lo2, c / static_cast<double>(j + 1));
        const double bh = std::min(1.0, c / static_cast<double>(j));
        if (!(bh > bl)) continue;
        const double cut = 1 / (a * t) + (a - alpha) / static_cast<double>(j);
        c2 += std::max(0.0, std::min(bh, cut) - bl);
    }
}

}  // namespace

TorsionTail torsion_tail_parts(int q, double t, const QuadratureSpec& qs) {
    if (q < 1) throw InvalidInput("q must be >= 1");
    if (!(t > q)) throw OutOfRegime("torsion tail regime needs t > q");
    if (!(1 - (4 / t) * (1 - 1.0 / q) > 0)) throw OutOfRegime("regime roots are complex");
    std::vector<double> breaks = in_open({1 / t, 0.5 / t, 2 / t, 4 / t, 1 / (t * (1 - 1.0 / q))}, 0, 1);
    TorsionTail out;
    out.c1 = integrate_split(
        [&](double a) {
            double c1, c2;
            torsion_lengths(q, t, a, c1, c2);
            return c1;
        },
        0, 1, breaks, qs.rel_tol, 40);
    out.c2 = integrate_split(
        [&](double a) {
            double c1, c2;
            torsion_lengths(q, t, a, c1, c2);
            return c2;
        },
        0, 1, breaks, qs.rel_tol, 40);
    return out;
}

double torsion_tail(int q, double t, const QuadratureSpec& qs) {
    return torsion_tail_parts(q, t, qs).total();
}

double fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& values) {
    if (t.size() != values.size()) throw InvalidInput("grid and values differ in length");
    if (t.size() < 5) throw InvalidInput("need at least 5 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0) || !(values[i] > 0)) throw DomainError("values must be positive");
        const double x = std::log(t[i]), y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(t.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<PieceMismatch> piece_mismatch_report(int points_per_piece, double tol) {
    const double edges[] = {0.0, 1.0, 2.0, kGoldenSq, 4.0};
    std::vector<PieceMismatch> out;
    for (int k = 0; k < 4; ++k) {
        PieceMismatch pm{k, edges[k], edges[k + 1], points_per_piece, 0, 0, true};
        for (int i = 0; i < points_per_piece; ++i) {
            const double t = edges[k] + (i + 0.5) * (edges[k + 1] - edges[k]) / points_per_piece;
            const double d = std::abs(tail_piece_value(k, t) - w_tail_quadrature(t));
            if (!(d <= pm.max_abs_diff)) {
                pm.max_abs_diff = d;
                pm.worst_t = t;
            }
        }
        pm.ok = pm.max_abs_diff <= tol;
        out.push_back(pm);
    }
    return out;
}

std::vector<ContinuityCheck> continuity_report(double tol) {
    std::vector<ContinuityCheck> out;
    int k = 0;
    for (double bp : tail_breakpoints()) {
        ContinuityCheck c;
        c.t = bp;
        c.left = tail_piece_value(k, bp);
        // right limit along bp + 10^-k; the last value is the estimate
        double r = 0;
        for (int e = 4; e <= 9; ++e) r = tail_piece_value(k + 1, bp + std::pow(10.0, -e));
        c.right = r;
        c.jump = std::abs(c.right - c.left);
        c.ok = c.jump <= tol;
        out.push_back(c);
        ++k;
    }
    return out;
}

}  // namespace slitgap
