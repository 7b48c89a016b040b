#include "slitgap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "slitgap/errors.hpp"

namespace slitgap {

SlopeHit min_strip_slope(const AffineLattice& surface, HolonomyParts parts, double start_cap,
                         double ytol) {
    double cap = start_cap > 0 && std::isfinite(start_cap) ? start_cap : 4.0;
    for (int round = 0; round < 200; ++round, cap *= 2) {
        const Polygon tri{{{0, 0}, {1, 0}, {1, cap}}};
        SlopeHit best{INFINITY, {}};
        auto consider = [&](Vec2 w) {
            if (w.x > kStripTol && w.x <= 1 + kStripTol && w.y > ytol) {
                const double s = w.y / w.x;
                if (s <= cap && s < best.slope) best = {s, w};
            }
        };
        if (parts.primitive)
            for_each_candidate(surface.g, {0, 0}, tri, [&](long long m, long long n, Vec2 w) {
                if (std::gcd(m < 0 ? -m : m, n < 0 ? -n : n) == 1) consider(w);
            });
        if (parts.coset)
            for_each_candidate(surface.g, surface.v, tri,
                               [&](long long, long long, Vec2 w) { consider(w); });
        if (parts.neg_coset)
            for_each_candidate(surface.g, -surface.v, tri,
                               [&](long long, long long, Vec2 w) { consider(w); });
        if (std::isfinite(best.slope)) return best;
    }
    throw NotOnTransversal("no strip vector found below any slope cap");
}

bool on_transversal(const AffineLattice& surface, HolonomyParts parts, double tol) {
    Vec2 h;
    double alpha;
    if (parts.primitive && find_short_horizontal(surface.g, h, tol)) return true;
    if (parts.coset && find_horizontal_coset(surface, alpha, tol)) return true;
    if (parts.neg_coset && find_horizontal_coset({surface.g, -surface.v}, alpha, tol)) return true;
    return false;
}

double oracle_first_return(const AffineLattice& surface, HolonomyParts parts, double hint) {
    if (!on_transversal(surface, parts))
        throw NotOnTransversal("surface has no short horizontal vector in this holonomy set");
    return min_strip_slope(surface, parts, hint > 0 ? 2 * hint : 4.0).slope;
}

double oracle_first_return(const AffineLattice& surface, SurfaceMode mode, double hint) {
    return oracle_first_return(surface, parts_of(mode), hint);
}

std::vector<double> oracle_gap_sequence(const AffineLattice& start, HolonomyParts parts, int N) {
    if (!on_transversal(start, parts))
        throw NotOnTransversal("gap sequence start is off the transversal");
    std::vector<double> out;
    AffineLattice cur = start;
    double cap = 4.0;
    for (int i = 0; i < N; ++i) {
        // flowed copies carry rounding in y of order 1e-13; 1e-9 keeps the
        // vector that just became horizontal out of the next search
        const SlopeHit hit = min_strip_slope(cur, parts, cap, 1e-9);
        out.push_back(hit.slope);
        cur = horocycle_apply(hit.slope, cur);
        cur.g = lattice_reduce(cur.g);
        cur.v = reduce_to_fundamental(cur.g, cur.v);
        cap = std::max(4.0, 2 * hit.slope);
    }
    return out;
}

std::vector<double> oracle_gap_sequence(const AffineLattice& start, SurfaceMode mode, int N) {
    return oracle_gap_sequence(start, parts_of(mode), N);
}

HolonomyParts oracle_parts(const SamplePoint& p, Engine e) {
    const bool w = std::holds_alternative<WPoint>(p);
    if (e == Engine::OracleDoubledSlit) return {true, true, true};
    return {w, true, false};
}

namespace {

double formula_time(const SamplePoint& p) {
    if (auto* o = std::get_if<OmegaCoords>(&p)) return omega_return_time(*o);
    if (auto* v = std::get_if<VLCoords>(&p)) return omega_return_time(*v);
    return w_return_time(std::get<WPoint>(p));
}

AffineLattice surface_of(const SamplePoint& p) {
    if (auto* o = std::get_if<OmegaCoords>(&p)) return build_surface(*o);
    if (auto* v = std::get_if<VLCoords>(&p)) return build_surface(*v);
    return build_surface(std::get<WPoint>(p));
}

double default_cap(const SamplePoint& p) {
    if (auto* o = std::get_if<OmegaCoords>(&p)) return 4.0 / (o->a * o->b);
    if (auto* v = std::get_if<VLCoords>(&p)) return 4.0 * v->a / v->alpha;
    const WPoint& w = std::get<WPoint>(p);
    if (auto* sl = std::get_if<WPointSL>(&w)) return 4.0 / (sl->delta.a * sl->delta.b);
    const auto& o = std::get<WPointSA>(w).omega;
    return 4.0 / (o.a * o.b);
}

}  // namespace

ReturnObservation observe_return(const SamplePoint& p, Engine e) {
    ReturnObservation obs{p, e, 0, {}};
    if (e == Engine::Formula) {
        obs.return_time = formula_time(p);
        return obs;
    }
    double cap;
    try {
        cap = 2 * formula_time(p);
    } catch (const DegenerateInput&) {
        cap = default_cap(p);
    }
    const SlopeHit hit = min_strip_slope(surface_of(p), oracle_parts(p, e), cap);
    obs.return_time = hit.slope;
    obs.witness = hit.witness;
    return obs;
}

double return_time(const SamplePoint& p, Engine e) { return observe_return(p, e).return_time; }

OrbitStep orbit_step(const SamplePoint& p, Engine e) {
    const double R = return_time(p, e);
    if (std::holds_alternative<WPoint>(p))
        return {R, SamplePoint{w_flow_and_recoordinatize(std::get<WPoint>(p), R)}};
    const OmegaPoint op = std::holds_alternative<OmegaCoords>(p)
                              ? OmegaPoint{std::get<OmegaCoords>(p)}
                              : OmegaPoint{std::get<VLCoords>(p)};
    if (e == Engine::OracleDoubledSlit)
        return {R, SamplePoint{w_recoordinatize(horocycle_apply(R, build_surface(op)))}};
    const OmegaPoint next = omega_flow_and_recoordinatize(op, R);
    if (auto* o = std::get_if<OmegaCoords>(&next)) return {R, SamplePoint{*o}};
    return {R, SamplePoint{std::get<VLCoords>(next)}};
}

const char* to_string(DiffRegion r) {
    switch (r) {
        case DiffRegion::DeltaR: return "DeltaR";
        case DiffRegion::OmegaR: return "OmegaR";
        case DiffRegion::WslRho: return "WslRho";
        case DiffRegion::WReturn: return "WReturn";
    }
    return "?";
}

DiffRegion parse_region(const std::string& s) {
    if (s == "DeltaR") return DiffRegion::DeltaR;
    if (s == "OmegaR") return DiffRegion::OmegaR;
    if (s == "WslRho") return DiffRegion::WslRho;
    if (s == "WReturn") return DiffRegion::WReturn;
    throw InvalidInput("unknown region '" + s + "' (DeltaR, OmegaR, WslRho, WReturn)");
}

bool is_known_discrepancy(DiffRegion r, SurfaceMode mode) {
    if (r == DiffRegion::WslRho) return true;
    if (r == DiffRegion::WReturn) return mode == SurfaceMode::DoubledSlit;
    return false;
}

namespace {

struct Case {
    std::string kind;
    std::vector<double> coords;
    std::string cell;
    double formula = 0;
    AffineLattice surface;
    HolonomyParts parts;
    double cap = 4;
};

std::string jcell(const char* prefix, long long j) {
    return std::string(prefix) + ",j=" + std::to_string(j);
}

Case delta_case(const DeltaCoords& d) {
    Case c{"Delta", {d.a, d.b}, "Delta", bcz_return_time(d), {p_ab(d.a, d.b), {0, 0}},
           {true, false, false}};
    c.cap = 2 * c.formula;
    return c;
}

Case omega_case(const OmegaPoint& p, SurfaceMode mode) {
    Case c;
    const OmegaRegion r = classify_omega(p);
    if (auto* o = std::get_if<OmegaCoords>(&p)) {
        c.kind = "Omega";
        c.coords = {o->a, o->b, o->s, o->alpha};
        c.cell = to_string(r);
        if (r == OmegaRegion::O2 || r == OmegaRegion::O4)
            c.cell = jcell(to_string(r), nudged_floor((1 + o->a - o->alpha) / o->b));
    } else {
        const auto& v = std::get<VLCoords>(p);
        c.kind = "VL";
        c.coords = {v.a, v.s, v.alpha};
        c.cell = "VL";
    }
    c.formula = omega_return_time(p);
    c.surface = build_surface(p);
    c.parts = mode == SurfaceMode::AffineOnly ? HolonomyParts{false, true, false}
                                              : HolonomyParts{true, true, true};
    c.cap = 2 * c.formula;
    return c;
}

Case rho_case(double a, double b, double v1, double v2, SurfaceMode mode) {
    Case c;
    c.kind = "rho";
    c.coords = {a, b, v1, v2};
    c.cell = b + v1 <= 1 ? "b+v1<=1" : jcell("b+v1>1", nudged_floor((a + 1 - v1) / b));
    c.formula = rho_sl_to_sa(a, b, v1, v2);
    c.surface = {p_ab(a, b), {v1, v2}};
    c.parts = mode == SurfaceMode::AffineOnly ? HolonomyParts{false, true, false}
                                              : HolonomyParts{false, true, true};
    c.cap = c.formula > 0 ? 2 * c.formula : 4 / (a * b);
    return c;
}

Case w_case(const WPoint& w, SurfaceMode mode) {
    Case c;
    if (auto* sl = std::get_if<WPointSL>(&w)) {
        c.kind = "SL";
        c.coords = {sl->delta.a, sl->delta.b, sl->v.x, sl->v.y};
        c.cell = sl->delta.b + sl->v.x <= 1 ? "SL:b+v1<=1" : "SL:b+v1>1";
    } else {
        const auto& o = std::get<WPointSA>(w).omega;
        c.kind = "SA";
        c.coords = {o.a, o.b, o.s, o.alpha};
        c.cell = std::string("SA:") + to_string(classify_omega(o));
    }
    c.formula = w_return_time(w);
    c.surface = build_surface(w);
    c.parts = mode == SurfaceMode::AffineOnly ? HolonomyParts{true, true, false}
                                              : HolonomyParts{true, true, true};
    c.cap = 2 * c.formula;
    return c;
}

struct Partial {
    std::size_t samples = 0, failures = 0, skipped = 0;
    double max_abs = 0, max_rel = 0;
    std::vector<Counterexample> cex;
    std::map<std::string, CellStat> cells;
};

void run_case(Case c, double threshold, bool anchor, Partial& out) {
    const SlopeHit hit = min_strip_slope(c.surface, c.parts, c.cap);
    const double abs_err = std::abs(c.formula - hit.slope);
    const double rel = abs_err / std::abs(hit.slope);
    ++out.samples;
    out.max_abs = std::max(out.max_abs, abs_err);
    out.max_rel = std::max(out.max_rel, rel);
    CellStat& cs = out.cells[c.cell];
    ++cs.samples;
    if (rel > threshold) {
        ++cs.failures;
        ++out.failures;
        if (anchor || out.cex.size() < kMaxStoredCounterexamples)
            out.cex.push_back({c.kind, c.coords, c.cell, c.formula, hit.slope, rel, hit.witness,
                               anchor});
    }
}

Case draw_case(DiffRegion region, SurfaceMode mode, VDomain dom, std::size_t index, Rng& rng) {
    switch (region) {
        case DiffRegion::DeltaR: return delta_case(sample_delta_uniform(rng));
        case DiffRegion::OmegaR: {
            if (index % 20 == 19) return omega_case(OmegaPoint{sample_vl_point(rng)}, mode);
            double w;
            return omega_case(OmegaPoint{sample_haar_omega_point(rng, w)}, mode);
        }
        case DiffRegion::WslRho: {
            WPointSL sl = sample_sl_point(rng, dom);
            while (!(sl.v.x > 0)) sl = sample_sl_point(rng, dom);
            return rho_case(sl.delta.a, sl.delta.b, sl.v.x, sl.v.y, mode);
        }
        case DiffRegion::WReturn: {
            MeasureSpec m;
            m.kind = MeasureKind::HaarW;
            m.v_domain = dom;
            return w_case(std::get<WPoint>(sample(m, rng).point), mode);
        }
    }
    throw InvalidInput("bad region");
}

std::vector<Case> anchors(DiffRegion region, SurfaceMode mode) {
    std::vector<Case> out;
    switch (region) {
        case DiffRegion::DeltaR:
            out.push_back(delta_case({1, 1}));
            out.push_back(delta_case({0.5, 0.75}));
            break;
        case DiffRegion::OmegaR:
            out.push_back(omega_case(OmegaCoords{0.5, 1, 0.2, 0.75}, mode));
            out.push_back(omega_case(OmegaCoords{0.8, 0.5, 1, 0.3}, mode));
            out.push_back(omega_case(OmegaCoords{0.5, 0.6, 2, 0.9}, mode));
            out.push_back(omega_case(VLCoords{0.5, 0.2, 0.5}, mode));
            out.push_back(omega_case(OmegaCoords{1, 1, 0, 0.5}, mode));
            break;
        case DiffRegion::WslRho:
            out.push_back(rho_case(0.6, 0.5, 0.5, 0.8, mode));
            out.push_back(rho_case(0.6, 0.5, 0.3, 0.5, mode));
            out.push_back(rho_case(0.6, 0.9, 0.3, 0.5, mode));
            break;
        case DiffRegion::WReturn:
            out.push_back(w_case(WPointSA{{0.5, 1, 0.2, 0.75}}, mode));
            out.push_back(w_case(WPointSA{{0.5, 0.6, 2, 0.9}}, mode));
            out.push_back(w_case(WPointSL{{0.6, 0.5}, {0.5, 0.8}}, mode));
            break;
    }
    return out;
}

void merge(Partial& into, Partial&& p) {
    into.samples += p.samples;
    into.failures += p.failures;
    into.skipped += p.skipped;
    into.max_abs = std::max(into.max_abs, p.max_abs);
    into.max_rel = std::max(into.max_rel, p.max_rel);
    for (auto& c : p.cex) {
        if (!c.anchor && into.cex.size() >= kMaxStoredCounterexamples) break;
        into.cex.push_back(std::move(c));
    }
    for (auto& [k, v] : p.cells) {
        into.cells[k].samples += v.samples;
        into.cells[k].failures += v.failures;
    }
}

}  // namespace

DiffReport diff_test(DiffRegion region, std::size_t n, std::uint64_t seed, SurfaceMode mode,
                     int workers, VDomain v_domain, double threshold) {
    if (n < 1) throw InvalidInput("diff_test needs n >= 1");
    if (workers < 1) throw InvalidInput("workers must be >= 1");

    Partial total;
    std::size_t n_anchor = 0;
    for (Case& c : anchors(region, mode)) {
        run_case(std::move(c), threshold, true, total);
        ++n_anchor;
    }

    std::vector<Partial> parts(static_cast<std::size_t>(workers));
    auto job = [&](int w) {
        const std::size_t W = static_cast<std::size_t>(workers);
        const std::size_t lo = n * static_cast<std::size_t>(w) / W;
        const std::size_t hi = n * static_cast<std::size_t>(w + 1) / W;
        std::seed_seq ss{seed, static_cast<std::uint64_t>(w)};
        Rng rng(ss);
        Partial& out = parts[static_cast<std::size_t>(w)];
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                run_case(draw_case(region, mode, v_domain, i, rng), threshold, false, out);
            } catch (const DegenerateInput&) {
                ++out.skipped;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(job, w);
    job(0);
    for (auto& t : pool) t.join();
    for (auto& p : parts) merge(total, std::move(p));

    DiffReport rep;
    rep.region = region;
    rep.mode = mode;
    rep.v_domain = v_domain;
    rep.seed = seed;
    rep.workers = workers;
    rep.threshold = threshold;
    rep.samples = total.samples;
    rep.anchors = n_anchor;
    rep.skipped = total.skipped;
    rep.counterexample_count = total.failures;
    rep.max_abs_err = total.max_abs;
    rep.max_rel_err = total.max_rel;
    rep.counterexamples = std::move(total.cex);
    rep.cells = std::move(total.cells);
    return rep;
}

}  // namespace slitgap
