#include "slitgap/measures.hpp"

#include <cstdio>
#include <sstream>
#include <thread>

#include "slitgap/errors.hpp"
#include "slitgap/oracle.hpp"

namespace slitgap {

const char* to_string(Engine e) {
    switch (e) {
        case Engine::Formula: return "formula";
        case Engine::OracleAffineOnly: return "oracle-affine";
        case Engine::OracleDoubledSlit: return "oracle-doubled";
    }
    return "?";
}

Engine parse_engine(const std::string& s) {
    if (s == "formula") return Engine::Formula;
    if (s == "oracle-affine" || s == "oracle") return Engine::OracleAffineOnly;
    if (s == "oracle-doubled") return Engine::OracleDoubledSlit;
    throw InvalidInput("unknown engine '" + s + "' (formula, oracle-affine, oracle-doubled)");
}

std::string describe(const SamplePoint& p) {
    if (auto* o = std::get_if<OmegaCoords>(&p)) return describe(OmegaPoint{*o});
    if (auto* v = std::get_if<VLCoords>(&p)) return describe(OmegaPoint{*v});
    return describe(std::get<WPoint>(p));
}

std::string to_string(const MeasureSpec& m) {
    char buf[200];
    switch (m.kind) {
        case MeasureKind::HaarOmega: return "haar-omega";
        case MeasureKind::HaarW:
            return m.v_domain == VDomain::Box ? "haar-w(box)" : "haar-w";
        case MeasureKind::Torsion: return "torsion:" + std::to_string(m.q);
        case MeasureKind::PeriodicOmega:
            std::snprintf(buf, sizeof buf, "periodic:%.17g,%.17g", m.a, m.alpha);
            return buf;
        case MeasureKind::PeriodicPoint:
            std::snprintf(buf, sizeof buf, "periodic-point:%.17g,%.17g,%.17g,%.17g",
                          m.periodic_start.a, m.periodic_start.b, m.periodic_start.s,
                          m.periodic_start.alpha);
            return buf;
    }
    return "?";
}

namespace {
std::vector<double> split_numbers(const std::string& s, char sep) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw InvalidInput("not a number: '" + tok + "'");
        }
        if (used != tok.size()) throw InvalidInput("not a number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}
}  // namespace

MeasureSpec parse_measure(const std::string& s) {
    MeasureSpec m;
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "haar-omega") {
        m.kind = MeasureKind::HaarOmega;
    } else if (head == "haar-w") {
        m.kind = MeasureKind::HaarW;
    } else if (head == "torsion") {
        m.kind = MeasureKind::Torsion;
        const auto v = split_numbers(tail, ',');
        if (v.size() != 1 || v[0] != std::floor(v[0])) throw InvalidInput("torsion:q needs integer q");
        m.q = static_cast<int>(v[0]);
    } else if (head == "periodic") {
        m.kind = MeasureKind::PeriodicOmega;
        const auto v = split_numbers(tail, ',');
        if (v.size() != 2) throw InvalidInput("periodic:a,alpha");
        m.a = v[0];
        m.alpha = v[1];
    } else if (head == "periodic-point") {
        m.kind = MeasureKind::PeriodicPoint;
        const auto v = split_numbers(tail, ',');
        if (v.size() != 4) throw InvalidInput("periodic-point:a,b,s,alpha");
        m.periodic_start = {v[0], v[1], v[2], v[3]};
    } else {
        throw InvalidInput("unknown measure '" + s + "'");
    }
    validate(m);
    return m;
}

void validate(const MeasureSpec& m) {
    switch (m.kind) {
        case MeasureKind::Torsion:
            if (m.q < 1) throw InvalidInput("torsion needs q >= 1");
            break;
        case MeasureKind::PeriodicOmega:
            // alpha = 0 would sit outside Omega with an infinite return time
            if (!(m.a > 0 && m.a <= 1 && m.alpha > 0 && m.alpha <= 1))
                throw InvalidInput("periodic measure needs 0<a<=1 and 0<alpha<=1");
            break;
        case MeasureKind::PeriodicPoint:
            if (!is_valid(m.periodic_start)) throw InvalidInput("periodic point is not in Omega");
            break;
        default: break;
    }
}

double uniform_closed_open(Rng& rng) {
    // 53 random bits, exactly reproducible across standard libraries
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
double uniform_open_closed(Rng& rng) { return 1.0 - uniform_closed_open(rng); }

DeltaCoords sample_delta_uniform(Rng& rng) {
    for (;;) {
        const double a = uniform_open_closed(rng), b = uniform_open_closed(rng);
        if (b > 1 - a) return {a, b};
    }
}

OmegaCoords sample_haar_omega_point(Rng& rng, double& weight) {
    const double a = uniform_open_closed(rng);
    const double alpha = uniform_open_closed(rng);
    const double b = 1 - a + a * uniform_open_closed(rng);
    const double s = uniform_closed_open(rng) / (a * b);
    // proposal density is b on the Omega box; Lebesgue target is 1
    weight = 1.0 / b;
    return {a, b, s, alpha};
}

VLCoords sample_vl_point(Rng& rng) {
    const double a = uniform_open_closed(rng);
    const double s = a * a * uniform_open_closed(rng);
    const double alpha = uniform_open_closed(rng);
    return {a, s, alpha};
}

WPointSL sample_sl_point(Rng& rng, VDomain dom) {
    const DeltaCoords d = sample_delta_uniform(rng);
    const double u1 = uniform_closed_open(rng), u2 = uniform_closed_open(rng);
    if (dom == VDomain::Box) return {d, {d.a * u1, u2 / d.a}};
    return {d, p_ab(d.a, d.b) * Vec2{u1, u2}};
}

std::vector<OmegaPoint> periodic_orbit(const OmegaCoords& start) {
    std::vector<OmegaPoint> orbit{start};
    OmegaPoint cur = start;
    for (int i = 0; i < 10000; ++i) {
        cur = omega_return_map(cur);
        if (auto* o = std::get_if<OmegaCoords>(&cur)) {
            if (std::abs(o->a - start.a) < 1e-9 && std::abs(o->b - start.b) < 1e-9 &&
                std::abs(o->s - start.s) < 1e-9 && std::abs(o->alpha - start.alpha) < 1e-9)
                return orbit;
        }
        orbit.push_back(cur);
    }
    throw InvalidInput("start point is not T-periodic within 10^4 steps");
}

WeightedSample sample(const MeasureSpec& m, Rng& rng) {
    switch (m.kind) {
        case MeasureKind::HaarOmega: {
            double w;
            const OmegaCoords p = sample_haar_omega_point(rng, w);
            return {p, w};
        }
        case MeasureKind::HaarW: {
            // equal-odds mixture; weights restore masses 1/2 (SL) and pi^2/6 (SA)
            if (uniform_closed_open(rng) < 0.5) return {WPoint{sample_sl_point(rng, m.v_domain)}, 1.0};
            double w;
            const OmegaCoords p = sample_haar_omega_point(rng, w);
            return {WPoint{WPointSA{p}}, 2.0 * w};
        }
        case MeasureKind::Torsion: {
            const DeltaCoords d = sample_delta_uniform(rng);
            return {OmegaCoords{d.a, d.b, 0.0, d.a / m.q}, 1.0};
        }
        case MeasureKind::PeriodicOmega: {
            const double s = m.a * m.a * uniform_open_closed(rng);
            return {VLCoords{m.a, s, m.alpha}, 1.0};
        }
        case MeasureKind::PeriodicPoint: {
            const auto orbit = periodic_orbit(m.periodic_start);
            const std::size_t k = static_cast<std::size_t>(rng() % orbit.size());
            if (auto* o = std::get_if<OmegaCoords>(&orbit[k])) return {*o, 1.0};
            return {std::get<VLCoords>(orbit[k]), 1.0};
        }
    }
    throw InvalidInput("bad measure");
}

namespace {

struct TailAcc {
    double sw = 0, sw2 = 0;
    std::vector<double> swy, sw2y;
    std::size_t count = 0, skipped = 0;
};

}  // namespace

TailEstimate mc_tail(const MeasureSpec& m, Engine engine, const std::vector<double>& t_grid,
                     std::size_t n, std::uint64_t seed, int workers) {
    if (n < 1000) throw InvalidInput("mc_tail needs n >= 1000");
    if (workers < 1) throw InvalidInput("workers must be >= 1");
    if (t_grid.empty()) throw InvalidInput("empty t grid");
    validate(m);

    // periodic orbits are computed once instead of per draw
    std::vector<OmegaPoint> orbit;
    if (m.kind == MeasureKind::PeriodicPoint) orbit = periodic_orbit(m.periodic_start);

    const std::size_t T = t_grid.size();
    std::vector<TailAcc> acc(static_cast<std::size_t>(workers));
    auto job = [&](int w) {
        const std::size_t W = static_cast<std::size_t>(workers);
        const std::size_t lo = n * static_cast<std::size_t>(w) / W;
        const std::size_t hi = n * static_cast<std::size_t>(w + 1) / W;
        std::seed_seq ss{seed, static_cast<std::uint64_t>(w)};
        Rng rng(ss);
        TailAcc& a = acc[static_cast<std::size_t>(w)];
        a.swy.assign(T, 0.0);
        a.sw2y.assign(T, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            WeightedSample ws;
            if (m.kind == MeasureKind::PeriodicPoint) {
                const auto& op = orbit[static_cast<std::size_t>(rng() % orbit.size())];
                ws.point = std::holds_alternative<OmegaCoords>(op)
                               ? SamplePoint{std::get<OmegaCoords>(op)}
                               : SamplePoint{std::get<VLCoords>(op)};
            } else {
                ws = sample(m, rng);
            }
            double R;
            try {
                R = return_time(ws.point, engine);
            } catch (const DegenerateInput&) {
                ++a.skipped;
                continue;
            }
            const double w2 = ws.weight * ws.weight;
            a.sw += ws.weight;
            a.sw2 += w2;
            ++a.count;
            for (std::size_t k = 0; k < T; ++k)
                if (R > t_grid[k]) {
                    a.swy[k] += ws.weight;
                    a.sw2y[k] += w2;
                }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(job, w);
    job(0);
    for (auto& t : pool) t.join();

    TailAcc tot;
    tot.swy.assign(T, 0.0);
    tot.sw2y.assign(T, 0.0);
    for (const auto& a : acc) {
        tot.sw += a.sw;
        tot.sw2 += a.sw2;
        tot.count += a.count;
        tot.skipped += a.skipped;
        for (std::size_t k = 0; k < T; ++k) {
            tot.swy[k] += a.swy[k];
            tot.sw2y[k] += a.sw2y[k];
        }
    }
    if (!(tot.sw > 0) || !std::isfinite(tot.sw)) throw EstimationError("degenerate total weight");

    TailEstimate est;
    est.t_grid = t_grid;
    est.n = n;
    est.skipped = tot.skipped;
    est.seed = seed;
    est.workers = workers;
    est.engine = engine;
    est.measure = m;
    est.n_eff = tot.sw * tot.sw / tot.sw2;
    const double N = static_cast<double>(tot.count);
    est.mass = tot.sw / N;
    est.mass_se = std::sqrt(std::max(0.0, tot.sw2 / N - est.mass * est.mass) / N);
    for (std::size_t k = 0; k < T; ++k) {
        const double S = tot.swy[k] / tot.sw;
        // delta method for a ratio of weighted sums, with y in {0,1}
        const double num = tot.sw2y[k] * (1 - 2 * S) + S * S * tot.sw2;
        const double se = std::sqrt(std::max(0.0, num)) / tot.sw;
        est.survival.push_back(S);
        est.ci_halfwidth.push_back(1.96 * se);
    }
    return est;
}

Interval parse_interval(const std::string& s) {
    if (s.size() < 5) throw InvalidInput("interval like (0,1] expected");
    Interval I;
    const char l = s.front(), r = s.back();
    if ((l != '(' && l != '[') || (r != ')' && r != ']')) throw InvalidInput("interval brackets");
    const auto v = split_numbers(s.substr(1, s.size() - 2), ',');
    if (v.size() != 2 || !(v[0] <= v[1])) throw InvalidInput("interval bounds");
    I.lo = v[0];
    I.hi = v[1];
    I.lo_closed = l == '[';
    I.hi_closed = r == ']';
    return I;
}

double ergodic_average(const SamplePoint& start, Engine engine, std::size_t N, const Interval& I) {
    if (N == 0) throw InvalidInput("N must be positive");
    SamplePoint cur = start;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < N; ++i) {
        OrbitStep st = orbit_step(cur, engine);
        if (I.contains(st.return_time)) ++hits;
        cur = std::move(st.next);
    }
    return static_cast<double>(hits) / static_cast<double>(N);
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto v = split_numbers(spec, ':');
    if (v.size() != 3) throw InvalidInput("grid must be a:b:step");
    const double a = v[0], b = v[1], h = v[2];
    if (!(h > 0) || !(b >= a) || !std::isfinite(a) || !std::isfinite(b) || a < 0)
        throw InvalidInput("grid needs 0 <= a <= b and step > 0");
    const double count = std::floor((b - a) / h + 1e-9);
    if (count > 1e7) throw InvalidInput("grid too large");
    std::vector<double> out;
    for (long long k = 0; k <= static_cast<long long>(count); ++k)
        out.push_back(a + static_cast<double>(k) * h);
    return out;
}

}  // namespace slitgap
