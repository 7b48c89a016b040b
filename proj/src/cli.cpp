#include "slitgap/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "slitgap/closed_form.hpp"
#include "slitgap/errors.hpp"
#include "slitgap/oracle.hpp"
#include "slitgap/report.hpp"

namespace slitgap {

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidInput(path + ":" + std::to_string(lineno) + ": empty key");
        std::replace(key.begin(), key.end(), '_', '-');
        out.emplace_back(key, value);
    }
    return out;
}

namespace {

std::vector<double> numbers(const std::string& s, std::size_t expect, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        try {
            v.push_back(std::stod(tok, &used));
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != tok.size()) throw InvalidInput(std::string("bad number in ") + what + ": '" + tok + "'");
    }
    if (v.size() != expect)
        throw InvalidInput(std::string(what) + " needs " + std::to_string(expect) + " comma-separated numbers");
    return v;
}

SurfaceMode parse_mode(const std::string& s) {
    if (s == "affine") return SurfaceMode::AffineOnly;
    if (s == "doubled") return SurfaceMode::DoubledSlit;
    throw InvalidInput("mode must be affine or doubled");
}

VDomain parse_vdomain(const std::string& s) {
    if (s == "parallelogram") return VDomain::Parallelogram;
    if (s == "box") return VDomain::Box;
    throw InvalidInput("v-domain must be parallelogram or box");
}

AffineLattice load_surface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open surface file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput("surface file is not valid JSON: " + std::string(e.what()));
    }
    return surface_from_json(j);
}

void check_unimodular(const AffineLattice& L) {
    if (std::abs(L.g.det() - 1) > 1e-9) throw DomainError("surface generator must have det 1");
}

// Output target: a file when --out is given, else the command's stream.
struct Sink {
    std::unique_ptr<std::ofstream> file;
    std::ostream* os;
    Sink(const std::string& path, std::ostream& fallback) : os(&fallback) {
        if (!path.empty()) {
            file = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file) throw InvalidInput("cannot write '" + path + "'");
            os = file.get();
        }
    }
    std::ostream& operator()() { return *os; }
};

std::string sibling_path(const std::string& path, const std::string& ext) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return path.substr(0, dot) + ext;
    return path + ext;
}

json options_json(const CLI::App* sub) {
    json o = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_name(false, true);
        if (name.empty() || name == "--help" || name == "-h,--help") continue;
        std::string key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
        if (key == "help") continue;
        if (opt->count() > 0) {
            const auto& r = opt->results();
            o[key] = r.empty() ? std::string("true") : r.back();
        } else {
            o[key] = opt->get_default_str();
        }
    }
    return o;
}

void check_format(const std::string& f) {
    if (f != "csv" && f != "json") throw InvalidInput("format must be csv or json");
}

// ---------------------------------------------------------------- gaps
struct GapsArgs {
    std::string surface, omega, vl, mode = "affine", out, format = "csv";
    double slope_max = 0;
    long long count = 0;
};

int cmd_gaps(const GapsArgs& a, const json& config, std::ostream& out) {
    check_format(a.format);
    const int sources = !a.surface.empty() + !a.omega.empty() + !a.vl.empty();
    if (sources != 1) throw InvalidInput("give exactly one of --surface, --omega, --vl");
    if ((a.slope_max > 0) == (a.count > 0)) throw InvalidInput("give exactly one of --slope-max, --count");
    const SurfaceMode mode = parse_mode(a.mode);
    AffineLattice L;
    if (!a.surface.empty()) {
        L = load_surface(a.surface);
        check_unimodular(L);
    } else if (!a.omega.empty()) {
        const auto v = numbers(a.omega, 4, "--omega");
        const OmegaCoords p{v[0], v[1], v[2], v[3]};
        require_valid(p);
        L = build_surface(p);
    } else {
        const auto v = numbers(a.vl, 3, "--vl");
        const VLCoords p{v[0], v[1], v[2]};
        require_valid(p);
        L = build_surface(p);
    }
    GapSeries gs;
    if (a.slope_max > 0) {
        gs = slopes_and_gaps(enumerate_strip(L, mode, a.slope_max));
    } else {
        double cap = 1;
        for (int i = 0; i < 64; ++i, cap *= 2) {
            gs = slopes_and_gaps(enumerate_strip(L, mode, cap));
            if (gs.count >= static_cast<std::size_t>(a.count)) break;
        }
        if (gs.count > static_cast<std::size_t>(a.count)) {
            gs.slopes.resize(static_cast<std::size_t>(a.count));
            gs = slopes_and_gaps_from_slopes(gs.slopes);
        }
    }
    const bool rational = has_rational_slope(L.v);
    Sink sink(a.out, out);
    if (a.format == "csv") {
        sink() << "index,slope,gap\n";
        for (std::size_t i = 0; i < gs.slopes.size(); ++i)
            sink() << i << ',' << csv_number(gs.slopes[i]) << ','
                   << (i == 0 ? std::string() : csv_number(gs.gaps[i - 1])) << '\n';
    } else {
        json res{{"surface", to_json(L)},
                 {"slopes", gs.slopes},
                 {"gaps", gs.gaps},
                 {"count", gs.count},
                 {"merged", gs.merged},
                 {"rational_slope_flag", rational}};
        sink() << make_report(config, res).dump(2) << '\n';
    }
    if (rational) std::cerr << "note: slit vector has (near-)rational slope\n";
    return kExitOk;
}

// ---------------------------------------------------------------- orbit
struct OrbitArgs {
    std::string start, omega, surface, engine = "formula", out, format = "csv";
    long long iters = 10;
};

SamplePoint parse_start(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw InvalidInput("start must look like kind:coords");
    const std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
    if (kind == "omega") {
        const auto v = numbers(rest, 4, "omega start");
        return OmegaCoords{v[0], v[1], v[2], v[3]};
    }
    if (kind == "vl") {
        const auto v = numbers(rest, 3, "vl start");
        return VLCoords{v[0], v[1], v[2]};
    }
    if (kind == "sa") {
        const auto v = numbers(rest, 4, "sa start");
        return WPoint{WPointSA{{v[0], v[1], v[2], v[3]}}};
    }
    if (kind == "sl") {
        const auto v = numbers(rest, 4, "sl start");
        return WPoint{WPointSL{{v[0], v[1]}, {v[2], v[3]}}};
    }
    throw InvalidInput("start kind must be omega, vl, sa or sl");
}

void require_valid_point(const SamplePoint& p) {
    if (auto* o = std::get_if<OmegaCoords>(&p)) return require_valid(*o);
    if (auto* v = std::get_if<VLCoords>(&p)) return require_valid(*v);
    require_valid(std::get<WPoint>(p));
}

struct Row {
    std::string kind;
    double a = NAN, b = NAN, s = NAN, alpha = NAN, v1 = NAN, v2 = NAN;
};

Row row_of(const SamplePoint& p) {
    if (auto* o = std::get_if<OmegaCoords>(&p)) return {"Omega", o->a, o->b, o->s, o->alpha};
    if (auto* v = std::get_if<VLCoords>(&p)) return {"VL", v->a, NAN, v->s, v->alpha};
    const WPoint& w = std::get<WPoint>(p);
    if (auto* sa = std::get_if<WPointSA>(&w))
        return {"SA", sa->omega.a, sa->omega.b, sa->omega.s, sa->omega.alpha};
    const auto& sl = std::get<WPointSL>(w);
    return {"SL", sl.delta.a, sl.delta.b, NAN, NAN, sl.v.x, sl.v.y};
}

std::string cell(double x) { return std::isnan(x) ? std::string() : csv_number(x); }

int cmd_orbit(const OrbitArgs& a, const json& config, std::ostream& out) {
    check_format(a.format);
    if (a.iters < 0) throw InvalidInput("--iters must be >= 0");
    const Engine engine = parse_engine(a.engine);
    const int sources = !a.start.empty() + !a.omega.empty() + !a.surface.empty();
    if (sources != 1) throw InvalidInput("give exactly one of --start, --omega, --surface");
    SamplePoint cur;
    if (!a.start.empty()) {
        cur = parse_start(a.start);
    } else if (!a.omega.empty()) {
        const auto v = numbers(a.omega, 4, "--omega");
        cur = OmegaCoords{v[0], v[1], v[2], v[3]};
    } else {
        const AffineLattice L = load_surface(a.surface);
        check_unimodular(L);
        if (engine == Engine::OracleDoubledSlit) {
            cur = w_recoordinatize(L);
        } else {
            const OmegaPoint op = recoordinatize_omega(L);
            cur = std::holds_alternative<OmegaCoords>(op) ? SamplePoint{std::get<OmegaCoords>(op)}
                                                          : SamplePoint{std::get<VLCoords>(op)};
        }
    }
    require_valid_point(cur);

    json rows = json::array();
    std::ostringstream csv;
    csv << "step,engine,return_time,kind,a,b,s,alpha,v1,v2\n";
    for (long long i = 0; i < a.iters; ++i) {
        OrbitStep st = orbit_step(cur, engine);
        const Row r = row_of(cur);
        csv << i << ',' << to_string(engine) << ',' << csv_number(st.return_time) << ',' << r.kind << ','
            << cell(r.a) << ',' << cell(r.b) << ',' << cell(r.s) << ',' << cell(r.alpha) << ','
            << cell(r.v1) << ',' << cell(r.v2) << '\n';
        rows.push_back({{"step", i}, {"return_time", st.return_time}, {"point", describe(cur)}});
        cur = std::move(st.next);
    }
    Sink sink(a.out, out);
    if (a.format == "csv")
        sink() << csv.str();
    else
        sink() << make_report(config, {{"engine", to_string(engine)},
                                       {"label", provenance_label(engine)},
                                       {"rows", rows}})
                      .dump(2)
               << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- mc-tail
struct McArgs {
    std::string measure = "haar-omega", engine = "formula", grid = "0:4:0.25", out, format = "csv",
                v_domain = "parallelogram";
    long long samples = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
};

int cmd_mc_tail(const McArgs& a, const json& config, std::ostream& out) {
    check_format(a.format);
    if (a.samples < 1000) throw InvalidInput("--samples must be >= 1000");
    if (a.workers < 1) throw InvalidInput("--workers must be >= 1");
    MeasureSpec m = parse_measure(a.measure);
    m.v_domain = parse_vdomain(a.v_domain);
    const Engine engine = parse_engine(a.engine);
    const auto grid = parse_grid(a.grid);
    const TailEstimate est = mc_tail(m, engine, grid, static_cast<std::size_t>(a.samples), a.seed, a.workers);
    const json report = make_report(config, to_json(est));
    Sink sink(a.out, out);
    if (a.format == "json") {
        sink() << report.dump(2) << '\n';
        return kExitOk;
    }
    sink() << "t,survival,ci,n_eff\n";
    for (std::size_t k = 0; k < grid.size(); ++k)
        sink() << csv_number(grid[k]) << ',' << csv_number(est.survival[k]) << ','
               << csv_number(est.ci_halfwidth[k]) << ',' << csv_number(est.n_eff) << '\n';
    if (!a.out.empty()) {
        std::ofstream side(sibling_path(a.out, ".json"), std::ios::binary);
        if (!side) throw InvalidInput("cannot write JSON sidecar");
        side << report.dump(2) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- closed-form
struct ClosedArgs {
    std::string grid = "0:4:0.25", component = "tail", source = "closed", out, format = "csv",
                mismatch;
    bool plot = false, normalized = false;
    double h = 1e-5, rel_tol = 1e-8;
};

int cmd_closed_form(const ClosedArgs& a, const json& config, std::ostream& out, std::ostream& err) {
    check_format(a.format);
    const auto grid = parse_grid(a.grid);
    if (a.plot && a.out.empty()) throw InvalidInput("--plot needs --out");
    if (!(a.h > 0)) throw InvalidInput("--h must be positive");
    TailSource src;
    if (a.source == "closed")
        src = TailSource::ClosedForm;
    else if (a.source == "quadrature")
        src = TailSource::Quadrature;
    else
        throw InvalidInput("--source must be closed or quadrature");
    QuadratureSpec qs;
    qs.rel_tol = a.rel_tol;
    if (!(qs.rel_tol > 0)) throw InvalidInput("--rel-tol must be positive");

    int torsion_q = 0;
    std::string comp = a.component;
    if (comp.rfind("torsion:", 0) == 0) {
        const auto v = numbers(comp.substr(8), 1, "torsion:q");
        if (v[0] != std::floor(v[0]) || v[0] < 1) throw InvalidInput("torsion:q needs integer q >= 1");
        torsion_q = static_cast<int>(v[0]);
        comp = "torsion";
    } else if (comp != "tail" && comp != "cdf" && comp != "density" && comp != "bounds") {
        throw InvalidInput("component must be tail, cdf, density, bounds or torsion:q");
    }

    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    const double G0 = w_total_mass();
    const double norm = a.normalized ? 1 / G0 : 1.0;
    std::size_t skipped = 0;
    if (comp == "tail" || comp == "cdf" || comp == "density") {
        header = {"t", "G", "F", "density", "density_left", "density_right"};
        for (double t : grid) {
            const double G = w_tail(t, src, qs);
            std::vector<double> r{t, G * norm, (G0 - G) * norm, NAN, NAN, NAN};
            if (t <= 0) {
                r[5] = -(w_tail(a.h, src, qs) - G) / a.h * norm;  // right-sided at 0
            } else {
                const DensityValue d = w_density(t, a.h, true, src, a.normalized, qs);
                if (d.one_sided) {
                    r[4] = d.left;
                    r[5] = d.right;
                } else {
                    r[3] = d.value;
                }
            }
            rows.push_back(r);
        }
    } else if (comp == "bounds") {
        header = {"t", "lower", "upper"};
        for (double t : grid) {
            if (!(t > 0)) {
                rows.push_back({t, NAN, NAN});
                ++skipped;
                continue;
            }
            const TailBounds tb = omega_tail_bounds(t, qs);
            rows.push_back({t, tb.lower, tb.upper});
        }
    } else {
        header = {"t", "tail", "c1", "c2"};
        for (double t : grid) {
            try {
                const TorsionTail tt = torsion_tail_parts(torsion_q, t, qs);
                rows.push_back({t, tt.total(), tt.c1, tt.c2});
            } catch (const OutOfRegime&) {
                rows.push_back({t, NAN, NAN, NAN});
                ++skipped;
            }
        }
    }
    if (skipped) err << "note: " << skipped << " grid points outside the component's regime left empty\n";

    Sink sink(a.out, out);
    if (a.format == "csv") {
        for (std::size_t i = 0; i < header.size(); ++i) sink() << (i ? "," : "") << header[i];
        sink() << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) sink() << (i ? "," : "") << cell(r[i]);
            sink() << '\n';
        }
    } else {
        json cols = json::object();
        for (std::size_t i = 0; i < header.size(); ++i) {
            json col = json::array();
            for (const auto& r : rows) col.push_back(std::isnan(r[i]) ? json(nullptr) : json(r[i]));
            cols[header[i]] = col;
        }
        sink() << make_report(config, {{"label", "paper-reproduction"}, {"columns", cols}}).dump(2) << '\n';
    }

    if (a.plot) {
        const std::string gp = sibling_path(a.out, ".gp");
        std::ofstream g(gp, std::ios::binary);
        if (!g) throw InvalidInput("cannot write plot script");
        std::string data = a.out;
        const auto slash = data.find_last_of('/');
        if (slash != std::string::npos) data = data.substr(slash + 1);
        g << "set datafile separator ','\n"
          << "set key autotitle columnhead\n"
          << "set xlabel 't'\n"
          << "set terminal pngcairo size 900,600\n"
          << "set output '" << sibling_path(data, ".png") << "'\n";
        if (comp == "bounds")
            g << "set logscale xy\nplot '" << data << "' using 1:2 with lines, '' using 1:3 with lines\n";
        else if (comp == "torsion")
            g << "plot '" << data << "' using 1:2 with lines\n";
        else if (comp == "density")
            g << "plot '" << data << "' using 1:4 with lines, '' using 1:5 with points, '' using 1:6 with points\n";
        else if (comp == "cdf")
            g << "plot '" << data << "' using 1:3 with lines\n";
        else
            g << "plot '" << data << "' using 1:2 with lines\n";
    }

    if (!a.mismatch.empty()) {
        std::ofstream mm(a.mismatch, std::ios::binary);
        if (!mm) throw InvalidInput("cannot write mismatch report");
        const auto pm = piece_mismatch_report();
        const auto cc = continuity_report();
        mm << make_report(config, {{"label", "paper-reproduction"},
                                   {"pieces", to_json(pm)},
                                   {"continuity", to_json(cc)}})
                  .dump(2)
           << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- difftest
struct DiffArgs {
    std::string region, mode = "affine", out, format = "json", v_domain = "parallelogram";
    long long samples = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    double threshold = 1e-6;
};

int cmd_difftest(const DiffArgs& a, const json& config, std::ostream& out) {
    check_format(a.format);
    const DiffRegion region = parse_region(a.region);
    const SurfaceMode mode = parse_mode(a.mode);
    if (a.samples < 1) throw InvalidInput("--samples must be >= 1");
    if (a.workers < 1) throw InvalidInput("--workers must be >= 1");
    const DiffReport rep = diff_test(region, static_cast<std::size_t>(a.samples), a.seed, mode, a.workers,
                                     parse_vdomain(a.v_domain), a.threshold);
    Sink sink(a.out, out);
    if (a.format == "json") {
        sink() << make_report(config, to_json(rep), counterexamples_json(rep)).dump(2) << '\n';
    } else {
        sink() << "kind,input,cell,formula,oracle,rel_err,anchor\n";
        for (const auto& c : rep.counterexamples) {
            std::string in;
            for (std::size_t i = 0; i < c.coords.size(); ++i) in += (i ? ";" : "") + csv_number(c.coords[i]);
            sink() << c.kind << ',' << in << ',' << c.cell << ',' << csv_number(c.formula) << ','
                   << csv_number(c.oracle) << ',' << csv_number(c.rel_err) << ',' << (c.anchor ? 1 : 0)
                   << '\n';
        }
    }
    if (rep.counterexample_count > 0 && !is_known_discrepancy(region, mode)) return kExitRegression;
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Slope-gap laboratory for doubled slit tori and affine lattices", "slitgap"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; flags given on the command line win");

    GapsArgs ga;
    auto* gaps = app.add_subcommand("gaps", "strip slopes and gaps of a surface");
    gaps->add_option("--surface", ga.surface, "surface JSON {g:[[..],[..]], v:[..]}");
    gaps->add_option("--omega", ga.omega, "Omega coordinates a,b,s,alpha");
    gaps->add_option("--vl", ga.vl, "vertical-lattice coordinates a,s,alpha");
    gaps->add_option("--mode", ga.mode, "affine | doubled")->capture_default_str();
    gaps->add_option("--slope-max", ga.slope_max, "largest slope to enumerate");
    gaps->add_option("--count", ga.count, "number of slopes to report");
    gaps->add_option("--out", ga.out, "output path (default stdout)");
    gaps->add_option("--format", ga.format, "csv | json")->capture_default_str();

    OrbitArgs oa;
    auto* orbit = app.add_subcommand("orbit", "iterate a return map");
    orbit->add_option("--start", oa.start, "omega:a,b,s,alpha | vl:a,s,alpha | sa:a,b,s,alpha | sl:a,b,v1,v2");
    orbit->add_option("--omega", oa.omega, "shorthand for --start omega:...");
    orbit->add_option("--surface", oa.surface, "surface JSON on the transversal");
    orbit->add_option("--engine", oa.engine, "formula | oracle-affine | oracle-doubled")->capture_default_str();
    orbit->add_option("--iters", oa.iters, "number of steps")->capture_default_str();
    orbit->add_option("--out", oa.out, "output path");
    orbit->add_option("--format", oa.format, "csv | json")->capture_default_str();

    McArgs ma;
    auto* mc = app.add_subcommand("mc-tail", "Monte Carlo survival function of the return time");
    mc->add_option("--measure", ma.measure,
                   "haar-omega | haar-w | torsion:q | periodic:a,alpha | periodic-point:a,b,s,alpha")
        ->capture_default_str();
    mc->add_option("--engine", ma.engine, "formula | oracle-affine | oracle-doubled")->capture_default_str();
    mc->add_option("--t-grid", ma.grid, "a:b:step")->capture_default_str();
    mc->add_option("--samples", ma.samples, "sample count (>= 1000)")->capture_default_str();
    mc->add_option("--seed", ma.seed, "RNG seed")->capture_default_str();
    mc->add_option("--workers", ma.workers, "worker threads")->capture_default_str();
    mc->add_option("--v-domain", ma.v_domain, "parallelogram | box")->capture_default_str();
    mc->add_option("--out", ma.out, "CSV path; a .json sidecar is written next to it");
    mc->add_option("--format", ma.format, "csv | json")->capture_default_str();

    ClosedArgs ca;
    auto* cf = app.add_subcommand("closed-form", "closed-form and quadrature tails, densities, bounds");
    cf->set_help_flag("--help", "Print this help message and exit");  // frees -h for the step size
    cf->add_option("--t-grid", ca.grid, "a:b:step")->capture_default_str();
    cf->add_option("--component", ca.component, "tail | cdf | density | bounds | torsion:q")->capture_default_str();
    cf->add_option("--source", ca.source, "closed | quadrature")->capture_default_str();
    cf->add_flag("--normalized", ca.normalized, "divide by the total mass G(0)");
    cf->add_option("--h", ca.h, "finite-difference step")->capture_default_str();
    cf->add_option("--rel-tol", ca.rel_tol, "quadrature relative tolerance")->capture_default_str();
    cf->add_option("--out", ca.out, "output path");
    cf->add_option("--format", ca.format, "csv | json")->capture_default_str();
    cf->add_flag("--plot", ca.plot, "also write a gnuplot script next to --out");
    cf->add_option("--mismatch-report", ca.mismatch, "write the per-piece closed-form vs quadrature report");

    DiffArgs da;
    auto* dt = app.add_subcommand("difftest", "formula vs brute-force oracle");
    dt->add_option("--region", da.region, "DeltaR | OmegaR | WslRho | WReturn")->required();
    dt->add_option("--samples", da.samples, "random inputs")->capture_default_str();
    dt->add_option("--seed", da.seed, "RNG seed")->capture_default_str();
    dt->add_option("--mode", da.mode, "affine | doubled")->capture_default_str();
    dt->add_option("--workers", da.workers, "worker threads")->capture_default_str();
    dt->add_option("--v-domain", da.v_domain, "parallelogram | box")->capture_default_str();
    dt->add_option("--threshold", da.threshold, "relative error counted as a counterexample")
        ->capture_default_str();
    dt->add_option("--out", da.out, "output path");
    dt->add_option("--format", da.format, "json | csv")->capture_default_str();

    std::vector<std::string> args = args_in;
    try {
        // pull --config out first so its keys can be spliced in before the user's flags
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                config_path = args[i + 1];
                args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
                break;
            }
            if (args[i].rfind("--config=", 0) == 0) {
                config_path = args[i].substr(9);
                args.erase(args.begin() + static_cast<long>(i));
                break;
            }
        }
        if (!config_path.empty() && !args.empty()) {
            CLI::App* sub = nullptr;
            for (auto* s : app.get_subcommands({})) if (s->get_name() == args[0]) sub = s;
            if (sub) {
                std::vector<std::string> extra;
                for (const auto& [k, v] : read_config_file(config_path)) {
                    const CLI::Option* opt = sub->get_option_no_throw("--" + k);
                    if (!opt) continue;
                    if (opt->get_expected_min() == 0) {
                        if (v == "true" || v == "1" || v == "yes") extra.push_back("--" + k);
                    } else {
                        extra.push_back("--" + k);
                        extra.push_back(v);
                    }
                }
                args.insert(args.begin() + 1, extra.begin(), extra.end());
            }
        }
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        json config{{"command", sub->get_name()}, {"config_file", config_path}, {"options", options_json(sub)}};
        if (sub == gaps) return cmd_gaps(ga, config, out);
        if (sub == orbit) return cmd_orbit(oa, config, out);
        if (sub == mc) return cmd_mc_tail(ma, config, out);
        if (sub == cf) return cmd_closed_form(ca, config, out, err);
        if (sub == dt) return cmd_difftest(da, config, out);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "invalid state: " << e.what() << '\n';
        return kExitInvalidState;
    } catch (const DegenerateInput& e) {
        err << "invalid state: " << e.what() << '\n';
        return kExitInvalidState;
    } catch (const NotOnTransversal& e) {
        err << "invalid state: " << e.what() << '\n';
        return kExitInvalidState;
    } catch (const OutOfRegime& e) {
        err << "invalid state: " << e.what() << '\n';
        return kExitInvalidState;
    } catch (const QuadratureError& e) {
        err << "invalid state: " << e.what() << " (achieved " << e.achieved_tolerance << ")\n";
        return kExitInvalidState;
    } catch (const AmbiguityError& e) {
        err << "invalid state: " << e.what() << '\n';
        return kExitInvalidState;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace slitgap
