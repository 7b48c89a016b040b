#include "slitgap/report.hpp"

#include <charconv>
#include <cmath>

#include "slitgap/errors.hpp"

#ifndef SLITGAP_VERSION
#define SLITGAP_VERSION "0.0.0"
#endif

namespace slitgap {

const char* build_version() { return SLITGAP_VERSION; }

json versions_json() { return {{"spec", "1.0"}, {"build", build_version()}}; }

json counterexamples_json(const DiffReport& r) {
    json arr = json::array();
    for (const auto& c : r.counterexamples)
        arr.push_back({{"kind", c.kind},
                       {"input", c.coords},
                       {"cell", c.cell},
                       {"formula_value", c.formula},
                       {"oracle_value", c.oracle},
                       {"rel_err", c.rel_err},
                       {"oracle_witness", {c.witness.x, c.witness.y}},
                       {"anchor", c.anchor}});
    return arr;
}

json to_json(const DiffReport& r) {
    json cells = json::object();
    for (const auto& [k, v] : r.cells) cells[k] = {{"samples", v.samples}, {"failures", v.failures}};
    return {{"region", to_string(r.region)},
            {"mode", r.mode == SurfaceMode::AffineOnly ? "affine" : "doubled"},
            {"v_domain", r.v_domain == VDomain::Box ? "box" : "parallelogram"},
            {"seed", r.seed},
            {"workers", r.workers},
            {"threshold", r.threshold},
            {"samples", r.samples},
            {"anchors", r.anchors},
            {"skipped", r.skipped},
            {"counterexample_count", r.counterexample_count},
            {"stored_counterexamples", r.counterexamples.size()},
            {"max_abs_err", r.max_abs_err},
            {"max_rel_err", r.max_rel_err},
            {"known_discrepancy_region", is_known_discrepancy(r.region, r.mode)},
            {"cells", cells}};
}

json to_json(const TailEstimate& e) {
    return {{"t", e.t_grid},
            {"survival", e.survival},
            {"ci", e.ci_halfwidth},
            {"n_eff", e.n_eff},
            {"n", e.n},
            {"skipped", e.skipped},
            {"seed", e.seed},
            {"workers", e.workers},
            {"engine", to_string(e.engine)},
            {"measure", to_string(e.measure)},
            {"label", provenance_label(e.engine)},
            {"total_mass", e.mass},
            {"total_mass_se", e.mass_se}};
}

json to_json(const std::vector<PieceMismatch>& pm) {
    json arr = json::array();
    for (const auto& p : pm)
        arr.push_back({{"piece", p.piece},
                       {"lo", p.lo},
                       {"hi", p.hi},
                       {"points", p.points},
                       {"max_abs_diff", p.max_abs_diff},
                       {"worst_t", p.worst_t},
                       {"ok", p.ok}});
    return arr;
}

json to_json(const std::vector<ContinuityCheck>& cc) {
    json arr = json::array();
    for (const auto& c : cc)
        arr.push_back({{"t", c.t}, {"left", c.left}, {"right", c.right}, {"jump", c.jump}, {"ok", c.ok}});
    return arr;
}

json to_json(const AffineLattice& L) {
    return {{"g", {{L.g.a11, L.g.a12}, {L.g.a21, L.g.a22}}}, {"v", {L.v.x, L.v.y}}};
}

AffineLattice surface_from_json(const json& j) {
    try {
        const auto& g = j.at("g");
        const auto& v = j.at("v");
        if (!g.is_array() || g.size() != 2 || g[0].size() != 2 || g[1].size() != 2 || v.size() != 2)
            throw InvalidInput("surface needs g: 2x2 array and v: 2-array");
        AffineLattice L{{g[0][0].get<double>(), g[0][1].get<double>(), g[1][0].get<double>(),
                         g[1][1].get<double>()},
                        {v[0].get<double>(), v[1].get<double>()}};
        return L;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("bad surface JSON: ") + e.what());
    }
}

json make_report(const json& config, const json& results, const json& counterexamples) {
    return {{"config", config},
            {"results", results},
            {"counterexamples", counterexamples},
            {"versions", versions_json()}};
}

std::string csv_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

const char* provenance_label(Engine e) {
    return e == Engine::Formula ? "paper-reproduction" : "ground-truth";
}

}  // namespace slitgap
