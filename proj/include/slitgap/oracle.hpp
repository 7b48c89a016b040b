#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "slitgap/measures.hpp"

namespace slitgap {

struct SlopeHit {
    double slope = 0;
    Vec2 witness;
};

// Smallest positive strip slope of the chosen holonomy pieces. Vectors with
// y <= ytol count as horizontal and are skipped. The cap doubles from
// start_cap until something is found.
SlopeHit min_strip_slope(const AffineLattice& surface, HolonomyParts parts, double start_cap,
                         double ytol = 1e-12);

bool on_transversal(const AffineLattice& surface, HolonomyParts parts, double tol = 1e-9);

double oracle_first_return(const AffineLattice& surface, SurfaceMode mode, double hint = 0);
double oracle_first_return(const AffineLattice& surface, HolonomyParts parts, double hint = 0);

std::vector<double> oracle_gap_sequence(const AffineLattice& start, SurfaceMode mode, int N);
std::vector<double> oracle_gap_sequence(const AffineLattice& start, HolonomyParts parts, int N);

// Holonomy pieces an oracle engine scans for a given kind of point.
HolonomyParts oracle_parts(const SamplePoint& p, Engine e);

struct ReturnObservation {
    SamplePoint input;
    Engine engine = Engine::Formula;
    double return_time = 0;
    Vec2 witness;  // oracle engines only
};

ReturnObservation observe_return(const SamplePoint& p, Engine e);
double return_time(const SamplePoint& p, Engine e);

struct OrbitStep {
    double return_time;
    SamplePoint next;
};
OrbitStep orbit_step(const SamplePoint& p, Engine e);

enum class DiffRegion { DeltaR, OmegaR, WslRho, WReturn };
const char* to_string(DiffRegion r);
DiffRegion parse_region(const std::string& s);
// Regions where formula/oracle disagreement is a recorded finding rather
// than a regression.
bool is_known_discrepancy(DiffRegion r, SurfaceMode mode);

struct Counterexample {
    std::string kind;  // Delta, Omega, VL, rho, SL, SA
    std::vector<double> coords;
    std::string cell;
    double formula = 0, oracle = 0, rel_err = 0;
    Vec2 witness;
    bool anchor = false;
};

struct CellStat {
    std::size_t samples = 0, failures = 0;
};

struct DiffReport {
    DiffRegion region = DiffRegion::OmegaR;
    SurfaceMode mode = SurfaceMode::AffineOnly;
    VDomain v_domain = VDomain::Parallelogram;
    std::uint64_t seed = 0;
    int workers = 1;
    double threshold = 1e-6;
    std::size_t samples = 0, anchors = 0, counterexample_count = 0, skipped = 0;
    double max_abs_err = 0, max_rel_err = 0;
    std::vector<Counterexample> counterexamples;
    std::map<std::string, CellStat> cells;
};

inline constexpr std::size_t kMaxStoredCounterexamples = 1000;

DiffReport diff_test(DiffRegion region, std::size_t n, std::uint64_t seed, SurfaceMode mode,
                     int workers = 1, VDomain v_domain = VDomain::Parallelogram,
                     double threshold = 1e-6);

}  // namespace slitgap
