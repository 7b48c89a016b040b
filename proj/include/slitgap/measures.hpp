#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "slitgap/transversal.hpp"

namespace slitgap {

using Rng = std::mt19937_64;

enum class Engine { Formula, OracleAffineOnly, OracleDoubledSlit };
const char* to_string(Engine e);
Engine parse_engine(const std::string& s);  // formula | oracle-affine | oracle-doubled

using SamplePoint = std::variant<OmegaCoords, VLCoords, WPoint>;
std::string describe(const SamplePoint& p);

// Fundamental domain for the SL affine vector: p_{a,b}[0,1)^2 or [0,a)x[0,1/a).
enum class VDomain { Parallelogram, Box };

enum class MeasureKind { HaarOmega, HaarW, Torsion, PeriodicOmega, PeriodicPoint };

struct MeasureSpec {
    MeasureKind kind = MeasureKind::HaarOmega;
    int q = 1;                     // Torsion
    double a = 1, alpha = 0.5;     // PeriodicOmega
    OmegaCoords periodic_start{1, 1, 0, 0.5};  // PeriodicPoint
    VDomain v_domain = VDomain::Parallelogram;
};
std::string to_string(const MeasureSpec& m);
// haar-omega | haar-w | torsion:q | periodic:a,alpha | periodic-point:a,b,s,alpha
MeasureSpec parse_measure(const std::string& s);
void validate(const MeasureSpec& m);

struct WeightedSample {
    SamplePoint point;
    double weight = 1;
};

// Uniform draws used by every sampler; (0,1] keeps logs and inverses finite.
double uniform_open_closed(Rng& rng);
double uniform_closed_open(Rng& rng);
DeltaCoords sample_delta_uniform(Rng& rng);
OmegaCoords sample_haar_omega_point(Rng& rng, double& weight);
VLCoords sample_vl_point(Rng& rng);
WPointSL sample_sl_point(Rng& rng, VDomain dom);

WeightedSample sample(const MeasureSpec& m, Rng& rng);

// The T-orbit of a periodic Omega point (throws if not periodic within 10^4 steps).
std::vector<OmegaPoint> periodic_orbit(const OmegaCoords& start);

struct TailEstimate {
    std::vector<double> t_grid;
    std::vector<double> survival;
    std::vector<double> ci_halfwidth;
    double n_eff = 0;
    std::size_t n = 0;
    std::size_t skipped = 0;  // degenerate samples (measure zero) left out
    std::uint64_t seed = 0;
    int workers = 1;
    Engine engine = Engine::Formula;
    MeasureSpec measure;
    double mass = 0;     // mean weight = total measure under unit densities
    double mass_se = 0;
};

TailEstimate mc_tail(const MeasureSpec& m, Engine engine, const std::vector<double>& t_grid,
                     std::size_t n, std::uint64_t seed, int workers = 1);

// Self-normalized Monte Carlo of weighted indicator masses.
struct MassEstimate {
    double value = 0, se = 0;
};
template <class Pred>
MassEstimate mc_mass(const MeasureSpec& m, std::size_t n, std::uint64_t seed, Pred pred);

struct Interval {
    double lo = 0, hi = 1;
    bool lo_closed = false, hi_closed = true;
    bool contains(double x) const {
        return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
    }
};
Interval parse_interval(const std::string& s);  // "(0,1]", "[1.5,2.5)"

double ergodic_average(const SamplePoint& start, Engine engine, std::size_t N, const Interval& I);

std::vector<double> parse_grid(const std::string& spec);  // a:b:step

// ---- template implementation ----
template <class Pred>
MassEstimate mc_mass(const MeasureSpec& m, std::size_t n, std::uint64_t seed, Pred pred) {
    std::seed_seq ss{seed, std::uint64_t{0}};
    Rng rng(ss);
    double sw = 0, sw2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        WeightedSample ws = sample(m, rng);
        const double y = pred(ws.point) ? ws.weight : 0.0;
        sw += y;
        sw2 += y * y;
    }
    const double mean = sw / static_cast<double>(n);
    const double var = sw2 / static_cast<double>(n) - mean * mean;
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

}  // namespace slitgap
