#pragma once

#include <string>
#include <variant>

#include "slitgap/geometry.hpp"

namespace slitgap {

inline constexpr double kDomainTol = 1e-12;

struct DeltaCoords {
    double a = 1, b = 1;
};

struct OmegaCoords {
    double a = 1, b = 1, s = 0, alpha = 0.5;
};

struct VLCoords {
    double a = 1, s = 1, alpha = 0.5;
};

using OmegaPoint = std::variant<OmegaCoords, VLCoords>;

enum class OmegaRegion { O1, O2, O3, O4, VL };
const char* to_string(OmegaRegion r);

struct WPointSL {
    DeltaCoords delta;
    Vec2 v;  // reduced mod p_{a,b} Z^2
};
struct WPointSA {
    OmegaCoords omega;
};
using WPoint = std::variant<WPointSL, WPointSA>;

bool is_valid(const DeltaCoords& d);
bool is_valid(const OmegaCoords& p);
bool is_valid(const VLCoords& p);
bool is_valid(const WPoint& w);
void require_valid(const DeltaCoords& d);
void require_valid(const OmegaCoords& p);
void require_valid(const VLCoords& p);
void require_valid(const WPoint& w);

// floor with the upward nudge used for all j-type indices
long long nudged_floor(double x);

double bcz_return_time(const DeltaCoords& d);
DeltaCoords bcz_return_map(const DeltaCoords& d);

OmegaRegion classify_omega(const OmegaCoords& p);
OmegaRegion classify_omega(const OmegaPoint& p);

// Which Omega4 numerator to use: with or without the s*a term.
// Only the differential test uses DropSa.
enum class Omega4Variant { KeepSa, DropSa };

double omega_return_time(const OmegaCoords& p, Omega4Variant v = Omega4Variant::KeepSa);
double omega_return_time(const VLCoords& p);
double omega_return_time(const OmegaPoint& p);

AffineLattice build_surface(const OmegaCoords& p);
AffineLattice build_surface(const VLCoords& p);
AffineLattice build_surface(const OmegaPoint& p);
AffineLattice build_surface(const WPoint& w);

OmegaPoint recoordinatize_omega(const AffineLattice& L);
OmegaPoint omega_return_map(const OmegaPoint& p);
// Flow by an externally supplied time (used by oracle-driven orbits).
OmegaPoint omega_flow_and_recoordinatize(const OmegaPoint& p, double time);

double rho_sl_to_sa(double a, double b, double v1, double v2);

double w_return_time(const WPoint& w);
WPoint w_return_map(const WPoint& w);
// Reclassify an arbitrary surface that sits on the W section.
WPoint w_recoordinatize(const AffineLattice& L);
WPoint w_flow_and_recoordinatize(const WPoint& w, double time);

// Short primitive lattice vector with |y| <= tol and x in (0,1], if any.
bool find_short_horizontal(const Mat2& g, Vec2& out, double tol = 1e-9);
// Horizontal vector of g Z^2 + v with x in (0,1] and smallest x, if any.
bool find_horizontal_coset(const AffineLattice& L, double& alpha, double tol = 1e-9);

std::string describe(const OmegaPoint& p);
std::string describe(const WPoint& w);

}  // namespace slitgap
