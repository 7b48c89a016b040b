#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace slitgap {

double dilog(double x);

struct QuadratureSpec {
    double rel_tol = 1e-8;
    unsigned max_depth = 30;  // bisection depth per segment
};

inline const double kGoldenSq = (3.0 + 2.23606797749978969640917366873127624) / 2.0;
double w_total_mass();  // (3 + pi^2)/6

// Interior breakpoints of the piecewise tail: 1, 2, (3+sqrt5)/2, 4.
const std::array<double, 4>& tail_breakpoints();
int tail_piece(double t);                  // 0..4, closed on the right
double tail_piece_value(int piece, double t);  // piece formula at any t in its closure
double w_tail_closed_form(double t);

// Per-contribution values of the W tail (unnormalized Lebesgue mass of R > t).
struct WTailBreakdown {
    double o1 = 0, o2 = 0, o3 = 0, o4 = 0, sl_long = 0, sl_short = 0;
    double total() const { return o1 + o2 + o3 + o4 + sl_long + sl_short; }
};
WTailBreakdown w_tail_breakdown(double t, const QuadratureSpec& q = {});
double w_tail_quadrature(double t, const QuadratureSpec& q = {});

enum class TailSource { ClosedForm, Quadrature };
double w_tail(double t, TailSource src, const QuadratureSpec& q = {});

struct DensityValue {
    double value = 0;
    bool one_sided = false;
    double left = 0, right = 0;
};
DensityValue w_density(double t, double h = 1e-5, bool allow_one_sided = false,
                       TailSource src = TailSource::ClosedForm, bool normalized = false,
                       const QuadratureSpec& q = {});

struct TailBounds {
    double lower = 0, upper = 0;
    double o1 = 0, o3 = 0, o2_lower = 0, o2_upper = 0, o4_lower = 0, o4_upper = 0;
};
TailBounds omega_tail_bounds(double t, const QuadratureSpec& q = {});
// Roots of t b (1-b)^2 = 2 via the trigonometric formula, k in {0,1,2}.
double omega_cubic_root(int k, double t);

struct TorsionTail {
    double c1 = 0, c2 = 0;
    double total() const { return c1 + c2; }
};
// Unnormalized Lebesgue mass on Delta (total 1/2) of {R(a,b,0,a/q) > t}.
TorsionTail torsion_tail_parts(int q, double t, const QuadratureSpec& qs = {});
double torsion_tail(int q, double t, const QuadratureSpec& qs = {});

double fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& values);

struct PieceMismatch {
    int piece = 0;
    double lo = 0, hi = 0;
    int points = 0;
    double max_abs_diff = 0, worst_t = 0;
    bool ok = false;
};
std::vector<PieceMismatch> piece_mismatch_report(int points_per_piece = 50, double tol = 1e-6);

struct ContinuityCheck {
    double t = 0, left = 0, right = 0, jump = 0;
    bool ok = false;
};
std::vector<ContinuityCheck> continuity_report(double tol = 1e-6);

// Adaptive Gauss-Kronrod over [lo,hi] split at the given interior points.
double integrate_split(const std::function<double(double)>& f, double lo, double hi,
                       std::vector<double> breaks, double rel_tol, unsigned max_depth,
                       double* err_out = nullptr);

}  // namespace slitgap
