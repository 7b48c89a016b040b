#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace slitgap {

struct Vec2 {
    double x = 0, y = 0;
};

inline Vec2 operator+(Vec2 p, Vec2 q) { return {p.x + q.x, p.y + q.y}; }
inline Vec2 operator-(Vec2 p, Vec2 q) { return {p.x - q.x, p.y - q.y}; }
inline Vec2 operator-(Vec2 p) { return {-p.x, -p.y}; }
inline Vec2 operator*(double k, Vec2 p) { return {k * p.x, k * p.y}; }

// Row-major [[a11 a12] [a21 a22]]; columns are the lattice generators.
struct Mat2 {
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;

    double det() const { return a11 * a22 - a12 * a21; }
    Vec2 col(int i) const { return i == 0 ? Vec2{a11, a21} : Vec2{a12, a22}; }
    Mat2 inverse() const;  // throws InvalidInput if |det| < 1e-9
};

Vec2 operator*(const Mat2& g, Vec2 p);
Mat2 operator*(const Mat2& g, const Mat2& h);

Mat2 p_ab(double a, double b);          // [[a b] [0 1/a]]
Mat2 horocycle(double u);               // h_u
Mat2 geodesic(double t);                // g_t = diag(e^t, e^-t)
Mat2 renormalize(double R);             // gamma_R = diag(1/R, R)
Mat2 omega_generator(double a, double b, double s);  // h_s p_{a,b}
Mat2 vl_generator(double a, double s);               // h_s g_{log a}

struct AffineLattice {
    Mat2 g;
    Vec2 v;
};

enum class SurfaceMode { AffineOnly, DoubledSlit };

// Which pieces of the holonomy set to scan. SurfaceMode maps onto two of
// these; the others are used by oracles that need e.g. lattice + coset.
struct HolonomyParts {
    bool primitive = false;
    bool coset = false;
    bool neg_coset = false;
};
HolonomyParts parts_of(SurfaceMode mode);

struct GapSeries {
    std::vector<double> slopes;
    std::vector<double> gaps;
    std::size_t count = 0;
    std::size_t merged = 0;  // slopes collapsed by the 1e-12 dedup
};

inline constexpr double kStripTol = 1e-12;

Vec2 reduce_to_fundamental(const Mat2& g, Vec2 v);
AffineLattice reduce_to_fundamental(const AffineLattice& L);

// Convex polygon given by its vertices (any order around the boundary).
// The enumerator returns every point of g*Z^2 + offset inside a slightly
// padded copy; callers filter with their exact predicate.
struct Polygon {
    std::vector<Vec2> vertices;
};

// Visits integer coefficient pairs (m,n) whose image g(m,n)+offset may lie
// in poly. Ranges come from the inverse map; no fixed cutoff.
void for_each_candidate(const Mat2& g, Vec2 offset, const Polygon& poly,
                        const std::function<void(long long, long long, Vec2)>& visit);

std::vector<Vec2> enumerate_region(const AffineLattice& surface, HolonomyParts parts,
                                   const Polygon& poly,
                                   const std::function<bool(Vec2)>& keep);

bool in_strip(Vec2 w, double slope_max);

std::vector<Vec2> enumerate_strip(const AffineLattice& surface, SurfaceMode mode,
                                  double slope_max);
std::vector<Vec2> enumerate_strip(const AffineLattice& surface, HolonomyParts parts,
                                  double slope_max);
std::vector<Vec2> enumerate_primitive_strip(const Mat2& g, double slope_max);

GapSeries slopes_and_gaps(const std::vector<Vec2>& points);
GapSeries slopes_and_gaps_from_slopes(std::vector<double> slopes);

// First-quadrant holonomy with max-norm <= R; returns R^2-scaled slopes/gaps.
GapSeries renormalized_box_gaps(const AffineLattice& surface, SurfaceMode mode, double R);
// The same statistic computed on the gamma_R-image inside the rectangle
// (0,1] x [0,R^2]; used as the bridge counterpart.
GapSeries image_strip_gaps(const AffineLattice& surface, SurfaceMode mode, double R);
std::size_t count_box(const AffineLattice& surface, SurfaceMode mode, double R);

Vec2 horocycle_apply(double u, Vec2 w);
AffineLattice horocycle_apply(double u, const AffineLattice& L);

std::vector<Vec2> d_cover_holonomy(int d, const AffineLattice& surface, double slope_max);

// Lagrange-Gauss reduction of the columns; the lattice is unchanged as a set.
Mat2 lattice_reduce(const Mat2& g);

// True when the coefficient difference g^-1 (v' - v) is integral and g, g'
// generate the same lattice.
bool same_coset(const AffineLattice& L1, const AffineLattice& L2, double tol = 1e-9);

// Slit direction close to p/q with q <= max_den (reported, not enforced).
bool has_rational_slope(Vec2 v, int max_den = 1000, double tol = 1e-12);

long long ext_gcd(long long a, long long b, long long& x, long long& y);

}  // namespace slitgap
