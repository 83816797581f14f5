#pragma once

// Link geometry: launch-angle bound, per-angle step displacements, and the
// admissible (refraction count, reflection count) class ranges for a given
// transmitter/receiver placement.
//
// Conventions used throughout:
//   theta          launch angle measured in the dense material, 0 <= theta < pi/2
//   J              layer separation between transmitter and receiver
//   x_T(theta)     horizontal advance of one layer-crossing refraction step
//   x_R(theta)     horizontal advance of one in-layer bounce pair
//   launch_offset  advance of the initial partial segment before the walk
//   d, L           receiver window: the antenna occupies [d, d+L] horizontally
//
// A path class (n, m) = (refraction steps, reflection steps) reaches the
// receiver iff its total displacement
//     disp(n, m) = n*x_T + (m + n/2 + 1)*x_R + launch_offset
// lands inside [d, d+L].  The same displacement form, applied to a prefix's
// own step counts, locates intermediate touchdowns for the absorption rule.

#include "winoc/errors.hpp"
#include "winoc/materials.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace winoc {

// ============================================================================
// geometry description
// ============================================================================

struct Geometry {
    int J = 1;                   // layers between transmitter and receiver, >= 1
    std::optional<int> J_bound;  // layers to the top boundary; empty = boundary-less
    double d = 0;                // horizontal offset of the receiver window [m], >= 0
    double L = 0;                // receiver window length [m], > 0
    double G_t = 1;              // transmitter antenna gain, > 0
    double G_r = 1;              // receiver antenna gain, > 0
    int r = 10;                  // number of angle samples, >= 1
};

inline void validate(const Geometry& g) {
    if (g.J < 1)
        throw invalid_config("geometry.J: must be an integer >= 1");
    if (g.J_bound && *g.J_bound < 0)
        throw invalid_config("geometry.J_bound: must be an integer >= 0");
    if (!(g.d >= 0) || !std::isfinite(g.d))
        throw invalid_config("geometry.d: must be finite and >= 0");
    if (!(g.L > 0) || !std::isfinite(g.L))
        throw invalid_config("geometry.L: must be finite and > 0");
    if (!(g.G_t > 0) || !std::isfinite(g.G_t))
        throw invalid_config("geometry.G_t: must be finite and > 0");
    if (!(g.G_r > 0) || !std::isfinite(g.G_r))
        throw invalid_config("geometry.G_r: must be finite and > 0");
    if (g.r < 1)
        throw invalid_config("geometry.r: must satisfy r >= 1");
}

// Root-solver knobs shared by everything that needs the angle bound.
struct SolveOptions {
    int q = 0;                              // extra bounce-pair count in the bound equation, >= 0
    std::optional<double> theta_bound;      // explicit override, skips the solver
};

// ============================================================================
// per-angle step displacements
// ============================================================================

inline void check_theta(double theta) {
    if (!(theta >= 0) || !(theta < M_PI / 2) || !std::isfinite(theta))
        throw computation_error("theta: must satisfy 0 <= theta < pi/2");
}

// Horizontal advance of one full layer crossing (through materials 1 and 2).
inline double x_refract(const StackSpec& s, double theta) {
    check_theta(theta);
    const double sin_t = std::sin(theta);
    const double a1 = s.n1 * sin_t / s.n3;
    const double a2 = s.n2 * sin_t / s.n3;
    // a_i == 1 is reachable for validated stacks only at n_i == n3 with
    // sin(theta) rounding to 1; asin(1) = pi/2 keeps the advance finite
    // (huge), so only a_i > 1 is genuinely undefined.
    if (a1 > 1.0 || a2 > 1.0)
        throw computation_error("x_refract: refraction angle undefined (n_i sin(theta) > n3)");
    return s.l1 * std::tan(std::asin(a1)) + s.l2 * std::tan(std::asin(a2));
}

// Horizontal advance of one bounce pair inside a layer.
inline double x_reflect(const StackSpec& s, double theta) {
    check_theta(theta);
    return 2.0 * s.l2 * std::tan(theta);
}

// Advance of the initial partial segment (material 1 only).
inline double launch_offset(const StackSpec& s, double theta) {
    check_theta(theta);
    const double a1 = s.n1 * std::sin(theta) / s.n3;
    if (a1 > 1.0)
        throw computation_error("launch_offset: refraction angle undefined");
    return s.l1 * std::tan(std::asin(a1));
}

// Everything angle-dependent the counting and gain stages need, evaluated once.
struct AngleSample {
    double theta = 0;
    double x_T = 0;    // refraction-step advance
    double x_R = 0;    // reflection-step advance
    double offset = 0; // launch offset
};

inline AngleSample angle_sample(const StackSpec& s, double theta) {
    AngleSample a;
    a.theta = theta;
    a.x_T = x_refract(s, theta);
    a.x_R = x_reflect(s, theta);
    a.offset = launch_offset(s, theta);
    return a;
}

// Displacement of a partial or complete path with `refr` refraction steps and
// `refl` reflection steps.  Single definition shared by the class-range
// inversion, the counting DP and the enumeration oracle so window membership
// is decided by one floating-point expression everywhere.
inline double displacement(const AngleSample& a, double refr, double refl) {
    return refr * a.x_T + (refl + 0.5 * refr + 1.0) * a.x_R + a.offset;
}

// ============================================================================
// snap-guarded rounding
// ============================================================================

// floor/ceil of quantities assembled from floating-point geometry; values
// within 1e-9 relative of an integer are snapped to it first so window edges
// that are exact by construction don't fall to the wrong side.
inline double snap_to_int(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)))
        return r;
    return x;
}

inline long guarded_floor(double x) { return static_cast<long>(std::floor(snap_to_int(x))); }
inline long guarded_ceil(double x) { return static_cast<long>(std::ceil(snap_to_int(x))); }

// ============================================================================
// launch-angle bound
// ============================================================================

// Largest useful launch angle: the angle at which the shallowest surviving
// path (J + 2q crossings plus the mandatory bounce pairs) lands exactly at
// the far edge d + L.  Monotone bisection on
//   RHS(t) = (2q+J)*x_T(t) + (2q+J+2)*l2*tan(t) + 2*launch_offset(t) = d + L.
inline double solve_theta_bound(const Geometry& g, const StackSpec& s, int q = 0) {
    validate(g);
    validate(s);
    if (q < 0)
        throw invalid_config("solver.q: must be an integer >= 0");
    const double target = g.d + g.L;
    const int crossings = 2 * q + g.J;

    auto rhs = [&](double t) {
        return crossings * x_refract(s, t) + (crossings + 2) * s.l2 * std::tan(t)
             + 2.0 * launch_offset(s, t);
    };

    double lo = 0.0;
    // pi/2 is open; nextafter keeps tan() finite at the bracket end
    double hi = std::nextafter(M_PI / 2, 0.0);
    if (rhs(lo) > target)
        throw no_solution("solve_theta_bound: lower bracket already exceeds d + L");
    if (rhs(hi) < target)
        return hi; // no root below pi/2: report the largest representable angle

    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rhs(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double resolve_theta_bound(const Geometry& g, const StackSpec& s, const SolveOptions& opt) {
    if (opt.theta_bound) {
        if (!(*opt.theta_bound > 0) || !(*opt.theta_bound < M_PI / 2))
            throw invalid_config("solver.theta_bound: must lie in (0, pi/2)");
        return *opt.theta_bound;
    }
    return solve_theta_bound(g, s, opt.q);
}

// ============================================================================
// admissible class ranges
// ============================================================================

// Refraction-count range at one angle.  tra_max is the direct floor of the
// range formula; admissible n additionally satisfy n >= J and n == J (mod 2)
// (a net drop of J layers with ups and downs forces the parity).
struct RefractionRange {
    int tra_min = 0;
    int tra_max = -1;
    bool empty() const { return tra_max < tra_min; }
};

inline RefractionRange refraction_range(const AngleSample& a, const Geometry& g) {
    const double denom = 2.0 * a.x_T + a.x_R;
    if (!(denom > 0))
        throw degenerate_angle("refraction_range: displacements vanish at theta = 0");
    RefractionRange r;
    r.tra_min = g.J;
    const double raw = 2.0 * (g.d + g.L - 2.0 * a.offset - a.x_R) / denom;
    const long f = guarded_floor(raw);
    r.tra_max = static_cast<int>(f);
    return r;
}

// Walks the admissible n values (J, J+2, ...) of a refraction range.
inline std::vector<int> admissible_refractions(const RefractionRange& r, int J) {
    std::vector<int> out;
    for (int n = J; n <= r.tra_max; n += 2)
        out.push_back(n);
    return out;
}

// Reflection-count window for a fixed refraction count n: the exact
// ceil/floor inversion of  d <= disp(n, m) <= d + L  in m, with the lower
// bound clamped at zero.
struct ReflectionRange {
    long ref_min = 0;
    long ref_max = -1;
    long ref_min_raw = 0; // before the clamp; can be negative
    bool empty() const { return ref_max < ref_min; }
};

inline ReflectionRange reflection_range(const AngleSample& a, int n, const Geometry& g) {
    if (!(a.x_R > 0))
        throw degenerate_angle("reflection_range: x_R vanishes at theta = 0");
    ReflectionRange r;
    const double base = (g.d - n * a.x_T - a.offset) / a.x_R - 0.5 * n - 1.0;
    const double top = (g.d + g.L - n * a.x_T - a.offset) / a.x_R - 0.5 * n - 1.0;
    r.ref_min_raw = guarded_ceil(base);
    r.ref_max = guarded_floor(top);
    r.ref_min = std::max(0L, r.ref_min_raw);
    return r;
}

// Fully expanded class ranges at one angle: one row per admissible n.
struct ClassRange {
    double theta = 0;
    int tra_min = 0;
    int tra_max = -1;
    struct Row {
        int n;
        long ref_min;
        long ref_max;
    };
    std::vector<Row> rows; // only n values with a non-empty reflection window
};

inline ClassRange class_range(const AngleSample& a, const Geometry& g) {
    ClassRange cr;
    cr.theta = a.theta;
    const RefractionRange rr = refraction_range(a, g);
    cr.tra_min = rr.tra_min;
    cr.tra_max = rr.tra_max;
    if (rr.empty())
        return cr;
    for (int n = g.J; n <= rr.tra_max; n += 2) {
        const ReflectionRange mr = reflection_range(a, n, g);
        if (!mr.empty())
            cr.rows.push_back({n, mr.ref_min, mr.ref_max});
    }
    return cr;
}

} // namespace winoc
