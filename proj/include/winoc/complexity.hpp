#pragma once

// Loop-count accounting for the two full gain models.
//
// Cost currency is "innermost loop iterations", not wall time: the
// boundary-less model charges n per (theta, n, m) cell (one pass over the
// refraction steps), the boundary-constrained model charges 2n - J_bound (a
// second pass that tracks the running depth against the boundary, minus the
// J_bound iterations it can skip).  Both counters walk the exact class grid
// that gain::total_gain iterates, so they can be cross-checked against its
// loops_executed field.
//
// The closed-form prediction of the difference replaces the per-angle
// reflection-window width with the ceiling estimate
//     alpha(theta) = ceil(L / (l2 tan(theta)) + 1)
// and the refraction-count ceiling with
//     beta(theta)  = floor(2 (d + L - 2 W - x_R) / (2 x_T + x_R))
// (the same expression the admissible-range module uses), and sums
//     1/2 * alpha * (-J_bound^2 + J_bound + beta^2 + beta)
// over the angle grid.  beta = J_bound - 1 makes the bracket vanish
// identically.  The ceiling estimate is approximate, so the prediction
// tracks the empirical difference only to a few percent.

#include "winoc/bigint.hpp"
#include "winoc/errors.hpp"
#include "winoc/geometry.hpp"
#include "winoc/materials.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace winoc {

struct ComplexityReport {
    bigint loop_bl = 0;              // boundary-less loop count
    bigint loop_bc = 0;              // boundary-constrained loop count
    bigint empirical_difference = 0; // loop_bc - loop_bl
    double predicted_difference = 0.0;
    double theta_bound = 0.0;
    bool negative_bc_terms = false;  // some cell charged 2n - J_bound < 0

    struct AngleTerm {
        double theta = 0.0;
        long alpha = 0;   // ceiling estimate of the reflection-window width
        long beta = 0;    // refraction-count ceiling at this angle
        double term = 0.0; // alpha * (-J_bound^2 + J_bound + beta^2 + beta)
    };
    std::vector<AngleTerm> per_angle;
};

inline ComplexityReport complexity_report(const Geometry& geom, const StackSpec& stack,
                                          const SolveOptions& solve = {}) {
    validate(geom);
    validate(stack);
    if (!geom.J_bound)
        throw invalid_config("geometry.J_bound: required for complexity accounting");
    const long jb = *geom.J_bound;

    ComplexityReport rep;
    rep.theta_bound = resolve_theta_bound(geom, stack, solve);
    const int r = geom.r;
    rep.per_angle.reserve(r);

    for (int k = 1; k <= r; ++k) {
        const double theta = rep.theta_bound * k / r;
        const AngleSample sample = angle_sample(stack, theta);
        const ClassRange cr = class_range(sample, geom);
        for (const auto& row : cr.rows) {
            const long cells = row.ref_max - row.ref_min + 1;
            rep.loop_bl += bigint(row.n) * cells;
            rep.loop_bc += bigint(2L * row.n - jb) * cells;
            if (2L * row.n - jb < 0)
                rep.negative_bc_terms = true;
        }

        ComplexityReport::AngleTerm term;
        term.theta = theta;
        term.alpha = guarded_ceil(geom.L / (stack.l2 * std::tan(theta)) + 1.0);
        term.beta = cr.tra_max;
        const double b = static_cast<double>(term.beta);
        term.term = static_cast<double>(term.alpha)
                  * (-static_cast<double>(jb) * jb + jb + b * b + b);
        rep.predicted_difference += 0.5 * term.term;
        rep.per_angle.push_back(term);
    }
    rep.empirical_difference = rep.loop_bc - rep.loop_bl;
    return rep;
}

inline std::pair<bigint, bigint> loop_counts(const Geometry& geom, const StackSpec& stack,
                                             const SolveOptions& solve = {}) {
    const ComplexityReport rep = complexity_report(geom, stack, solve);
    return {rep.loop_bl, rep.loop_bc};
}

inline double predicted_loop_difference(const Geometry& geom, const StackSpec& stack,
                                        const SolveOptions& solve = {}) {
    return complexity_report(geom, stack, solve).predicted_difference;
}

} // namespace winoc
