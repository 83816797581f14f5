#pragma once

// Brute-force ground truth.  Walks every step sequence over {-1, 0, +1}
// (depth-first, lexicographic with -1 < 0 < +1) up to small caps and applies
// the admissibility rules literally and geometrically:
//
//   * a sequence of class (n, m) is complete when its depth is -J and its
//     displacement lies inside the receiver window [d, d+L];
//   * a sequence is discarded as redundant when a proper prefix completed
//     (depth -J, displacement in-window) and a refraction step follows;
//   * in bounded mode any prefix depth above +J_bound discards the subtree.
//
// No binomials, no grid DP: discrepancies against `counting` isolate
// counting bugs.  The per-class gains and the total-gain integration reuse
// the exact expressions of `gain`, so when the caps cover every admissible
// class the oracle total is bit-identical to total_gain.

#include "winoc/bigint.hpp"
#include "winoc/counting.hpp"
#include "winoc/errors.hpp"
#include "winoc/gain.hpp"
#include "winoc/geometry.hpp"
#include "winoc/materials.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace winoc {

struct OracleCaps {
    int n_max = 0;
    long m_max = 0;
};

// 3^(n_max+m_max) sequences; keep exhaustive runs at desk scale.
inline void validate(const OracleCaps& caps) {
    if (caps.n_max < 0 || caps.m_max < 0)
        throw invalid_config("oracle caps: n_max and m_max must be >= 0");
    if (caps.n_max + caps.m_max > 20)
        throw cap_exceeded("oracle caps: n_max + m_max must not exceed 20");
}

struct OracleClass {
    int n = 0;
    long m = 0;
    bigint count;
    double gain = 0.0;
};

struct OracleReport {
    double theta = 0.0;
    OracleCaps caps;
    bool bounded = false;
    bigint total = 0;

    const bigint& count_at(int n, long m) const {
        static const bigint zero = 0;
        if (n < 0 || n > caps.n_max || m < 0 || m > caps.m_max)
            return zero;
        return counts_[static_cast<std::size_t>(n) * static_cast<std::size_t>(caps.m_max + 1)
                       + static_cast<std::size_t>(m)];
    }

    // Nonzero classes in (n, m) order with their summed gains; every member
    // of a class has the same magnitude, so the sum is count times the
    // per-sequence step product, evaluated exactly like `gain::class_gain`.
    std::vector<OracleClass> classes(int J, const StepGainTable& table) const {
        std::vector<OracleClass> out;
        for (int n = 0; n <= caps.n_max; ++n)
            for (long m = 0; m <= caps.m_max; ++m) {
                const bigint& c = count_at(n, m);
                if (c > 0)
                    out.push_back({n, m, c, class_gain(c, n, m, J, table)});
            }
        return out;
    }

    std::vector<bigint>& mutable_counts() { return counts_; }

private:
    std::vector<bigint> counts_;
};

namespace detail {

struct OracleWalker {
    const AngleSample& sample;
    const Geometry& geom;
    const OracleCaps& caps;
    std::optional<int> bound;
    std::vector<bigint>& counts;
    bigint& total;

    bool in_window(int a, long b) const {
        const double x = displacement(sample, a, static_cast<double>(b));
        return x >= geom.d && x <= geom.d + geom.L;
    }

    bool past_window(int a, long b) const {
        return displacement(sample, a, static_cast<double>(b)) > geom.d + geom.L;
    }

    // one node per placed step; steps tried in the order -1, 0, +1
    void walk(int k, int a, long b, bool armed) {
        for (int step = -1; step <= +1; ++step) {
            const int a2 = a + (step != 0);
            const long b2 = b + (step == 0);
            if (a2 > caps.n_max || b2 > caps.m_max)
                continue;
            if (step != 0 && armed)
                continue; // refraction after an in-window touchdown: redundant
            const int k2 = k + step;
            if (bound && k2 > *bound)
                continue; // walked off the top of the stack
            if (std::abs(k2 + geom.J) > caps.n_max - a2)
                continue; // receiver level no longer reachable
            if (past_window(a2, b2))
                continue; // displacement only grows: nothing below completes
            bool armed2 = armed;
            if (k2 == -geom.J && in_window(a2, b2)) {
                counts[static_cast<std::size_t>(a2) * static_cast<std::size_t>(caps.m_max + 1)
                       + static_cast<std::size_t>(b2)] += 1;
                total += 1;
                armed2 = true;
            }
            walk(k2, a2, b2, armed2);
        }
    }
};

} // namespace detail

// Exhaustive per-class effective counts at one angle.
inline OracleReport enumerate_paths(double theta, const Geometry& geom, const StackSpec& stack,
                                    const OracleCaps& caps, bool bounded) {
    validate(geom);
    validate(stack);
    validate(caps);
    if (bounded && !geom.J_bound)
        throw invalid_config("geometry.J_bound: required for the bounded model");
    check_theta(theta);
    if (!(theta > 0))
        throw degenerate_angle("enumerate_paths: theta = 0 has no displacement");

    OracleReport report;
    report.theta = theta;
    report.caps = caps;
    report.bounded = bounded;
    report.mutable_counts().assign(
        static_cast<std::size_t>(caps.n_max + 1) * static_cast<std::size_t>(caps.m_max + 1),
        bigint(0));

    const AngleSample sample = angle_sample(stack, theta);
    detail::OracleWalker walker{sample, geom, caps,
                                bounded ? geom.J_bound : std::nullopt,
                                report.mutable_counts(), report.total};
    walker.walk(0, 0, 0, false);
    return report;
}

// Oracle-counted total gain on the exact integration grid of total_gain:
// same angles, same class cells, same per-cell gain expression, same
// compensated summation order.  Equal to total_gain bit-for-bit whenever the
// caps cover all admissible classes of every sampled angle.
inline ChannelResult oracle_total_gain(const Geometry& geom, const StackSpec& stack, bool bounded,
                                       const OracleCaps& caps, const EvalOptions& opt = {}) {
    validate(geom);
    validate(stack);
    validate(caps);
    if (bounded && !geom.J_bound)
        throw invalid_config("geometry.J_bound: required for the bounded model");

    const StepGainTable table = step_gain_table(stack);
    const double theta_bound = resolve_theta_bound(geom, stack, opt.solve);
    const int r = geom.r;
    const double weight = (theta_bound / r) * geom.G_t * geom.G_r;

    std::vector<AngleContribution> slots(r);
    std::vector<std::vector<ClassRecord>> captures(opt.capture_classes ? r : 0);
    for (int k = 0; k < r; ++k) {
        const double theta = theta_bound * (k + 1) / r;
        const OracleReport report = enumerate_paths(theta, geom, stack, caps, bounded);
        const AngleSample sample = angle_sample(stack, theta);
        const ClassRange cr = class_range(sample, geom);

        AngleContribution& slot = slots[k];
        slot.theta = theta;
        KahanSum sum;
        const long bound_charge = bounded ? static_cast<long>(*geom.J_bound) : 0;
        for (const auto& row : cr.rows) {
            for (long m = row.ref_min; m <= row.ref_max; ++m) {
                const bigint& count = report.count_at(row.n, m);
                const double g = class_gain(count, row.n, m, geom.J, table);
                if (count > 0) // mirror evaluate_angle: zero cells leave the sum alone
                    sum.add(g);
                slot.loops += bounded ? (2L * row.n - bound_charge) : static_cast<long>(row.n);
                ++slot.classes;
                if (opt.capture_classes)
                    captures[k].push_back({theta, row.n, m, count, g});
            }
        }
        slot.partial = weight * sum.value();
    }
    return detail::reduce_angles(std::move(slots), std::move(captures), theta_bound,
                                 opt.capture_classes);
}

} // namespace winoc
