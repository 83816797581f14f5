#pragma once

// Channel gain: per-class gain evaluation and the three gain models
// (boundary-less, boundary-constrained, approximated).
//
// The total gain discretizes the launch angle into r right-endpoint samples
// theta_k = (k/r) * theta_bound, k = 1..r, and accumulates
//
//     H = sum_k  dtheta * G_t * G_r * sum_{admissible (n, m)} class_gain
//
// with dtheta = theta_bound / r.  Class gains span hundreds of dB, so each
// one is assembled in the log domain and only the per-class linear values are
// summed, compensated, in a fixed order (angle, then n, then m).  Angle
// samples are independent work units: they may be evaluated on any number of
// threads, but the reduce always runs in angle order, so results are
// bit-identical regardless of parallelism.

#include "winoc/bigint.hpp"
#include "winoc/counting.hpp"
#include "winoc/errors.hpp"
#include "winoc/geometry.hpp"
#include "winoc/materials.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace winoc {

// ============================================================================
// per-class gain
// ============================================================================

// Gain of one class of count identical-magnitude paths:
//     count * prefix * layer^(J-1) * pair^((n-J)/2) * refl^m
// evaluated as exp(log count + weighted log factors) so astronomically large
// counts and sub-underflow step products combine into a representable double.
inline double class_gain(const bigint& count, int n, long m, int J, const StepGainTable& t) {
    if (count <= 0)
        return 0.0;
    // 0 * (-inf) would poison the sum; zero exponents contribute exactly 0
    auto term = [](double k, double logv) { return k == 0.0 ? 0.0 : k * logv; };
    const double lg = log_bigint(count) + t.log_prefix + term(J - 1, t.log_layer)
                    + term((n - J) / 2, t.log_pair) + term(static_cast<double>(m), t.log_refl);
    return std::exp(lg);
}

// ============================================================================
// accumulation plumbing
// ============================================================================

// Kahan compensated accumulator; summation order is part of the contract.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct AngleContribution {
    double theta = 0.0;
    double partial = 0.0; // dtheta * G_t * G_r * (class-gain sum at this angle)
    bigint loops = 0;     // loop charge of this angle under the active cost model
    long classes = 0;     // number of (n, m) cells evaluated
};

struct ClassRecord {
    double theta = 0.0;
    int n = 0;
    long m = 0;
    bigint count;
    double gain = 0.0;
};

struct ChannelResult {
    double h_linear = 0.0;
    double h_db = -std::numeric_limits<double>::infinity();
    double theta_bound = 0.0;
    bigint loops_executed = 0;
    std::vector<AngleContribution> per_angle;
    std::vector<ClassRecord> per_class; // filled only when capture_classes is set
};

struct EvalOptions {
    SolveOptions solve;
    int threads = 1;
    bool capture_classes = false;
};

namespace detail {

struct AngleTask {
    double theta = 0.0;
    double weight = 0.0; // dtheta * G_t * G_r
    bool skipped = false;
};

// Evaluate every admissible class at one angle.  bound engages the
// boundary-constrained model (and its 2n - J_bound loop cost); min_n_only
// restricts to the minimum-refraction classes n = J, whose members can
// neither revisit the receiver level nor cross the boundary, so their
// effective count is the closed-form reflection placement C(J+m, m).
inline AngleContribution evaluate_angle(const Geometry& geom, const StackSpec& stack,
                                        const StepGainTable& table, const AngleTask& task,
                                        std::optional<int> bound, bool min_n_only,
                                        std::vector<ClassRecord>* capture) {
    AngleContribution out;
    out.theta = task.theta;
    if (task.skipped)
        return out;
    const AngleSample sample = angle_sample(stack, task.theta);
    ClassRange cr = class_range(sample, geom);
    if (min_n_only && !cr.rows.empty())
        cr.rows.resize(cr.rows.front().n == geom.J ? 1 : 0);
    if (cr.rows.empty())
        return out;

    std::optional<CountGrid> grid;
    if (!min_n_only) {
        int n_max = 0;
        long m_max = 0;
        for (const auto& row : cr.rows) {
            n_max = std::max(n_max, row.n);
            m_max = std::max(m_max, row.ref_max);
        }
        grid.emplace(sample, geom, n_max, m_max, bound, /*prune_to_window=*/true);
    }

    KahanSum sum;
    const long bound_charge = bound ? static_cast<long>(*bound) : 0;
    for (const auto& row : cr.rows) {
        for (long m = row.ref_min; m <= row.ref_max; ++m) {
            const bigint count = grid ? grid->good(row.n, m) : binomial(row.n + m, m);
            const double g = class_gain(count, row.n, m, geom.J, table);
            // zero-count cells contribute exactly nothing; skipping the add
            // keeps the compensated state identical across models that
            // enumerate different supersets of the same nonzero cells
            if (count > 0)
                sum.add(g);
            out.loops += bound ? (2L * row.n - bound_charge) : static_cast<long>(row.n);
            ++out.classes;
            if (capture)
                capture->push_back({task.theta, row.n, m, count, g});
        }
    }
    out.partial = task.weight * sum.value();
    return out;
}

// Run the angle tasks on `threads` workers (strided so the expensive
// small-angle grids spread out) and reduce in fixed angle order.
template <typename Eval>
inline void run_angles(std::vector<AngleContribution>& slots, int count, int threads, Eval&& eval) {
    threads = std::max(1, std::min(threads, count));
    if (threads <= 1) {
        for (int k = 0; k < count; ++k)
            slots[k] = eval(k);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int k = t; k < count; k += threads)
                slots[k] = eval(k);
        });
    for (auto& th : pool)
        th.join();
}

inline ChannelResult reduce_angles(std::vector<AngleContribution>&& slots,
                                   std::vector<std::vector<ClassRecord>>&& captures,
                                   double theta_bound, bool capture_classes) {
    ChannelResult res;
    res.theta_bound = theta_bound;
    KahanSum h;
    for (auto& slot : slots) {
        h.add(slot.partial);
        res.loops_executed += slot.loops;
    }
    res.h_linear = h.value();
    res.h_db = 10.0 * std::log10(res.h_linear);
    res.per_angle = std::move(slots);
    if (capture_classes)
        for (auto& c : captures)
            res.per_class.insert(res.per_class.end(), std::make_move_iterator(c.begin()),
                                 std::make_move_iterator(c.end()));
    return res;
}

} // namespace detail

// ============================================================================
// full models
// ============================================================================

// Total gain of the boundary-less (bounded = false) or boundary-constrained
// (bounded = true, geom.J_bound required) model.
inline ChannelResult total_gain(const Geometry& geom, const StackSpec& stack, bool bounded,
                                const EvalOptions& opt = {}) {
    validate(geom);
    validate(stack);
    if (bounded && !geom.J_bound)
        throw invalid_config("geometry.J_bound: required for the bounded model");
    if (opt.threads < 1)
        throw invalid_config("threads: must be >= 1");

    const StepGainTable table = step_gain_table(stack);
    const double theta_bound = resolve_theta_bound(geom, stack, opt.solve);
    const int r = geom.r;
    const double weight = (theta_bound / r) * geom.G_t * geom.G_r;
    const std::optional<int> bound = bounded ? geom.J_bound : std::nullopt;

    std::vector<AngleContribution> slots(r);
    std::vector<std::vector<ClassRecord>> captures(opt.capture_classes ? r : 0);
    detail::run_angles(slots, r, opt.threads, [&](int k) {
        detail::AngleTask task{theta_bound * (k + 1) / r, weight, false};
        return detail::evaluate_angle(geom, stack, table, task, bound, false,
                                      opt.capture_classes ? &captures[k] : nullptr);
    });
    return detail::reduce_angles(std::move(slots), std::move(captures), theta_bound,
                                 opt.capture_classes);
}

// Single-step gain ratio between one extra refraction pair and one extra
// reflection pair: T1*T2*T3 / ((1-T3)(1-T6)) * exp(2*lambda3*l3 - lambda2*l2
// - lambda1*l1).  Large values mean refraction-heavy classes are negligible,
// which is what licenses the minimum-refraction approximation.
inline double gain_ratio(const StackSpec& stack, const CoefficientSet& c) {
    const double denom = (1.0 - c.T[2]) * (1.0 - c.T[5]);
    if (!(denom > 0))
        throw computation_error("gain_ratio: reflection coefficient degenerates to 0");
    return c.T[0] * c.T[1] * c.T[2] / denom
         * std::exp(2.0 * stack.lambda3 * stack.l3 - stack.lambda2 * stack.l2
                    - stack.lambda1 * stack.l1);
}

// ============================================================================
// approximation model
// ============================================================================

struct ApproxConfig {
    double t_c = 0.0;            // channel coherence time [s]
    double v = 299792458.0;      // speed of light in vacuum [m/s]
    bool use_min_refraction = true;   // restrict classes to n = J
    bool use_coherence_cutoff = true; // drop angles below theta_t
};

// t_c = 0 is admitted as the degenerate "only the fastest path" limit, where
// theta_t collapses onto theta_bound.
inline void validate(const ApproxConfig& a) {
    if (!(a.t_c >= 0) || !std::isfinite(a.t_c))
        throw invalid_config("approx.t_c: must be a non-negative real (seconds)");
    if (!(a.v > 0) || !std::isfinite(a.v))
        throw invalid_config("approx.v: must be a positive real (m/s)");
}

struct TimingResult {
    double t_theta = 0.0; // arrival time of the reference class at theta_t
    double t_min = 0.0;   // arrival time of the reference class at theta_bound
    double theta_t = 0.0; // cutoff angle, clamped into [0, theta_bound]
    int n_bound = 0;      // reference class refraction count
    long m_bound = 0;     // reference class reflection count
};

// Arrival time of a class (n, m) launched at theta: the walk spends nearly
// all its flight in layer 3, crossing it n times and bouncing through it 2m+1
// times, each leg of slant length l3/tan(theta) scaled by the layer's
// refractive slowdown n3/v.
inline double arrival_time(const StackSpec& stack, double theta, int n, long m, double v) {
    check_theta(theta);
    if (!(theta > 0))
        throw degenerate_angle("arrival_time: horizontal path never arrives at theta = 0");
    return (2.0 * m + n + 1.0) * stack.l3 * stack.n3 / (v * std::tan(theta));
}

// Coherence-time cutoff angle.  reference_class defaults to the shallowest
// class at theta_bound: n = J with the largest admissible reflection count.
// By construction the reference class launched at theta_t arrives exactly at
// t_min + t_c; anything launched below theta_t arrives later and is dropped.
inline TimingResult theta_threshold(const Geometry& geom, const StackSpec& stack,
                                    const ApproxConfig& approx,
                                    std::optional<PathClass> reference_class = std::nullopt,
                                    const SolveOptions& solve = {}) {
    validate(geom);
    validate(stack);
    validate(approx);
    const double theta_bound = resolve_theta_bound(geom, stack, solve);

    TimingResult out;
    if (reference_class) {
        out.n_bound = reference_class->n;
        out.m_bound = reference_class->m;
    } else {
        out.n_bound = geom.J;
        const AngleSample sample = angle_sample(stack, theta_bound);
        const ReflectionRange rr = reflection_range(sample, geom.J, geom);
        out.m_bound = std::max(rr.ref_max, 0L);
    }

    const double tb = std::tan(theta_bound);
    const double crossings = 2.0 * out.m_bound + out.n_bound + 1.0;
    const double span = stack.n3 * crossings * stack.l3;
    out.t_min = span / (approx.v * tb);
    out.theta_t = std::atan(span * tb / (span + approx.v * approx.t_c * tb));
    out.theta_t = std::clamp(out.theta_t, 0.0, theta_bound);
    out.t_theta = out.t_min + approx.t_c;
    return out;
}

// Approximated total gain: keeps only the minimum-refraction classes (their
// counts are closed-form, no grid) and skips angles whose paths cannot
// arrive within the coherence time.  Either simplification can be disabled
// through the config flags.  Boundary-less accumulation and loop charges.
inline ChannelResult approx_total_gain(const Geometry& geom, const StackSpec& stack,
                                       const ApproxConfig& approx, const EvalOptions& opt = {}) {
    validate(geom);
    validate(stack);
    validate(approx);
    if (opt.threads < 1)
        throw invalid_config("threads: must be >= 1");

    const StepGainTable table = step_gain_table(stack);
    const double theta_bound = resolve_theta_bound(geom, stack, opt.solve);
    double theta_t = 0.0;
    if (approx.use_coherence_cutoff)
        theta_t = theta_threshold(geom, stack, approx, std::nullopt, opt.solve).theta_t;

    const int r = geom.r;
    const double weight = (theta_bound / r) * geom.G_t * geom.G_r;

    std::vector<AngleContribution> slots(r);
    std::vector<std::vector<ClassRecord>> captures(opt.capture_classes ? r : 0);
    detail::run_angles(slots, r, opt.threads, [&](int k) {
        const double theta = theta_bound * (k + 1) / r;
        detail::AngleTask task{theta, weight, theta < theta_t};
        return detail::evaluate_angle(geom, stack, table, task, std::nullopt,
                                      approx.use_min_refraction,
                                      opt.capture_classes ? &captures[k] : nullptr);
    });
    return detail::reduce_angles(std::move(slots), std::move(captures), theta_bound,
                                 opt.capture_classes);
}

} // namespace winoc
