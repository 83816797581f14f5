#pragma once

// Exact population counts for path classes.
//
// A path is a step sequence mixing refraction steps (+1 = one layer up,
// -1 = one layer down) and reflection steps (0 = bounce pair, no depth
// change).  A class (n, m) fixes n refraction and m reflection steps; the
// refraction entries must sum to -J so the walk nets J layers down to the
// receiver.  Raw class population is pure combinatorics:
//
//     raw(n, m) = C(n, (n-J)/2) * C(n+m, m)
//
// Two exclusion rules thin the raw population:
//
//  * absorption: if a proper prefix of the sequence sits at depth -J with
//    its displacement inside the receiver window [d, d+L] and at least one
//    refraction step follows, the receiver would already have captured the
//    ray; the sequence is "redundant".  Trailing reflection steps after the
//    final touchdown never retro-absorb (the minimal-refraction classes
//    n = J therefore have no redundant members).
//  * boundary: in the bounded-stack model a prefix depth > +J_bound walks
//    off the top of the stack.
//
// effective = raw - |absorbed  UNION  boundary-crossing|, evaluated by one
// dynamic program so doubly-excluded sequences are not subtracted twice.
// The DP runs once per (angle, boundary mode) over prefix states
// (a refractions, depth k, b reflections), recording every arrival at depth
// -J ("core" prefixes, i.e. sequences whose last refraction lands on the
// receiver level).  A complete admissible sequence is a core plus trailing
// reflections, so  good(n, m) = sum_{b <= m} core(n, b)  serves the whole
// class grid from one pass.

#include "winoc/bigint.hpp"
#include "winoc/errors.hpp"
#include "winoc/geometry.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace winoc {

// One path class: n refraction steps, m reflection steps.
struct PathClass {
    int n = 0;
    long m = 0;
};

// The exclusion breakdown of one class.  Fields satisfy
//   effective = raw - redundant - boundary_excluded   and   effective >= 0.
// boundary_excluded here is the *incremental* exclusion (crossers that were
// not already absorbed), which is what makes the identity and the
// non-negativity hold simultaneously.
struct ClassCount {
    bigint raw = 0;
    bigint redundant = 0;
    bigint boundary_excluded = 0;
    bigint effective = 0;
};

// ============================================================================
// raw combinatorics
// ============================================================================

// Number of up/down assignments of n refraction steps netting J layers down:
// C(n, (n-J)/2); zero when n < J or parity disagrees.
inline bigint refraction_combinations(int n, int J) {
    if (n < J || ((n - J) & 1))
        return 0;
    return binomial(n, (n - J) / 2);
}

// Raw class population: refraction assignments times reflection placements.
inline bigint class_count(int n, long m, int J) {
    if (m < 0)
        return 0;
    const bigint rc = refraction_combinations(n, J);
    if (rc == 0)
        return 0;
    return rc * binomial(n + m, m);
}

// ============================================================================
// grid counting engine
// ============================================================================

class CountGrid {
public:
    // sample/geom fix the window and J; J_bound empty = boundary-less model.
    // When prune_to_window is set, prefix states whose displacement already
    // passed the far window edge are dropped; they can only complete into
    // classes that overshoot the receiver, which the class ranges never emit.
    // The standalone per-class count helpers disable pruning so they stay
    // meaningful on arbitrary (even inadmissible) classes.
    CountGrid(const AngleSample& sample, const Geometry& geom, int n_max, long m_max,
              std::optional<int> J_bound, bool prune_to_window)
        : sample_(sample), J_(geom.J), d_(geom.d), L_(geom.L),
          n_max_(std::max(n_max, 0)), m_max_(std::max(m_max, 0L)) {
        bound_ = J_bound;
        prune_ = prune_to_window;
        run(geom);
    }

    // Sequences of class (n, m) surviving both exclusion rules.
    bigint good(int n, long m) const {
        if (n < J_ || ((n - J_) & 1) || m < 0)
            return 0;
        if (n > n_max_ || m > m_max_)
            throw computation_error("CountGrid::good: class outside grid caps");
        const auto& cum = core_cum_[n];
        if (cum.empty())
            return 0;
        const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(m), cum.size() - 1);
        return cum[idx];
    }

private:
    bool in_window(double refr, double refl) const {
        const double x = displacement(sample_, refr, refl);
        return x >= d_ && x <= d_ + L_;
    }

    bool past_window(double refr, double refl) const {
        return displacement(sample_, refr, refl) > d_ + L_;
    }

    // depth bounds of slice a: reachability to -J within n_max steps plus the
    // optional top boundary; k always shares parity with a
    int k_lo(int a) const { return std::max(-a, -J_ - (n_max_ - a)); }
    int k_hi(int a) const {
        int hi = std::min(a, -J_ + (n_max_ - a));
        if (bound_)
            hi = std::min(hi, *bound_);
        return hi;
    }

    void run(const Geometry& geom) {
        validate(geom);
        core_cum_.assign(n_max_ + 1, {});
        if (n_max_ < J_)
            return;

        // per-a reflection cap and in-window b interval, shared comparisons
        // with the oracle via displacement()
        std::vector<long> bcap(n_max_ + 1), win_lo(n_max_ + 1), win_hi(n_max_ + 1);
        long cap = m_max_;
        long wlo = m_max_ + 1, whi = m_max_;
        for (int a = 0; a <= n_max_; ++a) {
            if (prune_) {
                while (cap >= 0 && past_window(a, static_cast<double>(cap)))
                    --cap;
            }
            bcap[a] = cap;
            // largest b with disp <= d+L (for the trigger test; may exceed bcap
            // only in the unpruned mode, where they coincide anyway)
            while (whi >= 0 && past_window(a, static_cast<double>(whi)))
                --whi;
            // smallest b with disp >= d
            if (wlo > whi + 1)
                wlo = whi + 1;
            while (wlo > 0 && in_window(a, static_cast<double>(wlo - 1)))
                --wlo;
            win_lo[a] = wlo;
            win_hi[a] = whi;
        }

        // slice storage: rows are parity-consistent depths, columns are b
        auto rows_of = [&](int a) { return (k_hi(a) - k_lo(a)) / 2 + 1; };
        auto slice_index = [&](int a, int k, long b, long width) {
            return static_cast<std::size_t>((k - k_lo(a)) / 2) * static_cast<std::size_t>(width)
                 + static_cast<std::size_t>(b);
        };

        std::vector<bigint> cur, nxt;
        std::vector<std::vector<bigint>> cores(n_max_ + 1);

        if (k_lo(0) > 0 || k_hi(0) < 0)
            return; // start depth 0 not representable: nothing reaches -J
        const long width0 = bcap[0] + 1;
        cur.assign(static_cast<std::size_t>(rows_of(0)) * static_cast<std::size_t>(width0), bigint(0));
        cur[slice_index(0, 0, 0, width0)] = 1;

        for (int a = 0; a <= n_max_; ++a) {
            const long width = bcap[a] + 1;
            const int klo = k_lo(a), khi = k_hi(a);
            if (khi < klo)
                break;

            // append reflection steps inside the slice; a zero landing the
            // prefix at depth -J inside the window arms absorption, so it
            // must not continue into further refractions: drop it from the
            // live set (it still counts through the cores it already made)
            for (int k = klo; k <= khi; k += 2) {
                const std::size_t base = slice_index(a, k, 0, width);
                const bool receiver_row = (k == -J_);
                for (long b = 0; b + 1 < width; ++b) {
                    if (receiver_row && b + 1 >= win_lo[a] && b + 1 <= win_hi[a])
                        continue;
                    if (!cur[base + b].is_zero())
                        cur[base + b + 1] += cur[base + b];
                }
            }

            if (a == n_max_)
                break;

            // emit refraction steps into slice a+1
            const long width_next = bcap[a + 1] + 1;
            const int klo_n = k_lo(a + 1), khi_n = k_hi(a + 1);
            nxt.assign(static_cast<std::size_t>(std::max(rows_of(a + 1), 0)) * width_next, bigint(0));
            if (khi_n >= klo_n) {
                auto& core_row = cores[a + 1];
                for (int k = klo; k <= khi; k += 2) {
                    const std::size_t base = slice_index(a, k, 0, width);
                    for (int dk : {+1, -1}) {
                        const int k2 = k + dk;
                        if (k2 < klo_n || k2 > khi_n)
                            continue;
                        const bool lands_on_receiver = (k2 == -J_);
                        const std::size_t base2 = slice_index(a + 1, k2, 0, width_next);
                        const long bmax = std::min(bcap[a], bcap[a + 1]);
                        for (long b = 0; b <= bmax; ++b) {
                            const bigint& v = cur[base + b];
                            if (v.is_zero())
                                continue;
                            if (lands_on_receiver) {
                                if (core_row.empty())
                                    core_row.assign(static_cast<std::size_t>(width_next), bigint(0));
                                core_row[static_cast<std::size_t>(b)] += v;
                                // an in-window landing arms absorption: keep it
                                // out of the live set, exactly like the zero case
                                if (b >= win_lo[a + 1] && b <= win_hi[a + 1])
                                    continue;
                            }
                            nxt[base2 + b] += v;
                        }
                    }
                }
            }
            cur.swap(nxt);
        }
        harvest_cores(cores);
    }

    void harvest_cores(std::vector<std::vector<bigint>>& cores) {
        for (int n = 0; n <= n_max_; ++n) {
            auto& row = cores[n];
            if (row.empty())
                continue;
            for (std::size_t b = 1; b < row.size(); ++b)
                row[b] += row[b - 1];
            core_cum_[n] = std::move(row);
        }
    }

    AngleSample sample_;
    int J_;
    double d_, L_;
    int n_max_;
    long m_max_;
    std::optional<int> bound_;
    bool prune_ = false;
    std::vector<std::vector<bigint>> core_cum_; // per n: prefix sums of core counts over b
};

// ============================================================================
// per-class operations
// ============================================================================

// Sequences of the class with an absorbing proper prefix (boundary-less).
inline bigint redundant_count(const PathClass& c, const AngleSample& sample, const Geometry& geom) {
    const bigint raw = class_count(c.n, c.m, geom.J);
    if (raw == 0)
        return 0;
    CountGrid grid(sample, geom, c.n, c.m, std::nullopt, /*prune_to_window=*/false);
    return raw - grid.good(c.n, c.m);
}

// Sequences of the class whose refraction prefix sums exceed +J_bound at any
// point, ignoring absorption: closed form by the reflection principle (first
// touch of level J_bound+1 reflected to a walk netting -J - 2*(J_bound+1)),
// times the free reflection placements.
inline bigint boundary_excluded_count(const PathClass& c, int J_bound, int J) {
    if (J_bound < 0)
        throw invalid_config("J_bound: must be >= 0");
    if (c.n < J || ((c.n - J) & 1) || c.m < 0)
        return 0;
    const long ups = (c.n - J) / 2;
    const long reflected = ups - (static_cast<long>(J_bound) + 1);
    if (reflected < 0)
        return 0;
    return binomial(c.n, reflected) * binomial(c.n + c.m, c.m);
}

// Full exclusion breakdown of one class.  bounded = true uses geom.J_bound
// (which must then be present).
inline ClassCount effective_count(const PathClass& c, const AngleSample& sample,
                                  const Geometry& geom, bool bounded) {
    if (bounded && !geom.J_bound)
        throw invalid_config("geometry.J_bound: required for the bounded model");
    ClassCount out;
    out.raw = class_count(c.n, c.m, geom.J);
    if (out.raw == 0)
        return out;
    CountGrid free_grid(sample, geom, c.n, c.m, std::nullopt, false);
    const bigint good_free = free_grid.good(c.n, c.m);
    out.redundant = out.raw - good_free;
    if (bounded) {
        CountGrid bound_grid(sample, geom, c.n, c.m, geom.J_bound, false);
        const bigint good_bound = bound_grid.good(c.n, c.m);
        out.boundary_excluded = good_free - good_bound;
        out.effective = good_bound;
    } else {
        out.effective = good_free;
    }
    return out;
}

} // namespace winoc
