#pragma once

// Shared fixtures for the unit suite: the frozen reference configuration,
// a slow-but-obvious step-sequence enumerator used as the unit-level ground
// truth, and a deterministic random-stack generator.

#include "winoc/counting.hpp"
#include "winoc/geometry.hpp"
#include "winoc/materials.hpp"

#include <random>
#include <vector>

namespace testutil {

inline winoc::StackSpec reference_stack() {
    winoc::StackSpec s;
    s.l1 = 1e-6;
    s.l2 = 1e-6;
    s.l3 = 5e-4;
    s.n1 = 2.0;
    s.n2 = 1.96;
    s.n3 = 3.42;
    s.lambda1 = 2000;
    s.lambda2 = 200;
    s.lambda3 = 50;
    s.frequency = 1e12;
    return s;
}

// reference indices/thicknesses with uniform lambda = 100 /m: the stack the
// frozen step-gain constants were computed for
inline winoc::StackSpec lambda100_stack() {
    winoc::StackSpec s = reference_stack();
    s.lambda1 = s.lambda2 = s.lambda3 = 100;
    return s;
}

inline winoc::Geometry reference_geometry() {
    winoc::Geometry g;
    g.J = 2;
    g.J_bound = 2;
    g.d = 40e-6;
    g.L = 15e-6;
    g.G_t = 1;
    g.G_r = 1;
    g.r = 10;
    return g;
}

// A small geometry whose admissible classes fit comfortably inside
// exhaustive-enumeration caps at every sampled angle.
inline winoc::Geometry compact_geometry(int J = 1) {
    winoc::Geometry g;
    g.J = J;
    g.J_bound = 2;
    g.d = 2e-6;
    g.L = 1e-6;
    g.r = 2;
    return g;
}

inline winoc::StackSpec random_stack(std::mt19937& rng) {
    std::uniform_real_distribution<double> index(1.0, 4.0);
    std::uniform_real_distribution<double> thick(0.5e-6, 2e-6);
    std::uniform_real_distribution<double> si_thick(1e-4, 8e-4);
    std::uniform_real_distribution<double> atten(0.0, 3000.0);
    winoc::StackSpec s;
    s.n1 = index(rng);
    s.n2 = index(rng);
    s.n3 = std::max({s.n1, s.n2, index(rng)});
    s.l1 = thick(rng);
    s.l2 = thick(rng);
    s.l3 = si_thick(rng);
    s.lambda1 = atten(rng);
    s.lambda2 = atten(rng);
    s.lambda3 = atten(rng) / 10.0;
    s.frequency = 1e12;
    return s;
}

// ----------------------------------------------------------------------------
// Unit-level ground truth: iterate every step string over {-1, 0, +1} of a
// fixed length with a plain odometer (no pruning, no recursion tricks) and
// classify it with rule-by-rule checks.  Deliberately naive.
// ----------------------------------------------------------------------------

struct NaiveTally {
    winoc::bigint raw = 0;        // class members (n refractions summing to -J, m zeros)
    winoc::bigint redundant = 0;  // absorbing proper prefix followed by a refraction
    winoc::bigint crossing = 0;   // prefix depth exceeds J_bound (when bounded)
    winoc::bigint effective = 0;  // neither absorbed nor crossing
};

// Enumerate all sequences of exactly n +-1 steps and m zero steps.
inline NaiveTally naive_tally(int n, long m, int J, const winoc::AngleSample& sample,
                              double d, double L, std::optional<int> J_bound) {
    NaiveTally tally;
    const int len = n + static_cast<int>(m);
    std::vector<int> seq(len, -1); // odometer over {-1, 0, +1}
    while (true) {
        int ups = 0, downs = 0, zeros = 0;
        for (int s : seq)
            (s == 0 ? zeros : (s > 0 ? ups : downs))++;
        if (ups + downs == n && zeros == m && downs - ups == J) {
            tally.raw += 1;
            bool armed = false, redundant = false, crossing = false;
            int k = 0, a = 0, b = 0;
            for (int s : seq) {
                if (s == 0)
                    ++b;
                else {
                    if (armed)
                        redundant = true;
                    ++a;
                    k += s;
                }
                if (J_bound && k > *J_bound)
                    crossing = true;
                const double x = winoc::displacement(sample, a, b);
                if (k == -J && x >= d && x <= d + L)
                    armed = true;
            }
            if (redundant)
                tally.redundant += 1;
            if (crossing)
                tally.crossing += 1;
            if (!redundant && !crossing)
                tally.effective += 1;
        }
        // advance the odometer
        int i = 0;
        for (; i < len; ++i) {
            if (seq[i] < 1) {
                ++seq[i];
                break;
            }
            seq[i] = -1;
        }
        if (i == len)
            break;
    }
    return tally;
}

} // namespace testutil
