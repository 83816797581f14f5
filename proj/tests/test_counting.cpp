#include "winoc/counting.hpp"
#include "winoc/errors.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <vector>

using namespace winoc;
using testutil::naive_tally;
using testutil::NaiveTally;
using testutil::reference_stack;

namespace {

Geometry window_geometry(int J, double d, double L, std::optional<int> J_bound) {
    Geometry g;
    g.J = J;
    g.J_bound = J_bound;
    g.d = d;
    g.L = L;
    g.r = 1;
    return g;
}

} // namespace

TEST_CASE("raw combinatorics: small closed forms") {
    CHECK(refraction_combinations(3, 1) == 3);
    CHECK(refraction_combinations(4, 2) == 4);
    CHECK(refraction_combinations(1, 1) == 1);
    CHECK(refraction_combinations(2, 1) == 0); // parity mismatch
    CHECK(refraction_combinations(1, 3) == 0); // too few steps
    CHECK(class_count(1, 2, 1) == 3);
    CHECK(class_count(3, 1, 1) == 12);
    CHECK(class_count(3, 0, 1) == 3);
    CHECK(class_count(2, 5, 1) == 0);
    CHECK(class_count(3, -1, 1) == 0);
    CHECK(binomial(40, 20) == bigint("137846528820"));
}

TEST_CASE("raw class population equals brute-force interleaving count") {
    const AngleSample a = angle_sample(reference_stack(), 0.3);
    for (int J : {1, 2})
        for (int n = J; n <= 6; n += 2)
            for (long m = 0; n + m <= 8; ++m) {
                const NaiveTally t = naive_tally(n, m, J, a, 0.0, 1.0, std::nullopt);
                CHECK(t.raw == class_count(n, m, J));
            }
}

TEST_CASE("absorption: worked three-step example") {
    const AngleSample a = angle_sample(reference_stack(), 0.5);
    // full window: every touchdown at depth -1 arms absorption.  Of the three
    // sequences netting one layer down, the two that touch down first and
    // refract again are redundant.
    const Geometry full = window_geometry(1, 0.0, 1.0, std::nullopt);
    CHECK(redundant_count({3, 0}, a, full) == 2);
    // window far away: nothing arms, nothing is redundant
    const Geometry empty = window_geometry(1, 1e3, 1.0, std::nullopt);
    CHECK(redundant_count({3, 0}, a, empty) == 0);
    // minimal-refraction classes have no proper prefix at the receiver depth
    // followed by a refraction
    CHECK(redundant_count({1, 5}, a, full) == 0);
}

TEST_CASE("boundary crossing: closed form matches brute force") {
    const AngleSample a = angle_sample(reference_stack(), 0.5);
    CHECK(boundary_excluded_count({3, 0}, 0, 1) == 1);
    CHECK(boundary_excluded_count({3, 2}, 0, 1) == 10);
    CHECK(boundary_excluded_count({3, 0}, 1, 1) == 0); // can't reach level 2
    CHECK_THROWS_AS(boundary_excluded_count({3, 0}, -1, 1), invalid_config);
    for (int J : {1, 2})
        for (int jb : {0, 1, 2})
            for (int n = J; n <= 7; n += 2)
                for (long m = 0; m <= 3; ++m) {
                    const NaiveTally t =
                        naive_tally(n, m, J, a, /*unreachable window*/ 1e3, 1.0, jb);
                    CHECK(boundary_excluded_count({n, m}, jb, J) == t.crossing);
                }
}

TEST_CASE("worked example: the crossing sequence is the only survivor to lose") {
    // J = 1, class (3, 0), full window, J_bound = 0: absorption removes two of
    // the three sequences and the boundary removes the third.
    const AngleSample a = angle_sample(reference_stack(), 0.5);
    const Geometry g = window_geometry(1, 0.0, 1.0, 0);
    const ClassCount c = effective_count({3, 0}, a, g, true);
    CHECK(c.raw == 3);
    CHECK(c.redundant == 2);
    CHECK(c.boundary_excluded == 1);
    CHECK(c.effective == 0);
}

TEST_CASE("exclusion breakdown matches the naive odometer everywhere") {
    const StackSpec s = reference_stack();
    struct Window {
        double d, L;
    };
    const std::vector<Window> windows = {{0.0, 1.0}, {1e3, 1.0}, {2e-6, 1e-6}};
    const std::vector<double> angles = {0.5, 1.0};
    for (const Window& w : windows)
        for (double theta : angles)
            for (int J : {1, 2}) {
                const AngleSample a = angle_sample(s, theta);
                for (int n = J; n <= 7; n += 2)
                    for (long m = 0; m <= 4; ++m) {
                        const PathClass c{n, m};
                        // boundary-less
                        const Geometry gf = window_geometry(J, w.d, w.L, std::nullopt);
                        const NaiveTally free = naive_tally(n, m, J, a, w.d, w.L, std::nullopt);
                        const ClassCount cf = effective_count(c, a, gf, false);
                        CHECK(cf.raw == free.raw);
                        CHECK(cf.redundant == free.redundant);
                        CHECK(cf.boundary_excluded == 0);
                        CHECK(cf.effective == free.effective);
                        // bounded
                        for (int jb : {0, 1, 2}) {
                            const Geometry gb = window_geometry(J, w.d, w.L, jb);
                            const NaiveTally nb = naive_tally(n, m, J, a, w.d, w.L, jb);
                            const ClassCount cb = effective_count(c, a, gb, true);
                            CHECK(cb.raw == nb.raw);
                            CHECK(cb.redundant == nb.redundant);
                            CHECK(cb.effective == nb.effective);
                            // incremental exclusion = crossers not already absorbed
                            CHECK(cb.boundary_excluded == nb.raw - nb.redundant - nb.effective);
                            CHECK(cb.raw == cb.redundant + cb.boundary_excluded + cb.effective);
                            CHECK(cb.effective >= 0);
                        }
                    }
            }
}

TEST_CASE("window pruning never changes admissible-class counts") {
    const StackSpec s = reference_stack();
    const Geometry g = testutil::compact_geometry(1);
    const double tb = solve_theta_bound(g, s, 0);
    for (int k = 1; k <= g.r; ++k) {
        const AngleSample a = angle_sample(s, tb * k / g.r);
        const ClassRange cr = class_range(a, g);
        REQUIRE(!cr.rows.empty());
        const long m_top = [&] {
            long top = 0;
            for (const auto& row : cr.rows)
                top = std::max(top, row.ref_max);
            return top;
        }();
        for (bool bounded : {false, true}) {
            const std::optional<int> jb = bounded ? g.J_bound : std::nullopt;
            CountGrid pruned(a, g, cr.tra_max, m_top, jb, true);
            CountGrid plain(a, g, cr.tra_max, m_top, jb, false);
            for (const auto& row : cr.rows)
                for (long m = row.ref_min; m <= row.ref_max; ++m)
                    CHECK(pruned.good(row.n, m) == plain.good(row.n, m));
        }
    }
}

TEST_CASE("grid rejects queries beyond its caps") {
    const AngleSample a = angle_sample(reference_stack(), 0.5);
    const Geometry g = window_geometry(1, 0.0, 1.0, std::nullopt);
    CountGrid grid(a, g, 5, 3, std::nullopt, false);
    CHECK_THROWS_AS(grid.good(7, 1), computation_error);
    CHECK_THROWS_AS(grid.good(5, 10), computation_error);
    CHECK(grid.good(0, 0) == 0);  // below tra_min
    CHECK(grid.good(4, 1) == 0);  // parity mismatch
    CHECK(grid.good(5, -1) == 0); // negative reflections
    CHECK(grid.good(5, 3) >= 0);
}

TEST_CASE("bounded breakdown requires a boundary") {
    const AngleSample a = angle_sample(reference_stack(), 0.5);
    const Geometry g = window_geometry(1, 0.0, 1.0, std::nullopt);
    CHECK_THROWS_AS(effective_count({1, 0}, a, g, true), invalid_config);
}
