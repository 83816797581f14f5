#pragma once

// Layer-stack description and the interface power coefficients derived from
// it.  A logical layer of the stack is a sandwich of three materials
// (passivation / dielectric / semiconductor, e.g. Si3N4 / SiO2 / Si); a
// vertical link crosses several identical layers.  All coefficients are
// power (not amplitude) quantities.

#include "winoc/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace winoc {

// ============================================================================
// stack description
// ============================================================================

struct StackSpec {
    double l1 = 0; // material-1 thickness [m]
    double l2 = 0; // material-2 thickness [m]
    double l3 = 0; // material-3 thickness [m]
    double n1 = 1; // material-1 refractive index
    double n2 = 1; // material-2 refractive index
    double n3 = 1; // material-3 refractive index (densest: n3 >= n1, n3 >= n2)
    double lambda1 = 0; // material-1 attenuation [1/m]
    double lambda2 = 0; // material-2 attenuation [1/m]
    double lambda3 = 0; // material-3 attenuation [1/m]
    double frequency = 1e12; // carrier frequency [Hz]; metadata only
};

// Throws invalid_config naming the offending field.
inline void validate(const StackSpec& s) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0) || !std::isfinite(v))
            throw invalid_config(std::string("stack.") + name + ": must be finite and > 0");
    };
    positive(s.l1, "l1");
    positive(s.l2, "l2");
    positive(s.l3, "l3");
    positive(s.frequency, "frequency");
    auto index = [](double v, const char* name) {
        if (!(v >= 1) || !std::isfinite(v))
            throw invalid_config(std::string("stack.") + name + ": refractive index must be >= 1");
    };
    index(s.n1, "n1");
    index(s.n2, "n2");
    index(s.n3, "n3");
    // n3 must dominate so the refraction angles arcsin(n_i sin(theta)/n3)
    // stay defined for every launch angle theta < pi/2.  Equality is allowed
    // (degenerate uniform stacks are useful in tests).
    if (s.n3 < s.n1)
        throw invalid_config("stack.n3: must satisfy n3 >= n1");
    if (s.n3 < s.n2)
        throw invalid_config("stack.n3: must satisfy n3 >= n2");
    auto atten = [](double v, const char* name) {
        if (!(v >= 0) || !std::isfinite(v))
            throw invalid_config(std::string("stack.") + name + ": attenuation must be >= 0");
    };
    atten(s.lambda1, "lambda1");
    atten(s.lambda2, "lambda2");
    atten(s.lambda3, "lambda3");
}

// ============================================================================
// interface power coefficients
// ============================================================================

// Transmission/reflection power coefficients for the six interface types a
// ray meets while walking the stack.  Index i here is 1-based in comments to
// match the accessors: T[0] is T1, etc.
//
//   T1 = ((n3-n1)/(n3+n1))^2   material-3 / material-1 boundary
//   T2 = ((n2-n1)/(n2+n1))^2   material-2 / material-1 boundary
//   T3 = ((n3-n2)/(n3+n2))^2   material-3 / material-2 boundary
//   T4 = T1, T5 = T2, T6 = T3  same physical boundaries met from the other
//                              side; listed separately because the path
//                              bookkeeping distinguishes them
//   R_i = 1 - T_i
struct CoefficientSet {
    std::array<double, 6> T{}; // transmission, power
    std::array<double, 6> R{}; // reflection, power
};

inline CoefficientSet coefficient_set(const StackSpec& s) {
    validate(s);
    auto iface = [](double na, double nb) {
        const double q = (na - nb) / (na + nb);
        return q * q;
    };
    CoefficientSet c;
    c.T[0] = iface(s.n3, s.n1);
    c.T[1] = iface(s.n2, s.n1);
    c.T[2] = iface(s.n3, s.n2);
    c.T[3] = c.T[0];
    c.T[4] = c.T[1];
    c.T[5] = c.T[2];
    for (int i = 0; i < 6; ++i)
        c.R[i] = 1.0 - c.T[i];
    return c;
}

// ============================================================================
// per-step gain factors
// ============================================================================

// The gain of a path class factorizes into four reusable step factors:
//
//   class gain = count * g_prefix * g_layer^(J-1) * g_pair^((n-J)/2) * g_refl^m
//
// where J is the layer separation, n the refraction count and m the
// reflection count of the class.  g_prefix covers the launch/landing
// bookkeeping of the first crossing, g_layer each further net crossing,
// g_pair one up-down refraction excursion, g_refl one in-layer bounce pair.
// Linear values are the defining quantities; logs are carried alongside so
// large exponents can be accumulated without underflow.
struct StepGainTable {
    double prefix = 0, layer = 0, pair = 0, refl = 0;             // linear power factors
    double log_prefix = 0, log_layer = 0, log_pair = 0, log_refl = 0; // natural logs
};

inline StepGainTable step_gain_table(const StackSpec& s) {
    const CoefficientSet c = coefficient_set(s);
    const double a1 = s.l1 * s.lambda1;
    const double a2 = s.l2 * s.lambda2;
    const double a3 = s.l3 * s.lambda3;

    StepGainTable t;
    t.prefix = std::exp(-3.0 * (a1 + a2 + a3)) * c.T[0] * c.T[0] * c.T[1] * c.T[2] * c.T[3] * c.R[3];
    t.layer  = c.T[0] * c.T[1] * c.T[2] * std::exp(-(a1 + a2 + a3));
    t.pair   = c.T[0] * c.T[3] * c.T[4] * c.R[3] * std::exp(-(2.0 * a3 + a2 + a1));
    t.refl   = c.R[2] * c.R[5] * std::exp(-2.0 * a3);

    // logs assembled from the factors directly (not log(linear)) so they
    // stay finite-precision even when the linear product underflows
    auto lg = [](double v) { return std::log(v); };
    t.log_prefix = -3.0 * (a1 + a2 + a3) + 2.0 * lg(c.T[0]) + lg(c.T[1]) + lg(c.T[2]) + lg(c.T[3]) + lg(c.R[3]);
    t.log_layer  = lg(c.T[0]) + lg(c.T[1]) + lg(c.T[2]) - (a1 + a2 + a3);
    t.log_pair   = lg(c.T[0]) + lg(c.T[3]) + lg(c.T[4]) + lg(c.R[3]) - (2.0 * a3 + a2 + a1);
    t.log_refl   = lg(c.R[2]) + lg(c.R[5]) - 2.0 * a3;
    return t;
}

} // namespace winoc
