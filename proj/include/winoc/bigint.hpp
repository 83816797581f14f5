#pragma once

// Exact integer plumbing for the path-counting module.  Path-class
// populations grow combinatorially (binomial products easily exceed 10^100
// on realistic geometries) so every count is kept as an arbitrary-precision
// integer and converted to log-space only at the gain-evaluation boundary.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>

namespace winoc {

using bigint = boost::multiprecision::cpp_int;

// C(n, k) by the multiplicative rule.  Exact; intended for one-off queries.
// Grid code uses incremental recurrences instead of calling this per class.
inline bigint binomial(long n, long k) {
    if (k < 0 || k > n || n < 0)
        return 0;
    if (k > n - k)
        k = n - k;
    bigint acc = 1;
    for (long i = 1; i <= k; ++i) {
        acc *= n - k + i;
        acc /= i; // always exact: acc holds C(n-k+i, i)
    }
    return acc;
}

// Natural log of a positive bigint without overflowing double.
// Splits off the top 52 bits and adds msb*ln2 for the rest.
inline double log_bigint(const bigint& x) {
    if (x <= 0)
        return -std::numeric_limits<double>::infinity();
    const std::size_t bits = boost::multiprecision::msb(x); // index of highest set bit
    if (bits < 1000) {
        // cheap path: value fits in double's exponent range comfortably
        return std::log(x.convert_to<double>());
    }
    const std::size_t shift = bits - 52;
    const bigint top = x >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * M_LN2;
}

} // namespace winoc
