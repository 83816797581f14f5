#pragma once

#include <stdexcept>
#include <string>

namespace winoc {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: stack/geometry invariant violations, config file problems.
// The CLI maps this to exit code 1.
struct invalid_config : error {
    explicit invalid_config(const std::string& msg) : error(msg) {}
};

// A computation could not proceed (degenerate angle, no root in bracket,
// zero denominator, ...).  CLI exit code 2.
struct computation_error : error {
    explicit computation_error(const std::string& msg) : error(msg) {}
};

// Exhaustive enumeration would be too large to run.
struct cap_exceeded : computation_error {
    explicit cap_exceeded(const std::string& msg) : computation_error(msg) {}
};

// Root solver could not bracket a solution below pi/2.
struct no_solution : computation_error {
    explicit no_solution(const std::string& msg) : computation_error(msg) {}
};

// Angle-dependent step displacements vanish (theta = 0) so class ranges
// are undefined.
struct degenerate_angle : computation_error {
    explicit degenerate_angle(const std::string& msg) : computation_error(msg) {}
};

} // namespace winoc
