#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cyclebranch {

// Base of every failure the toolkit signals. The CLI maps these to exit code 1;
// anything else escaping main is a bug.
struct ToolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input file / parameter set.
struct ConfigError : ToolError {
    using ToolError::ToolError;
};

// The coexistence equilibrium leaves the open quadrant: c <= f(a/b; lambda).
struct ExtinctionError : ToolError {
    using ToolError::ToolError;
};

// A sign change was required on the given interval and is absent.
struct BracketError : ToolError {
    using ToolError::ToolError;
};

// Trajectory norm overflow or step-size underflow. Carries the last accepted
// state so callers (the continuation driver) can diagnose where it died.
struct BlowupError : ToolError {
    double t_last;
    std::vector<double> state_last;
    BlowupError(const std::string& msg, double t, std::vector<double> state)
        : ToolError(msg), t_last(t), state_last(std::move(state)) {}
};

// No section crossing in the requested direction before t_max.
struct NoReturnError : ToolError {
    using ToolError::ToolError;
};

// The secant iteration on the return-map displacement did not converge.
struct CycleSearchError : ToolError {
    using ToolError::ToolError;
};

// The stability probe found no attracting cycle at lambda_start.
struct SeedError : ToolError {
    using ToolError::ToolError;
};

// |L(i n w; lambda)| fell below the resonance guard for some mode n.
struct ResonanceError : ToolError {
    int harmonic;
    ResonanceError(const std::string& msg, int n) : ToolError(msg), harmonic(n) {}
};

// Damped Newton failed to reach tolerance (root search or (u,v) inversion).
struct NewtonError : ToolError {
    using ToolError::ToolError;
};

// An iterate left the ball of radius q where the operator is defined.
struct BallError : ToolError {
    using ToolError::ToolError;
};

// The sublevel set {|L| <= q} could not be separated from the search box
// boundary: enlarge the box or shrink q.
struct InconclusiveBoxError : ToolError {
    using ToolError::ToolError;
};

// Picard iteration exceeded max_iter without meeting tolerance.
struct FixedPointError : ToolError {
    double last_delta;
    FixedPointError(const std::string& msg, double delta)
        : ToolError(msg), last_delta(delta) {}
};

}  // namespace cyclebranch
