#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "cyclebranch/errors.hpp"

namespace cyclebranch {

using State = std::vector<double>;
// Autonomous or non-autonomous field: writes dy/dt into dydt (pre-sized).
using Rhs = std::function<void(double t, const State& y, State& dydt)>;

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    // Norm overflow bound; exceeding it raises BlowupError with the last state.
    double norm_cap = 1e8;
    // Steps below underflow_factor * |t_end - t0| raise BlowupError.
    double underflow_factor = 1e-14;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> step_errors;  // accepted local error estimates (scaled norm)
};

// Accepted-step record handed to observers: the step [t0, t1] with states and
// derivatives at both ends (enough for cubic Hermite interpolation).
struct StepRecord {
    double t0, t1;
    const State& y0;
    const State& y1;
    const State& f0;
    const State& f1;
    double error;  // scaled local error estimate of this step
};

// Cubic Hermite evaluation on a step record at t in [t0, t1].
State hermite_eval(const StepRecord& step, double t);

// Adaptive Dormand-Prince 5(4) with PI step-size control. Observer is called
// after every accepted step; returning false stops the integration early.
void integrate_steps(const Rhs& rhs, const State& y0, double t0, double t_end,
                     const IntegratorOptions& opts,
                     const std::function<bool(const StepRecord&)>& observer);

Trajectory integrate(const Rhs& rhs, const State& y0, double t0, double t_end,
                     const IntegratorOptions& opts = {});

struct Section {
    int index = 0;      // state coordinate monitored
    double level = 0;   // crossing level
    // Selects the half of the section where crossings count, by the sign of
    // (free coordinate - free_center): +1 keeps crossings on the positive side,
    // -1 the negative side. With free_center at the rotation center this yields
    // full-turn returns.
    int direction = 1;
    double free_center = 0;
};

struct ReturnResult {
    State state;
    double time;
};

// Integrates from `start` until the trajectory crosses the chosen half of the
// section; the crossing time is refined to 1e-12 by bisection on the dense
// output. A crossing at t = 0 (start on the section) is ignored.
// Throws NoReturnError if no crossing happens before t_max.
ReturnResult poincare_return(const Rhs& rhs, const Section& section, const State& start,
                             double t_max, const IntegratorOptions& opts = {});

struct Cycle {
    double lambda = 0;  // parameter tag supplied by the caller
    double period = 0;
    State anchor;       // point on the section
    double amplitude = 0;
    Trajectory samples;  // one period from the anchor
};

struct CycleOptions {
    double tol = 1e-10;  // displacement tolerance on the section offset
    int max_iter = 50;
    double t_max = 200.0;  // per-return integration bound
    IntegratorOptions integrator;
    // Distance-from-equilibrium measure used for the amplitude; defaults to
    // the Euclidean norm of the state (equilibrium at the origin).
    std::function<double(const State&)> distance;
};

// Planar limit-cycle search: secant iteration on the 1-D displacement
// s -> (return offset) - s along the section's free coordinate. A converged
// displacement root whose amplitude is below 100 * tol is rejected as the
// equilibrium (CycleSearchError).
Cycle find_cycle(const Rhs& rhs, double lambda, const Section& section, double guess,
                 const CycleOptions& opts = {});

}  // namespace cyclebranch
