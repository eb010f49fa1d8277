#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cyclebranch/lvmodel.hpp"
#include "cyclebranch/odecore.hpp"

namespace cyclebranch {

struct BranchPoint {
    double lambda = 0;
    double amplitude = 0;  // max distance from the equilibrium in log coordinates
    double period = 0;
    double anchor_u = 0;  // section crossing, u = ln x
    double anchor_v = 0;  // section level,    v = ln y
};

enum class BranchVerdict { BlewUp, ReachedLambdaBound, Stalled };

struct PlanarBranch {
    std::vector<BranchPoint> points;
    BranchVerdict verdict = BranchVerdict::Stalled;
    double lambda_final = 0;   // where the verdict fired
    std::string detail;        // human-readable reason (Stalled / BlewUp trigger)
    double amplitude_cap = 0;
    // R^2 of the fit amplitude^2 ~ C^2 |lambda - lambda_H| over the first five
    // points, when lambda_H is bracketed; < 0.95 is reported as a warning only.
    std::optional<double> hopf_fit_r2;
    bool hopf_fit_warning = false;
};

struct ContinuationOptions {
    double step0 = 0.005;         // initial and maximal lambda step
    double step_floor = 1e-6;     // halving below this stalls the branch
    double amplitude_cap = 50.0;  // log-coordinate amplitude triggering BlewUp
    double cycle_tol = 1e-10;
    IntegratorOptions integrator;
    int probe_max_returns = 1000;
};

// Marches lambda from lambda_start to lambda_stop tracking the limit cycle of
// the log-coordinate flow on the section y = a/b (positive x-side crossing).
// The first cycle is seeded by a stability probe: iterated returns started
// near the equilibrium must settle on an attracting cycle, otherwise SeedError.
PlanarBranch continue_planar(const LVSystem& sys, double lambda_start, double lambda_stop,
                             const ContinuationOptions& opts = {});

// (lambda, amplitude) pairs of the branch, in march order.
std::vector<std::pair<double, double>> amplitude_profile(const PlanarBranch& branch);

}  // namespace cyclebranch
