#include "cyclebranch/odecore.hpp"

#include <algorithm>
#include <cmath>

namespace cyclebranch {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// b(5th) - b(4th): error estimate weights (stage 2 weight is zero).
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

double inf_norm(const State& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

// Hairer-style initial step heuristic.
double initial_step(const Rhs& rhs, const State& y0, const State& f0, double t0,
                    double dir, double t_span, const IntegratorOptions& opts) {
    size_t n = y0.size();
    double d0 = 0, d1 = 0;
    for (size_t i = 0; i < n; ++i) {
        double sc = opts.atol + opts.rtol * std::fabs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_span);

    State y1(n), f1(n);
    for (size_t i = 0; i < n; ++i) y1[i] = y0[i] + dir * h0 * f0[i];
    rhs(t0 + dir * h0, y1, f1);
    double d2 = 0;
    for (size_t i = 0; i < n; ++i) {
        double sc = opts.atol + opts.rtol * std::fabs(y0[i]);
        double df = (f1[i] - f0[i]) / sc;
        d2 += df * df;
    }
    d2 = std::sqrt(d2 / n) / h0;
    double m = std::max(d1, d2);
    double h1 = (m <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                             : std::pow(0.01 / m, 1.0 / 5.0);
    return std::min({100 * h0, h1, t_span, opts.max_step});
}

}  // namespace

State hermite_eval(const StepRecord& step, double t) {
    double h = step.t1 - step.t0;
    double th = (t - step.t0) / h;
    double th2 = th * th, th3 = th2 * th;
    double h00 = 2 * th3 - 3 * th2 + 1;
    double h10 = th3 - 2 * th2 + th;
    double h01 = -2 * th3 + 3 * th2;
    double h11 = th3 - th2;
    size_t n = step.y0.size();
    State out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = h00 * step.y0[i] + h10 * h * step.f0[i] + h01 * step.y1[i] +
                 h11 * h * step.f1[i];
    return out;
}

void integrate_steps(const Rhs& rhs, const State& y0, double t0, double t_end,
                     const IntegratorOptions& opts,
                     const std::function<bool(const StepRecord&)>& observer) {
    size_t n = y0.size();
    double t_span = std::fabs(t_end - t0);
    if (t_span == 0) return;
    double dir = (t_end > t0) ? 1.0 : -1.0;

    State y = y0, f0(n);
    rhs(t0, y, f0);

    State k2(n), k3(n), k4(n), k5(n), k6(n), ynew(n), fnew(n), ytmp(n);
    double t = t0;
    double h = initial_step(rhs, y, f0, t0, dir, t_span, opts);
    double err_prev = 1e-4;
    double h_min = opts.underflow_factor * std::max(t_span, std::fabs(t_end));

    while (dir * (t_end - t) > 0) {
        h = std::min(h, opts.max_step);
        if (dir * (t + dir * h) > dir * t_end) h = std::fabs(t_end - t);
        if (h < h_min)
            throw BlowupError("step size underflow at t = " + std::to_string(t) +
                              " (stiffness or finite-time blow-up)", t, y);

        double hd = dir * h;
        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hd * A21 * f0[i];
        rhs(t + C2 * hd, ytmp, k2);
        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hd * (A31 * f0[i] + A32 * k2[i]);
        rhs(t + C3 * hd, ytmp, k3);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hd * (A41 * f0[i] + A42 * k2[i] + A43 * k3[i]);
        rhs(t + C4 * hd, ytmp, k4);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hd * (A51 * f0[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        rhs(t + C5 * hd, ytmp, k5);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hd * (A61 * f0[i] + A62 * k2[i] + A63 * k3[i] +
                                   A64 * k4[i] + A65 * k5[i]);
        rhs(t + hd, ytmp, k6);
        for (size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + hd * (B1 * f0[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] +
                                   B6 * k6[i]);
        rhs(t + hd, ynew, fnew);  // FSAL stage doubles as the error stage k7

        double err = 0;
        for (size_t i = 0; i < n; ++i) {
            double e = hd * (E1 * f0[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                             E6 * k6[i] + E7 * fnew[i]);
            double sc = opts.atol + opts.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            double t_new = t + hd;
            StepRecord rec{t, t_new, y, ynew, f0, fnew, err};
            if (inf_norm(ynew) > opts.norm_cap)
                throw BlowupError("state norm exceeded " + std::to_string(opts.norm_cap) +
                                  " at t = " + std::to_string(t_new), t_new, ynew);
            if (!observer(rec)) return;
            t = t_new;
            std::swap(y, ynew);
            std::swap(f0, fnew);
            double factor = 0.9 * std::pow(err, -0.17) * std::pow(err_prev, 0.04);
            h *= std::clamp(factor, 0.2, 5.0);
            err_prev = std::max(err, 1e-10);
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
    }
}

Trajectory integrate(const Rhs& rhs, const State& y0, double t0, double t_end,
                     const IntegratorOptions& opts) {
    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(y0);
    integrate_steps(rhs, y0, t0, t_end, opts, [&](const StepRecord& s) {
        traj.times.push_back(s.t1);
        traj.states.push_back(s.y1);
        traj.step_errors.push_back(s.error);
        return true;
    });
    return traj;
}

ReturnResult poincare_return(const Rhs& rhs, const Section& section, const State& start,
                             double t_max, const IntegratorOptions& opts) {
    ReturnResult result;
    bool found = false;
    const int idx = section.index;
    const int free_idx = 1 - idx;
    const double level = section.level;
    const double dir = section.direction;

    integrate_steps(rhs, start, 0.0, t_max, opts, [&](const StepRecord& s) {
        // Crossings pass the level in either sense; strict sign at the step start
        // skips the departure when the start point lies on the section.
        double g0 = s.y0[idx] - level;
        double g1 = s.y1[idx] - level;
        double sgn = g0 < 0 ? 1.0 : -1.0;
        if (!(sgn * g0 < 0 && sgn * g1 >= 0)) return true;

        double lo = s.t0, hi = s.t1;
        while (hi - lo > 1e-12) {
            double mid = 0.5 * (lo + hi);
            double gm = sgn * (hermite_eval(s, mid)[idx] - level);
            if (gm < 0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        double tc = 0.5 * (lo + hi);
        State at = hermite_eval(s, tc);
        // Only crossings on the requested half of the section count.
        if (!(dir * (at[free_idx] - section.free_center) > 0)) return true;
        // The cubic dense output is one order below the integrator, so the
        // interpolated state would cap the return accuracy near 1e-10;
        // re-integrating the step prefix restores full integration accuracy.
        if (tc > s.t0) at = integrate(rhs, s.y0, s.t0, tc, opts).states.back();
        result.state = std::move(at);
        result.state[idx] = level;  // land exactly on the section
        result.time = tc;
        found = true;
        return false;
    });

    if (!found)
        throw NoReturnError("no section crossing (coordinate " + std::to_string(idx) +
                            " through " + std::to_string(level) + ") before t = " +
                            std::to_string(t_max));
    return result;
}

Cycle find_cycle(const Rhs& rhs, double lambda, const Section& section, double guess,
                 const CycleOptions& opts) {
    const int free_idx = 1 - section.index;

    auto section_point = [&](double s) {
        State p(2);
        p[section.index] = section.level;
        p[free_idx] = s;
        return p;
    };
    // Testing |displacement| <= tol only makes sense when the displacement is
    // measured well below tol, so the return integrations run tighter than the
    // caller's trajectory accuracy.
    IntegratorOptions meas = opts.integrator;
    meas.rtol = std::min(meas.rtol, 0.01 * opts.tol);
    meas.atol = std::min(meas.atol, 0.01 * opts.tol);
    double period = 0;
    auto displacement = [&](double s) {
        ReturnResult r = poincare_return(rhs, section, section_point(s), opts.t_max, meas);
        period = r.time;
        return r.state[free_idx] - s;
    };

    double s0 = guess;
    double d0 = displacement(s0);
    double s_best = s0, d_best = d0;
    if (std::fabs(d0) > opts.tol) {
        double s1 = s0 + d0;  // second point: one iterate of the return map
        double d1 = displacement(s1);
        int it = 0;
        while (std::fabs(d1) > opts.tol && it < opts.max_iter) {
            double denom = d1 - d0;
            if (denom == 0)
                throw CycleSearchError("secant stalled: displacement is flat near s = " +
                                       std::to_string(s1));
            double s2 = s1 - d1 * (s1 - s0) / denom;
            s0 = s1;
            d0 = d1;
            s1 = s2;
            d1 = displacement(s1);
            ++it;
        }
        if (std::fabs(d1) > opts.tol)
            throw CycleSearchError("cycle search did not converge in " +
                                   std::to_string(opts.max_iter) +
                                   " secant iterations (last displacement " +
                                   std::to_string(d1) + ")");
        s_best = s1;
        d_best = d1;
    }
    (void)d_best;

    Cycle cyc;
    cyc.lambda = lambda;
    cyc.period = period;
    cyc.anchor = section_point(s_best);

    auto dist = opts.distance ? opts.distance : [](const State& p) {
        double q = 0;
        for (double x : p) q += x * x;
        return std::sqrt(q);
    };

    cyc.samples.times.push_back(0.0);
    cyc.samples.states.push_back(cyc.anchor);
    cyc.amplitude = dist(cyc.anchor);
    integrate_steps(rhs, cyc.anchor, 0.0, cyc.period, opts.integrator,
                    [&](const StepRecord& s) {
                        // interior samples sharpen the amplitude max
                        for (int k = 1; k <= 3; ++k) {
                            State p = hermite_eval(s, s.t0 + (s.t1 - s.t0) * k / 4.0);
                            cyc.amplitude = std::max(cyc.amplitude, dist(p));
                        }
                        cyc.amplitude = std::max(cyc.amplitude, dist(s.y1));
                        cyc.samples.times.push_back(s.t1);
                        cyc.samples.states.push_back(s.y1);
                        cyc.samples.step_errors.push_back(s.error);
                        return true;
                    });
    // A displacement root with vanishing amplitude is the equilibrium, not a cycle.
    if (cyc.amplitude <= 100.0 * opts.tol)
        throw CycleSearchError("search collapsed to the equilibrium (amplitude " +
                               std::to_string(cyc.amplitude) + ")");
    return cyc;
}

}  // namespace cyclebranch
