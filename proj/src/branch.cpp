#include "cyclebranch/branch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cyclebranch/errors.hpp"

namespace cyclebranch {

namespace {

Rhs make_log_rhs(const LVSystem& sys, double lambda) {
    return [&sys, lambda](double, const State& y, State& dydt) {
        auto r = eval_rhs_log(sys, lambda, y[0], y[1]);
        dydt[0] = r[0];
        dydt[1] = r[1];
    };
}

// Seeds the cycle search by bracketing the root of the one-turn displacement
// map in the section offset. Iterating raw returns would need O(1/|1-rho|)
// turns near the bifurcation where the cycle is weakly attracting; a sign
// bracket plus bisection costs one return per probe regardless of the
// multiplier.
double probe_seed(const LVSystem& sys, double lambda, const Section& section, double u_star,
                  const ContinuationOptions& opts) {
    Rhs rhs = make_log_rhs(sys, lambda);
    int budget = opts.probe_max_returns;
    auto displacement = [&](double s) {
        if (budget-- <= 0) {
            std::ostringstream msg;
            msg << "stability probe did not settle after " << opts.probe_max_returns
                << " returns at lambda=" << lambda;
            throw SeedError(msg.str());
        }
        ReturnResult rr =
            poincare_return(rhs, section, {s, section.level}, 1000.0, opts.integrator);
        return rr.state[0] - s;
    };

    // Off an unstable equilibrium the displacement is positive; if it contracts
    // at every offset down to scale zero the equilibrium attracts and there is
    // no cycle to seed.
    double off = 0.05;
    double d_lo = displacement(u_star + off);
    while (d_lo <= 0) {
        off *= 0.5;
        if (off < 1e-4) {
            std::ostringstream msg;
            msg << "stability probe spiraled into the equilibrium at lambda=" << lambda
                << "; no attracting cycle to seed from";
            throw SeedError(msg.str());
        }
        d_lo = displacement(u_star + off);
    }
    double s_lo = u_star + off;

    // Doubling the offset until the displacement turns negative brackets the
    // cycle radius; escape of the expanded probes surfaces as no-return or
    // blow-up and is handled by the caller.
    double s_hi = s_lo;
    for (;;) {
        off *= 2.0;
        if (off > 64.0) {
            std::ostringstream msg;
            msg << "stability probe found no outer bracket at lambda=" << lambda
                << "; no attracting cycle to seed from";
            throw SeedError(msg.str());
        }
        s_hi = u_star + off;
        double d_hi = displacement(s_hi);
        if (d_hi < 0) break;
        s_lo = s_hi;
    }

    while (s_hi - s_lo > 1e-6) {
        double mid = 0.5 * (s_lo + s_hi);
        if (displacement(mid) > 0) {
            s_lo = mid;
        } else {
            s_hi = mid;
        }
    }
    return 0.5 * (s_lo + s_hi);
}

double extrapolate_anchor(const std::vector<BranchPoint>& pts, double target) {
    const BranchPoint& p1 = pts.back();
    if (pts.size() < 2) return p1.anchor_u;
    const BranchPoint& p0 = pts[pts.size() - 2];
    if (p1.lambda == p0.lambda) return p1.anchor_u;
    double slope = (p1.anchor_u - p0.anchor_u) / (p1.lambda - p0.lambda);
    return p1.anchor_u + slope * (target - p1.lambda);
}

void push_point(PlanarBranch& branch, const Cycle& c) {
    branch.points.push_back({c.lambda, c.amplitude, c.period, c.anchor[0], c.anchor[1]});
}

// Linear regression of amplitude^2 on lambda over the first few points. A
// branch emanating from a Hopf point obeys amplitude^2 ~ C |lambda - lambda_H|
// near onset, so a poor fit flags a suspicious seed.
void fit_hopf(PlanarBranch& branch) {
    std::size_t n = std::min<std::size_t>(5, branch.points.size());
    if (n < 3) return;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = branch.points[i].lambda;
        double y = branch.points[i].amplitude * branch.points[i].amplitude;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double nn = static_cast<double>(n);
    double denom = nn * sxx - sx * sx;
    if (denom <= 0) return;
    double beta = (nn * sxy - sx * sy) / denom;
    double alpha = (sy - beta * sx) / nn;
    double ybar = sy / nn;
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = branch.points[i].lambda;
        double y = branch.points[i].amplitude * branch.points[i].amplitude;
        double resid = y - (alpha + beta * x);
        ss_tot += (y - ybar) * (y - ybar);
        ss_res += resid * resid;
    }
    double r2 = (ss_tot <= 1e-300) ? 1.0 : 1.0 - ss_res / ss_tot;
    branch.hopf_fit_r2 = r2;
    branch.hopf_fit_warning = r2 < 0.95;
}

}  // namespace

PlanarBranch continue_planar(const LVSystem& sys, double lambda_start, double lambda_stop,
                             const ContinuationOptions& opts) {
    if (opts.step0 <= 0 || opts.step_floor <= 0 || opts.amplitude_cap <= 0)
        throw ConfigError("continue_planar: step0, step_floor and amplitude_cap must be positive");

    PlanarBranch branch;
    branch.amplitude_cap = opts.amplitude_cap;

    CycleOptions copts;
    copts.tol = opts.cycle_tol;
    copts.integrator = opts.integrator;
    copts.t_max = 1000.0;  // cycle periods grow with amplitude along the branch

    auto solve_at = [&](double lambda, double guess) -> Cycle {
        EquilibriumInfo eq = equilibrium(sys, lambda);
        const double u_star = std::log(eq.x_star);
        Section section{1, std::log(eq.y_star), +1, u_star};
        const double v_star = section.level;
        copts.distance = [u_star, v_star](const State& s) {
            return std::hypot(s[0] - u_star, s[1] - v_star);
        };
        Rhs rhs = make_log_rhs(sys, lambda);
        Cycle c = find_cycle(rhs, lambda, section, guess, copts);
        // The displacement map also vanishes at the equilibrium itself; a wild
        // warm start can make the secant land there instead of on the cycle.
        if (std::abs(c.anchor[0] - u_star) < 1e-7)
            throw CycleSearchError("cycle search converged to the equilibrium");
        return c;
    };

    try {
        EquilibriumInfo eq0 = equilibrium(sys, lambda_start);
        const double u_star0 = std::log(eq0.x_star);
        Section section{1, std::log(eq0.y_star), +1, u_star0};
        double guess = probe_seed(sys, lambda_start, section, u_star0, opts);
        push_point(branch, solve_at(lambda_start, guess));
    } catch (const SeedError&) {
        throw;
    } catch (const ToolError& e) {
        throw SeedError(std::string("seeding at the start parameter failed: ") + e.what());
    }

    const double dir = (lambda_stop >= lambda_start) ? 1.0 : -1.0;
    double step = opts.step0;
    double current = lambda_start;
    bool done = branch.points.back().amplitude >= opts.amplitude_cap;
    if (done) {
        branch.verdict = BranchVerdict::BlewUp;
        branch.lambda_final = lambda_start;
        branch.detail = "amplitude cap reached by the seeded cycle";
    }

    while (!done) {
        if (current == lambda_stop) {
            branch.verdict = BranchVerdict::ReachedLambdaBound;
            branch.lambda_final = lambda_stop;
            break;
        }
        double remaining = std::abs(lambda_stop - current);
        double trial = std::min(step, remaining);
        for (;;) {
            double target = (trial >= remaining) ? lambda_stop : current + dir * trial;
            try {
                Cycle c = solve_at(target, extrapolate_anchor(branch.points, target));
                // Amplitude-growth-limited stepping: near a finite-parameter
                // blow-up the amplitude diverges, and a fixed step would skip
                // whole doubling windows. Keeping the per-step growth <= 1.4
                // also keeps consecutive periods within the 50% continuity
                // band. Growth from sub-milli amplitudes is not throttled.
                double prev_amp = branch.points.back().amplitude;
                if (prev_amp >= 1e-3 && c.amplitude > 1.4 * prev_amp) {
                    trial *= 0.5;
                    if (trial < opts.step_floor) {
                        branch.verdict = BranchVerdict::Stalled;
                        branch.lambda_final = current;
                        std::ostringstream msg;
                        msg << "amplitude growth window unresolved at lambda=" << current
                            << " even at the step floor " << opts.step_floor;
                        branch.detail = msg.str();
                        done = true;
                        break;
                    }
                    continue;
                }
                push_point(branch, c);
                current = target;
                step = std::min(opts.step0, trial * 1.4);
                if (c.amplitude >= opts.amplitude_cap) {
                    branch.verdict = BranchVerdict::BlewUp;
                    branch.lambda_final = target;
                    std::ostringstream msg;
                    msg << "amplitude " << c.amplitude << " reached the cap at lambda=" << target;
                    branch.detail = msg.str();
                    done = true;
                }
                break;
            } catch (const BlowupError& e) {
                branch.verdict = BranchVerdict::BlewUp;
                branch.lambda_final = target;
                branch.detail = std::string("trajectory escaped during the cycle solve: ") + e.what();
                done = true;
                break;
            } catch (const ToolError& e) {
                trial *= 0.5;
                if (trial < opts.step_floor) {
                    branch.verdict = BranchVerdict::Stalled;
                    branch.lambda_final = current;
                    std::ostringstream msg;
                    msg << "parameter step fell below " << opts.step_floor << " at lambda=" << current
                        << " (" << e.what() << ")";
                    branch.detail = msg.str();
                    done = true;
                    break;
                }
            }
        }
    }

    fit_hopf(branch);
    return branch;
}

std::vector<std::pair<double, double>> amplitude_profile(const PlanarBranch& branch) {
    std::vector<std::pair<double, double>> out;
    out.reserve(branch.points.size());
    for (const auto& p : branch.points) out.emplace_back(p.lambda, p.amplitude);
    return out;
}

}  // namespace cyclebranch
