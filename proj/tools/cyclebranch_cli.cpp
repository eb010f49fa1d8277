// cyclebranch: batch driver for the predator-prey cycle continuation and the
// harmonic-balance branch solver. Every subcommand writes summary.json (and
// its CSV/SVG artifacts) into the output directory; wall-clock timings go to
// timings.txt so the JSON and CSV outputs stay byte-identical across runs.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cyclebranch/branch.hpp"
#include "cyclebranch/config.hpp"
#include "cyclebranch/emit.hpp"
#include "cyclebranch/errors.hpp"
#include "cyclebranch/hbcore.hpp"
#include "cyclebranch/lvmodel.hpp"
#include "cyclebranch/odecore.hpp"

namespace fs = std::filesystem;
using namespace cyclebranch;

namespace {

class Stopwatch {
  public:
    Stopwatch() : last_(clock::now()), start_(last_) {}

    void mark(const std::string& label) {
        auto now = clock::now();
        marks_.emplace_back(label, ms(last_, now));
        last_ = now;
    }

    void write(const std::string& path) {
        marks_.emplace_back("total", ms(start_, clock::now()));
        std::string text;
        for (const auto& [label, value] : marks_) {
            char line[128];
            std::snprintf(line, sizeof line, "%s_ms %.3f\n", label.c_str(), value);
            text += line;
        }
        write_text_file(path, text);
    }

  private:
    using clock = std::chrono::steady_clock;
    static double ms(clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    }
    clock::time_point last_, start_;
    std::vector<std::pair<std::string, double>> marks_;
};

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string default_out_dir() {
    const char* env = std::getenv("CYCLEBRANCH_OUT");
    return env && *env ? env : ".";
}

std::vector<double> parse_tuple(const std::string& text, std::size_t count,
                                const std::string& flag) {
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string piece = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            vals.push_back(parse_double(piece, flag));
        } catch (const ToolError& e) {
            throw CLI::ValidationError(flag + ": " + e.what());
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (vals.size() != count)
        throw CLI::ValidationError(flag + ": expected " + std::to_string(count) +
                                   " comma-separated values, got " + std::to_string(vals.size()));
    return vals;
}

const char* verdict_name(BranchVerdict v) {
    switch (v) {
        case BranchVerdict::BlewUp: return "BlewUp";
        case BranchVerdict::ReachedLambdaBound: return "ReachedLambdaBound";
        case BranchVerdict::Stalled: return "Stalled";
    }
    return "Stalled";
}

Nonlinearity make_nonlinearity(const std::string& name, double eps) {
    if (name == "zero") return Nonlinearity::zero();
    if (name == "linear") return Nonlinearity::linear(eps);
    if (name == "cubic_sat") return Nonlinearity::cubic_saturating(eps);
    throw CLI::ValidationError("--nl: unknown nonlinearity '" + name + "'");
}

// Flags shared by every subcommand.
struct CommonArgs {
    std::string out = default_out_dir();
    bool emit_svg = false;

    void attach(CLI::App* sub) {
        sub->add_option("--out", out, "Output directory (default $CYCLEBRANCH_OUT or '.')")
            ->capture_default_str();
        sub->add_flag("--emit-svg", emit_svg, "Also write an SVG chart");
    }
    void echo(JsonWriter& jw) const {
        jw.field("out", out);
        jw.field("emit_svg", emit_svg);
    }
};

// Runs `body` with an open summary object; writes summary.json and timings.txt
// whether the body succeeds or throws a domain error.
template <typename InputsFn, typename BodyFn>
int run_summarized(const CommonArgs& common, const char* subcommand, InputsFn echo_inputs,
                   BodyFn body) {
    fs::create_directories(common.out);
    Stopwatch watch;
    JsonWriter jw;
    jw.begin_object();
    jw.field("tool", "cyclebranch");
    jw.field("subcommand", subcommand);
    jw.begin_object("inputs");
    echo_inputs(jw);
    common.echo(jw);
    jw.end_object();
    int code = 0;
    try {
        body(jw, watch);
        jw.field("status", "ok");
    } catch (const ToolError& e) {
        jw.field("error", e.what());
        jw.field("status", "error");
        code = 1;
    }
    jw.field("timings_file", "timings.txt");
    jw.end_object();
    write_text_file(join(common.out, "summary.json"), jw.str() + "\n");
    watch.write(join(common.out, "timings.txt"));
    return code;
}

// ---------------------------------------------------------------- lv-hopf --

struct LvHopfArgs {
    CommonArgs common;
    std::string system;
    double lo = 0.0, hi = 1.0, tol = 1e-12;
};

int run_lv_hopf(const LvHopfArgs& a) {
    return run_summarized(
        a.common, "lv-hopf",
        [&](JsonWriter& jw) {
            jw.field("system", a.system);
            jw.field("lo", a.lo);
            jw.field("hi", a.hi);
            jw.field("tol", a.tol);
        },
        [&](JsonWriter& jw, Stopwatch& watch) {
            LVSystem sys = load_lv_system(a.system);
            watch.mark("load");
            double lambda_h = hopf_locate(sys, a.lo, a.hi, a.tol);
            double y_star = sys.y_star();
            EquilibriumInfo eq = equilibrium(sys, lambda_h);
            watch.mark("solve");
            jw.begin_object("results");
            jw.field("lambda_H", lambda_h);
            jw.field("slope_at_lo", sys.term.slope(y_star, a.lo));
            jw.field("slope_at_hi", sys.term.slope(y_star, a.hi));
            jw.field("x_star", eq.x_star);
            jw.field("y_star", eq.y_star);
            jw.field("trace_at_hopf", eq.jacobian.trace());
            jw.field("det_at_hopf", eq.jacobian.det());
            jw.end_object();
        });
}

// --------------------------------------------------------------- lv-check --

struct LvCheckArgs {
    CommonArgs common;
    std::string system;
    int grid_points = 200;
};

int run_lv_check(const LvCheckArgs& a) {
    return run_summarized(
        a.common, "lv-check",
        [&](JsonWriter& jw) {
            jw.field("system", a.system);
            jw.field("grid_points", a.grid_points);
        },
        [&](JsonWriter& jw, Stopwatch& watch) {
            LVSystem sys = load_lv_system(a.system);
            watch.mark("load");
            auto grid = default_probe_grid(sys.y_star(), a.grid_points);
            ConditionReport rep = check_proposition_conditions(sys, grid);
            watch.mark("solve");
            jw.begin_object("results");
            jw.field("slope_positive_at_zero", rep.slope_positive_at_zero);
            jw.field("slope_negative_at_one", rep.slope_negative_at_one);
            jw.field("rate_positive_at_zero", rep.rate_positive_at_zero);
            jw.field("rate_negative_at_one", rep.rate_negative_at_one);
            jw.field("all_pass", rep.all_pass());
            jw.field("slope_at_zero", rep.slope_at_zero);
            jw.field("slope_at_one", rep.slope_at_one);
            jw.field("min_rate_margin_at_zero", rep.min_rate_margin_at_zero);
            jw.field("min_rate_margin_at_one", rep.min_rate_margin_at_one);
            jw.field("grid_points", rep.grid_points);
            jw.field("fd_slope_used", rep.fd_slope_used);
            jw.field("has_violation", rep.has_violation);
            if (rep.has_violation) {
                jw.field("violation_y", rep.violation_y);
                jw.field("violation_condition", rep.violation_condition);
            }
            jw.end_object();
        });
}

// ------------------------------------------------------------ lv-simulate --

struct LvSimulateArgs {
    CommonArgs common;
    std::string system;
    double lambda = 0.0;
    double x0 = 1.0, y0 = 1.0;
    double t_end = 50.0;
    bool log_coords = false;
    double rtol = 1e-10, atol = 1e-12;
};

int run_lv_simulate(const LvSimulateArgs& a) {
    return run_summarized(
        a.common, "lv-simulate",
        [&](JsonWriter& jw) {
            jw.field("system", a.system);
            jw.field("lambda", a.lambda);
            jw.field("x0", a.x0);
            jw.field("y0", a.y0);
            jw.field("t_end", a.t_end);
            jw.field("log", a.log_coords);
            jw.field("rtol", a.rtol);
            jw.field("atol", a.atol);
        },
        [&](JsonWriter& jw, Stopwatch& watch) {
            LVSystem sys = load_lv_system(a.system);
            watch.mark("load");
            if (a.x0 <= 0 || a.y0 <= 0)
                throw ConfigError("lv-simulate: initial populations must be positive");
            IntegratorOptions iopts;
            iopts.rtol = a.rtol;
            iopts.atol = a.atol;
            Rhs rhs;
            State start;
            if (a.log_coords) {
                rhs = [&sys, lambda = a.lambda](double, const State& y, State& dydt) {
                    auto f = eval_rhs_log(sys, lambda, y[0], y[1]);
                    dydt[0] = f[0];
                    dydt[1] = f[1];
                };
                start = {std::log(a.x0), std::log(a.y0)};
            } else {
                rhs = [&sys, lambda = a.lambda](double, const State& y, State& dydt) {
                    auto f = eval_rhs(sys, lambda, y[0], y[1]);
                    dydt[0] = f[0];
                    dydt[1] = f[1];
                };
                start = {a.x0, a.y0};
            }
            Trajectory traj = integrate(rhs, start, 0.0, a.t_end, iopts);
            watch.mark("solve");

            const char* c0 = a.log_coords ? "u" : "x";
            const char* c1 = a.log_coords ? "v" : "y";
            std::vector<std::vector<double>> rows;
            rows.reserve(traj.times.size());
            for (std::size_t i = 0; i < traj.times.size(); ++i)
                rows.push_back({traj.times[i], traj.states[i][0], traj.states[i][1]});
            write_csv(join(a.common.out, "trajectory.csv"), {"time", c0, c1}, rows);
            if (a.common.emit_svg) {
                std::vector<std::pair<double, double>> series;
                series.reserve(traj.states.size());
                for (const auto& s : traj.states) series.emplace_back(s[0], s[1]);
                SvgOptions svg;
                svg.x_label = c0;
                svg.y_label = c1;
                write_svg(join(a.common.out, "trajectory.svg"), series, svg);
            }
            watch.mark("emit");

            jw.begin_object("results");
            jw.field("steps", static_cast<int>(traj.times.size()) - 1);
            jw.field("t_final", traj.times.back());
            jw.field("final_0", traj.states.back()[0]);
            jw.field("final_1", traj.states.back()[1]);
            jw.end_object();
            jw.begin_object("artifacts");
            jw.field("trajectory_csv", "trajectory.csv");
            if (a.common.emit_svg) jw.field("svg", "trajectory.svg");
            jw.end_object();
        });
}

// -------------------------------------------------------------- lv-branch --

struct LvBranchArgs {
    CommonArgs common;
    std::string system;
    double from = 0.49, to = 0.01;
    double cap = 50.0;
    double step0 = 0.005, step_floor = 1e-6;
    double cycle_tol = 1e-10;
    double rtol = 1e-10, atol = 1e-12;
};

int run_lv_branch(const LvBranchArgs& a) {
    return run_summarized(
        a.common, "lv-branch",
        [&](JsonWriter& jw) {
            jw.field("system", a.system);
            jw.field("from", a.from);
            jw.field("to", a.to);
            jw.field("cap", a.cap);
            jw.field("step0", a.step0);
            jw.field("step_floor", a.step_floor);
            jw.field("cycle_tol", a.cycle_tol);
            jw.field("rtol", a.rtol);
            jw.field("atol", a.atol);
        },
        [&](JsonWriter& jw, Stopwatch& watch) {
            LVSystem sys = load_lv_system(a.system);
            watch.mark("load");
            ContinuationOptions opts;
            opts.step0 = a.step0;
            opts.step_floor = a.step_floor;
            opts.amplitude_cap = a.cap;
            opts.cycle_tol = a.cycle_tol;
            opts.integrator.rtol = a.rtol;
            opts.integrator.atol = a.atol;
            PlanarBranch branch = continue_planar(sys, a.from, a.to, opts);
            watch.mark("solve");

            std::vector<std::vector<double>> rows;
            rows.reserve(branch.points.size());
            for (const auto& p : branch.points)
                rows.push_back({p.lambda, p.amplitude, p.period, p.anchor_u, p.anchor_v});
            std::vector<std::string> comments = {
                std::string("verdict: ") + verdict_name(branch.verdict) +
                " at lambda = " + format_g16(branch.lambda_final)};
            if (!branch.detail.empty()) comments.push_back(branch.detail);
            write_csv(join(a.common.out, "branch.csv"),
                      {"lambda", "amplitude", "period", "anchor_u", "anchor_v"}, rows, comments);
            if (a.common.emit_svg) {
                SvgOptions svg;
                svg.x_label = "lambda";
                svg.y_label = "amplitude";
                write_svg(join(a.common.out, "branch.svg"), amplitude_profile(branch), svg);
            }
            watch.mark("emit");

            jw.begin_object("results");
            jw.field("verdict", verdict_name(branch.verdict));
            jw.field("lambda_final", branch.lambda_final);
            jw.field("points", static_cast<int>(branch.points.size()));
            if (!branch.points.empty()) {
                jw.field("lambda_first", branch.points.front().lambda);
                jw.field("lambda_last", branch.points.back().lambda);
                jw.field("amplitude_first", branch.points.front().amplitude);
                jw.field("amplitude_last", branch.points.back().amplitude);
                jw.field("period_last", branch.points.back().period);
            }
            jw.field("amplitude_cap", branch.amplitude_cap);
            if (branch.hopf_fit_r2) jw.field("hopf_fit_r2", *branch.hopf_fit_r2);
            jw.field("hopf_fit_warning", branch.hopf_fit_warning);
            if (!branch.detail.empty()) jw.field("detail", branch.detail);
            jw.end_object();
            jw.begin_object("artifacts");
            jw.field("branch_csv", "branch.csv");
            if (a.common.emit_svg) jw.field("svg", "branch.svg");
            jw.end_object();
        });
}

// ---------------------------------------------------------------- hb-root --

struct HbRootArgs {
    CommonArgs common;
    std::string symbol;
    std::string seed = "1.0,0.0";
    double tol = 1e-13;
};

int run_hb_root(const HbRootArgs& a) {
    auto seed = parse_tuple(a.seed, 2, "--seed");
    return run_summarized(
        a.common, "hb-root",
        [&](JsonWriter& jw) {
            jw.field("symbol", a.symbol);
            jw.field("seed", a.seed);
            jw.field("tol", a.tol);
        },
        [&](JsonWriter& jw, Stopwatch& watch) {
            SymbolPolynomial poly = load_symbol(a.symbol);
            watch.mark("load");
            RootResult root = find_root(poly, seed[0], seed[1], a.tol);
            JMatrix jm = j_matrix(poly, root.w, root.lambda);
            LEval le = l_eval(poly, Complex(0.0, root.w), root.lambda);
            watch.mark("solve");
            jw.begin_object("results");
            jw.field("w0", root.w);
            jw.field("lambda0", root.lambda);
            jw.field("iterations", root.iterations);
            jw.field("residual", std::abs(le.L));
            jw.begin_object("j_matrix");
            jw.field("a11", jm.a11);
            jw.field("a12", jm.a12);
            jw.field("a21", jm.a21);
            jw.field("a22", jm.a22);
            jw.field("det", jm.det());
            jw.end_object();
            jw.end_object();
        });
}

// --------------------------------------------------------------- hb-check --

struct HbCheckArgs {
    CommonArgs common;
    std::string symbol;
    double q = 0.5;
    std::string box = "0.5,1.5,-0.5,0.5";
    int harmonics = 16;
    int grid_density = 161;
};

int run_hb_check(const HbCheckArgs& a) {
    auto corners = parse_tuple(a.box, 4, "--box");
    if (corners[0] >= corners[1] || corners[2] >= corners[3])
        throw CLI::ValidationError("--box: expected w_lo,w_hi,lambda_lo,lambda_hi with lo < hi");
    return run_summarized(
        a.common, "hb-check",
        [&](JsonWriter& jw) {
            jw.field("symbol", a.symbol);
            jw.field("q", a.q);
            jw.field("box", a.box);
            jw.field("harmonics", a.harmonics);
            jw.field("grid_density", a.grid_density);
        },
        [&](JsonWriter& jw, Stopwatch& watch) {
            SymbolPolynomial poly = load_symbol(a.symbol);
            watch.mark("load");
            Box box{corners[0], corners[1], corners[2], corners[3]};
            TheoremReport rep = check_theorem_conditions(poly, a.q, box, a.harmonics,
                                                         a.grid_density);
            watch.mark("solve");
            jw.begin_object("results");
            jw.field("all_pass", rep.all_pass());
            jw.field("sublevel_nonempty", rep.sublevel_nonempty);
            jw.field("interior", rep.interior);
            jw.field("simply_connected", rep.simply_connected);
            jw.field("unique_root_pass", rep.unique_root_pass);
            jw.field("det_pass", rep.det_pass);
            jw.field("nonresonance_pass", rep.nonresonance_pass);
            jw.field("component_count", rep.component_count);
            jw.field("root_count", rep.root_count);
            jw.field("root_w", rep.root_w);
            jw.field("root_lambda", rep.root_lambda);
            jw.field("det_j_at_root", rep.det_j_at_root);
            jw.field("min_abs_det_j", rep.min_abs_det_j);
            jw.field("nonresonance_margin", rep.nonresonance_margin);
            jw.field("worst_n", rep.worst_n);
            jw.field("enlargement_rounds", rep.enlargement_rounds);
            jw.begin_object("box");
            jw.field("w_lo", rep.box.w_lo);
            jw.field("w_hi", rep.box.w_hi);
            jw.field("lambda_lo", rep.box.lambda_lo);
            jw.field("lambda_hi", rep.box.lambda_hi);
            jw.end_object();
            jw.end_object();
        });
}

// -------------------------------------------------------------- hb-branch --

struct HbBranchArgs {
    CommonArgs common;
    std::string symbol;
    std::string nl = "cubic_sat";
    double eps = 0.05;
    double r_lo = 1e-3, r_hi = 1e3;
    int r_count = 61;
    double q = 0.5;
    int harmonics = 32, grid = 128;
    double fp_tol = 1e-12;
    int max_iter = 200;
    double newton_tol = 1e-13;
    std::string seed = "1.0,0.0";
};

ArParams make_ar_params(const HbBranchArgs& a, const std::vector<double>& seed) {
    ArParams params;
    params.q = a.q;
    params.harmonics = a.harmonics;
    params.grid = a.grid;
    params.fp_tol = a.fp_tol;
    params.max_iter = a.max_iter;
    params.newton_tol = a.newton_tol;
    params.w_seed = seed[0];
    params.lambda_seed = seed[1];
    return params;
}

void echo_hb_branch_inputs(const HbBranchArgs& a, JsonWriter& jw) {
    jw.field("symbol", a.symbol);
    jw.field("nl", a.nl);
    jw.field("eps", a.eps);
    jw.field("q", a.q);
    jw.field("harmonics", a.harmonics);
    jw.field("grid", a.grid);
    jw.field("fp_tol", a.fp_tol);
    jw.field("max_iter", a.max_iter);
    jw.field("newton_tol", a.newton_tol);
    jw.field("seed", a.seed);
}

int run_hb_branch(const HbBranchArgs& a) {
    auto seed = parse_tuple(a.seed, 2, "--seed");
    if (a.r_lo >= a.r_hi) throw CLI::ValidationError("--r-lo must be below --r-hi");
    Nonlinearity nl = make_nonlinearity(a.nl, a.eps);
    return run_summarized(
        a.common, "hb-branch",
        [&](JsonWriter& jw) {
            echo_hb_branch_inputs(a, jw);
            jw.field("r_lo", a.r_lo);
            jw.field("r_hi", a.r_hi);
            jw.field("r_count", a.r_count);
        },
        [&](JsonWriter& jw, Stopwatch& watch) {
            SymbolPolynomial poly = load_symbol(a.symbol);
            watch.mark("load");
            ArParams params = make_ar_params(a, seed);
            std::vector<double> grid = geometric_grid(a.r_lo, a.r_hi, a.r_count);
            SweepResult sweep = sweep_branch(poly, nl, grid, params);
            watch.mark("solve");

            std::vector<std::vector<double>> rows;
            rows.reserve(sweep.points.size());
            for (const auto& p : sweep.points)
                rows.push_back({p.r, p.lambda, p.w, p.sup_norm_x, p.residual,
                                p.contraction_estimate, static_cast<double>(p.iterations)});
            std::vector<std::string> comments;
            comments.push_back(sweep.completed
                                   ? std::string("completed: all ") +
                                         std::to_string(sweep.points.size()) + " points converged"
                                   : "failed at r = " + format_g16(sweep.failed_at_r) + ": " +
                                         sweep.failure);
            write_csv(join(a.common.out, "sweep.csv"),
                      {"r", "lambda", "w", "sup_norm_x", "residual", "contraction_estimate",
                       "iterations"},
                      rows, comments);
            if (a.common.emit_svg && !sweep.points.empty()) {
                std::vector<std::pair<double, double>> series;
                series.reserve(sweep.points.size());
                for (const auto& p : sweep.points) series.emplace_back(p.r, p.sup_norm_x);
                SvgOptions svg;
                svg.x_label = "r";
                svg.y_label = "sup|x_r|";
                svg.log_x = true;
                svg.log_y = true;
                write_svg(join(a.common.out, "sweep.svg"), series, svg);
            }
            watch.mark("emit");

            double max_lambda_q = 0, max_w_q = 0;
            for (double v : sweep.lambda_quotients) max_lambda_q = std::max(max_lambda_q, v);
            for (double v : sweep.w_quotients) max_w_q = std::max(max_w_q, v);
            jw.begin_object("results");
            jw.field("completed", sweep.completed);
            jw.field("points", static_cast<int>(sweep.points.size()));
            if (!sweep.points.empty()) {
                jw.field("sup_norm_first", sweep.points.front().sup_norm_x);
                jw.field("sup_norm_last", sweep.points.back().sup_norm_x);
                jw.field("lambda_first", sweep.points.front().lambda);
                jw.field("lambda_last", sweep.points.back().lambda);
                jw.field("w_first", sweep.points.front().w);
                jw.field("w_last", sweep.points.back().w);
            }
            jw.field("max_lambda_quotient", max_lambda_q);
            jw.field("max_w_quotient", max_w_q);
            if (!sweep.completed) {
                jw.field("failed_at_r", sweep.failed_at_r);
                jw.field("failure", sweep.failure);
            }
            jw.end_object();
            jw.begin_object("artifacts");
            jw.field("sweep_csv", "sweep.csv");
            if (a.common.emit_svg && !sweep.points.empty()) jw.field("svg", "sweep.svg");
            jw.end_object();
            if (!sweep.completed)
                throw FixedPointError("sweep failed at r = " + format_g16(sweep.failed_at_r) +
                                          ": " + sweep.failure,
                                      0.0);
        });
}

// ------------------------------------------------------------ hb-validate --

struct HbValidateArgs {
    HbBranchArgs base;  // reuses the solver flags; the r grid is ignored
    double r = 1.0;
    int m_check = 512;
};

int run_hb_validate(const HbValidateArgs& a) {
    auto seed = parse_tuple(a.base.seed, 2, "--seed");
    Nonlinearity nl = make_nonlinearity(a.base.nl, a.base.eps);
    return run_summarized(
        a.base.common, "hb-validate",
        [&](JsonWriter& jw) {
            echo_hb_branch_inputs(a.base, jw);
            jw.field("r", a.r);
            jw.field("m_check", a.m_check);
        },
        [&](JsonWriter& jw, Stopwatch& watch) {
            SymbolPolynomial poly = load_symbol(a.base.symbol);
            watch.mark("load");
            ArParams params = make_ar_params(a.base, seed);
            TripleState init(params.harmonics);
            HBBranchPoint point = fixed_point_ar(poly, nl, a.r, init, params);
            watch.mark("solve");
            ValidationReport rep = validate_solution(poly, nl, point, a.m_check);
            watch.mark("validate");
            jw.begin_object("results");
            jw.field("r", point.r);
            jw.field("lambda", point.lambda);
            jw.field("w", point.w);
            jw.field("sup_norm_x", point.sup_norm_x);
            jw.field("residual", point.residual);
            jw.field("contraction_estimate", point.contraction_estimate);
            jw.field("iterations", point.iterations);
            jw.field("spectral_residual", rep.spectral_residual);
            jw.field("time_domain_mismatch", rep.time_domain_mismatch);
            jw.field("period", rep.period);
            jw.field("check_grid_points", rep.grid_points);
            jw.end_object();
        });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cyclebranch: predator-prey cycle continuation and harmonic-balance branches"};
    app.require_subcommand(1);
    int exit_code = 0;

    LvHopfArgs hopf;
    auto* sub_hopf = app.add_subcommand("lv-hopf", "Locate the Hopf parameter of a system");
    sub_hopf->add_option("--system", hopf.system, "System config file")->required();
    sub_hopf->add_option("--lo", hopf.lo, "Bracket lower end")->capture_default_str();
    sub_hopf->add_option("--hi", hopf.hi, "Bracket upper end")->capture_default_str();
    sub_hopf->add_option("--tol", hopf.tol, "Bisection tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    hopf.common.attach(sub_hopf);
    sub_hopf->callback([&] { exit_code = run_lv_hopf(hopf); });

    LvCheckArgs check;
    auto* sub_check = app.add_subcommand("lv-check", "Check the cycle-existence conditions");
    sub_check->add_option("--system", check.system, "System config file")->required();
    sub_check->add_option("--grid-points", check.grid_points, "Probe grid size")
        ->check(CLI::Range(2, 1000000))
        ->capture_default_str();
    check.common.attach(sub_check);
    sub_check->callback([&] { exit_code = run_lv_check(check); });

    LvSimulateArgs sim;
    auto* sub_sim = app.add_subcommand("lv-simulate", "Integrate one trajectory");
    sub_sim->add_option("--system", sim.system, "System config file")->required();
    sub_sim->add_option("--lambda", sim.lambda, "Parameter value")->required();
    sub_sim->add_option("--x0", sim.x0, "Initial prey population")->capture_default_str();
    sub_sim->add_option("--y0", sim.y0, "Initial predator population")->capture_default_str();
    sub_sim->add_option("--t-end", sim.t_end, "Integration time")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_sim->add_flag("--log", sim.log_coords, "Integrate in (ln x, ln y)");
    sub_sim->add_option("--rtol", sim.rtol, "Relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_sim->add_option("--atol", sim.atol, "Absolute tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim.common.attach(sub_sim);
    sub_sim->callback([&] { exit_code = run_lv_simulate(sim); });

    LvBranchArgs branch;
    auto* sub_branch = app.add_subcommand("lv-branch", "Continue the cycle branch in lambda");
    sub_branch->add_option("--system", branch.system, "System config file")->required();
    sub_branch->add_option("--from", branch.from, "Start parameter")->required();
    sub_branch->add_option("--to", branch.to, "Stop parameter")->required();
    sub_branch->add_option("--cap", branch.cap, "Amplitude cap (log coordinates)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_branch->add_option("--step0", branch.step0, "Initial lambda step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_branch->add_option("--step-floor", branch.step_floor, "Smallest lambda step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_branch->add_option("--cycle-tol", branch.cycle_tol, "Cycle solve tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_branch->add_option("--rtol", branch.rtol, "Integrator relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_branch->add_option("--atol", branch.atol, "Integrator absolute tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    branch.common.attach(sub_branch);
    sub_branch->callback([&] {
        if (branch.from == branch.to)
            throw CLI::ValidationError("--from and --to must differ");
        exit_code = run_lv_branch(branch);
    });

    HbRootArgs root;
    auto* sub_root = app.add_subcommand("hb-root", "Solve L(wi; lambda) = 0 by damped Newton");
    sub_root->add_option("--symbol", root.symbol, "Symbol config file")->required();
    sub_root->add_option("--seed", root.seed, "Newton seed w,lambda")->capture_default_str();
    sub_root->add_option("--tol", root.tol, "Newton tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    root.common.attach(sub_root);
    sub_root->callback([&] { exit_code = run_hb_root(root); });

    HbCheckArgs hbc;
    auto* sub_hbc = app.add_subcommand("hb-check", "Certify the solvability conditions on a box");
    sub_hbc->add_option("--symbol", hbc.symbol, "Symbol config file")->required();
    sub_hbc->add_option("--q", hbc.q, "Sublevel radius")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbc->add_option("--box", hbc.box, "Search box w_lo,w_hi,lambda_lo,lambda_hi")
        ->capture_default_str();
    sub_hbc->add_option("--harmonics", hbc.harmonics, "Largest non-resonance harmonic")
        ->check(CLI::Range(4, 4096))
        ->capture_default_str();
    sub_hbc->add_option("--grid-density", hbc.grid_density, "Scan nodes per box side")
        ->check(CLI::Range(9, 100000))
        ->capture_default_str();
    hbc.common.attach(sub_hbc);
    sub_hbc->callback([&] { exit_code = run_hb_check(hbc); });

    HbBranchArgs hbb;
    auto* sub_hbb = app.add_subcommand("hb-branch", "Sweep the fixed-point branch over r");
    sub_hbb->add_option("--symbol", hbb.symbol, "Symbol config file")->required();
    sub_hbb->add_option("--nl", hbb.nl, "Nonlinearity: zero, linear, cubic_sat")
        ->check(CLI::IsMember({"zero", "linear", "cubic_sat"}))
        ->capture_default_str();
    sub_hbb->add_option("--eps", hbb.eps, "Nonlinearity strength")->capture_default_str();
    sub_hbb->add_option("--r-lo", hbb.r_lo, "Smallest amplitude parameter")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbb->add_option("--r-hi", hbb.r_hi, "Largest amplitude parameter")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbb->add_option("--r-count", hbb.r_count, "Geometric grid size")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    sub_hbb->add_option("--q", hbb.q, "Ball radius for the fixed point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbb->add_option("--harmonics", hbb.harmonics, "Retained harmonics N")
        ->check(CLI::Range(4, 4096))
        ->capture_default_str();
    sub_hbb->add_option("--grid", hbb.grid, "Collocation points M")
        ->check(CLI::Range(8, 65536))
        ->capture_default_str();
    sub_hbb->add_option("--fp-tol", hbb.fp_tol, "Fixed-point tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbb->add_option("--max-iter", hbb.max_iter, "Picard iteration cap")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    sub_hbb->add_option("--newton-tol", hbb.newton_tol, "Inner Newton tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbb->add_option("--seed", hbb.seed, "Newton seed w,lambda")->capture_default_str();
    hbb.common.attach(sub_hbb);
    sub_hbb->callback([&] {
        if (hbb.grid < 2 * hbb.harmonics + 2)
            throw CLI::ValidationError("--grid must be at least 2*harmonics + 2");
        exit_code = run_hb_branch(hbb);
    });

    HbValidateArgs hbv;
    auto* sub_hbv = app.add_subcommand("hb-validate", "Solve one fixed point and validate it");
    sub_hbv->add_option("--symbol", hbv.base.symbol, "Symbol config file")->required();
    sub_hbv->add_option("--nl", hbv.base.nl, "Nonlinearity: zero, linear, cubic_sat")
        ->check(CLI::IsMember({"zero", "linear", "cubic_sat"}))
        ->capture_default_str();
    sub_hbv->add_option("--eps", hbv.base.eps, "Nonlinearity strength")->capture_default_str();
    sub_hbv->add_option("--r", hbv.r, "Amplitude parameter")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbv->add_option("--q", hbv.base.q, "Ball radius for the fixed point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbv->add_option("--harmonics", hbv.base.harmonics, "Retained harmonics N")
        ->check(CLI::Range(4, 4096))
        ->capture_default_str();
    sub_hbv->add_option("--grid", hbv.base.grid, "Collocation points M")
        ->check(CLI::Range(8, 65536))
        ->capture_default_str();
    sub_hbv->add_option("--fp-tol", hbv.base.fp_tol, "Fixed-point tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbv->add_option("--max-iter", hbv.base.max_iter, "Picard iteration cap")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    sub_hbv->add_option("--newton-tol", hbv.base.newton_tol, "Inner Newton tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_hbv->add_option("--seed", hbv.base.seed, "Newton seed w,lambda")->capture_default_str();
    sub_hbv->add_option("--m-check", hbv.m_check, "Validation grid size")
        ->check(CLI::Range(8, 1048576))
        ->capture_default_str();
    hbv.base.common.attach(sub_hbv);
    sub_hbv->callback([&] {
        if (hbv.base.grid < 2 * hbv.base.harmonics + 2)
            throw CLI::ValidationError("--grid must be at least 2*harmonics + 2");
        if (hbv.m_check < 2 * hbv.base.harmonics + 2)
            throw CLI::ValidationError("--m-check must be at least 2*harmonics + 2");
        exit_code = run_hb_validate(hbv);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ToolError& e) {
        std::cerr << "cyclebranch: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "cyclebranch: internal error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
