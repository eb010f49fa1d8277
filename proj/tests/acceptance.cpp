// Release gate: end-to-end checks run against the installed CLI binary and the
// library. Each criterion prints exactly one PASS/FAIL line; the process exits
// nonzero if any criterion fails. Tolerances and time budgets are pinned here
// on purpose: loosening them is a release decision, not a test edit.
//
// Requires CYCLEBRANCH_BIN and CYCLEBRANCH_CONFIGS in the environment (the
// CMake test harness sets both).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cyclebranch/config.hpp"
#include "cyclebranch/errors.hpp"
#include "cyclebranch/hbcore.hpp"
#include "cyclebranch/lvmodel.hpp"
#include "cyclebranch/odecore.hpp"

namespace fs = std::filesystem;
using namespace cyclebranch;

namespace {

std::string g_bin;
std::string g_configs;
fs::path g_scratch;

std::string env_or_die(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) {
        std::fprintf(stderr, "environment variable %s is required\n", name);
        std::exit(2);
    }
    return v;
}

std::string q(const std::string& s) { return "'" + s + "'"; }

fs::path fresh_dir(const std::string& name) {
    fs::path dir = g_scratch / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& cmd) {
    int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Raw token following "key": in a flat JSON document; first occurrence wins.
std::string json_raw(const std::string& text, const std::string& key) {
    std::string needle = "\"" + key + "\":";
    auto pos = text.find(needle);
    if (pos == std::string::npos) return {};
    pos += needle.size();
    if (pos < text.size() && text[pos] == '"') {
        auto end = text.find('"', pos + 1);
        if (end == std::string::npos) return {};
        return text.substr(pos + 1, end - pos - 1);
    }
    auto end = text.find_first_of(",}\n", pos);
    if (end == std::string::npos) end = text.size();
    return text.substr(pos, end - pos);
}

double json_num(const std::string& text, const std::string& key) {
    std::string raw = json_raw(text, key);
    if (raw.empty()) return std::nan("");
    return std::strtod(raw.c_str(), nullptr);
}

// Numeric column of a CSV body: header skipped, "# ..." trailer skipped.
std::vector<double> csv_column(const std::string& text, std::size_t col) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::size_t start = 0;
        for (std::size_t c = 0; c < col; ++c) {
            start = line.find(',', start);
            if (start == std::string::npos) break;
            ++start;
        }
        if (start == std::string::npos) continue;
        out.push_back(std::strtod(line.c_str() + start, nullptr));
    }
    return out;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct Outcome {
    bool ok = true;
    std::string detail;  // headline on pass, first failure reason otherwise
};

void need(Outcome& o, bool cond, const std::string& why) {
    if (o.ok && !cond) {
        o.ok = false;
        o.detail = why;
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ------------------------------------------------------------- criterion 1 --

Outcome crit_hopf_location() {
    Outcome o;
    fs::path dir = fresh_dir("c1");
    Timer t;
    int rc = run(g_bin + " lv-hopf --system " + q(g_configs + "/lv_arctan.cfg") + " --out " +
                 q(dir.string()));
    double sec = t.seconds();
    std::string s = slurp(dir / "summary.json");
    need(o, rc == 0, "lv-hopf exited with code " + std::to_string(rc));
    double lh = json_num(s, "lambda_H");
    need(o, std::abs(lh - 0.5) <= 1e-10,
         "lambda_H = " + fmt(lh) + ", off 0.5 by more than 1e-10");
    need(o, sec < 1.0, "took " + fmt(sec) + " s, budget 1 s");
    if (o.ok) o.detail = "lambda_H within 1e-10 of 0.5 (" + fmt(sec) + " s)";
    return o;
}

// ------------------------------------------------------------- criterion 2 --

Outcome crit_sign_conditions() {
    Outcome o;
    fs::path dir = fresh_dir("c2");
    Timer t;
    int rc = run(g_bin + " lv-check --system " + q(g_configs + "/lv_arctan.cfg") + " --out " +
                 q(dir.string()));
    double sec = t.seconds();
    std::string s = slurp(dir / "summary.json");
    need(o, rc == 0, "lv-check exited with code " + std::to_string(rc));
    for (const char* key : {"slope_positive_at_zero", "slope_negative_at_one",
                            "rate_positive_at_zero", "rate_negative_at_one", "all_pass"}) {
        need(o, json_raw(s, key) == "true", std::string(key) + " is not true");
    }
    double m0 = json_num(s, "min_rate_margin_at_zero");
    double m1 = json_num(s, "min_rate_margin_at_one");
    need(o, m0 > 0.0, "rate margin at lambda=0 is " + fmt(m0) + ", expected positive");
    need(o, m1 > 0.0, "rate margin at lambda=1 is " + fmt(m1) + ", expected positive");
    need(o, sec < 1.0, "took " + fmt(sec) + " s, budget 1 s");

    // Independent direct probe of the Lyapunov rate signs over the same grid.
    LVSystem sys = load_lv_system(g_configs + "/lv_arctan.cfg");
    double ys = sys.y_star();
    int bad = 0;
    for (double y : default_probe_grid(ys)) {
        if (y == ys) continue;
        if (!(lyapunov_rate(sys, 0.0, y) > 0.0)) ++bad;
        if (!(lyapunov_rate(sys, 1.0, y) < 0.0)) ++bad;
    }
    need(o, bad == 0, std::to_string(bad) + " direct rate probes had the wrong sign");
    if (o.ok)
        o.detail = "all four sign conditions hold, margins " + fmt(m0) + " / " + fmt(m1) + " (" +
                   fmt(sec) + " s)";
    return o;
}

// ------------------------------------------------------------- criterion 3 --

struct BranchRun {
    std::string cmd;
    fs::path dir;
};
std::vector<BranchRun> g_branch_runs;  // reused by the reproducibility check

bool ladder_rung_met(const std::vector<double>& amps, double a) {
    double lo = amps.empty() ? 0.0 : amps.front();
    for (double v : amps) {
        if (v >= a && v <= 2.0 * a) return true;
        if (v < lo) lo = v;
    }
    // The branch can start above a low rung; blow-up past the cap still covers it.
    return lo >= a;
}

Outcome crit_blowup_ladder() {
    Outcome o;
    const char* cfgs[] = {"lv_arctan.cfg", "lv_quad.cfg", "lv_cubic.cfg"};
    for (const char* cfg : cfgs) {
        std::string name(cfg);
        name = name.substr(0, name.find('.'));
        fs::path dir = fresh_dir("c3_" + name);
        std::string cmd = g_bin + " lv-branch --system " + q(g_configs + "/" + cfg) +
                          " --from 0.49 --to 0.01 --cap 50 --out " + q(dir.string());
        Timer t;
        int rc = run(cmd);
        double sec = t.seconds();
        g_branch_runs.push_back({cmd, dir});
        std::string s = slurp(dir / "summary.json");
        need(o, rc == 0, name + ": lv-branch exited with code " + std::to_string(rc));
        need(o, json_raw(s, "verdict") == "BlewUp",
             name + ": verdict " + json_raw(s, "verdict") + ", expected BlewUp");
        double lf = json_num(s, "lambda_final");
        need(o, lf > 0.01 && lf < 0.49,
             name + ": lambda_final = " + fmt(lf) + " outside (0.01, 0.49)");
        std::vector<double> amps = csv_column(slurp(dir / "branch.csv"), 1);
        need(o, !amps.empty(), name + ": branch.csv has no data rows");
        for (double rung : {0.1, 1.0, 10.0, 50.0}) {
            need(o, ladder_rung_met(amps, rung),
                 name + ": no recorded amplitude covers the " + fmt(rung) + " rung");
        }
        need(o, sec < 300.0, name + ": took " + fmt(sec) + " s, budget 300 s");
        if (!o.ok) return o;
    }
    o.detail = "all three interaction terms blow up through every amplitude rung";
    return o;
}

// ------------------------------------------------------------- criterion 4 --

Outcome crit_jacobian_and_closure() {
    Outcome o;
    const char* cfgs[] = {"lv_arctan.cfg", "lv_quad.cfg", "lv_cubic.cfg"};
    const double lambdas[] = {0.0, 0.3, 1.0};
    const double pts[][2] = {{0.5, 0.7}, {2.0, 1.3}, {0.37, 2.9}};
    double worst = 0.0;
    for (const char* cfg : cfgs) {
        LVSystem sys = load_lv_system(g_configs + "/" + cfg);
        for (double lam : lambdas) {
            for (auto& p : pts) {
                Mat2 jac = lv_jacobian(sys, lam, p[0], p[1]);
                const double h = 1e-5;
                auto fxp = eval_rhs(sys, lam, p[0] + h, p[1]);
                auto fxm = eval_rhs(sys, lam, p[0] - h, p[1]);
                auto fyp = eval_rhs(sys, lam, p[0], p[1] + h);
                auto fym = eval_rhs(sys, lam, p[0], p[1] - h);
                double fd[4] = {(fxp[0] - fxm[0]) / (2 * h), (fyp[0] - fym[0]) / (2 * h),
                                (fxp[1] - fxm[1]) / (2 * h), (fyp[1] - fym[1]) / (2 * h)};
                double an[4] = {jac.a11, jac.a12, jac.a21, jac.a22};
                for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(fd[k] - an[k]));
            }
        }
    }
    need(o, worst <= 1e-5,
         "worst analytic-vs-finite-difference Jacobian entry gap " + fmt(worst));

    // Harmonic oscillator closure after one full turn at the default tolerances.
    Rhs ho = [](double, const State& y, State& dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    IntegratorOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    Trajectory traj = integrate(ho, {1.0, 0.0}, 0.0, 2.0 * std::acos(-1.0), opts);
    double ex = traj.states.back()[0] - 1.0;
    double ey = traj.states.back()[1];
    double closure = std::hypot(ex, ey);
    need(o, closure <= 1e-8, "oscillator closure error " + fmt(closure) + " exceeds 1e-8");
    if (o.ok)
        o.detail = "Jacobian gap " + fmt(worst) + ", oscillator closure " + fmt(closure);
    return o;
}

// ------------------------------------------------------------- criterion 5 --

Outcome crit_symbol_root() {
    Outcome o;
    fs::path dir = fresh_dir("c5");
    int rc = run(g_bin + " hb-root --symbol " + q(g_configs + "/symbol_quad.cfg") +
                 " --seed 1.2,0.3 --out " + q(dir.string()));
    std::string s = slurp(dir / "summary.json");
    need(o, rc == 0, "hb-root exited with code " + std::to_string(rc));
    double w0 = json_num(s, "w0");
    double l0 = json_num(s, "lambda0");
    need(o, std::abs(w0 - 1.0) <= 1e-12, "w0 = " + fmt(w0) + ", off 1 by more than 1e-12");
    need(o, std::abs(l0) <= 1e-12, "lambda0 = " + fmt(l0) + ", off 0 by more than 1e-12");
    double a11 = json_num(s, "a11"), a12 = json_num(s, "a12");
    double a21 = json_num(s, "a21"), a22 = json_num(s, "a22");
    double det = json_num(s, "det");
    need(o, std::abs(a11) <= 1e-9 && std::abs(a12 + 2.0) <= 1e-9 &&
                std::abs(a21 - 1.0) <= 1e-9 && std::abs(a22) <= 1e-9,
         "Jacobian [[" + fmt(a11) + "," + fmt(a12) + "],[" + fmt(a21) + "," + fmt(a22) +
             "]] is not [[0,-2],[1,0]] to roundoff");
    need(o, std::abs(det - 2.0) <= 1e-9, "det = " + fmt(det) + ", expected 2 to roundoff");
    if (o.ok) o.detail = "root (1, 0) and Jacobian [[0,-2],[1,0]] recovered to roundoff";
    return o;
}

// ------------------------------------------------------------- criterion 6 --

Outcome crit_certified_box() {
    Outcome o;
    SymbolPolynomial poly = load_symbol(g_configs + "/symbol_quad.cfg");
    Box box{0.5, 1.5, -0.5, 0.5};
    TheoremReport rep = check_theorem_conditions(poly, 0.5, box, 16);
    need(o, rep.all_pass(), "certification failed on the standard box");
    need(o, rep.min_abs_det_j > 0.0, "min |det J| margin is not positive");
    need(o, rep.nonresonance_margin > 0.0, "nonresonance margin is not positive");
    bool threw = false;
    try {
        check_theorem_conditions(poly, 1e6, box, 16);
    } catch (const InconclusiveBoxError&) {
        threw = true;
    }
    need(o, threw, "oversized q=1e6 did not raise the inconclusive-box error");
    if (o.ok)
        o.detail = "box certified (det margin " + fmt(rep.min_abs_det_j) +
                   ", nonresonance margin " + fmt(rep.nonresonance_margin) +
                   "); q=1e6 rejected";
    return o;
}

// ------------------------------------------------------------- criterion 7 --

Outcome crit_inverse_and_parseval() {
    Outcome o;
    SymbolPolynomial poly = load_symbol(g_configs + "/symbol_quad.cfg");
    const int n_max = 16;
    const int m = 4 * n_max;
    const double w = 1.3, lambda = 0.4;
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    FourierQ y(n_max);
    y.mean = dist(rng);
    for (int n = 2; n <= n_max; ++n) {
        y.cos_n(n) = dist(rng);
        y.sin_n(n) = dist(rng);
    }
    FourierQ h = solve_q(poly, w, lambda, y);
    double worst = 0.0;
    {
        double back = l_eval(poly, Complex(0.0, 0.0), lambda).L.real() * h.mean;
        worst = std::abs(back - y.mean);
    }
    for (int n = 2; n <= n_max; ++n) {
        Complex ln = l_eval(poly, Complex(0.0, n * w), lambda).L;
        Complex zh(h.cos_n(n), -h.sin_n(n));
        Complex zy = ln * zh;
        worst = std::max(worst, std::abs(zy.real() - y.cos_n(n)));
        worst = std::max(worst, std::abs(-zy.imag() - y.sin_n(n)));
    }
    need(o, worst <= 1e-13, "inverse identity defect " + fmt(worst) + " exceeds 1e-13");

    TrigTable tab(m);
    FourierFull c(n_max);
    c.mean = dist(rng);
    for (int n = 1; n <= n_max; ++n) {
        c.cos_n(n) = dist(rng);
        c.sin_n(n) = dist(rng);
    }
    std::vector<double> samples = synth_grid(c, tab);
    double grid_energy = 0.0;
    for (double v : samples) grid_energy += v * v;
    grid_energy /= static_cast<double>(m);
    double coeff_energy = c.mean * c.mean;
    for (int n = 1; n <= n_max; ++n)
        coeff_energy += 0.5 * (c.cos_n(n) * c.cos_n(n) + c.sin_n(n) * c.sin_n(n));
    double gap = std::abs(grid_energy - coeff_energy) / std::max(1.0, coeff_energy);
    need(o, gap <= 1e-13, "Parseval defect " + fmt(gap) + " exceeds 1e-13");
    if (o.ok) o.detail = "inverse defect " + fmt(worst) + ", Parseval defect " + fmt(gap);
    return o;
}

// ------------------------------------------------------------- criterion 8 --

std::string g_validate_cmd;
fs::path g_validate_dir;

Outcome crit_point_validation() {
    Outcome o;
    g_validate_dir = fresh_dir("c8");
    g_validate_cmd = g_bin + " hb-validate --symbol " + q(g_configs + "/symbol_quad.cfg") +
                     " --r 1.0 --out " + q(g_validate_dir.string());
    Timer t;
    int rc = run(g_validate_cmd);
    double sec = t.seconds();
    std::string s = slurp(g_validate_dir / "summary.json");
    need(o, rc == 0, "hb-validate exited with code " + std::to_string(rc));
    double res = json_num(s, "residual");
    double con = json_num(s, "contraction_estimate");
    double spec = json_num(s, "spectral_residual");
    double td = json_num(s, "time_domain_mismatch");
    need(o, res <= 1e-12, "fixed-point residual " + fmt(res) + " exceeds 1e-12");
    need(o, con < 1.0, "contraction estimate " + fmt(con) + " is not below 1");
    need(o, spec <= 1e-8, "spectral residual " + fmt(spec) + " exceeds 1e-8");
    need(o, td <= 1e-6, "time-domain mismatch " + fmt(td) + " exceeds 1e-6");
    need(o, sec < 10.0, "took " + fmt(sec) + " s, budget 10 s");
    if (o.ok)
        o.detail = "residual " + fmt(res) + ", spectral " + fmt(spec) + ", time-domain " +
                   fmt(td) + " (" + fmt(sec) + " s)";
    return o;
}

// ------------------------------------------------------------- criterion 9 --

std::string g_sweep_cmd;
fs::path g_sweep_dir;

Outcome crit_six_decades() {
    Outcome o;
    g_sweep_dir = fresh_dir("c9");
    g_sweep_cmd = g_bin + " hb-branch --symbol " + q(g_configs + "/symbol_quad.cfg") +
                  " --out " + q(g_sweep_dir.string());
    Timer t;
    int rc = run(g_sweep_cmd);
    double sec = t.seconds();
    std::string s = slurp(g_sweep_dir / "summary.json");
    need(o, rc == 0, "hb-branch exited with code " + std::to_string(rc));
    need(o, json_raw(s, "completed") == "true", "sweep did not complete");
    std::string csv = slurp(g_sweep_dir / "sweep.csv");
    std::vector<double> r = csv_column(csv, 0);
    std::vector<double> lam = csv_column(csv, 1);
    std::vector<double> ww = csv_column(csv, 2);
    std::vector<double> sup = csv_column(csv, 3);
    need(o, r.size() == 61, "expected 61 points, found " + std::to_string(r.size()));
    if (!o.ok) return o;

    bool increasing = true;
    for (std::size_t i = 1; i < sup.size(); ++i)
        if (!(sup[i] > sup[i - 1])) increasing = false;
    need(o, increasing, "sup norms are not strictly increasing");
    // The amplitude correction shaves a few 1e-8 relative off the top point, so
    // the decade ratio is compared with one part in 1e6 of slack.
    double decades = sup.back() / sup.front();
    need(o, decades >= 1e6 * (1.0 - 1e-6),
         "sup norm spans a factor " + fmt(decades) + ", short of 1e6");
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::acos(-1.0));
    double ratio_lo = sup.front() / (r.front() * inv_sqrt_pi);
    double ratio_hi = sup.back() / (r.back() * inv_sqrt_pi);
    need(o, ratio_lo >= 0.5 && ratio_lo <= 1.5,
         "leading-order ratio at r=1e-3 is " + fmt(ratio_lo));
    need(o, ratio_hi >= 0.5 && ratio_hi <= 1.5,
         "leading-order ratio at r=1e3 is " + fmt(ratio_hi));

    SymbolPolynomial poly = load_symbol(g_configs + "/symbol_quad.cfg");
    RootResult root = find_root(poly, 1.0, 0.0);
    need(o, std::abs(lam.front() - root.lambda) <= 1e-2,
         "lambda at r=1e-3 is " + fmt(lam.front()) + ", far from the linear root");
    need(o, std::abs(ww.front() - root.w) <= 1e-2,
         "w at r=1e-3 is " + fmt(ww.front()) + ", far from the linear root");
    need(o, sec < 120.0, "took " + fmt(sec) + " s, budget 120 s");
    if (o.ok)
        o.detail = "61 points span a factor " + fmt(decades) + " in sup norm (" + fmt(sec) +
                   " s)";
    return o;
}

// ------------------------------------------------------------ criterion 10 --

Outcome crit_dyadic_refinement() {
    Outcome o;
    SymbolPolynomial poly = load_symbol(g_configs + "/symbol_quad.cfg");
    Nonlinearity nl = Nonlinearity::cubic_saturating(0.05);
    ArParams params;
    auto max_or_zero = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        return m;
    };
    SweepResult coarse = sweep_branch(poly, nl, geometric_grid(1e-3, 1e3, 61), params);
    SweepResult fine = sweep_branch(poly, nl, geometric_grid(1e-3, 1e3, 121), params);
    need(o, coarse.completed && fine.completed, "a refinement sweep did not complete");
    if (!o.ok) return o;
    // Zero quotients are legitimate (lambda can stay identically flat), so the
    // comparison is clamped away from 0/0.
    const double clamp = 1e-9;
    double ql = (max_or_zero(fine.lambda_quotients) + clamp) /
                (max_or_zero(coarse.lambda_quotients) + clamp);
    double qw = (max_or_zero(fine.w_quotients) + clamp) /
                (max_or_zero(coarse.w_quotients) + clamp);
    need(o, ql > 0.5 && ql < 2.0, "lambda quotient ratio " + fmt(ql) + " outside (0.5, 2)");
    need(o, qw > 0.5 && qw < 2.0, "w quotient ratio " + fmt(qw) + " outside (0.5, 2)");
    if (o.ok)
        o.detail = "max difference quotients stable under refinement (ratios " + fmt(ql) +
                   ", " + fmt(qw) + ")";
    return o;
}

// ------------------------------------------------------------ criterion 11 --

Outcome crit_reproducibility() {
    Outcome o;
    struct Artifact {
        std::string label;
        std::string cmd;
        fs::path file;
    };
    std::vector<Artifact> artifacts;
    for (const auto& br : g_branch_runs) {
        artifacts.push_back({"lv-branch", br.cmd, br.dir / "branch.csv"});
        artifacts.push_back({"lv-branch", br.cmd, br.dir / "summary.json"});
    }
    artifacts.push_back({"hb-validate", g_validate_cmd, g_validate_dir / "summary.json"});
    artifacts.push_back({"hb-branch", g_sweep_cmd, g_sweep_dir / "sweep.csv"});
    artifacts.push_back({"hb-branch", g_sweep_cmd, g_sweep_dir / "summary.json"});

    std::vector<std::string> before;
    for (const auto& a : artifacts) {
        std::string body = slurp(a.file);
        need(o, !body.empty(), a.label + ": missing artifact " + a.file.filename().string());
        before.push_back(body);
    }
    if (!o.ok) return o;

    std::string last_cmd;
    for (const auto& a : artifacts) {
        if (a.cmd != last_cmd) {
            need(o, run(a.cmd) == 0, a.label + ": rerun exited nonzero");
            last_cmd = a.cmd;
        }
    }
    if (!o.ok) return o;
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
        need(o, slurp(artifacts[i].file) == before[i],
             artifacts[i].label + ": " + artifacts[i].file.filename().string() +
                 " differs between identical runs");
    }
    if (o.ok)
        o.detail = std::to_string(artifacts.size()) +
                   " artifacts byte-identical across repeated runs";
    return o;
}

}  // namespace

int main() {
    g_bin = env_or_die("CYCLEBRANCH_BIN");
    g_configs = env_or_die("CYCLEBRANCH_CONFIGS");
    g_scratch = fs::temp_directory_path() / "cyclebranch_acceptance";
    fs::create_directories(g_scratch);

    struct Entry {
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"Hopf location", crit_hopf_location},
        {"sign conditions", crit_sign_conditions},
        {"blow-up ladder", crit_blowup_ladder},
        {"Jacobian and oscillator closure", crit_jacobian_and_closure},
        {"symbol root", crit_symbol_root},
        {"certified box", crit_certified_box},
        {"inverse identity and Parseval", crit_inverse_and_parseval},
        {"point validation", crit_point_validation},
        {"six-decade sweep", crit_six_decades},
        {"dyadic refinement", crit_dyadic_refinement},
        {"reproducibility", crit_reproducibility},
    };

    int failures = 0;
    int id = 0;
    for (const auto& e : entries) {
        ++id;
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o.ok = false;
            o.detail = std::string("unexpected exception: ") + ex.what();
        }
        if (!o.ok) ++failures;
        std::printf("%s criterion %2d (%s): %s\n", o.ok ? "PASS" : "FAIL", id, e.name,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    if (failures != 0) std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
