#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

// End-to-end tests: each case shells out to the real binary (path in
// CYCLEBRANCH_BIN) against the sample configs (CYCLEBRANCH_CONFIGS) and
// inspects exit codes and artifacts byte by byte.

namespace fs = std::filesystem;

namespace {

std::string env_or_fail(const char* name) {
    const char* v = std::getenv(name);
    REQUIRE_MESSAGE(v != nullptr, name << " must be set (run through ctest)");
    return v;
}

std::string bin() { return env_or_fail("CYCLEBRANCH_BIN"); }
std::string configs() { return env_or_fail("CYCLEBRANCH_CONFIGS"); }

std::string q(const std::string& s) { return "'" + s + "'"; }

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "cyclebranch_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& cmd) {
    int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot read " << path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

std::size_t count_substr(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

// Raw token following "key": in the machine-written summary (no whitespace).
std::string json_raw(const std::string& text, const std::string& key) {
    std::string marker = "\"" + key + "\":";
    std::size_t pos = text.find(marker);
    REQUIRE_MESSAGE(pos != std::string::npos, "key '" << key << "' not in summary");
    pos += marker.size();
    if (text[pos] == '"') {
        std::size_t end = text.find('"', pos + 1);
        return text.substr(pos + 1, end - pos - 1);
    }
    std::size_t end = text.find_first_of(",}]", pos);
    return text.substr(pos, end - pos);
}

double json_num(const std::string& text, const std::string& key) {
    return std::strtod(json_raw(text, key).c_str(), nullptr);
}

// The "out" input necessarily differs between output directories; drop it
// before comparing two summaries for equality.
std::string strip_out_field(const std::string& text) {
    std::size_t pos = text.find("\"out\":\"");
    REQUIRE(pos != std::string::npos);
    std::size_t rest = text.find("\"emit_svg\"", pos);
    REQUIRE(rest != std::string::npos);
    return text.substr(0, pos) + text.substr(rest);
}

std::string lv_system() { return (fs::path(configs()) / "lv_arctan.cfg").string(); }
std::string symbol_file() { return (fs::path(configs()) / "symbol_quad.cfg").string(); }

}  // namespace

TEST_CASE("lv-hopf writes an ok summary with timings") {
    fs::path dir = fresh_dir("hopf_ok");
    int rc = run(bin() + " lv-hopf --system " + q(lv_system()) + " --out " + q(dir.string()));
    CHECK(rc == 0);
    std::string summary = slurp(dir / "summary.json");
    CHECK(json_raw(summary, "tool") == "cyclebranch");
    CHECK(json_raw(summary, "subcommand") == "lv-hopf");
    CHECK(json_raw(summary, "status") == "ok");
    CHECK(std::abs(json_num(summary, "lambda_H") - 0.5) <= 1e-10);
    CHECK(std::abs(json_num(summary, "x_star") - 0.7146018366025517) <= 1e-9);
    CHECK(std::abs(json_num(summary, "trace_at_hopf")) <= 1e-9);
    CHECK(json_raw(summary, "timings_file") == "timings.txt");
    CHECK(summary.back() == '\n');

    std::string timings = slurp(dir / "timings.txt");
    CHECK(timings.find("solve_ms ") != std::string::npos);
    CHECK(timings.find("total_ms ") != std::string::npos);
}

TEST_CASE("domain failures exit 1 and keep the summary") {
    fs::path dir = fresh_dir("hopf_fail");
    int rc = run(bin() + " lv-hopf --system " + q(lv_system()) + " --lo 0.6 --hi 1.0 --out " +
                 q(dir.string()));
    CHECK(rc == 1);
    std::string summary = slurp(dir / "summary.json");
    CHECK(json_raw(summary, "status") == "error");
    CHECK(summary.find("\"error\":\"") != std::string::npos);
    CHECK(summary.find("\"results\"") == std::string::npos);
    CHECK(json_num(summary, "lo") == 0.6);  // inputs are echoed even on failure
}

TEST_CASE("usage errors exit 2 before any summary is written") {
    fs::path dir = fresh_dir("usage");
    std::string out = " --out " + q(dir.string());
    CHECK(run(bin() + " frobnicate") == 2);
    CHECK(run(bin() + " lv-hopf --system " + q(lv_system()) + " --bogus 1" + out) == 2);
    CHECK(run(bin() + " lv-hopf" + out) == 2);  // --system is required
    CHECK(run(bin() + " lv-hopf --system " + q(lv_system()) + " --tol 0" + out) == 2);
    CHECK(run(bin() + " hb-root --symbol " + q(symbol_file()) + " --seed 1.2" + out) == 2);
    CHECK(run(bin() + " hb-branch --symbol " + q(symbol_file()) +
              " --harmonics 32 --grid 64" + out) == 2);
    CHECK(run(bin() + " hb-branch --symbol " + q(symbol_file()) + " --nl bogus" + out) == 2);
    CHECK(run(bin() + " hb-branch --symbol " + q(symbol_file()) +
              " --r-lo 10 --r-hi 1" + out) == 2);
    CHECK(run(bin() + " lv-branch --system " + q(lv_system()) + " --from 0.3 --to 0.3" + out) ==
          2);
    CHECK(run(bin() + " hb-check --symbol " + q(symbol_file()) +
              " --box 1.5,0.5,-0.5,0.5" + out) == 2);
    CHECK_FALSE(fs::exists(dir / "summary.json"));
}

TEST_CASE("the default output directory comes from the environment") {
    fs::path dir = fresh_dir("env_out");
    int rc = run("CYCLEBRANCH_OUT=" + q(dir.string()) + " " + bin() + " lv-hopf --system " +
                 q(lv_system()));
    CHECK(rc == 0);
    std::string summary = slurp(dir / "summary.json");
    CHECK(json_raw(summary, "out") == dir.string());
    CHECK(json_raw(summary, "status") == "ok");
}

TEST_CASE("lv-simulate writes the trajectory table and chart") {
    fs::path dir = fresh_dir("simulate_log");
    int rc = run(bin() + " lv-simulate --system " + q(lv_system()) +
                 " --lambda 0.3 --t-end 5 --log --emit-svg --out " + q(dir.string()));
    CHECK(rc == 0);
    CHECK(first_line(slurp(dir / "trajectory.csv")) == "time,u,v");
    std::string svg = slurp(dir / "trajectory.svg");
    CHECK(count_substr(svg, "<polyline") == 1);
    std::string summary = slurp(dir / "summary.json");
    CHECK(json_raw(summary, "svg") == "trajectory.svg");
    CHECK(json_num(summary, "t_final") == 5.0);

    fs::path dir2 = fresh_dir("simulate_orig");
    rc = run(bin() + " lv-simulate --system " + q(lv_system()) +
             " --lambda 0.3 --t-end 5 --out " + q(dir2.string()));
    CHECK(rc == 0);
    CHECK(first_line(slurp(dir2 / "trajectory.csv")) == "time,x,y");
    CHECK_FALSE(fs::exists(dir2 / "trajectory.svg"));
}

TEST_CASE("hb-root reports the Newton solution and its Jacobian") {
    fs::path dir = fresh_dir("root");
    int rc = run(bin() + " hb-root --symbol " + q(symbol_file()) + " --seed 1.2,0.3 --out " +
                 q(dir.string()));
    CHECK(rc == 0);
    std::string summary = slurp(dir / "summary.json");
    CHECK(json_raw(summary, "status") == "ok");
    CHECK(std::abs(json_num(summary, "w0") - 1.0) <= 1e-12);
    CHECK(std::abs(json_num(summary, "lambda0")) <= 1e-12);
    CHECK(json_num(summary, "residual") <= 1e-12);
    CHECK(json_num(summary, "iterations") <= 25);
    CHECK(std::abs(json_num(summary, "a12") + 2.0) <= 1e-12);
    CHECK(std::abs(json_num(summary, "a21") - 1.0) <= 1e-12);
    CHECK(std::abs(json_num(summary, "det") - 2.0) <= 1e-9);
}

TEST_CASE("hb-check certifies the default box and rejects an oversized q") {
    fs::path dir = fresh_dir("check_ok");
    int rc = run(bin() + " hb-check --symbol " + q(symbol_file()) + " --out " + q(dir.string()));
    CHECK(rc == 0);
    std::string summary = slurp(dir / "summary.json");
    CHECK(json_raw(summary, "all_pass") == "true");
    CHECK(json_num(summary, "worst_n") == 0.0);
    CHECK(json_num(summary, "enlargement_rounds") == 1.0);
    CHECK(json_num(summary, "lambda_lo") == -1.0);
    CHECK(json_num(summary, "root_count") == 1.0);

    fs::path dir2 = fresh_dir("check_fat");
    rc = run(bin() + " hb-check --symbol " + q(symbol_file()) + " --q 1e6 --out " +
             q(dir2.string()));
    CHECK(rc == 1);
    std::string failed = slurp(dir2 / "summary.json");
    CHECK(json_raw(failed, "status") == "error");
    CHECK(failed.find("enlarge the box or shrink q") != std::string::npos);
}

TEST_CASE("hb-branch sweeps are deterministic and reproducible from the echo") {
    fs::path dir = fresh_dir("sweep_a");
    std::string cmd =
        bin() + " hb-branch --symbol " + q(symbol_file()) + " --out " + q(dir.string());
    CHECK(run(cmd) == 0);
    std::string summary = slurp(dir / "summary.json");
    std::string csv = slurp(dir / "sweep.csv");
    CHECK(json_raw(summary, "status") == "ok");
    CHECK(json_raw(summary, "completed") == "true");
    CHECK(json_num(summary, "points") == 61.0);
    CHECK(json_raw(summary, "lambda_first") == "0");  // odd nonlinearity: exact zero
    CHECK(json_raw(summary, "lambda_last") == "0");
    CHECK(std::abs(json_num(summary, "sup_norm_first") - 5.641895832671516e-4) <= 1e-12);
    CHECK(csv.find("# completed: all 61 points converged\n") != std::string::npos);
    CHECK(first_line(csv) == "r,lambda,w,sup_norm_x,residual,contraction_estimate,iterations");

    // identical invocation: bytes must match
    CHECK(run(cmd) == 0);
    CHECK(slurp(dir / "summary.json") == summary);
    CHECK(slurp(dir / "sweep.csv") == csv);

    // flags rebuilt from the inputs echo into another directory: only the
    // echoed out field may differ
    fs::path dir2 = fresh_dir("sweep_b");
    std::string rebuilt = bin() + " hb-branch --symbol " + q(json_raw(summary, "symbol")) +
                          " --nl " + json_raw(summary, "nl") + " --eps " +
                          json_raw(summary, "eps") + " --q " + json_raw(summary, "q") +
                          " --harmonics " + json_raw(summary, "harmonics") + " --grid " +
                          json_raw(summary, "grid") + " --fp-tol " +
                          json_raw(summary, "fp_tol") + " --max-iter " +
                          json_raw(summary, "max_iter") + " --newton-tol " +
                          json_raw(summary, "newton_tol") + " --seed " +
                          json_raw(summary, "seed") + " --r-lo " + json_raw(summary, "r_lo") +
                          " --r-hi " + json_raw(summary, "r_hi") + " --r-count " +
                          json_raw(summary, "r_count") + " --out " + q(dir2.string());
    CHECK(run(rebuilt) == 0);
    CHECK(slurp(dir2 / "sweep.csv") == csv);
    CHECK(strip_out_field(slurp(dir2 / "summary.json")) == strip_out_field(summary));
}

TEST_CASE("hb-branch failures keep the partial sweep and exit 1") {
    fs::path dir = fresh_dir("sweep_fail");
    int rc = run(bin() + " hb-branch --symbol " + q(symbol_file()) + " --max-iter 3 --out " +
                 q(dir.string()));
    CHECK(rc == 1);
    std::string summary = slurp(dir / "summary.json");
    CHECK(json_raw(summary, "status") == "error");
    CHECK(json_raw(summary, "completed") == "false");
    CHECK(json_num(summary, "failed_at_r") > 0.0);
    CHECK(json_num(summary, "points") >= 1.0);
    std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.find("# failed at r = ") != std::string::npos);
    CHECK(count_substr(csv, "\n") >= 3);  // header + at least one row + comment
}

TEST_CASE("hb-validate cross-checks the solved point") {
    fs::path dir = fresh_dir("validate");
    int rc = run(bin() + " hb-validate --symbol " + q(symbol_file()) + " --r 1 --out " +
                 q(dir.string()));
    CHECK(rc == 0);
    std::string summary = slurp(dir / "summary.json");
    CHECK(json_raw(summary, "status") == "ok");
    CHECK(json_raw(summary, "lambda") == "0");
    CHECK(json_num(summary, "residual") <= 1e-12);
    CHECK(json_num(summary, "contraction_estimate") < 1.0);
    CHECK(json_num(summary, "spectral_residual") <= 1e-8);
    CHECK(json_num(summary, "time_domain_mismatch") <= 1e-6);
    CHECK(std::abs(json_num(summary, "period") - 6.313098690635949) <= 1e-6);
    CHECK(json_num(summary, "check_grid_points") == 512.0);
}

TEST_CASE("lv-branch runs reproduce from the inputs echo") {
    fs::path dir = fresh_dir("branch_a");
    int rc = run(bin() + " lv-branch --system " + q(lv_system()) +
                 " --from 0.49 --to 0.3 --emit-svg --out " + q(dir.string()));
    CHECK(rc == 0);
    std::string summary = slurp(dir / "summary.json");
    std::string csv = slurp(dir / "branch.csv");
    CHECK(json_raw(summary, "status") == "ok");
    CHECK(json_raw(summary, "verdict") == "ReachedLambdaBound");
    CHECK(first_line(csv) == "lambda,amplitude,period,anchor_u,anchor_v");
    CHECK(csv.find("# verdict: ReachedLambdaBound at lambda = ") != std::string::npos);
    CHECK(count_substr(slurp(dir / "branch.svg"), "<polyline") == 1);

    fs::path dir2 = fresh_dir("branch_b");
    std::string rebuilt = bin() + " lv-branch --system " + q(json_raw(summary, "system")) +
                          " --from " + json_raw(summary, "from") + " --to " +
                          json_raw(summary, "to") + " --cap " + json_raw(summary, "cap") +
                          " --step0 " + json_raw(summary, "step0") + " --step-floor " +
                          json_raw(summary, "step_floor") + " --cycle-tol " +
                          json_raw(summary, "cycle_tol") + " --rtol " +
                          json_raw(summary, "rtol") + " --atol " + json_raw(summary, "atol") +
                          " --out " + q(dir2.string());
    CHECK(run(rebuilt) == 0);
    CHECK(slurp(dir2 / "branch.csv") == csv);
}
