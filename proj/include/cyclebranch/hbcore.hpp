#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "cyclebranch/odecore.hpp"

namespace cyclebranch {

using Complex = std::complex<double>;

// Polynomial in lambda, ascending powers: coeffs[0] + coeffs[1]*lambda + ...
struct LambdaPoly {
    std::vector<double> coeffs;
    double value(double lambda) const;
    double deriv(double lambda) const;
};

// L(p; lambda) = p^l + a_{l-1}(lambda) p^{l-1} + ... + a_0(lambda), l >= 2.
// Coefficients are pluggable evaluators with analytic lambda-derivatives.
class SymbolPolynomial {
  public:
    using CoeffFn = std::function<double(double)>;

    SymbolPolynomial(int degree, std::vector<CoeffFn> values, std::vector<CoeffFn> derivs);
    static SymbolPolynomial from_lambda_polys(std::vector<LambdaPoly> polys);

    int degree() const { return degree_; }
    double coeff(int k, double lambda) const;          // a_k(lambda), k in [0, degree)
    double coeff_dlambda(int k, double lambda) const;  // a_k'(lambda)

  private:
    int degree_;
    std::vector<CoeffFn> values_;
    std::vector<CoeffFn> derivs_;
};

struct LEval {
    Complex L;
    Complex dL_dp;
    Complex dL_dlambda;
};

// Horner evaluation of L, dL/dp and dL/dlambda at (p, lambda).
LEval l_eval(const SymbolPolynomial& poly, Complex p, double lambda);

// Jacobian of (w, lambda) -> (Re L(wi; lambda), Im L(wi; lambda)); columns are
// the partials with respect to (lambda, w) in that order.
struct JMatrix {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    double det() const { return a11 * a22 - a12 * a21; }
};

JMatrix j_matrix(const SymbolPolynomial& poly, double w, double lambda);

struct RootResult {
    double w = 0;
    double lambda = 0;
    int iterations = 0;
};

// Damped Newton for L(wi; lambda) = 0. Throws NewtonError on divergence or on
// |det J| < 1e-12 along the way.
RootResult find_root(const SymbolPolynomial& poly, double w_seed, double lambda_seed,
                     double tol = 1e-13);

// Inverts (w, lambda) -> (Re L(wi; lambda), Im L(wi; lambda)) near the seed.
RootResult uv_to_wlambda(const SymbolPolynomial& poly, double u, double v, double w_seed,
                         double lambda_seed, double tol = 1e-13);

struct Box {
    double w_lo = 0, w_hi = 0;
    double lambda_lo = 0, lambda_hi = 0;
};

struct TheoremReport {
    Box requested_box;
    Box box;  // working box actually certified (may be auto-enlarged)
    int enlargement_rounds = 0;
    double q = 0;
    int harmonics = 0;
    int grid_density = 0;
    bool sublevel_nonempty = false;
    bool interior = false;  // sublevel set stays off the working box boundary
    int component_count = 0;
    bool simply_connected = false;  // one component, no grid holes
    int root_count = 0;
    double root_w = 0, root_lambda = 0;
    double det_j_at_root = 0;
    double min_abs_det_j = 0;        // over sublevel grid nodes
    double nonresonance_margin = 0;  // min_n min_sublevel |L(i n w; lambda)|, n = 0, 2..N
    int worst_n = 0;
    bool unique_root_pass = false;
    bool det_pass = false;
    bool nonresonance_pass = false;
    bool all_pass() const {
        return sublevel_nonempty && interior && simply_connected && unique_root_pass &&
               det_pass && nonresonance_pass;
    }
};

// Grid certification of the solvability conditions on D_q = {|L(wi;lambda)| <= q}:
// single connected sublevel component off the box boundary, a unique root of
// L(wi;lambda), nondegenerate J, and no resonance L(inw;lambda) = 0 for
// n = 0, 2..harmonics. A sublevel set touching the boundary triggers bounded
// auto-enlargement of the box (half-width growth per touched side, w kept
// positive); if four rounds do not free the boundary, InconclusiveBoxError.
TheoremReport check_theorem_conditions(const SymbolPolynomial& poly, double q, Box search_box,
                                       int harmonics, int grid_density = 161);

// Cos/sin tables on the uniform M-point grid (M divisible by 4) with exact
// quadrant symmetry: reflections reproduce sign flips bit-for-bit, so
// quadrature of odd grid functions cancels exactly.
class TrigTable {
  public:
    explicit TrigTable(int m);
    int size() const { return m_; }
    double cos_at(int idx) const { return c_[static_cast<std::size_t>(idx % m_)]; }
    double sin_at(int idx) const { return s_[static_cast<std::size_t>(idx % m_)]; }
    // cos/sin of harmonic n at grid node j
    double cos_nj(int n, int j) const { return c_[static_cast<std::size_t>((n * j) % m_)]; }
    double sin_nj(int n, int j) const { return s_[static_cast<std::size_t>((n * j) % m_)]; }

  private:
    int m_;
    std::vector<double> c_, s_;
};

// Full real Fourier coefficient set: mean plus cos/sin for n = 1..n_max.
struct FourierFull {
    double mean = 0;
    std::vector<double> cosc, sinc;  // index n-1 holds mode n

    explicit FourierFull(int n_max = 0) : cosc(static_cast<std::size_t>(n_max), 0.0),
                                          sinc(static_cast<std::size_t>(n_max), 0.0) {}
    int n_max() const { return static_cast<int>(cosc.size()); }
    double cos_n(int n) const { return cosc[static_cast<std::size_t>(n - 1)]; }
    double sin_n(int n) const { return sinc[static_cast<std::size_t>(n - 1)]; }
    double& cos_n(int n) { return cosc[static_cast<std::size_t>(n - 1)]; }
    double& sin_n(int n) { return sinc[static_cast<std::size_t>(n - 1)]; }
};

// Coefficients restricted to the complement of the first harmonic: mean and
// modes n = 2..n_max. There is no storage for n = 1 at all.
class FourierQ {
  public:
    explicit FourierQ(int n_max = 0);
    int n_max() const { return n_max_; }
    double mean = 0;
    double cos_n(int n) const { return cosc_[index(n)]; }
    double sin_n(int n) const { return sinc_[index(n)]; }
    double& cos_n(int n) { return cosc_[index(n)]; }
    double& sin_n(int n) { return sinc_[index(n)]; }
    // 2 pi mean^2 + pi sum_{n>=2} (cos_n^2 + sin_n^2)
    double l2_norm_sq() const;

  private:
    std::size_t index(int n) const;
    int n_max_;
    std::vector<double> cosc_, sinc_;
};

struct TripleState {
    double u = 0, v = 0;
    FourierQ y;
    explicit TripleState(int n_max = 0) : y(n_max) {}
    double norm() const;
};

// Forward analysis on the M-point grid: mean = (1/M) sum f_j, and the standard
// a_n = (2/M) sum f_j cos(2 pi n j / M), b_n likewise. Exact for trigonometric
// polynomials of degree <= n_max once M >= 2 n_max + 2.
FourierFull analyze_grid(const std::vector<double>& samples, const TrigTable& tab, int n_max);
std::vector<double> synth_grid(const FourierFull& coeffs, const TrigTable& tab);

// Mode-wise solve of L(w d/dt; lambda) h = y on the first-harmonic complement.
// Throws ResonanceError naming n when |L(inw; lambda)| < 1e-12.
FourierQ solve_q(const SymbolPolynomial& poly, double w, double lambda, const FourierQ& y);

struct SynthResult {
    std::vector<double> samples;
    double sup_norm = 0;
};

// x_j = r (pi^{-1/2} sin t_j + h(t_j)) on the table grid, plus sup_j |x_j|.
SynthResult synth_x(double r, const FourierQ& h, const TrigTable& tab);

struct Nonlinearity {
    std::function<double(double x, double lambda)> f;
    double k_lip = 0;  // declared |f(x1;l) - f(x2;l)| <= k_lip |x1 - x2|
    double l_lip = 0;  // declared |f(x;l1) - f(x;l2)| <= l_lip |x| |l1 - l2|
    std::string name = "custom";

    static Nonlinearity zero();
    static Nonlinearity linear(double eps);
    static Nonlinearity cubic_saturating(double eps);  // eps x^3 / (1 + x^2)
};

struct ArParams {
    double q = 0.5;     // ball radius in the triple norm
    int harmonics = 32;  // N
    int grid = 128;      // M collocation points; multiple of 4, >= 2N+2
    double fp_tol = 1e-12;
    int max_iter = 200;
    double newton_tol = 1e-13;
    double w_seed = 1.0;
    double lambda_seed = 0.0;
};

struct ArResult {
    TripleState state;
    double w = 0;
    double lambda = 0;
};

// One application of the operator: (u,v) -> (w,lambda) by inversion, h from
// solve_q, x from synth_x, then the projections of f(x;lambda) scaled by 1/r:
// u' = pi^{-1/2} <f, sin>/r, v' = pi^{-1/2} <f, cos>/r, y' = (f minus its
// first harmonic)/r. Throws BallError when the input leaves the q-ball.
ArResult apply_ar(const SymbolPolynomial& poly, const Nonlinearity& nl, double r,
                  const TripleState& state, const ArParams& params);

struct HBBranchPoint {
    double r = 0;
    double lambda = 0;
    double w = 0;
    TripleState triple;
    double sup_norm_x = 0;
    double residual = 0;
    double contraction_estimate = 0;
    int iterations = 0;
};

// Picard iteration of apply_ar from init until the step in the triple norm is
// <= fp_tol. Throws FixedPointError when max_iter is exhausted and BallError
// if an iterate leaves the ball.
HBBranchPoint fixed_point_ar(const SymbolPolynomial& poly, const Nonlinearity& nl, double r,
                             const TripleState& init, const ArParams& params);

std::vector<double> geometric_grid(double lo, double hi, int count);

struct SweepResult {
    std::vector<HBBranchPoint> points;
    // empirical Lipschitz quotients between consecutive points
    std::vector<double> lambda_quotients;
    std::vector<double> w_quotients;
    bool completed = true;
    double failed_at_r = 0;
    std::string failure;
};

// Warm-started fixed points along an increasing r grid; a failure keeps the
// points gathered so far and records the offending r.
SweepResult sweep_branch(const SymbolPolynomial& poly, const Nonlinearity& nl,
                         const std::vector<double>& r_grid, const ArParams& params);

struct ValidationReport {
    double spectral_residual = 0;       // sup |L(w d/dt)x - f(x)| on the check grid
    double time_domain_mismatch = 0;    // relative endpoint defect over one period
    double period = 0;                  // 2 pi / w
    int grid_points = 0;
};

// Two independent checks of a converged point: exact per-mode differentiation
// against f on a fine grid, and one-period integration of the companion system.
ValidationReport validate_solution(const SymbolPolynomial& poly, const Nonlinearity& nl,
                                   const HBBranchPoint& point, int m_check = 512);

}  // namespace cyclebranch
