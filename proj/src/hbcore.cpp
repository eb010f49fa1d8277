#include "cyclebranch/hbcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "cyclebranch/errors.hpp"

namespace cyclebranch {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kResonanceGuard = 1e-12;
constexpr double kDegenerateDet = 1e-12;
}  // namespace

double LambdaPoly::value(double lambda) const {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * lambda + coeffs[i];
    return acc;
}

double LambdaPoly::deriv(double lambda) const {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 1;)
        acc = acc * lambda + coeffs[i] * static_cast<double>(i);
    return acc;
}

SymbolPolynomial::SymbolPolynomial(int degree, std::vector<CoeffFn> values,
                                   std::vector<CoeffFn> derivs)
    : degree_(degree), values_(std::move(values)), derivs_(std::move(derivs)) {
    if (degree_ < 2) throw ConfigError("SymbolPolynomial: degree must be at least 2");
    if (values_.size() != static_cast<std::size_t>(degree_) || derivs_.size() != values_.size())
        throw ConfigError("SymbolPolynomial: need one evaluator and one derivative per "
                          "coefficient a_0..a_{degree-1}");
    for (const auto& fn : values_)
        if (!fn) throw ConfigError("SymbolPolynomial: empty coefficient evaluator");
    for (const auto& fn : derivs_)
        if (!fn) throw ConfigError("SymbolPolynomial: empty coefficient derivative");
}

SymbolPolynomial SymbolPolynomial::from_lambda_polys(std::vector<LambdaPoly> polys) {
    std::vector<CoeffFn> values, derivs;
    values.reserve(polys.size());
    derivs.reserve(polys.size());
    for (const auto& p : polys) {
        values.push_back([p](double lambda) { return p.value(lambda); });
        derivs.push_back([p](double lambda) { return p.deriv(lambda); });
    }
    return SymbolPolynomial(static_cast<int>(polys.size()), std::move(values), std::move(derivs));
}

double SymbolPolynomial::coeff(int k, double lambda) const {
    if (k < 0 || k >= degree_) throw ConfigError("SymbolPolynomial: coefficient index out of range");
    return values_[static_cast<std::size_t>(k)](lambda);
}

double SymbolPolynomial::coeff_dlambda(int k, double lambda) const {
    if (k < 0 || k >= degree_) throw ConfigError("SymbolPolynomial: coefficient index out of range");
    return derivs_[static_cast<std::size_t>(k)](lambda);
}

LEval l_eval(const SymbolPolynomial& poly, Complex p, double lambda) {
    LEval out;
    out.L = Complex(1.0, 0.0);  // leading coefficient of p^degree
    out.dL_dp = Complex(0.0, 0.0);
    out.dL_dlambda = Complex(0.0, 0.0);
    for (int k = poly.degree() - 1; k >= 0; --k) {
        out.dL_dp = out.dL_dp * p + out.L;
        out.L = out.L * p + poly.coeff(k, lambda);
        out.dL_dlambda = out.dL_dlambda * p + poly.coeff_dlambda(k, lambda);
    }
    return out;
}

JMatrix j_matrix(const SymbolPolynomial& poly, double w, double lambda) {
    LEval e = l_eval(poly, Complex(0.0, w), lambda);
    JMatrix J;
    J.a11 = e.dL_dlambda.real();
    J.a12 = -e.dL_dp.imag();
    J.a21 = e.dL_dlambda.imag();
    J.a22 = e.dL_dp.real();
    return J;
}

namespace {

// Damped Newton for (Re L(wi;lambda), Im L(wi;lambda)) = (u, v).
RootResult newton_uv(const SymbolPolynomial& poly, double u, double v, double w_seed,
                     double lambda_seed, double tol) {
    double w = w_seed, lambda = lambda_seed;
    double f1 = 0, f2 = 0;
    auto residual = [&poly, u, v](double ww, double ll, double& r1, double& r2) {
        LEval e = l_eval(poly, Complex(0.0, ww), ll);
        r1 = e.L.real() - u;
        r2 = e.L.imag() - v;
        return std::hypot(r1, r2);
    };
    double fn = residual(w, lambda, f1, f2);
    for (int it = 0; it <= 100; ++it) {
        if (fn <= tol) return {w, lambda, it};
        JMatrix J = j_matrix(poly, w, lambda);
        double det = J.det();
        if (std::abs(det) < kDegenerateDet) {
            std::ostringstream msg;
            msg << "J(w,lambda) degenerate at w=" << w << ", lambda=" << lambda
                << " (|det|=" << std::abs(det) << ")";
            throw NewtonError(msg.str());
        }
        double dl = (-f1 * J.a22 + f2 * J.a12) / det;
        double dw = (-f2 * J.a11 + f1 * J.a21) / det;
        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 30 && !accepted; ++half) {
            double wn = w + step * dw;
            double ln = lambda + step * dl;
            double g1, g2;
            double gn = residual(wn, ln, g1, g2);
            if (gn < fn || gn <= tol) {
                w = wn;
                lambda = ln;
                fn = gn;
                f1 = g1;
                f2 = g2;
                accepted = true;
            } else {
                step *= 0.5;
            }
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "Newton made no progress at w=" << w << ", lambda=" << lambda
                << " (residual " << fn << ")";
            throw NewtonError(msg.str());
        }
    }
    std::ostringstream msg;
    msg << "Newton did not reach tol=" << tol << " within 100 iterations; last iterate w=" << w
        << ", lambda=" << lambda << ", residual " << fn;
    throw NewtonError(msg.str());
}

}  // namespace

RootResult find_root(const SymbolPolynomial& poly, double w_seed, double lambda_seed, double tol) {
    return newton_uv(poly, 0.0, 0.0, w_seed, lambda_seed, tol);
}

RootResult uv_to_wlambda(const SymbolPolynomial& poly, double u, double v, double w_seed,
                         double lambda_seed, double tol) {
    return newton_uv(poly, u, v, w_seed, lambda_seed, tol);
}

namespace {

struct GridScan {
    std::vector<double> ws, lambdas;
    std::vector<char> sub;  // row-major: [i * density + j], i over w, j over lambda
    bool touch_w_lo = false, touch_w_hi = false, touch_l_lo = false, touch_l_hi = false;
    bool any = false;
};

GridScan scan_sublevel(const SymbolPolynomial& poly, double q, const Box& box, int density) {
    GridScan g;
    g.ws.resize(static_cast<std::size_t>(density));
    g.lambdas.resize(static_cast<std::size_t>(density));
    for (int i = 0; i < density; ++i) {
        double t = static_cast<double>(i) / (density - 1);
        g.ws[static_cast<std::size_t>(i)] = box.w_lo + t * (box.w_hi - box.w_lo);
        g.lambdas[static_cast<std::size_t>(i)] = box.lambda_lo + t * (box.lambda_hi - box.lambda_lo);
    }
    g.sub.assign(static_cast<std::size_t>(density) * static_cast<std::size_t>(density), 0);
    for (int i = 0; i < density; ++i) {
        for (int j = 0; j < density; ++j) {
            double absL = std::abs(
                l_eval(poly, Complex(0.0, g.ws[static_cast<std::size_t>(i)]),
                       g.lambdas[static_cast<std::size_t>(j)])
                    .L);
            if (absL <= q) {
                g.sub[static_cast<std::size_t>(i * density + j)] = 1;
                g.any = true;
                if (i == 0) g.touch_w_lo = true;
                if (i == density - 1) g.touch_w_hi = true;
                if (j == 0) g.touch_l_lo = true;
                if (j == density - 1) g.touch_l_hi = true;
            }
        }
    }
    return g;
}

// 4-connected component count over a mask; value selects which cells count.
int count_components(const std::vector<char>& mask, int density, char value,
                     std::vector<int>* labels_out = nullptr) {
    std::vector<int> labels(mask.size(), -1);
    int count = 0;
    std::vector<int> stack;
    for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
        if (mask[static_cast<std::size_t>(start)] != value ||
            labels[static_cast<std::size_t>(start)] != -1)
            continue;
        stack.push_back(start);
        labels[static_cast<std::size_t>(start)] = count;
        while (!stack.empty()) {
            int node = stack.back();
            stack.pop_back();
            int i = node / density, j = node % density;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                int ni = i + di[k], nj = j + dj[k];
                if (ni < 0 || ni >= density || nj < 0 || nj >= density) continue;
                int nn = ni * density + nj;
                if (mask[static_cast<std::size_t>(nn)] == value &&
                    labels[static_cast<std::size_t>(nn)] == -1) {
                    labels[static_cast<std::size_t>(nn)] = count;
                    stack.push_back(nn);
                }
            }
        }
        ++count;
    }
    if (labels_out) *labels_out = std::move(labels);
    return count;
}

// Complement components that never touch the grid border are holes.
int count_holes(const std::vector<char>& sub, int density) {
    std::vector<int> labels;
    int comp = count_components(sub, density, 0, &labels);
    if (comp == 0) return 0;
    std::vector<char> touches(static_cast<std::size_t>(comp), 0);
    for (int i = 0; i < density; ++i) {
        for (int j = 0; j < density; ++j) {
            if (i != 0 && i != density - 1 && j != 0 && j != density - 1) continue;
            int lab = labels[static_cast<std::size_t>(i * density + j)];
            if (lab >= 0) touches[static_cast<std::size_t>(lab)] = 1;
        }
    }
    int holes = 0;
    for (char t : touches)
        if (!t) ++holes;
    return holes;
}

}  // namespace

TheoremReport check_theorem_conditions(const SymbolPolynomial& poly, double q, Box search_box,
                                       int harmonics, int grid_density) {
    if (grid_density < 3) throw ConfigError("check_theorem_conditions: grid density must be >= 3");
    if (q <= 0) throw ConfigError("check_theorem_conditions: q must be positive");
    if (!(search_box.w_hi > search_box.w_lo) || !(search_box.lambda_hi > search_box.lambda_lo))
        throw ConfigError("check_theorem_conditions: degenerate search box");
    if (harmonics < 0) throw ConfigError("check_theorem_conditions: harmonics must be >= 0");

    TheoremReport rep;
    rep.requested_box = search_box;
    rep.q = q;
    rep.harmonics = harmonics;
    rep.grid_density = grid_density;

    Box box = search_box;
    GridScan g;
    const int max_rounds = 4;
    int rounds = 0;
    for (;;) {
        g = scan_sublevel(poly, q, box, grid_density);
        bool touched = g.any && (g.touch_w_lo || g.touch_w_hi || g.touch_l_lo || g.touch_l_hi);
        if (!touched) break;
        if (rounds == max_rounds) {
            std::ostringstream msg;
            msg << "sublevel set {|L| <= " << q << "} still touches the search box after "
                << max_rounds << " enlargements (w in [" << box.w_lo << ", " << box.w_hi
                << "], lambda in [" << box.lambda_lo << ", " << box.lambda_hi
                << "]); enlarge the box or shrink q";
            throw InconclusiveBoxError(msg.str());
        }
        double w_width = box.w_hi - box.w_lo;
        double l_width = box.lambda_hi - box.lambda_lo;
        if (g.touch_w_lo) box.w_lo = std::max(box.w_lo - 0.5 * w_width, 1e-9);
        if (g.touch_w_hi) box.w_hi += 0.5 * w_width;
        if (g.touch_l_lo) box.lambda_lo -= 0.5 * l_width;
        if (g.touch_l_hi) box.lambda_hi += 0.5 * l_width;
        ++rounds;
    }
    rep.box = box;
    rep.enlargement_rounds = rounds;
    rep.sublevel_nonempty = g.any;
    rep.interior = g.any;

    if (!g.any) return rep;

    rep.component_count = count_components(g.sub, grid_density, 1);
    rep.simply_connected = rep.component_count == 1 && count_holes(g.sub, grid_density) == 0;

    // Root cells: non-strict sign straddle of both Re L and Im L over the four
    // corners, refined by Newton from the cell center and then deduplicated.
    std::vector<std::pair<double, double>> roots;
    for (int i = 0; i + 1 < grid_density; ++i) {
        for (int j = 0; j + 1 < grid_density; ++j) {
            double re_min = 0, re_max = 0, im_min = 0, im_max = 0;
            bool first = true;
            for (int ci = 0; ci < 2; ++ci) {
                for (int cj = 0; cj < 2; ++cj) {
                    Complex L = l_eval(poly,
                                       Complex(0.0, g.ws[static_cast<std::size_t>(i + ci)]),
                                       g.lambdas[static_cast<std::size_t>(j + cj)])
                                    .L;
                    if (first) {
                        re_min = re_max = L.real();
                        im_min = im_max = L.imag();
                        first = false;
                    } else {
                        re_min = std::min(re_min, L.real());
                        re_max = std::max(re_max, L.real());
                        im_min = std::min(im_min, L.imag());
                        im_max = std::max(im_max, L.imag());
                    }
                }
            }
            if (re_min > 0 || re_max < 0 || im_min > 0 || im_max < 0) continue;
            double wc = 0.5 * (g.ws[static_cast<std::size_t>(i)] +
                               g.ws[static_cast<std::size_t>(i + 1)]);
            double lc = 0.5 * (g.lambdas[static_cast<std::size_t>(j)] +
                               g.lambdas[static_cast<std::size_t>(j + 1)]);
            try {
                RootResult root = find_root(poly, wc, lc, 1e-13);
                if (root.w < box.w_lo || root.w > box.w_hi || root.lambda < box.lambda_lo ||
                    root.lambda > box.lambda_hi)
                    continue;
                bool dup = false;
                for (const auto& r0 : roots) {
                    if (std::hypot(root.w - r0.first, root.lambda - r0.second) < 1e-6) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) roots.emplace_back(root.w, root.lambda);
            } catch (const NewtonError&) {
                // cell refinement may fail off the basin; the cell then simply
                // contributes no root
            }
        }
    }
    rep.root_count = static_cast<int>(roots.size());
    rep.unique_root_pass = rep.root_count == 1;
    if (!roots.empty()) {
        rep.root_w = roots.front().first;
        rep.root_lambda = roots.front().second;
        rep.det_j_at_root = j_matrix(poly, rep.root_w, rep.root_lambda).det();
    }

    double min_det = std::numeric_limits<double>::infinity();
    double min_res = std::numeric_limits<double>::infinity();
    int worst_n = 0;
    for (int i = 0; i < grid_density; ++i) {
        for (int j = 0; j < grid_density; ++j) {
            if (!g.sub[static_cast<std::size_t>(i * grid_density + j)]) continue;
            double w = g.ws[static_cast<std::size_t>(i)];
            double lambda = g.lambdas[static_cast<std::size_t>(j)];
            min_det = std::min(min_det, std::abs(j_matrix(poly, w, lambda).det()));
            for (int n = 0; n <= harmonics; ++n) {
                if (n == 1) continue;
                double a = std::abs(l_eval(poly, Complex(0.0, n * w), lambda).L);
                if (a < min_res) {
                    min_res = a;
                    worst_n = n;
                }
            }
        }
    }
    rep.min_abs_det_j = min_det;
    rep.nonresonance_margin = min_res;
    rep.worst_n = worst_n;
    rep.det_pass = min_det > kDegenerateDet;
    rep.nonresonance_pass = min_res > kResonanceGuard;
    return rep;
}

TrigTable::TrigTable(int m) : m_(m) {
    if (m < 4 || m % 4 != 0)
        throw ConfigError("TrigTable: grid size must be a positive multiple of 4");
    c_.assign(static_cast<std::size_t>(m), 0.0);
    s_.assign(static_cast<std::size_t>(m), 0.0);
    int quarter = m / 4;
    for (int j = 0; j <= quarter; ++j) {
        double cj, sj;
        if (j == 0) {
            cj = 1.0;
            sj = 0.0;
        } else if (j == quarter) {
            cj = 0.0;
            sj = 1.0;
        } else {
            double angle = 2.0 * kPi * j / m;
            cj = std::cos(angle);
            sj = std::sin(angle);
        }
        // exact reflections: t, pi - t, pi + t, -t
        c_[static_cast<std::size_t>(j)] = cj;
        s_[static_cast<std::size_t>(j)] = sj;
        c_[static_cast<std::size_t>(m / 2 - j)] = -cj;
        s_[static_cast<std::size_t>(m / 2 - j)] = sj;
        c_[static_cast<std::size_t>(m / 2 + j)] = -cj;
        s_[static_cast<std::size_t>(m / 2 + j)] = -sj;
        c_[static_cast<std::size_t>((m - j) % m)] = cj;
        s_[static_cast<std::size_t>((m - j) % m)] = -sj;
    }
    c_[0] = 1.0;
    s_[0] = 0.0;
}

FourierQ::FourierQ(int n_max) : n_max_(n_max) {
    if (n_max < 0 || n_max == 1)
        throw ConfigError("FourierQ: harmonic count must be 0 or at least 2");
    std::size_t count = n_max >= 2 ? static_cast<std::size_t>(n_max - 1) : 0;
    cosc_.assign(count, 0.0);
    sinc_.assign(count, 0.0);
}

std::size_t FourierQ::index(int n) const {
    if (n < 2 || n > n_max_) throw ConfigError("FourierQ: mode index outside [2, n_max]");
    return static_cast<std::size_t>(n - 2);
}

double FourierQ::l2_norm_sq() const {
    double acc = 2.0 * kPi * mean * mean;
    for (double c : cosc_) acc += kPi * c * c;
    for (double s : sinc_) acc += kPi * s * s;
    return acc;
}

double TripleState::norm() const { return std::sqrt(u * u + v * v + y.l2_norm_sq()); }

FourierFull analyze_grid(const std::vector<double>& samples, const TrigTable& tab, int n_max) {
    int m = tab.size();
    if (static_cast<int>(samples.size()) != m)
        throw ConfigError("analyze_grid: sample count does not match the table grid");
    if (n_max < 0 || (n_max > 0 && 2 * n_max + 2 > m))
        throw ConfigError("analyze_grid: harmonic count too high for the grid");
    FourierFull out(n_max);
    auto at = [&](int j) { return samples[static_cast<std::size_t>(j)]; };
    // Quadrature pairs node j with node m - j: the table reflections are exact,
    // so each pair of an odd (resp. even) integrand cancels in the cos (resp.
    // sin) sums bit-for-bit and symmetric grid functions project to exact zeros.
    int half = m / 2;
    double mean = at(0) + at(half);
    for (int j = 1; j < half; ++j) mean += at(j) + at(m - j);
    out.mean = mean / m;
    for (int n = 1; n <= n_max; ++n) {
        double ca = at(0) * tab.cos_nj(n, 0) + at(half) * tab.cos_nj(n, half);
        double sa = at(0) * tab.sin_nj(n, 0) + at(half) * tab.sin_nj(n, half);
        for (int j = 1; j < half; ++j) {
            ca += at(j) * tab.cos_nj(n, j) + at(m - j) * tab.cos_nj(n, m - j);
            sa += at(j) * tab.sin_nj(n, j) + at(m - j) * tab.sin_nj(n, m - j);
        }
        out.cos_n(n) = 2.0 * ca / m;
        out.sin_n(n) = 2.0 * sa / m;
    }
    return out;
}

std::vector<double> synth_grid(const FourierFull& coeffs, const TrigTable& tab) {
    int m = tab.size();
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
        double acc = coeffs.mean;
        for (int n = 1; n <= coeffs.n_max(); ++n)
            acc += coeffs.cos_n(n) * tab.cos_nj(n, j) + coeffs.sin_n(n) * tab.sin_nj(n, j);
        out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
}

FourierQ solve_q(const SymbolPolynomial& poly, double w, double lambda, const FourierQ& y) {
    FourierQ h(y.n_max());
    Complex L0 = l_eval(poly, Complex(0.0, 0.0), lambda).L;
    if (std::abs(L0) < kResonanceGuard) {
        std::ostringstream msg;
        msg << "resonance: |L(0; lambda)| = " << std::abs(L0) << " below guard";
        throw ResonanceError(msg.str(), 0);
    }
    h.mean = y.mean / L0.real();
    for (int n = 2; n <= y.n_max(); ++n) {
        Complex Ln = l_eval(poly, Complex(0.0, n * w), lambda).L;
        if (std::abs(Ln) < kResonanceGuard) {
            std::ostringstream msg;
            msg << "resonance: |L(" << n << "wi; lambda)| = " << std::abs(Ln) << " below guard";
            throw ResonanceError(msg.str(), n);
        }
        Complex zy(y.cos_n(n), -y.sin_n(n));
        Complex zh = zy / Ln;
        h.cos_n(n) = zh.real();
        h.sin_n(n) = -zh.imag();
    }
    return h;
}

SynthResult synth_x(double r, const FourierQ& h, const TrigTable& tab) {
    if (r < 0) throw ConfigError("synth_x: r must be nonnegative");
    int m = tab.size();
    if (h.n_max() > 0 && 2 * h.n_max() + 2 > m)
        throw ConfigError("synth_x: harmonic count too high for the grid");
    const double pim12 = 1.0 / std::sqrt(kPi);
    SynthResult out;
    out.samples.assign(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
        double acc = pim12 * tab.sin_at(j) + h.mean;
        for (int n = 2; n <= h.n_max(); ++n)
            acc += h.cos_n(n) * tab.cos_nj(n, j) + h.sin_n(n) * tab.sin_nj(n, j);
        double xj = r * acc;
        out.samples[static_cast<std::size_t>(j)] = xj;
        out.sup_norm = std::max(out.sup_norm, std::abs(xj));
    }
    return out;
}

Nonlinearity Nonlinearity::zero() {
    return {[](double, double) { return 0.0; }, 0.0, 0.0, "zero"};
}

Nonlinearity Nonlinearity::linear(double eps) {
    return {[eps](double x, double) { return eps * x; }, std::abs(eps), 0.0, "linear"};
}

Nonlinearity Nonlinearity::cubic_saturating(double eps) {
    // sup |d/dx x^3/(1+x^2)| = 9/8, attained at x^2 = 3
    return {[eps](double x, double) { return eps * x * x * x / (1.0 + x * x); },
            1.125 * std::abs(eps), 0.0, "cubic_sat"};
}

namespace {

double diff_norm(const TripleState& a, const TripleState& b) {
    double du = a.u - b.u, dv = a.v - b.v;
    double acc = du * du + dv * dv;
    double dm = a.y.mean - b.y.mean;
    acc += 2.0 * kPi * dm * dm;
    int n_max = std::max(a.y.n_max(), b.y.n_max());
    for (int n = 2; n <= n_max; ++n) {
        double ac = n <= a.y.n_max() ? a.y.cos_n(n) : 0.0;
        double as = n <= a.y.n_max() ? a.y.sin_n(n) : 0.0;
        double bc = n <= b.y.n_max() ? b.y.cos_n(n) : 0.0;
        double bs = n <= b.y.n_max() ? b.y.sin_n(n) : 0.0;
        acc += kPi * ((ac - bc) * (ac - bc) + (as - bs) * (as - bs));
    }
    return std::sqrt(acc);
}

double contraction_from(const std::vector<double>& deltas) {
    double est = 0.0;
    int pairs = 0;
    for (int i = static_cast<int>(deltas.size()) - 1; i >= 1 && pairs < 3; --i) {
        if (deltas[static_cast<std::size_t>(i - 1)] <= 0.0) break;
        est = std::max(est, deltas[static_cast<std::size_t>(i)] /
                                deltas[static_cast<std::size_t>(i - 1)]);
        ++pairs;
    }
    return est;
}

void check_ar_params(const ArParams& params) {
    if (params.harmonics < 2) throw ConfigError("harmonics must be at least 2");
    if (params.grid < 2 * params.harmonics + 2)
        throw ConfigError("collocation grid must have at least 2*harmonics+2 points");
    if (params.q <= 0) throw ConfigError("ball radius q must be positive");
    if (params.fp_tol <= 0) throw ConfigError("fixed-point tolerance must be positive");
    if (params.max_iter < 1) throw ConfigError("max_iter must be at least 1");
}

TripleState promote(const TripleState& state, int n_max) {
    if (state.y.n_max() == n_max) return state;
    if (state.y.n_max() != 0)
        throw ConfigError("triple state harmonic count does not match params.harmonics");
    TripleState out(n_max);
    out.u = state.u;
    out.v = state.v;
    out.y.mean = state.y.mean;
    return out;
}

ArResult apply_ar_impl(const SymbolPolynomial& poly, const Nonlinearity& nl, double r,
                       const TripleState& state, const ArParams& params, const TrigTable& tab,
                       double w_seed, double lambda_seed) {
    if (!(r > 0)) throw ConfigError("apply_ar: r must be positive");
    if (!nl.f) throw ConfigError("apply_ar: nonlinearity has no evaluator");
    double norm = state.norm();
    if (norm > params.q) {
        std::ostringstream msg;
        msg << "triple norm " << norm << " outside the ball of radius q=" << params.q;
        throw BallError(msg.str());
    }
    RootResult inv = uv_to_wlambda(poly, state.u, state.v, w_seed, lambda_seed, params.newton_tol);
    FourierQ h = solve_q(poly, inv.w, inv.lambda, state.y);
    SynthResult x = synth_x(r, h, tab);
    int m = tab.size();
    std::vector<double> f(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        f[static_cast<std::size_t>(j)] = nl.f(x.samples[static_cast<std::size_t>(j)], inv.lambda);
    FourierFull coeffs = analyze_grid(f, tab, params.harmonics);
    const double sqrt_pi = std::sqrt(kPi);
    ArResult out{TripleState(params.harmonics), inv.w, inv.lambda};
    out.state.u = sqrt_pi * coeffs.sin_n(1) / r;
    out.state.v = sqrt_pi * coeffs.cos_n(1) / r;
    out.state.y.mean = coeffs.mean / r;
    for (int n = 2; n <= params.harmonics; ++n) {
        out.state.y.cos_n(n) = coeffs.cos_n(n) / r;
        out.state.y.sin_n(n) = coeffs.sin_n(n) / r;
    }
    return out;
}

}  // namespace

ArResult apply_ar(const SymbolPolynomial& poly, const Nonlinearity& nl, double r,
                  const TripleState& state, const ArParams& params) {
    check_ar_params(params);
    TrigTable tab(params.grid);
    return apply_ar_impl(poly, nl, r, promote(state, params.harmonics), params, tab,
                         params.w_seed, params.lambda_seed);
}

HBBranchPoint fixed_point_ar(const SymbolPolynomial& poly, const Nonlinearity& nl, double r,
                             const TripleState& init, const ArParams& params) {
    check_ar_params(params);
    TrigTable tab(params.grid);
    TripleState z = promote(init, params.harmonics);
    double w_seed = params.w_seed, lambda_seed = params.lambda_seed;
    std::vector<double> deltas;
    for (int k = 1; k <= params.max_iter; ++k) {
        ArResult next = apply_ar_impl(poly, nl, r, z, params, tab, w_seed, lambda_seed);
        if (next.state.norm() > params.q) {
            std::ostringstream msg;
            msg << "iterate " << k << " left the ball: norm " << next.state.norm() << " > q="
                << params.q << " (reduce the nonlinearity or the r range)";
            throw BallError(msg.str());
        }
        double delta = diff_norm(next.state, z);
        deltas.push_back(delta);
        z = next.state;
        w_seed = next.w;
        lambda_seed = next.lambda;
        if (delta <= params.fp_tol) {
            RootResult fin =
                uv_to_wlambda(poly, z.u, z.v, w_seed, lambda_seed, params.newton_tol);
            HBBranchPoint pt;
            pt.r = r;
            pt.lambda = fin.lambda;
            pt.w = fin.w;
            pt.triple = z;
            FourierQ h = solve_q(poly, fin.w, fin.lambda, z.y);
            pt.sup_norm_x = synth_x(r, h, tab).sup_norm;
            pt.residual = delta;
            pt.contraction_estimate = contraction_from(deltas);
            pt.iterations = k;
            return pt;
        }
    }
    std::ostringstream msg;
    msg << "Picard iteration did not contract to " << params.fp_tol << " within "
        << params.max_iter << " steps (last delta " << deltas.back()
        << ", contraction estimate " << contraction_from(deltas) << ")";
    throw FixedPointError(msg.str(), deltas.back());
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
    if (!(lo > 0) || !(hi > lo)) throw ConfigError("geometric_grid: need 0 < lo < hi");
    if (count < 2) throw ConfigError("geometric_grid: need at least two points");
    std::vector<double> out(static_cast<std::size_t>(count));
    double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    out.front() = lo;
    out.back() = hi;
    return out;
}

SweepResult sweep_branch(const SymbolPolynomial& poly, const Nonlinearity& nl,
                         const std::vector<double>& r_grid, const ArParams& params) {
    if (r_grid.empty()) throw ConfigError("sweep_branch: empty r grid");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (!(r_grid[i] > r_grid[i - 1]))
            throw ConfigError("sweep_branch: r grid must be strictly increasing");
    SweepResult out;
    ArParams p = params;
    TripleState init(params.harmonics);
    for (double r : r_grid) {
        try {
            HBBranchPoint pt = fixed_point_ar(poly, nl, r, init, p);
            out.points.push_back(pt);
            init = pt.triple;
            p.w_seed = pt.w;
            p.lambda_seed = pt.lambda;
        } catch (const ToolError& e) {
            out.completed = false;
            out.failed_at_r = r;
            out.failure = e.what();
            break;
        }
    }
    for (std::size_t i = 1; i < out.points.size(); ++i) {
        double dr = out.points[i].r - out.points[i - 1].r;
        out.lambda_quotients.push_back(std::abs(out.points[i].lambda - out.points[i - 1].lambda) /
                                       dr);
        out.w_quotients.push_back(std::abs(out.points[i].w - out.points[i - 1].w) / dr);
    }
    return out;
}

ValidationReport validate_solution(const SymbolPolynomial& poly, const Nonlinearity& nl,
                                   const HBBranchPoint& point, int m_check) {
    int n_top = std::max(point.triple.y.n_max(), 1);
    if (m_check < 2 * n_top + 2 || m_check % 4 != 0)
        throw ConfigError("validate_solution: check grid must be a multiple of 4 covering the "
                          "harmonics");
    if (!(point.w > 0)) throw ConfigError("validate_solution: point has nonpositive frequency");
    TrigTable tab(m_check);
    const double pim12 = 1.0 / std::sqrt(kPi);
    double r = point.r, w = point.w, lambda = point.lambda;

    FourierQ h = solve_q(poly, w, lambda, point.triple.y);
    FourierFull xc(n_top);
    xc.mean = r * h.mean;
    xc.sin_n(1) = r * pim12;  // phase normalization: first harmonic purely sin
    for (int n = 2; n <= point.triple.y.n_max(); ++n) {
        xc.cos_n(n) = r * h.cos_n(n);
        xc.sin_n(n) = r * h.sin_n(n);
    }

    FourierFull Lx(n_top);
    Lx.mean = l_eval(poly, Complex(0.0, 0.0), lambda).L.real() * xc.mean;
    for (int n = 1; n <= n_top; ++n) {
        Complex Ln = l_eval(poly, Complex(0.0, n * w), lambda).L;
        Complex zx(xc.cos_n(n), -xc.sin_n(n));
        Complex zr = Ln * zx;
        Lx.cos_n(n) = zr.real();
        Lx.sin_n(n) = -zr.imag();
    }

    std::vector<double> xg = synth_grid(xc, tab);
    std::vector<double> lg = synth_grid(Lx, tab);
    ValidationReport rep;
    rep.grid_points = m_check;
    rep.period = 2.0 * kPi / w;
    for (int j = 0; j < m_check; ++j) {
        double resid = lg[static_cast<std::size_t>(j)] -
                       nl.f(xg[static_cast<std::size_t>(j)], lambda);
        rep.spectral_residual = std::max(rep.spectral_residual, std::abs(resid));
    }

    // time-domain: integrate the companion system of the scalar equation over
    // one period in original time and compare the endpoint with the start
    int l = poly.degree();
    State z0(static_cast<std::size_t>(l), 0.0);
    for (int mder = 0; mder < l; ++mder) {
        double acc = (mder == 0) ? xc.mean : 0.0;
        for (int n = 1; n <= n_top; ++n) {
            Complex zeta(xc.cos_n(n), -xc.sin_n(n));
            Complex factor(1.0, 0.0);
            for (int rep_i = 0; rep_i < mder; ++rep_i) factor *= Complex(0.0, n);
            acc += (zeta * factor).real();
        }
        double wpow = 1.0;
        for (int rep_i = 0; rep_i < mder; ++rep_i) wpow *= w;
        z0[static_cast<std::size_t>(mder)] = wpow * acc;
    }
    Rhs rhs = [&poly, &nl, lambda, l](double, const State& z, State& dz) {
        for (int i = 0; i + 1 < l; ++i) dz[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i + 1)];
        double top = nl.f(z[0], lambda);
        for (int k = 0; k < l; ++k) top -= poly.coeff(k, lambda) * z[static_cast<std::size_t>(k)];
        dz[static_cast<std::size_t>(l - 1)] = top;
    };
    IntegratorOptions iopts;
    iopts.rtol = 1e-12;
    iopts.atol = 1e-14;
    Trajectory tr = integrate(rhs, z0, 0.0, rep.period, iopts);
    const State& zT = tr.states.back();
    double n0 = 0.0, dn = 0.0;
    for (int i = 0; i < l; ++i) {
        double zi = z0[static_cast<std::size_t>(i)];
        double di = zT[static_cast<std::size_t>(i)] - zi;
        n0 += zi * zi;
        dn += di * di;
    }
    rep.time_domain_mismatch = n0 > 0 ? std::sqrt(dn / n0) : std::sqrt(dn);
    return rep;
}

}  // namespace cyclebranch
