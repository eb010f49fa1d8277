#include "cyclebranch/lvmodel.hpp"

#include <cmath>
#include <utility>

namespace cyclebranch {

InteractionTerm::InteractionTerm(TermKind kind, std::string name,
                                 std::function<double(double, double)> value,
                                 std::function<double(double, double)> slope, bool fd)
    : kind_(kind), name_(std::move(name)), value_(std::move(value)),
      slope_(std::move(slope)), fd_slope_(fd) {}

InteractionTerm InteractionTerm::arctan_linear() {
    return InteractionTerm(
        TermKind::ArctanLinear, "arctan_linear",
        [](double y, double lam) { return std::atan(y) - lam * y; },
        [](double y, double lam) { return 1.0 / (1.0 + y * y) - lam; }, false);
}

InteractionTerm InteractionTerm::quad_logistic() {
    return InteractionTerm(
        TermKind::QuadLogistic, "quad_logistic",
        [](double y, double lam) { return y - lam * y * y; },
        [](double y, double lam) { return 1.0 - 2.0 * lam * y; }, false);
}

InteractionTerm InteractionTerm::cubic_logistic() {
    return InteractionTerm(
        TermKind::CubicLogistic, "cubic_logistic",
        [](double y, double lam) { return y * y - lam * y * y * y; },
        [](double y, double lam) { return 2.0 * y - 3.0 * lam * y * y; }, false);
}

InteractionTerm InteractionTerm::custom(std::function<double(double, double)> value,
                                        std::function<double(double, double)> slope) {
    if (!value) throw ConfigError("custom interaction term needs a value callback");
    bool fd = !slope;
    std::function<double(double, double)> sl;
    if (fd) {
        auto f = value;
        sl = [f](double y, double lam) {
            double h = 1e-6 * std::max(1.0, std::fabs(y));
            return (f(y + h, lam) - f(y - h, lam)) / (2.0 * h);
        };
    } else {
        sl = std::move(slope);
    }
    return InteractionTerm(TermKind::Custom, "custom", std::move(value), std::move(sl), fd);
}

InteractionTerm InteractionTerm::from_name(const std::string& name) {
    if (name == "arctan_linear") return arctan_linear();
    if (name == "quad_logistic") return quad_logistic();
    if (name == "cubic_logistic") return cubic_logistic();
    throw ConfigError("unknown interaction term '" + name +
                      "' (expected arctan_linear, quad_logistic or cubic_logistic)");
}

double InteractionTerm::value(double y, double lambda) const { return value_(y, lambda); }
double InteractionTerm::slope(double y, double lambda) const { return slope_(y, lambda); }

LVSystem::LVSystem(double a_, double b_, double c_, double d_, InteractionTerm term_,
                   std::string name_)
    : a(a_), b(b_), c(c_), d(d_), term(std::move(term_)), name(std::move(name_)) {
    if (!(a > 0) || !(b > 0) || !(c > 0) || !(d > 0))
        throw ConfigError("LV coefficients a, b, c, d must all be positive");
}

std::array<double, 2> eval_rhs(const LVSystem& sys, double lambda, double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw ConfigError("eval_rhs: populations must be positive (the field lives on x, y > 0)");
    return {x * (sys.a - sys.b * y),
            y * (-sys.c + sys.d * x + sys.term.value(y, lambda))};
}

std::array<double, 2> eval_rhs_log(const LVSystem& sys, double lambda, double u, double v) {
    double y = std::exp(v);
    return {sys.a - sys.b * y,
            -sys.c + sys.d * std::exp(u) + sys.term.value(y, lambda)};
}

Mat2 lv_jacobian(const LVSystem& sys, double lambda, double x, double y) {
    Mat2 j;
    j.a11 = sys.a - sys.b * y;
    j.a12 = -sys.b * x;
    j.a21 = sys.d * y;
    j.a22 = -sys.c + sys.d * x + sys.term.value(y, lambda) +
            y * sys.term.slope(y, lambda);
    return j;
}

EquilibriumInfo equilibrium(const LVSystem& sys, double lambda) {
    EquilibriumInfo info;
    info.y_star = sys.y_star();
    double f_star = sys.term.value(info.y_star, lambda);
    if (!(sys.c > f_star))
        throw ExtinctionError("no coexistence equilibrium: c <= f(a/b; lambda) (c = " +
                              std::to_string(sys.c) + ", f = " + std::to_string(f_star) + ")");
    info.x_star = (sys.c - f_star) / sys.d;
    info.jacobian = lv_jacobian(sys, lambda, info.x_star, info.y_star);

    double tr = info.jacobian.trace();
    double det = info.jacobian.det();
    double disc = tr * tr - 4.0 * det;
    if (disc < 0) {
        double im = std::sqrt(-disc) / 2.0;
        info.eigenvalues = {std::complex<double>(tr / 2.0, im),
                            std::complex<double>(tr / 2.0, -im)};
    } else {
        double rt = std::sqrt(disc) / 2.0;
        info.eigenvalues = {std::complex<double>(tr / 2.0 + rt, 0.0),
                            std::complex<double>(tr / 2.0 - rt, 0.0)};
    }
    double slope_star = sys.term.slope(info.y_star, lambda);
    info.stability_sign = (slope_star > 0) - (slope_star < 0);
    return info;
}

double hopf_locate(const LVSystem& sys, double lambda_lo, double lambda_hi, double tol) {
    double ys = sys.y_star();
    auto g = [&](double lam) { return sys.term.slope(ys, lam); };
    double glo = g(lambda_lo), ghi = g(lambda_hi);
    if (glo == 0) return lambda_lo;
    if (ghi == 0) return lambda_hi;
    if ((glo > 0) == (ghi > 0))
        throw BracketError("df/dy(y*; lambda) has the same sign at both interval ends; "
                           "no Hopf value bracketed");
    double lo = lambda_lo, hi = lambda_hi;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (gm == 0) return mid;
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double lyapunov_rate(const LVSystem& sys, double lambda, double y) {
    double ys = sys.y_star();
    return sys.b * (y - ys) * (sys.term.value(y, lambda) - sys.term.value(ys, lambda));
}

std::vector<double> default_probe_grid(double y_star, int points) {
    std::vector<double> grid(points);
    double lo = std::log(1e-2 * y_star), hi = std::log(1e2 * y_star);
    for (int i = 0; i < points; ++i)
        grid[i] = std::exp(lo + (hi - lo) * i / double(points - 1));
    return grid;
}

ConditionReport check_proposition_conditions(const LVSystem& sys,
                                             const std::vector<double>& y_grid) {
    ConditionReport rep;
    double ys = sys.y_star();
    rep.grid_points = int(y_grid.size());
    rep.fd_slope_used = sys.term.uses_fd_slope();

    rep.slope_at_zero = sys.term.slope(ys, 0.0);
    rep.slope_at_one = sys.term.slope(ys, 1.0);
    rep.slope_positive_at_zero = rep.slope_at_zero > 0;
    rep.slope_negative_at_one = rep.slope_at_one < 0;

    bool pos_ok = true, neg_ok = true;
    double min_pos = 0, min_neg = 0;
    bool first = true;
    for (double y : y_grid) {
        if (std::fabs(y - ys) < 1e-12 * std::max(1.0, ys)) continue;
        double r0 = lyapunov_rate(sys, 0.0, y);
        double r1 = lyapunov_rate(sys, 1.0, y);
        if (first) {
            min_pos = r0;
            min_neg = -r1;
            first = false;
        } else {
            min_pos = std::min(min_pos, r0);
            min_neg = std::min(min_neg, -r1);
        }
        if (r0 <= 0 && pos_ok) {
            pos_ok = false;
            if (!rep.has_violation) {
                rep.has_violation = true;
                rep.violation_y = y;
                rep.violation_condition = 4;
            }
        }
        if (r1 >= 0 && neg_ok) {
            neg_ok = false;
            if (!rep.has_violation) {
                rep.has_violation = true;
                rep.violation_y = y;
                rep.violation_condition = 5;
            }
        }
    }
    rep.rate_positive_at_zero = pos_ok;
    rep.rate_negative_at_one = neg_ok;
    rep.min_rate_margin_at_zero = min_pos;
    rep.min_rate_margin_at_one = min_neg;
    return rep;
}

ConditionReport check_proposition_conditions(const LVSystem& sys) {
    return check_proposition_conditions(sys, default_probe_grid(sys.y_star()));
}

}  // namespace cyclebranch
