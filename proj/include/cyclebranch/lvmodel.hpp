#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "cyclebranch/errors.hpp"

namespace cyclebranch {

// Predator-prey model with a competition-cooperation term in the predator
// equation:
//   x' = x (a - b y)
//   y' = y (-c + d x + f(y; lambda)),   x, y > 0, lambda in [0, 1].

enum class TermKind { ArctanLinear, QuadLogistic, CubicLogistic, Custom };

// f(y; lambda) together with its y-derivative. Built-in kinds carry analytic
// derivatives; custom terms may omit theirs, in which case a central finite
// difference (step 1e-6 * max(1, |y|)) is used and flagged.
class InteractionTerm {
  public:
    static InteractionTerm arctan_linear();   // f = atan(y) - lambda y
    static InteractionTerm quad_logistic();   // f = y - lambda y^2
    static InteractionTerm cubic_logistic();  // f = y^2 - lambda y^3
    static InteractionTerm custom(std::function<double(double, double)> value,
                                  std::function<double(double, double)> slope = {});
    static InteractionTerm from_name(const std::string& name);

    double value(double y, double lambda) const;
    double slope(double y, double lambda) const;  // df/dy
    TermKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool uses_fd_slope() const { return fd_slope_; }

  private:
    InteractionTerm(TermKind kind, std::string name,
                    std::function<double(double, double)> value,
                    std::function<double(double, double)> slope, bool fd);
    TermKind kind_;
    std::string name_;
    std::function<double(double, double)> value_;
    std::function<double(double, double)> slope_;
    bool fd_slope_;
};

struct LVSystem {
    double a, b, c, d;  // all positive
    InteractionTerm term;
    std::string name;

    LVSystem(double a_, double b_, double c_, double d_, InteractionTerm term_,
             std::string name_ = "");

    double y_star() const { return a / b; }
};

struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
};

struct EquilibriumInfo {
    double x_star = 0, y_star = 0;
    Mat2 jacobian;  // of the (x, y) vector field at the equilibrium
    std::array<std::complex<double>, 2> eigenvalues;
    // Sign of df/dy at (y*, lambda); equals the sign of the largest eigenvalue
    // real part (trace = y* df/dy, det = b d x* y* > 0).
    double stability_sign = 0;
};

// Vector fields. eval_rhs_log is the same flow in (u, v) = (ln x, ln y).
std::array<double, 2> eval_rhs(const LVSystem& sys, double lambda, double x, double y);
std::array<double, 2> eval_rhs_log(const LVSystem& sys, double lambda, double u, double v);

// Analytic Jacobian of eval_rhs at an arbitrary point.
Mat2 lv_jacobian(const LVSystem& sys, double lambda, double x, double y);

// Coexistence equilibrium (x*, y*) = ((c - f(a/b; lambda))/d, a/b).
// Throws ExtinctionError when c <= f(a/b; lambda).
EquilibriumInfo equilibrium(const LVSystem& sys, double lambda);

// Bisection for the Hopf value: the root of g(lambda) = df/dy(y*; lambda) on
// [lambda_lo, lambda_hi]. Throws BracketError when g does not change sign.
double hopf_locate(const LVSystem& sys, double lambda_lo, double lambda_hi,
                   double tol = 1e-12);

// b (y - y*) (f(y; lambda) - f(y*; lambda)): the derivative of the Lyapunov
// function V = d (x - x* ln x) + b (y - y* ln y) along trajectories.
double lyapunov_rate(const LVSystem& sys, double lambda, double y);

struct ConditionReport {
    // Hopf bracket signs: df/dy(y*; 0) > 0 and df/dy(y*; 1) < 0.
    bool slope_positive_at_zero = false;
    bool slope_negative_at_one = false;
    // Lyapunov rate signs on the probe grid: > 0 everywhere at lambda = 0
    // (cycles excluded, orbits expand) and < 0 everywhere at lambda = 1.
    bool rate_positive_at_zero = false;
    bool rate_negative_at_one = false;

    double slope_at_zero = 0, slope_at_one = 0;
    double min_rate_margin_at_zero = 0;  // min over grid of  rate(y; 0), y != y*
    double min_rate_margin_at_one = 0;   // min over grid of -rate(y; 1), y != y*

    // First grid point violating a rate condition, if any.
    bool has_violation = false;
    double violation_y = 0;
    int violation_condition = 0;  // 0: none, 4: rate at lambda=0, 5: rate at lambda=1

    bool fd_slope_used = false;
    int grid_points = 0;

    bool all_pass() const {
        return slope_positive_at_zero && slope_negative_at_one &&
               rate_positive_at_zero && rate_negative_at_one;
    }
};

// 200 log-spaced points on [1e-2, 1e2] * y_star.
std::vector<double> default_probe_grid(double y_star, int points = 200);

ConditionReport check_proposition_conditions(const LVSystem& sys,
                                             const std::vector<double>& y_grid);
ConditionReport check_proposition_conditions(const LVSystem& sys);

}  // namespace cyclebranch
