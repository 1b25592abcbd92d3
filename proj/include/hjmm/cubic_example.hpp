#pragma once

// The non-convex example H(x, p) = p - p^3 - x on the line, with the local
// generating function
//   S(t, x; xi) = xi^2 / 2 + t xi - 3/4 (xi - x + t)^{4/3} + t^2 / 2
// whose minimum over xi is the variational solution near x = 0 for large t.

namespace hjmm {

enum class ExampleBranch { VPlus, VMinus, Middle };

const char* to_string(ExampleBranch b);

/// Real root of v - v^3 - x = 0 on the requested branch. VPlus needs x <= 0,
/// VMinus needs x >= 0, Middle needs |x| < 2 / (3 sqrt 3). Cardano / Viete
/// followed by Newton polish to |v - v^3 - x| <= 1e-12.
double cubic_root(ExampleBranch branch, double x);

/// Three real roots exist strictly inside this bound.
inline constexpr double kCubicThreeRootBound = 0.38490017945975052;  // 2 / (3 sqrt 3)

/// Signed power |y|^{4/3} and real cube root, as used by the local GF.
double real_cbrt(double y);

double example_gf(double t, double x, double xi);
double example_gf_dxi(double t, double x, double xi);
double example_gf_dx(double t, double x, double xi);
double example_gf_dt(double t, double x, double xi);

/// Admissible region of the local three-branch description.
struct ExampleWindow {
    double x_max = 0.5;
    double t_min = 2.0;
};

/// Closed-form minmax solution; Domain error outside the window.
double example_solution(double t, double x, const ExampleWindow& window = {});

/// Superdifferential at (t, 0): time slopes {0} and space slopes [lo, hi].
/// `sub_empty` marks the empty subdifferential. Numeric one-sided quotients are
/// reported next to the analytic branch slopes.
struct Superdifferential {
    double tau = 0.0;
    double p_lo = 0.0;
    double p_hi = 0.0;
    bool sub_empty = false;
    double left_slope = 0.0;   // numeric, from x < 0
    double right_slope = 0.0;  // numeric, from x > 0
    double time_slope = 0.0;   // numeric forward quotient
    double analytic_left = 0.0;
    double analytic_right = 0.0;
    bool consistent = false;   // numeric and analytic agree within 1e-6
};

Superdifferential example_superdifferential(double t, const ExampleWindow& window = {});

}  // namespace hjmm
