#include "hjmm/cubic_example.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hjmm/errors.hpp"

namespace hjmm {

namespace {

double polish(double v, double x)
{
    for (int i = 0; i < 20; ++i) {
        const double f = v - v * v * v - x;
        const double df = 1.0 - 3.0 * v * v;
        if (std::abs(f) <= 1e-15 || df == 0.0) {
            break;
        }
        const double next = v - f / df;
        if (next == v) {
            break;
        }
        v = next;
    }
    return v;
}

// Roots of v^3 - v + x = 0, sorted descending when three are real.
int roots(double x, double out[3])
{
    if (std::abs(x) < kCubicThreeRootBound) {
        const double c = 2.0 / std::sqrt(3.0);
        const double arg = std::clamp(-1.5 * std::sqrt(3.0) * x, -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            out[k] = c * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
        }
        // Descending: largest, middle, smallest.
        return 3;
    }
    const double q = x;
    const double disc = std::sqrt(q * q / 4.0 - 1.0 / 27.0);
    out[0] = std::cbrt(-q / 2.0 + disc) + std::cbrt(-q / 2.0 - disc);
    return 1;
}

void check_window(double t, double x, const ExampleWindow& w)
{
    if (!(std::abs(x) <= w.x_max) || !(t >= w.t_min)) {
        std::ostringstream os;
        os << "example solution requested at (t, x) = (" << t << ", " << x << ") outside the window |x| <= "
           << w.x_max << ", t >= " << w.t_min;
        fail(ErrorKind::Domain, os.str());
    }
}

}  // namespace

const char* to_string(ExampleBranch b)
{
    switch (b) {
    case ExampleBranch::VPlus: return "v_plus";
    case ExampleBranch::VMinus: return "v_minus";
    case ExampleBranch::Middle: return "middle";
    }
    return "v_plus";
}

double cubic_root(ExampleBranch branch, double x)
{
    double r[3];
    const int n = roots(x, r);
    double v = 0.0;
    switch (branch) {
    case ExampleBranch::VPlus:
        if (x > 0.0) {
            fail(ErrorKind::Domain, "v_plus is the unique positive root only for x <= 0");
        }
        v = r[0];
        break;
    case ExampleBranch::VMinus:
        if (x < 0.0) {
            fail(ErrorKind::Domain, "v_minus is the unique negative root only for x >= 0");
        }
        v = n == 3 ? r[2] : r[0];
        break;
    case ExampleBranch::Middle:
        if (n != 3) {
            fail(ErrorKind::Domain, "middle root exists only for |x| < 2/(3 sqrt 3)");
        }
        v = r[1];
        break;
    }
    return polish(v, x);
}

double real_cbrt(double y) { return std::cbrt(y); }

double example_gf(double t, double x, double xi)
{
    const double y = std::abs(xi - x + t);
    return 0.5 * xi * xi + t * xi - 0.75 * std::pow(y, 4.0 / 3.0) + 0.5 * t * t;
}

double example_gf_dxi(double t, double x, double xi) { return xi + t - std::cbrt(xi - x + t); }

double example_gf_dx(double t, double x, double xi) { return std::cbrt(xi - x + t); }

double example_gf_dt(double t, double x, double xi) { return xi - std::cbrt(xi - x + t) + t; }

double example_solution(double t, double x, const ExampleWindow& window)
{
    check_window(t, x, window);
    if (x < 0.0) {
        return example_gf(t, x, cubic_root(ExampleBranch::VPlus, x) - t);
    }
    if (x > 0.0) {
        return example_gf(t, x, cubic_root(ExampleBranch::VMinus, x) - t);
    }
    return std::min(example_gf(t, 0.0, 1.0 - t), example_gf(t, 0.0, -1.0 - t));
}

Superdifferential example_superdifferential(double t, const ExampleWindow& window)
{
    check_window(t, 0.0, window);
    // Richardson-extrapolated one-sided quotients.
    const double h = 1e-5;
    auto u = [&](double tt, double xx) { return example_solution(tt, xx, window); };
    auto one_sided = [&](double dir) {
        const double d1 = (u(t, dir * h) - u(t, 0.0)) / (dir * h);
        const double d2 = (u(t, dir * h / 2) - u(t, 0.0)) / (dir * h / 2);
        return 2.0 * d2 - d1;
    };
    Superdifferential s;
    s.left_slope = one_sided(-1.0);
    s.right_slope = one_sided(1.0);
    const double ht = 1e-4;
    s.time_slope = (u(t + ht, 0.0) - u(t, 0.0)) / ht;
    s.analytic_left = example_gf_dx(t, 0.0, 1.0 - t);
    s.analytic_right = example_gf_dx(t, 0.0, -1.0 - t);
    s.consistent = std::abs(s.left_slope - s.analytic_left) <= 1e-6 &&
                   std::abs(s.right_slope - s.analytic_right) <= 1e-6 && std::abs(s.time_slope) <= 1e-6;
    // A concave kink: D+ is the segment between the one-sided slopes, D- is empty.
    s.tau = 0.0;
    s.p_lo = std::min(s.analytic_left, s.analytic_right);
    s.p_hi = std::max(s.analytic_left, s.analytic_right);
    s.sub_empty = s.analytic_left > s.analytic_right;
    return s;
}

}  // namespace hjmm
