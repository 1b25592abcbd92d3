#include "hjmm/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hjmm/errors.hpp"
#include "hjmm/grid.hpp"

namespace hjmm {

namespace {

struct Deriv {
    Vec dx;
    Vec dp;
    double da;
};

Deriv rhs(const HamiltonianSpec& h, double t, const Vec& x, const Vec& p)
{
    const Vec hp = h.grad_p(t, x, p);
    return {hp, -h.grad_x(t, x, p), p.dot(hp) - h.value(t, x, p)};
}

bool finite(const Vec& v) { return v.allFinite(); }

// Momentum-to-endpoint sensitivity of the flow from (from, X, P) to `to`:
// |dx/dP| in 1-D, |det| in 2-D, by central differences.
double sensitivity(const HamiltonianSpec& h, double from, double to, const Vec& X, const Vec& P, double d, int steps)
{
    const int k = int(X.size());
    Mat J(k, k);
    for (int j = 0; j < k; ++j) {
        Vec pp = P;
        Vec pm = P;
        pp[j] += d;
        pm[j] -= d;
        const Vec xp = integrate(h, PhaseState{from, X, pp, 0.0}, to, steps).x;
        const Vec xm = integrate(h, PhaseState{from, X, pm, 0.0}, to, steps).x;
        J.col(j) = (xp - xm) / (2.0 * d);
    }
    return std::abs(J.determinant());
}

double sample_coord(double lo, double hi, int i, int n, bool periodic)
{
    return periodic ? lo + (hi - lo) * i / n : lo + (hi - lo) * i / (n - 1);
}

}  // namespace

VectorField vector_field(const HamiltonianSpec& h, double t, const Vec& x, const Vec& p)
{
    require(x.size() == h.dim() && p.size() == h.dim(), "vector field evaluated with mismatched dimensions");
    return {h.grad_p(t, x, p), -h.grad_x(t, x, p)};
}

int default_steps(double span) { return std::max(1, int(std::ceil(kStepsPerUnitTime * std::abs(span) - 1e-9))); }

PhaseState integrate(const HamiltonianSpec& h, const PhaseState& from, double t1, int steps)
{
    require(steps >= 1, "integrate needs at least one step");
    require(from.x.size() == h.dim() && from.p.size() == h.dim(), "phase state dimension differs from H");
    const double dt = (t1 - from.t) / steps;
    Vec x = from.x;
    Vec p = from.p;
    double a = from.action;
    for (int n = 0; n < steps; ++n) {
        const double t = from.t + n * dt;
        const Deriv k1 = rhs(h, t, x, p);
        const Deriv k2 = rhs(h, t + 0.5 * dt, x + 0.5 * dt * k1.dx, p + 0.5 * dt * k1.dp);
        const Deriv k3 = rhs(h, t + 0.5 * dt, x + 0.5 * dt * k2.dx, p + 0.5 * dt * k2.dp);
        const Deriv k4 = rhs(h, t + dt, x + dt * k3.dx, p + dt * k3.dp);
        x += (dt / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        p += (dt / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
        a += (dt / 6.0) * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da);
        if (!finite(x) || !finite(p) || !std::isfinite(a)) {
            const double tf = t + dt;
            std::ostringstream os;
            os << "flow blew up at t = " << tf;
            throw IntegrationBlowup(tf, os.str());
        }
    }
    return PhaseState{t1, x, p, a};
}

PhaseState integrate(const HamiltonianSpec& h, const PhaseState& from, double t1)
{
    return integrate(h, from, t1, default_steps(t1 - from.t));
}

TwistReport twist_check(const HamiltonianSpec& h, double s, double t, const TwistOptions& options)
{
    require(s >= 0.0 && s < t && t <= h.horizon(), "twist_check needs 0 <= s < t <= T");
    return twist_check_interval(h, s, t, options);
}

TwistReport twist_check_interval(const HamiltonianSpec& h, double from, double to, const TwistOptions& options)
{
    require(from != to, "twist_check needs a non-empty interval");
    require(options.samples >= 3, "twist_check needs at least 3 samples per axis");
    TwistReport r;
    r.s = std::min(from, to);
    r.t = std::max(from, to);
    r.threshold = options.threshold;
    const double span = std::abs(to - from);
    const double window =
        options.momentum_window > 0.0 ? options.momentum_window : std::max(h.support_radius(), 2.0) + 1.0;
    r.momentum_window = window;

    if (const auto* s = std::get_if<SeparableConvexConcave>(&h.variant())) {
        const TwistReport a = twist_check_interval(*s->convex, from, to, options);
        const TwistReport b = twist_check_interval(*s->concave, from, to, options);
        const TwistReport& worst = a.min_derivative <= b.min_derivative ? a : b;
        r.samples = a.samples + b.samples;
        r.min_derivative = worst.min_derivative;
        r.worst_x = worst.worst_x;
        r.worst_p = worst.worst_p;
        r.analytic = a.analytic && b.analytic;
        r.pass = a.pass && b.pass;
        return r;
    }
    if (h.perturbation_free()) {
        // x = X + (t - s) A P exactly.
        const Mat A = h.quadratic_part();
        r.analytic = true;
        r.samples = 1;
        r.min_derivative = std::abs(A.determinant()) * std::pow(span, double(A.rows()));
        r.pass = r.min_derivative > options.threshold;
        return r;
    }

    const int k = h.dim();
    const bool periodic = h.x_periodic();
    double lo = 0.0;
    double hi = kTwoPi;
    if (const auto* c = std::get_if<CubicExample>(&h.variant())) {
        lo = -c->window;
        hi = c->window;
    }
    const int n = k == 1 ? options.samples : std::max(3, std::min(options.samples, 9));
    const int steps = default_steps(span);
    r.min_derivative = std::numeric_limits<double>::infinity();
    auto visit = [&](const Vec& X, const Vec& P) {
        const double d = sensitivity(h, from, to, X, P, options.fd_step, steps);
        ++r.samples;
        if (d < r.min_derivative) {
            r.min_derivative = d;
            r.worst_x = X[0];
            r.worst_p = P[0];
        }
    };
    if (k == 1) {
        for (int i = 0; i < n; ++i) {
            const Vec X = vec1(sample_coord(lo, hi, i, n, periodic));
            for (int j = 0; j < n; ++j) {
                visit(X, vec1(sample_coord(-window, window, j, n, false)));
            }
        }
    } else {
        for (int i0 = 0; i0 < n; ++i0) {
            for (int i1 = 0; i1 < n; ++i1) {
                const Vec X = vec2(sample_coord(lo, hi, i0, n, periodic), sample_coord(lo, hi, i1, n, periodic));
                for (int j0 = 0; j0 < n; ++j0) {
                    for (int j1 = 0; j1 < n; ++j1) {
                        visit(X, vec2(sample_coord(-window, window, j0, n, false),
                                      sample_coord(-window, window, j1, n, false)));
                    }
                }
            }
        }
    }
    r.pass = r.min_derivative > options.threshold;
    return r;
}

PhaseState characteristics_from_datum(const HamiltonianSpec& h, const DatumSpec& d, const Vec& x0, double t)
{
    require(d.smoothness() == Smoothness::C1, "characteristics need a C1 datum");
    require(d.dim() == h.dim(), "datum and Hamiltonian dimensions differ");
    return integrate(h, PhaseState{0.0, x0, d.gradient(x0), 0.0}, t);
}

}  // namespace hjmm
