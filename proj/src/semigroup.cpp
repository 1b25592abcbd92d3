#include "hjmm/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjmm/errors.hpp"
#include "hjmm/interpolation.hpp"

namespace hjmm {

namespace {

std::vector<double> solve_once(const Propagator& pr, const SpaceGrid& grid, const DatumSpec& sigma)
{
    if (pr.t == pr.t1) {
        return sigma.sample(grid);
    }
    SolveOptions so = pr.options.solve;
    so.t0 = pr.t1;
    try {
        return solve_field(*pr.h, sigma, grid, {pr.t}, so).values.front();
    } catch (const Error& e) {
        std::ostringstream os;
        os << "propagation from t1 = " << pr.t1 << " to t = " << pr.t << ": " << e.what();
        throw Error(e.kind(), os.str());
    }
}

Propagator make(const HamiltonianSpec& h, double from, double to, const SemigroupOptions& o)
{
    return Propagator{std::make_shared<const HamiltonianSpec>(h), from, to, o};
}

std::size_t argmax_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    std::size_t k = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (d > best) {
            best = d;
            k = i;
        }
    }
    return k;
}

double kernel(double s) { return std::abs(s) >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - s * s)); }

double kernel_derivative(double s)
{
    if (std::abs(s) >= 1.0) {
        return 0.0;
    }
    const double q = 1.0 - s * s;
    return kernel(s) * (-2.0 * s / (q * q));
}

// Periodic cubic Hermite through (value, slope) samples.
struct PeriodicHermite {
    double lo;
    double h;
    std::vector<double> v;
    std::vector<double> g;

    void locate(double x, std::size_t& i, std::size_t& j, double& u) const
    {
        const std::size_t n = v.size();
        const double s = reduce_periodic(x - lo, h * double(n)) / h;
        double cell = std::floor(s);
        u = s - cell;
        i = std::size_t(cell) % n;
        j = (i + 1) % n;
    }

    double value(double x) const
    {
        std::size_t i, j;
        double u;
        locate(x, i, j, u);
        const double u2 = u * u;
        const double u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * v[i] + (u3 - 2 * u2 + u) * h * g[i] + (-2 * u3 + 3 * u2) * v[j] +
               (u3 - u2) * h * g[j];
    }

    double slope(double x) const
    {
        std::size_t i, j;
        double u;
        locate(x, i, j, u);
        const double u2 = u * u;
        return ((6 * u2 - 6 * u) * v[i] + (-6 * u2 + 6 * u) * v[j]) / h + (3 * u2 - 4 * u + 1) * g[i] +
               (3 * u2 - 2 * u) * g[j];
    }
};

bool separable_samples(const SpaceGrid& grid, const std::vector<double>& f, std::vector<double>& a,
                       std::vector<double>& b)
{
    const std::size_t n0 = grid.axis(0).n;
    const std::size_t n1 = grid.axis(1).n;
    a.assign(n0, 0.0);
    b.assign(n1, 0.0);
    double scale = 1.0;
    for (double v : f) {
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t i = 0; i < n0; ++i) {
        a[i] = f[grid.flat_index(i, 0)];
    }
    for (std::size_t j = 0; j < n1; ++j) {
        b[j] = f[grid.flat_index(0, j)] - f[grid.flat_index(0, 0)];
    }
    for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
            if (std::abs(f[grid.flat_index(i, j)] - a[i] - b[j]) > 1e-10 * scale) {
                return false;
            }
        }
    }
    return true;
}

ResidualReport finish(ResidualReport r)
{
    r.pass = r.residual <= r.bound;
    return r;
}

}  // namespace

DatumSpec grid_surrogate(const SpaceGrid& grid, const std::vector<double>& f)
{
    if (grid.dim() == 2) {
        std::vector<double> a;
        std::vector<double> b;
        if (separable_samples(grid, f, a, b)) {
            return DatumSpec::separable(monotone_cubic(SpaceGrid({grid.axis(0)}), std::move(a)),
                                        monotone_cubic(SpaceGrid({grid.axis(1)}), std::move(b)));
        }
    }
    return monotone_cubic(grid, f);
}

DatumSpec c1_surrogate(const DatumSpec& d, const SemigroupOptions& o)
{
    if (d.smoothness() == Smoothness::C1 && d.has_gradient()) {
        return d;
    }
    return mollify(d, o.c0_eps, o.mollify_samples);
}

std::vector<double> propagate(const Propagator& pr, const SpaceGrid& grid, const std::vector<double>& f)
{
    require(pr.h != nullptr, "propagator needs a Hamiltonian");
    require(f.size() == grid.size(), "grid data size differs from the grid");
    for (double v : f) {
        require(std::isfinite(v), "grid data must be finite");
    }
    if (pr.t == pr.t1) {
        return f;
    }
    return solve_once(pr, grid, grid_surrogate(grid, f));
}

std::vector<double> propagate(const Propagator& pr, const SpaceGrid& grid, const DatumSpec& d)
{
    require(pr.h != nullptr, "propagator needs a Hamiltonian");
    return solve_once(pr, grid, c1_surrogate(d, pr.options));
}

ResidualReport markov_residual(const HamiltonianSpec& h, const DatumSpec& d, double t1, double t2, double t3,
                               const SpaceGrid& grid, const SemigroupOptions& o)
{
    require(t1 <= t2 && t2 <= t3, "Markov residual needs ordered instants t1 <= t2 <= t3");
    const DatumSpec sigma = c1_surrogate(d, o);
    const std::vector<double> direct = solve_once(make(h, t1, t3, o), grid, sigma);
    std::vector<double> composed;
    if (t2 == t1) {
        composed = solve_once(make(h, t2, t3, o), grid, sigma);
    } else {
        const std::vector<double> mid = solve_once(make(h, t1, t2, o), grid, sigma);
        composed = propagate(make(h, t2, t3, o), grid, mid);
    }
    ResidualReport r;
    r.experiment = "markov";
    r.instants = {t1, t2, t3};
    r.residual = sup_norm(composed, direct);
    r.worst_x = grid.point(argmax_diff(composed, direct));
    r.tolerance = o.tolerance;
    r.bound = o.tolerance;
    return finish(r);
}

ResidualReport hysteresis_residual(const HamiltonianSpec& h, const DatumSpec& d, double t1, double t2,
                                   const SpaceGrid& grid, const SemigroupOptions& o)
{
    const DatumSpec sigma = c1_surrogate(d, o);
    const std::vector<double> start = sigma.sample(grid);
    std::vector<double> back = start;
    if (t1 != t2) {
        const std::vector<double> there = solve_once(make(h, t1, t2, o), grid, sigma);
        back = propagate(make(h, t2, t1, o), grid, there);
    }
    ResidualReport r;
    r.experiment = "hysteresis";
    r.instants = {t1, t2};
    r.residual = sup_norm(back, start);
    r.worst_x = grid.point(argmax_diff(back, start));
    r.tolerance = o.tolerance;
    r.bound = o.tolerance;
    if (d.smoothness() != Smoothness::C1) {
        r.details["mollifier_eps"] = o.c0_eps;
    }
    return finish(r);
}

ImplicationTable implication_table(const HamiltonianSpec& h, const DatumSpec& d, const std::vector<double>& instants,
                                   const SpaceGrid& grid, const SemigroupOptions& o)
{
    require(instants.size() >= 3 && std::is_sorted(instants.begin(), instants.end()),
            "implication table needs at least three ascending instants");
    ImplicationTable t;
    for (std::size_t i = 0; i < instants.size(); ++i) {
        for (std::size_t j = i + 1; j < instants.size(); ++j) {
            t.hysteresis.push_back(hysteresis_residual(h, d, instants[i], instants[j], grid, o));
            t.delta = std::max(t.delta, t.hysteresis.back().residual);
            for (std::size_t k = j + 1; k < instants.size(); ++k) {
                t.markov.push_back(markov_residual(h, d, instants[i], instants[j], instants[k], grid, o));
                t.markov_max = std::max(t.markov_max, t.markov.back().residual);
            }
        }
    }
    t.constant = t.delta > 0.0 ? t.markov_max / t.delta : 0.0;
    t.premise = std::all_of(t.hysteresis.begin(), t.hysteresis.end(),
                            [&](const ResidualReport& r) { return r.residual <= o.tolerance; });
    t.conclusion = t.markov_max <= t.assumed_constant * t.delta + o.tolerance;
    return t;
}

DatumSpec mollify(const DatumSpec& d, double eps, int samples)
{
    require(eps > 0.0, "mollifier width must be positive");
    if (d.dim() == 2) {
        require(d.is_separable(), "two-dimensional data are mollified part by part; the datum must be separable");
        return DatumSpec::separable(mollify(d.part(0), eps, samples), mollify(d.part(1), eps, samples));
    }
    require(d.periodic(), "mollify needs a periodic datum");
    const AxisDomain dom = d.domain().front();
    const double period = dom.hi - dom.lo;
    require(samples >= 16, "mollify needs at least 16 samples");
    const double h = period / samples;
    const int J = int(std::floor(eps / h));
    require(J >= 2, "mollifier width is below the sampling resolution");
    require(eps < 0.5 * period, "mollifier width must be below half the period");

    std::vector<double> s(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        s[std::size_t(i)] = d.value(vec1(dom.lo + i * h));
    }
    std::vector<double> w(static_cast<std::size_t>(2 * J + 1));
    std::vector<double> dw(w.size());
    double z = 0.0;
    for (int j = -J; j <= J; ++j) {
        w[std::size_t(j + J)] = kernel(j * h / eps);
        dw[std::size_t(j + J)] = kernel_derivative(j * h / eps) / eps;
        z += w[std::size_t(j + J)];
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] /= z;
        dw[k] /= z;
    }
    // Differences against the centre keep constants exact.
    PeriodicHermite ph{dom.lo, h, std::vector<double>(s.size()), std::vector<double>(s.size())};
    for (int i = 0; i < samples; ++i) {
        double v = 0.0;
        double g = 0.0;
        for (int j = -J; j <= J; ++j) {
            const double diff = s[std::size_t(((i - j) % samples + samples) % samples)] - s[std::size_t(i)];
            v += w[std::size_t(j + J)] * diff;
            g += dw[std::size_t(j + J)] * diff;
        }
        ph.v[std::size_t(i)] = s[std::size_t(i)] + v;
        ph.g[std::size_t(i)] = g;
    }
    auto shared = std::make_shared<const PeriodicHermite>(std::move(ph));
    std::ostringstream name;
    name << "mollified(" << d.name() << ", eps=" << eps << ")";
    return DatumSpec::from_functions(
        name.str(), {dom}, Smoothness::C1, [shared](const Vec& x) { return shared->value(x[0]); },
        [shared](const Vec& x) { return vec1(shared->slope(x[0])); });
}

C0Result c0_solve(const HamiltonianSpec& h, const DatumSpec& d, const std::vector<double>& schedule,
                  const SpaceGrid& grid, const std::vector<double>& times, const SemigroupOptions& o)
{
    require(schedule.size() >= 2, "c0_solve needs at least two widths");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        require(schedule[i] < schedule[i - 1], "mollifier schedule must decrease strictly");
    }
    C0Result res;
    std::vector<DatumSpec> sigmas;
    std::vector<SolutionField> fields;
    for (double eps : schedule) {
        sigmas.push_back(mollify(d, eps, o.mollify_samples));
        fields.push_back(solve_field(h, sigmas.back(), grid, times, o.solve));
    }
    double slack = -1e300;
    res.bounded = true;
    res.decreasing = true;
    for (std::size_t n = 0; n + 1 < fields.size(); ++n) {
        double du = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            du = std::max(du, sup_norm(fields[n].values[k], fields[n + 1].values[k]));
        }
        const double ds = sup_distance(sigmas[n], sigmas[n + 1], grid);
        res.solution_distances.push_back(du);
        res.datum_distances.push_back(ds);
        slack = std::max(slack, du - ds);
        res.bounded = res.bounded && du <= ds + o.tolerance;
        if (n > 0) {
            res.decreasing = res.decreasing && du < res.solution_distances[n - 1];
        }
    }
    res.last_deviation = sup_distance(sigmas.back(), d, grid);
    res.field = std::move(fields.back());
    res.field.notes.push_back("mollified datum, eps = " + format_number(schedule.back()));
    if (!res.decreasing) {
        res.field.notes.push_back("Cauchy diagnostic did not decrease: the sequence has not converged");
    }
    ResidualReport& r = res.report;
    r.experiment = "c0-cauchy";
    r.instants = times;
    r.residual = slack;
    r.tolerance = o.tolerance;
    r.bound = o.tolerance;
    r.details["last_deviation"] = res.last_deviation;
    r.details["last_distance"] = res.solution_distances.back();
    r.details["decreasing"] = res.decreasing ? 1.0 : 0.0;
    r.pass = res.bounded && res.decreasing;
    return res;
}

ResidualReport schedule_agreement(const C0Result& a, const C0Result& b, double tolerance)
{
    require(a.field.grid == b.field.grid && a.field.times == b.field.times, "schedules solved on different grids");
    ResidualReport r;
    r.experiment = "c0-cauchy";
    r.instants = a.field.times;
    for (std::size_t k = 0; k < a.field.times.size(); ++k) {
        r.residual = std::max(r.residual, sup_norm(a.field.values[k], b.field.values[k]));
    }
    r.tolerance = tolerance;
    r.bound = 2.0 * (std::max(a.last_deviation, b.last_deviation) + tolerance);
    r.details["last_deviation_a"] = a.last_deviation;
    r.details["last_deviation_b"] = b.last_deviation;
    return finish(r);
}

ResidualReport nonexpansive_audit(const HamiltonianSpec& h, const DatumSpec& d1, const DatumSpec& d2, double t,
                                  const SpaceGrid& grid, const SemigroupOptions& o)
{
    const std::vector<double> u1 = solve_once(make(h, 0.0, t, o), grid, c1_surrogate(d1, o));
    const std::vector<double> u2 = solve_once(make(h, 0.0, t, o), grid, c1_surrogate(d2, o));
    ResidualReport r;
    r.experiment = "nonexpansive";
    r.instants = {0.0, t};
    r.residual = sup_norm(u1, u2);
    r.worst_x = grid.point(argmax_diff(u1, u2));
    const double datum = sup_distance(d1, d2, grid);
    r.tolerance = o.tolerance;
    r.bound = datum + o.tolerance;
    r.details["datum_distance"] = datum;
    r.details["slack"] = r.bound - r.residual;
    return finish(r);
}

ResidualReport hamiltonian_continuity_audit(const HamiltonianSpec& h1, const HamiltonianSpec& h2, const DatumSpec& d,
                                            double t, const SpaceGrid& grid, const SemigroupOptions& o)
{
    require(h1.dim() == h2.dim() && h1.dim() == grid.dim(), "Hamiltonians and grid dimensions differ");
    require(h1.variant().index() == h2.variant().index(), "Hamiltonians must come from the same family");
    const DatumSpec sigma = c1_surrogate(d, o);
    const std::vector<double> u1 = solve_once(make(h1, 0.0, t, o), grid, sigma);
    const std::vector<double> u2 = solve_once(make(h2, 0.0, t, o), grid, sigma);

    // Momentum window visited by the characteristics.
    const double L = sigma.lipschitz_bound();
    const double B = L + t * std::max(h1.force_bound(L + 1.0), h2.force_bound(L + 1.0)) + 0.25;
    const int np = grid.dim() == 1 ? 201 : 41;
    double lo = 1e300;
    double hi = -1e300;
    const std::vector<Vec> pts = grid.points();
    for (double s : {0.0, 0.5 * t, t}) {
        for (const Vec& x : pts) {
            for (int i = 0; i < np; ++i) {
                for (int j = 0; j < (grid.dim() == 2 ? np : 1); ++j) {
                    const double a = -B + 2.0 * B * i / (np - 1);
                    const double b = -B + 2.0 * B * j / (np - 1);
                    const Vec p = grid.dim() == 1 ? vec1(a) : vec2(a, b);
                    const double diff = h1.value(s, x, p) - h2.value(s, x, p);
                    lo = std::min(lo, diff);
                    hi = std::max(hi, diff);
                }
            }
        }
    }
    ResidualReport r;
    r.experiment = "hamiltonian-continuity";
    r.instants = {0.0, t};
    r.residual = oscillation(u1, u2);
    r.tolerance = o.tolerance;
    r.bound = t * (hi - lo) + o.tolerance;
    r.details["hamiltonian_oscillation"] = hi - lo;
    r.details["momentum_window"] = B;
    r.details["drift"] = sup_norm(u1, u2);
    r.details["slack"] = r.bound - r.residual;
    return finish(r);
}

}  // namespace hjmm
