#include "hjmm/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjmm/errors.hpp"
#include "hjmm/parallel.hpp"

namespace hjmm {

namespace {

// Grid values with one ghost layer on non-periodic axes.
struct Stencil {
    const SpaceGrid& grid;
    std::size_t n0;
    std::size_t n1;

    explicit Stencil(const SpaceGrid& g)
        : grid(g), n0(g.axis(0).n), n1(g.dim() == 2 ? g.axis(1).n : 1)
    {
    }

    std::size_t index(std::size_t i0, std::size_t i1) const { return i0 * n1 + i1; }

    // u at (i0, i1) shifted by `m` cells along `axis`; |m| <= 1 beyond the edge.
    double at(const std::vector<double>& u, std::size_t i0, std::size_t i1, int axis, long m) const
    {
        const Axis& a = grid.axis(axis);
        const long n = long(a.n);
        const long i = long(axis == 0 ? i0 : i1) + m;
        auto get = [&](long j) { return axis == 0 ? u[index(std::size_t(j), i1)] : u[index(i0, std::size_t(j))]; };
        if (a.periodic) {
            return get(((i % n) + n) % n);
        }
        if (i < 0) {
            return 2.0 * get(0) - get(1);
        }
        if (i >= n) {
            return 2.0 * get(n - 1) - get(n - 2);
        }
        return get(i);
    }
};

struct Slopes {
    Vec lo;
    Vec hi;
    Vec avg;
    Vec jump;  // D+ - D-
};

Slopes slopes(const Stencil& s, const std::vector<double>& u, std::size_t i0, std::size_t i1)
{
    const int dim = s.grid.dim();
    Slopes r{zeros(dim), zeros(dim), zeros(dim), zeros(dim)};
    const double c = u[s.index(i0, i1)];
    for (int a = 0; a < dim; ++a) {
        const double dx = s.grid.axis(a).spacing();
        const double dm = (c - s.at(u, i0, i1, a, -1)) / dx;
        const double dp = (s.at(u, i0, i1, a, 1) - c) / dx;
        r.lo[a] = std::min(dm, dp);
        r.hi[a] = std::max(dm, dp);
        r.avg[a] = 0.5 * (dm + dp);
        r.jump[a] = dp - dm;
    }
    return r;
}

// max_i |dH/dp_a| over the slope boxes present in u, per axis.
Vec wave_speeds(const HamiltonianSpec& h, const Stencil& s, const std::vector<Vec>& pts, const std::vector<double>& u,
                double t)
{
    const int dim = s.grid.dim();
    Vec out = zeros(dim);
    std::vector<double> c0;
    std::vector<double> c1;
    auto candidates = [](double lo, double hi, std::vector<double>& c) {
        c = {lo, hi, 0.5 * (lo + hi)};
        if (lo < 0.0 && hi > 0.0) {
            c.push_back(0.0);
        }
    };
    for (std::size_t i0 = 0; i0 < s.n0; ++i0) {
        for (std::size_t i1 = 0; i1 < s.n1; ++i1) {
            const Slopes sl = slopes(s, u, i0, i1);
            const Vec& x = pts[s.index(i0, i1)];
            candidates(sl.lo[0], sl.hi[0], c0);
            if (dim == 2) {
                candidates(sl.lo[1], sl.hi[1], c1);
            } else {
                c1 = {0.0};
            }
            for (double a : c0) {
                for (double b : c1) {
                    const Vec p = dim == 1 ? vec1(a) : vec2(a, b);
                    const Vec g = h.grad_p(t, x, p);
                    out = out.cwiseMax(g.cwiseAbs());
                }
            }
        }
    }
    return out;
}

double cfl_ratio(const SpaceGrid& grid, const Vec& theta, double dt)
{
    double r = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
        r += theta[a] / grid.axis(a).spacing();
    }
    return dt * r;
}

std::string fmt_vec(const Vec& v)
{
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < v.size(); ++i) {
        os << (i ? ", " : "") << v[i];
    }
    os << ")";
    return os.str();
}

}  // namespace

SolutionField lf_solve(const HamiltonianSpec& h, const DatumSpec& d, const LFConfig& cfg,
                       const std::vector<double>& times, double t0)
{
    require(d.dim() == cfg.grid.dim(), "datum and grid dimensions differ");
    return lf_solve(h, d.sample(cfg.grid), cfg, times, t0);
}

SolutionField lf_solve(const HamiltonianSpec& h, const std::vector<double>& initial, const LFConfig& cfg,
                       const std::vector<double>& times, double t0)
{
    const SpaceGrid& grid = cfg.grid;
    require(grid.dim() == h.dim(), "grid and Hamiltonian dimensions differ");
    require(initial.size() == grid.size(), "initial data need one value per grid point");
    require(!times.empty() && std::is_sorted(times.begin(), times.end()) && times.front() >= t0,
            "times must ascend from t0");
    require(times.back() <= h.horizon(), "times must not exceed the horizon");
    for (const Axis& a : grid.axes()) {
        require(a.n >= 3, "Lax-Friedrichs needs at least 3 points per axis");
    }
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.5)) {
        fail(ErrorKind::Cfl, "CFL ratio must lie in (0, 0.5]");
    }
    const bool fixed_theta = !cfg.theta.empty();
    if (fixed_theta) {
        require(int(cfg.theta.size()) == grid.dim(), "theta needs one value per axis");
    }
    const Stencil st(grid);
    const std::vector<Vec> pts = grid.points();
    const int threads = resolve_threads(cfg.threads);

    std::vector<double> u = initial;
    auto theta_at = [&](double t) -> Vec {
        const Vec speed = wave_speeds(h, st, pts, u, t);
        if (fixed_theta) {
            Vec th(grid.dim());
            for (int a = 0; a < grid.dim(); ++a) {
                th[a] = cfg.theta[std::size_t(a)];
            }
            for (int a = 0; a < grid.dim(); ++a) {
                if (th[a] < speed[a]) {
                    std::ostringstream os;
                    os << "theta " << th[a] << " below the wave speed " << speed[a] << " on axis " << a << " at t = " << t;
                    fail(ErrorKind::Cfl, os.str());
                }
            }
            return th;
        }
        Vec th = cfg.theta_safety * speed;
        for (int a = 0; a < grid.dim(); ++a) {
            th[a] = std::max(th[a], 1e-12);
        }
        return th;
    };
    if (cfg.dt > 0.0) {
        const Vec th = theta_at(t0);
        if (cfl_ratio(grid, th, cfg.dt) > cfg.cfl) {
            std::ostringstream os;
            os << "dt = " << cfg.dt << " breaks the CFL bound: dt * sum theta / dx = " << cfl_ratio(grid, th, cfg.dt)
               << " > " << cfg.cfl;
            fail(ErrorKind::Cfl, os.str());
        }
    }

    SolutionField f;
    f.grid = grid;
    f.times = times;
    f.method = Method::Viscosity;
    double t = t0;
    std::size_t steps = 0;
    double theta_max = 0.0;
    std::vector<double> next(u.size());
    for (double target : times) {
        while (t < target) {
            const Vec th = theta_at(t);
            theta_max = std::max(theta_max, th.maxCoeff());
            double dt = cfg.dt > 0.0 ? cfg.dt : cfg.cfl / cfl_ratio(grid, th, 1.0);
            if (cfg.dt > 0.0 && cfl_ratio(grid, th, dt) > cfg.cfl) {
                std::ostringstream os;
                os << "CFL bound broken at t = " << t << ": dt * sum theta / dx = " << cfl_ratio(grid, th, dt);
                fail(ErrorKind::Cfl, os.str());
            }
            // Land on output times exactly.
            if (t + dt >= target || target - (t + dt) < 1e-12 * (1.0 + std::abs(target))) {
                dt = target - t;
            }
            parallel_for(st.n0, threads, [&](std::size_t i0) {
                for (std::size_t i1 = 0; i1 < st.n1; ++i1) {
                    const std::size_t k = st.index(i0, i1);
                    const Slopes sl = slopes(st, u, i0, i1);
                    double H = h.value(t, pts[k], sl.avg);
                    for (int a = 0; a < grid.dim(); ++a) {
                        H -= 0.5 * th[a] * sl.jump[a];
                    }
                    next[k] = u[k] - dt * H;
                }
            });
            u.swap(next);
            t = (dt == target - t) ? target : t + dt;
            ++steps;
            for (std::size_t k = 0; k < u.size(); ++k) {
                if (!std::isfinite(u[k])) {
                    throw IntegrationBlowup(t, "Lax-Friedrichs solution blew up at t = " + format_number(t) + ", x = " +
                                                   fmt_vec(pts[k]));
                }
            }
        }
        f.values.push_back(u);
    }
    f.metadata["steps"] = double(steps);
    f.metadata["theta_max"] = theta_max;
    f.metadata["cfl"] = cfg.cfl;
    f.metadata["dx"] = grid.axis(0).spacing();
    f.metadata["t0"] = t0;
    return f;
}

ViscosityCheckReport viscosity_check(const SolutionField& u, const HamiltonianSpec& h,
                                     const std::vector<ViscosityPoint>& points, const ViscosityCheckOptions& o)
{
    const SpaceGrid& grid = u.grid;
    require(grid.dim() == h.dim(), "field and Hamiltonian dimensions differ");
    require(u.times.size() >= 2, "viscosity_check needs at least two time slices");
    const int dim = grid.dim();
    ViscosityCheckReport rep;
    double dx_max = 0.0;
    for (const Axis& a : grid.axes()) {
        dx_max = std::max(dx_max, a.spacing());
    }
    rep.tolerance = o.tolerance >= 0.0 ? o.tolerance : 1e-2 * std::max(1.0, dx_max / 0.01);
    rep.worst = -std::numeric_limits<double>::infinity();
    const Stencil st(grid);

    for (const ViscosityPoint& pt : points) {
        require(pt.x.size() == dim, "viscosity point dimension differs from the grid");
        std::size_t idx[2] = {0, 0};
        for (int a = 0; a < dim; ++a) {
            const Axis& ax = grid.axis(a);
            const double x = ax.periodic ? ax.lo + reduce_periodic(pt.x[a] - ax.lo, ax.period()) : pt.x[a];
            const double s = (x - ax.lo) / ax.spacing();
            const long i = std::lround(s);
            require(std::abs(s - double(i)) <= 1e-6, "viscosity point is not a grid point");
            const long n = long(ax.n);
            require(ax.periodic ? true : (i >= 2 && i + 2 < n), "viscosity point too close to the boundary");
            idx[a] = std::size_t(((i % n) + n) % n);
        }
        const std::size_t k = u.time_index(pt.t);
        const std::vector<double>& cur = u.values[k];
        const std::size_t flat = st.index(idx[0], idx[1]);

        SlopeEstimate se;
        if (k > 0 && k + 1 < u.times.size()) {
            se.tau = (u.values[k + 1][flat] - u.values[k - 1][flat]) / (u.times[k + 1] - u.times[k - 1]);
        } else if (k + 1 < u.times.size()) {
            se.tau = (u.values[k + 1][flat] - cur[flat]) / (u.times[k + 1] - u.times[k]);
        } else {
            se.tau = (cur[flat] - u.values[k - 1][flat]) / (u.times[k] - u.times[k - 1]);
        }
        se.left = zeros(dim);
        se.right = zeros(dim);
        Vec lo(dim), hi(dim);
        bool any_convex = false;
        bool any_concave = false;
        for (int a = 0; a < dim; ++a) {
            const double dx = grid.axis(a).spacing();
            const double c = cur[flat];
            const double l1 = (c - st.at(cur, idx[0], idx[1], a, -1)) / dx;
            const double l2 = (c - st.at(cur, idx[0], idx[1], a, -2)) / (2 * dx);
            const double r1 = (st.at(cur, idx[0], idx[1], a, 1) - c) / dx;
            const double r2 = (st.at(cur, idx[0], idx[1], a, 2) - c) / (2 * dx);
            se.left[a] = 2 * l1 - l2;
            se.right[a] = 2 * r1 - r2;
            lo[a] = std::min(se.left[a], se.right[a]);
            hi[a] = std::max(se.left[a], se.right[a]);
            if (se.left[a] > se.right[a] + o.kink) {
                any_concave = true;
            } else if (se.left[a] < se.right[a] - o.kink) {
                any_convex = true;
            } else {
                lo[a] = hi[a] = 0.5 * (se.left[a] + se.right[a]);
            }
        }
        se.super_nonempty = !any_convex;
        se.sub_nonempty = !any_concave;
        const Vec xg = grid.point(flat);

        auto record = [&](bool sub, const ViscosityProbe& pr) {
            ViscosityEntry e;
            e.t = pt.t;
            e.x = xg;
            e.sub = sub;
            e.probe = pr;
            e.residual = pr.tau + h.value(pt.t, xg, pr.p);
            const double excess = sub ? e.residual : -e.residual;
            e.violated = excess > rep.tolerance;
            rep.worst = std::max(rep.worst, excess);
            rep.pass = rep.pass && !e.violated;
            rep.entries.push_back(e);
        };
        auto inside = [&](const Vec& p) {
            for (int a = 0; a < dim; ++a) {
                if (p[a] < lo[a] - 0.5 * o.kink || p[a] > hi[a] + 0.5 * o.kink) {
                    return false;
                }
            }
            return true;
        };
        if (!o.probes.empty()) {
            for (const ViscosityProbe& pr : o.probes) {
                require(pr.p.size() == dim, "probe slope dimension differs from the grid");
                if (std::abs(pr.tau - se.tau) > o.kink || !inside(pr.p)) {
                    continue;
                }
                if (se.super_nonempty) {
                    record(true, pr);
                }
                if (se.sub_nonempty) {
                    record(false, pr);
                }
            }
        } else {
            std::vector<std::vector<double>> c(static_cast<std::size_t>(dim));
            for (int a = 0; a < dim; ++a) {
                c[std::size_t(a)] = lo[a] == hi[a] ? std::vector<double>{lo[a]}
                                                   : std::vector<double>{lo[a], 0.5 * (lo[a] + hi[a]), hi[a]};
            }
            const std::vector<double> c1 = dim == 2 ? c[1] : std::vector<double>{0.0};
            for (double a : c[0]) {
                for (double b : c1) {
                    const ViscosityProbe pr{se.tau, dim == 1 ? vec1(a) : vec2(a, b)};
                    if (se.super_nonempty) {
                        record(true, pr);
                    }
                    if (se.sub_nonempty) {
                        record(false, pr);
                    }
                }
            }
        }
        rep.slopes.push_back(se);
    }
    if (rep.entries.empty()) {
        rep.worst = 0.0;
    }
    return rep;
}

SolutionField example_field(const SpaceGrid& grid, const std::vector<double>& times, const ExampleWindow& window)
{
    require(grid.dim() == 1, "the example field is one-dimensional");
    SolutionField f;
    f.grid = grid;
    f.times = times;
    f.method = Method::AnalyticExample;
    for (double t : times) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            v[i] = example_solution(t, grid.point(i)[0], window);
        }
        f.values.push_back(std::move(v));
    }
    return f;
}

SplittingReport splitting_report(const SplittingConfig& cfg)
{
    require(cfg.cells.size() >= 2, "splitting report needs at least two grid levels");
    for (std::size_t i = 0; i < cfg.cells.size(); ++i) {
        require(cfg.cells[i] >= 4 && cfg.cells[i] % 2 == 0, "grid levels need an even cell count");
        require(i == 0 || cfg.cells[i] > cfg.cells[i - 1], "grid levels must refine");
    }
    const ExampleWindow win;
    SplittingReport r;
    r.t = cfg.t;
    r.minmax_value = example_solution(cfg.t, 0.0, win);

    // The failing probe on the closed-form field.
    const HamiltonianSpec h = HamiltonianSpec::cubic_example(cfg.window);
    const std::size_t half = std::size_t(std::lround(win.x_max / cfg.probe_dx));
    const SpaceGrid eg = SpaceGrid::line(-double(half) * cfg.probe_dx, double(half) * cfg.probe_dx, 2 * half + 1);
    const double dt = 0.01;
    const SolutionField ef = example_field(eg, {cfg.t, cfg.t + dt, cfg.t + 2 * dt}, win);
    r.probe_p = 1.0 / std::sqrt(3.0);
    ViscosityCheckOptions vo;
    vo.probes = {ViscosityProbe{0.0, vec1(r.probe_p)}};
    const ViscosityCheckReport pr = viscosity_check(ef, h, {ViscosityPoint{cfg.t, vec1(0.0)}}, vo);
    for (const ViscosityEntry& e : pr.entries) {
        if (e.sub) {
            r.probe_residual = e.residual;
            r.probe_fails = e.violated;
        }
    }

    // Lax-Friedrichs at (t, 0) on refining grids.
    BuiltinParams bp;
    bp.joint_half_width = cfg.joint_half_width;
    bp.window = cfg.window;
    const DatumSpec d = DatumSpec::builtin("cubic-example", bp);
    SolutionField finest;
    for (std::size_t cells : cfg.cells) {
        LFConfig lc;
        lc.grid = SpaceGrid::line(-cfg.window, cfg.window, cells + 1);
        lc.threads = cfg.threads;
        SolutionField lf = lf_solve(h, d, lc, {cfg.t, cfg.t + dt, cfg.t + 2 * dt});
        SplittingLevel lv;
        lv.cells = cells;
        lv.dx = lc.grid.axis(0).spacing();
        lv.lf_value = lf.values[0][cells / 2];
        lv.gap = std::abs(lv.lf_value - r.minmax_value);
        r.levels.push_back(lv);
        finest = std::move(lf);
    }
    r.gap_exceeds_error = true;
    r.gap_persists = true;
    for (std::size_t i = 0; i + 1 < r.levels.size(); ++i) {
        r.levels[i].scheme_error = std::abs(r.levels[i + 1].lf_value - r.levels[i].lf_value);
    }
    for (std::size_t i = 1; i < r.levels.size(); ++i) {
        // The error of level i is estimated by its distance to the coarser level.
        const double err = std::abs(r.levels[i].lf_value - r.levels[i - 1].lf_value);
        r.gap_exceeds_error = r.gap_exceeds_error && r.levels[i].gap > 3.0 * err;
        r.gap_persists = r.gap_persists && r.levels[i].gap >= r.levels[i - 1].gap - err;
    }
    const SplittingLevel& last = r.levels.back();
    r.lf_value = last.lf_value;
    r.gap = last.gap;
    r.scheme_error = std::abs(last.lf_value - r.levels[r.levels.size() - 2].lf_value);

    const ViscosityCheckReport lfc = viscosity_check(finest, h, {ViscosityPoint{cfg.t, vec1(0.0)}});
    r.lf_subsolution = true;
    r.lf_sub_worst = 0.0;
    for (const ViscosityEntry& e : lfc.entries) {
        if (e.sub) {
            r.lf_subsolution = r.lf_subsolution && !e.violated;
            r.lf_sub_worst = std::max(r.lf_sub_worst, e.residual);
        }
    }
    return r;
}

}  // namespace hjmm
