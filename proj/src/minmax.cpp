#include "hjmm/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "hjmm/errors.hpp"
#include "hjmm/flow.hpp"
#include "hjmm/optimize.hpp"
#include "hjmm/parallel.hpp"

namespace hjmm {

const char* to_string(ModeKind m)
{
    switch (m) {
    case ModeKind::AllPlus: return "all-plus";
    case ModeKind::AllMinus: return "all-minus";
    case ModeKind::BlockSeparable: return "block-separable";
    case ModeKind::Bounds: return "bounds";
    }
    return "all-plus";
}

SignatureMode derive_mode(const BrokenGF& g)
{
    const Signature s = g.signature();
    if (s.n_minus == 0) {
        return {ModeKind::AllPlus, false};
    }
    if (s.n_plus == 0) {
        return {ModeKind::AllMinus, false};
    }
    if (g.separable_datum()) {
        return {ModeKind::BlockSeparable, false};
    }
    return {ModeKind::Bounds, true};
}

namespace {

using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// sense * (sigma(xi) + sum_j S_j) over z = (xi, X_1, ..., X_N) in block coordinates.
struct BlockProblem {
    const ChainBlock& b;
    const DatumSpec& sigma;
    Vec x;
    double t0;
    double t;
    int k;
    int N;

    BlockProblem(const BrokenGF& g, const ChainBlock& block, const DatumSpec& s, Vec target)
        : b(block), sigma(s), x(std::move(target)), t0(g.t0()), t(g.t()), k(block.dim()), N(g.N())
    {
    }

    Vec node(const VectorXd& z, int j) const { return j == N + 1 ? x : Vec(z.segment(j * k, k)); }

    double value(const VectorXd& z) const
    {
        double v = sigma.value(node(z, 0));
        for (int j = 0; j <= N; ++j) {
            v += b.steps[std::size_t(j)].value(node(z, j), node(z, j + 1));
        }
        return v;
    }

    double objective(const VectorXd& z, VectorXd* grad) const
    {
        if (!grad) {
            return b.sense * value(z);
        }
        grad->setZero(z.size());
        const Vec xi = node(z, 0);
        double v = sigma.value(xi);
        grad->segment(0, k) = sigma.gradient(xi);
        for (int j = 0; j <= N; ++j) {
            const StepEval e = b.steps[std::size_t(j)].evaluate(node(z, j), node(z, j + 1));
            v += e.value;
            grad->segment(j * k, k) += e.d_start;
            if (j < N) {
                grad->segment((j + 1) * k, k) += e.d_end;
            }
        }
        *grad *= double(b.sense);
        return b.sense * v;
    }

    VectorXd straight(const Vec& xi) const
    {
        VectorXd z((N + 1) * k);
        z.segment(0, k) = xi;
        const double span = t - t0;
        for (int j = 1; j <= N; ++j) {
            const double s = (b.steps[std::size_t(j)].t0() - t0) / span;
            z.segment(j * k, k) = xi + s * (x - xi);
        }
        return z;
    }

    // Search radius around x for xi: speed bound times elapsed time, with
    // momenta bounded by the datum slope plus the accumulated force.
    double radius() const
    {
        const double span = std::abs(t - t0);
        const double L = sigma.lipschitz_bound();
        const double B = L + span * b.h->force_bound(L + 1.0) + 0.25;
        const double r = b.h->speed_bound(B) * span;
        return r + std::max(0.25, 0.1 * r);
    }

    MinmaxResult finish(const VectorXd& z, double grad_norm) const
    {
        MinmaxResult r;
        r.value = value(z);
        r.lower = r.upper = r.value;
        r.xi = node(z, 0);
        for (int j = 1; j <= N; ++j) {
            r.U.push_back(node(z, j));
        }
        r.gradient_norm = grad_norm;
        r.probe_value = value(straight(r.xi));
        return r;
    }
};

[[noreturn]] void window_too_small(const BlockProblem& p, double r)
{
    std::ostringstream os;
    os << "optimizer window exhausted at x = " << p.x.transpose() << " (radius " << r << ")";
    fail(ErrorKind::WindowTooSmall, os.str());
}

MinmaxResult grid_search(const BlockProblem& p, const MinmaxOptions& o)
{
    const int G = std::max(5, o.optimizer_grid);
    const double r = p.radius();
    const int k = p.k;
    const std::size_t count = k == 1 ? std::size_t(G) : std::size_t(G) * std::size_t(G);
    auto coord = [&](int i) { return -r + 2.0 * r * i / (G - 1); };
    auto xi_at = [&](std::size_t n) {
        Vec xi = p.x;
        if (k == 1) {
            xi[0] += coord(int(n));
        } else {
            xi[0] += coord(int(n / std::size_t(G)));
            xi[1] += coord(int(n % std::size_t(G)));
        }
        return xi;
    };
    std::vector<double> phi(count);
    for (std::size_t n = 0; n < count; ++n) {
        phi[n] = p.objective(p.straight(xi_at(n)), nullptr);
    }
    auto neighbours = [&](std::size_t n) {
        std::vector<std::size_t> out;
        const int i0 = k == 1 ? int(n) : int(n / std::size_t(G));
        const int i1 = k == 1 ? 0 : int(n % std::size_t(G));
        for (int d0 = -1; d0 <= 1; ++d0) {
            for (int d1 = (k == 1 ? 0 : -1); d1 <= (k == 1 ? 0 : 1); ++d1) {
                const int a = i0 + d0;
                const int c = i1 + d1;
                if ((d0 == 0 && d1 == 0) || a < 0 || a >= G || c < 0 || c >= (k == 1 ? 1 : G)) {
                    continue;
                }
                out.push_back(k == 1 ? std::size_t(a) : std::size_t(a) * std::size_t(G) + std::size_t(c));
            }
        }
        return out;
    };
    auto on_boundary = [&](std::size_t n) {
        const int i0 = k == 1 ? int(n) : int(n / std::size_t(G));
        const int i1 = k == 1 ? 1 : int(n % std::size_t(G));
        return i0 == 0 || i0 == G - 1 || (k == 2 && (i1 == 0 || i1 == G - 1));
    };
    std::vector<std::size_t> minima;
    for (std::size_t n = 0; n < count; ++n) {
        const auto nb = neighbours(n);
        if (std::all_of(nb.begin(), nb.end(), [&](std::size_t m) { return phi[n] <= phi[m]; })) {
            minima.push_back(n);
        }
    }
    std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return phi[a] < phi[b]; });
    if (minima.empty() || on_boundary(minima.front())) {
        window_too_small(p, r);
    }
    if (int(minima.size()) > o.polish_starts) {
        minima.resize(std::size_t(o.polish_starts));
    }
    const Objective f = [&](const VectorXd& z, VectorXd* g) { return p.objective(z, g); };
    BfgsResult best;
    best.value = kInf;
    for (std::size_t n : minima) {
        if (on_boundary(n)) {
            continue;
        }
        const BfgsResult res = bfgs_minimize(f, p.straight(xi_at(n)), o.gtol);
        if (res.value < best.value) {
            best = res;
        }
    }
    const Vec xi = best.z.head(k);
    if ((xi - p.x).cwiseAbs().maxCoeff() > r) {
        window_too_small(p, r);
    }
    return p.finish(best.z, best.gradient_norm);
}

std::shared_ptr<const Wavefront> wavefront(const BlockProblem& p, int samples)
{
    std::lock_guard<std::mutex> lock(p.b.wavefront->mutex);
    auto& slot = p.b.wavefront->by_samples[samples];
    if (slot) {
        return slot;
    }
    auto wf = std::make_shared<Wavefront>();
    const AxisDomain& dom = p.sigma.domain().front();
    wf->periodic = dom.periodic && p.b.h->x_periodic();
    const double span = p.t - p.t0;
    for (int i = 0; i <= samples; ++i) {
        const double xi = dom.lo + (dom.hi - dom.lo) * i / samples;
        const double p0 = p.sigma.gradient(vec1(xi))[0];
        wf->xi.push_back(xi);
        if (p.b.analytic()) {
            const double a = p.b.A(0, 0);
            wf->x.push_back(xi + span * a * p0);
            wf->action.push_back(span * (0.5 * a * p0 * p0 - p.b.offset));
        } else {
            const PhaseState s = integrate(*p.b.h, PhaseState{p.t0, vec1(xi), vec1(p0), 0.0}, p.t);
            wf->x.push_back(s.x[0]);
            wf->action.push_back(s.action);
        }
    }
    slot = wf;
    return slot;
}

struct Launch {
    double x;
    double action;
    double p0;
};

Launch launch(const BlockProblem& p, double xi)
{
    const double p0 = p.sigma.gradient(vec1(xi))[0];
    const double span = p.t - p.t0;
    if (p.b.analytic()) {
        const double a = p.b.A(0, 0);
        return {xi + span * a * p0, span * (0.5 * a * p0 * p0 - p.b.offset), p0};
    }
    const PhaseState s = integrate(*p.b.h, PhaseState{p.t0, vec1(xi), vec1(p0), 0.0}, p.t);
    return {s.x[0], s.action, p0};
}

// Chain nodes of the characteristic from (t0, xi, p0) at the partition times,
// integrated step by step exactly as the step generating functions do.
VectorXd characteristic_chain(const BlockProblem& p, double xi, double p0)
{
    VectorXd z(p.N + 1);
    z[0] = xi;
    PhaseState s{p.t0, vec1(xi), vec1(p0), 0.0};
    for (int j = 1; j <= p.N; ++j) {
        const StepGF& st = p.b.steps[std::size_t(j - 1)];
        if (p.b.analytic()) {
            z[j] = xi + (st.t1() - p.t0) * p.b.A(0, 0) * p0;
        } else {
            s = integrate(*p.b.h, s, st.t1(), default_steps(st.eps()));
            z[j] = s.x[0];
        }
    }
    return z;
}

bool wavefront_search(const BlockProblem& p, const MinmaxOptions& o, MinmaxResult& out)
{
    const auto wf = wavefront(p, std::max(16, o.wavefront_samples));
    const double period = wf->xi.back() - wf->xi.front();
    const double x = p.x[0];
    double best_obj = kInf;
    double best_xi = 0.0;
    double best_shift = 0.0;
    auto consider = [&](double xi, double shift) {
        const Launch l = launch(p, xi);
        const double obj = p.b.sense * (p.sigma.value(vec1(xi)) + l.action);
        if (obj < best_obj) {
            best_obj = obj;
            best_xi = xi;
            best_shift = shift;
        }
    };
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * (1.0 + std::abs(a)); };
    for (std::size_t i = 0; i + 1 < wf->xi.size(); ++i) {
        const double a = wf->x[i];
        const double b = wf->x[i + 1];
        int kmin = 0;
        int kmax = 0;
        if (wf->periodic) {
            kmin = int(std::floor((std::min(a, b) - x) / period));
            kmax = int(std::ceil((std::max(a, b) - x) / period));
        }
        for (int kk = kmin; kk <= kmax; ++kk) {
            const double c = x + kk * period;
            const double fa = a - c;
            const double fb = b - c;
            if (fa == 0.0) {
                consider(wf->xi[i], kk * period);
                continue;
            }
            if (fb == 0.0 && i + 2 == wf->xi.size() && !wf->periodic) {
                consider(wf->xi[i + 1], kk * period);
                continue;
            }
            if (fa * fb > 0.0 || fb == 0.0) {
                continue;
            }
            std::uintmax_t iters = 100;
            const auto F = [&](double xi) { return launch(p, xi).x - c; };
            const auto br =
                boost::math::tools::toms748_solve(F, wf->xi[i], wf->xi[i + 1], fa, fb, tol, iters);
            consider(0.5 * (br.first + br.second), kk * period);
        }
    }
    if (best_obj == kInf) {
        return false;
    }
    // The critical point found on the wavefront, written as a chain; polish
    // only if it is not already stationary for S.
    const Launch l = launch(p, best_xi);
    VectorXd z = characteristic_chain(p, best_xi - best_shift, l.p0);
    VectorXd g;
    p.objective(z, &g);
    double gnorm = g.norm();
    if (gnorm > std::max(o.gtol, 1e-7)) {
        const Objective f = [&](const VectorXd& zz, VectorXd* gg) { return p.objective(zz, gg); };
        const BfgsResult res = bfgs_minimize(f, z, o.gtol);
        z = res.z;
        gnorm = res.gradient_norm;
    }
    out = p.finish(z, gnorm);
    return true;
}

MinmaxResult solve_block(const BlockProblem& p, const MinmaxOptions& o)
{
    const bool wave = o.search == Search::Wavefront || (o.search == Search::Auto && p.k == 1);
    if (wave) {
        require(p.k == 1, "wavefront search needs a one-dimensional block");
        MinmaxResult r;
        if (wavefront_search(p, o, r)) {
            return r;
        }
    }
    return grid_search(p, o);
}

// Extremum over U of the block chain with fixed ends (closed form on analytic blocks).
double chain_extremum(const BrokenGF& g, const ChainBlock& b, double xi, double x, const MinmaxOptions& o)
{
    const int N = g.N();
    auto chain = [&](const VectorXd& u, VectorXd* grad) {
        double v = 0.0;
        if (grad) {
            grad->setZero(N);
        }
        for (int j = 0; j <= N; ++j) {
            const Vec a = vec1(j == 0 ? xi : u[j - 1]);
            const Vec c = vec1(j == N ? x : u[j]);
            const StepEval e = b.steps[std::size_t(j)].evaluate(a, c);
            v += e.value;
            if (grad) {
                if (j > 0) {
                    (*grad)[j - 1] += e.d_start[0];
                }
                if (j < N) {
                    (*grad)[j] += e.d_end[0];
                }
            }
        }
        if (grad) {
            *grad *= double(b.sense);
        }
        return b.sense * v;
    };
    VectorXd u(N);
    for (int j = 1; j <= N; ++j) {
        u[j - 1] = xi + (x - xi) * (g.times()[std::size_t(j)] - g.t0()) / (g.t() - g.t0());
    }
    if (b.analytic() || N == 0) {
        return b.sense * chain(u, nullptr);
    }
    return b.sense * bfgs_minimize(chain, u, o.gtol).value;
}

void check_mode(const BrokenGF& g, const SignatureMode& mode)
{
    const Signature s = g.signature();
    switch (mode.kind) {
    case ModeKind::AllPlus: require(s.n_minus == 0, "AllPlus mode needs a positive definite quadratic form"); break;
    case ModeKind::AllMinus: require(s.n_plus == 0, "AllMinus mode needs a negative definite quadratic form"); break;
    case ModeKind::BlockSeparable:
        require(g.separable_datum(), "BlockSeparable mode needs a separable Hamiltonian and a separable datum");
        break;
    case ModeKind::Bounds:
        require(g.blocks().size() == 2 && g.blocks()[0].sense != g.blocks()[1].sense,
                "Bounds mode needs two blocks of opposite signature");
        break;
    }
}

}  // namespace

double block_value(const BrokenGF& g, std::size_t block, double x, const MinmaxOptions& options)
{
    require(block < g.blocks().size(), "block index out of range");
    const ChainBlock& b = g.blocks()[block];
    require(b.datum.has_value() && b.dim() == 1, "block_value needs a one-dimensional block with its own datum");
    const BlockProblem p(g, b, *b.datum, vec1(x));
    return solve_block(p, options).value;
}

MinmaxResult minmax_solve(const BrokenGF& g, const Vec& x, const SignatureMode& mode, const MinmaxOptions& options)
{
    require(x.size() == g.dim(), "minmax point dimension differs from the generating function");
    check_mode(g, mode);
    MinmaxResult r;
    switch (mode.kind) {
    case ModeKind::AllPlus:
    case ModeKind::AllMinus: {
        if (g.blocks().size() == 1) {
            const BlockProblem p(g, g.blocks().front(), g.datum(), x);
            r = solve_block(p, options);
        } else {
            require(g.separable_datum(), "definite multi-block problems need a separable datum");
            for (std::size_t b = 0; b < g.blocks().size(); ++b) {
                r.value += block_value(g, b, x[g.blocks()[b].axes[0]], options);
            }
            r.lower = r.upper = r.probe_value = r.value;
        }
        break;
    }
    case ModeKind::BlockSeparable: {
        for (std::size_t b = 0; b < g.blocks().size(); ++b) {
            r.value += block_value(g, b, x[g.blocks()[b].axes[0]], options);
        }
        r.lower = r.upper = r.probe_value = r.value;
        break;
    }
    case ModeKind::Bounds: {
        const HopfBounds hb = hopf_bounds(g, x, options);
        r.value = r.lower = hb.lower;
        r.upper = hb.upper;
        r.clamped = hb.clamped;
        r.probe_value = hb.upper;
        break;
    }
    }
    r.mode = mode.kind;
    return r;
}

double minmax_value(const BrokenGF& g, const Vec& x, const SignatureMode& mode, const MinmaxOptions& options)
{
    return minmax_solve(g, x, mode, options).value;
}

double minmax_value(const BrokenGF& g, const Vec& x, const MinmaxOptions& options)
{
    return minmax_value(g, x, derive_mode(g), options);
}

HopfBounds hopf_bounds(const BrokenGF& g, const Vec& x, const MinmaxOptions& options)
{
    require(x.size() == g.dim(), "hopf point dimension differs from the generating function");
    const auto& blocks = g.blocks();
    require(blocks.size() == 2 && blocks[0].sense != blocks[1].sense && blocks[0].dim() == 1 && blocks[1].dim() == 1,
            "Hopf bounds need a separable Hamiltonian with one convex and one concave block");
    const ChainBlock& P = blocks[0].sense > 0 ? blocks[0] : blocks[1];
    const ChainBlock& M = blocks[0].sense > 0 ? blocks[1] : blocks[0];
    const int ap = P.axes[0];
    const int am = M.axes[0];
    const double xp = x[ap];
    const double xm = x[am];
    const DatumSpec& sigma = g.datum();

    auto sig = [&](double a, double b) {
        Vec v(2);
        v[ap] = a;
        v[am] = b;
        return sigma.value(v);
    };
    auto Ep = [&](double xi) { return chain_extremum(g, P, xi, xp, options); };
    auto Em = [&](double xi) { return chain_extremum(g, M, xi, xm, options); };

    const BlockProblem pp(g, P, sigma, vec1(xp));
    const BlockProblem pm(g, M, sigma, vec1(xm));
    const double rp = pp.radius();
    const double rm = pm.radius();
    const int G = std::max(5, options.optimizer_grid);
    const std::size_t n = std::size_t(G);
    std::vector<double> gp(n), gm(n), ep(n), em(n);
    for (int i = 0; i < G; ++i) {
        gp[std::size_t(i)] = xp - rp + 2.0 * rp * i / (G - 1);
        gm[std::size_t(i)] = xm - rm + 2.0 * rm * i / (G - 1);
        ep[std::size_t(i)] = Ep(gp[std::size_t(i)]);
        em[std::size_t(i)] = Em(gm[std::size_t(i)]);
    }
    auto boundary = [&](int i, const BlockProblem& p, double r) {
        if (i == 0 || i == G - 1) {
            window_too_small(p, r);
        }
    };

    auto lower_inner = [&](double b) {
        int best = 0;
        double bv = kInf;
        for (int i = 0; i < G; ++i) {
            const double v = sig(gp[std::size_t(i)], b) + ep[std::size_t(i)];
            if (v < bv) {
                bv = v;
                best = i;
            }
        }
        boundary(best, pp, rp);
        const auto fine = brent_minimize([&](double a) { return sig(a, b) + Ep(a); }, gp[std::size_t(best - 1)],
                                         gp[std::size_t(best + 1)]);
        return std::min(bv, fine.value);
    };
    auto upper_inner = [&](double a) {
        int best = 0;
        double bv = -kInf;
        for (int i = 0; i < G; ++i) {
            const double v = sig(a, gm[std::size_t(i)]) + em[std::size_t(i)];
            if (v > bv) {
                bv = v;
                best = i;
            }
        }
        boundary(best, pm, rm);
        const auto fine = brent_minimize([&](double b) { return -(sig(a, b) + Em(b)); }, gm[std::size_t(best - 1)],
                                         gm[std::size_t(best + 1)]);
        return std::max(bv, -fine.value);
    };

    HopfBounds hb;
    {
        int best = 0;
        double bv = -kInf;
        for (int i = 0; i < G; ++i) {
            const double v = em[std::size_t(i)] + lower_inner(gm[std::size_t(i)]);
            if (v > bv) {
                bv = v;
                best = i;
            }
        }
        boundary(best, pm, rm);
        const auto fine = brent_minimize([&](double b) { return -(Em(b) + lower_inner(b)); },
                                         gm[std::size_t(best - 1)], gm[std::size_t(best + 1)]);
        hb.lower = std::max(bv, -fine.value);
    }
    {
        int best = 0;
        double bv = kInf;
        for (int i = 0; i < G; ++i) {
            const double v = ep[std::size_t(i)] + upper_inner(gp[std::size_t(i)]);
            if (v < bv) {
                bv = v;
                best = i;
            }
        }
        boundary(best, pp, rp);
        const auto fine = brent_minimize([&](double a) { return Ep(a) + upper_inner(a); }, gp[std::size_t(best - 1)],
                                         gp[std::size_t(best + 1)]);
        hb.upper = std::min(bv, fine.value);
    }
    if (hb.lower > hb.upper) {
        if (hb.lower - hb.upper <= 1e-9 * (1.0 + std::abs(hb.upper))) {
            hb.lower = hb.upper;
            hb.clamped = true;
        } else {
            std::ostringstream os;
            os << "Hopf bounds crossed at x = " << x.transpose() << ": lower " << hb.lower << " > upper " << hb.upper;
            fail(ErrorKind::Solver, os.str());
        }
    }
    return hb;
}

SolutionField solve_field(const HamiltonianSpec& h, const DatumSpec& d, const SpaceGrid& grid,
                          const std::vector<double>& times, const SolveOptions& options)
{
    require(grid.dim() == d.dim() && d.dim() == h.dim(), "grid, datum and Hamiltonian dimensions differ");
    require(!times.empty(), "solve_field needs at least one time");
    require(std::is_sorted(times.begin(), times.end()), "times must be ascending");
    const double t0 = options.t0;
    SolutionField f;
    f.grid = grid;
    f.times = times;
    f.method = Method::Minmax;
    f.values.resize(times.size());
    const int threads = resolve_threads(options.threads);
    const std::vector<Vec> pts = grid.points();
    std::vector<std::vector<double>> upper(times.size());
    bool bounds = false;
    int lastN = 0;
    Signature lastSig;

    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        if (t == t0) {
            f.values[k] = d.sample(grid);
            upper[k] = f.values[k];
            continue;
        }
        const BrokenGF g = build_broken_gf(h, d, t0, t, options.gf);
        const SignatureMode mode = derive_mode(g);
        lastN = g.N();
        lastSig = g.signature();
        f.notes.push_back("t=" + format_number(t) + ": " + g.summary() + " mode=" + to_string(mode.kind));
        if (mode.degraded && !bounds) {
            f.notes.push_back("mixed signature with a nonseparable datum: Hopf bounds reported instead of a value");
        }
        bounds = bounds || mode.kind == ModeKind::Bounds;

        std::vector<double> lo(grid.size(), 0.0);
        std::vector<double> hi(grid.size(), 0.0);
        std::vector<std::string> errors(grid.size());
        if (mode.kind == ModeKind::BlockSeparable && grid.dim() == 2) {
            // The value splits into one 1-D problem per axis.
            std::vector<std::vector<double>> part(2);
            for (int b = 0; b < 2; ++b) {
                const int ax = g.blocks()[std::size_t(b)].axes[0];
                const Axis& axis = grid.axis(ax);
                part[std::size_t(ax)].assign(axis.n, 0.0);
                std::vector<std::string> errs(axis.n);
                parallel_for(axis.n, threads, [&](std::size_t i) {
                    try {
                        part[std::size_t(ax)][i] = block_value(g, std::size_t(b), axis.coord(i), options.minmax);
                    } catch (const std::exception& e) {
                        errs[i] = e.what();
                    }
                });
                for (std::size_t i = 0; i < axis.n; ++i) {
                    if (!errs[i].empty()) {
                        const std::size_t flat = ax == 0 ? grid.flat_index(i, 0) : grid.flat_index(0, i);
                        errors[flat] = errs[i];
                    }
                }
            }
            for (std::size_t i0 = 0; i0 < grid.axis(0).n; ++i0) {
                for (std::size_t i1 = 0; i1 < grid.axis(1).n; ++i1) {
                    const std::size_t flat = grid.flat_index(i0, i1);
                    lo[flat] = hi[flat] = part[0][i0] + part[1][i1];
                }
            }
        } else {
            parallel_for(grid.size(), threads, [&](std::size_t i) {
                try {
                    const MinmaxResult r = minmax_solve(g, pts[i], mode, options.minmax);
                    lo[i] = r.lower;
                    hi[i] = r.upper;
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            });
        }
        std::size_t failed = 0;
        std::ostringstream os;
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (errors[i].empty()) {
                continue;
            }
            if (failed < 3) {
                os << (failed ? "; " : "") << "x=(" << pts[i].transpose() << "): " << errors[i];
            }
            ++failed;
        }
        if (failed > 0) {
            fail(ErrorKind::Solver, "minmax failed at " + std::to_string(failed) + " of " + std::to_string(grid.size()) +
                                        " points at t=" + format_number(t) + ": " + os.str());
        }
        f.values[k] = std::move(lo);
        upper[k] = std::move(hi);
    }
    if (bounds) {
        f.upper = std::move(upper);
    }
    f.metadata["N"] = lastN;
    f.metadata["n_plus"] = lastSig.n_plus;
    f.metadata["n_minus"] = lastSig.n_minus;
    f.metadata["optimizer_grid"] = options.minmax.optimizer_grid;
    f.metadata["wavefront_samples"] = options.minmax.wavefront_samples;
    f.metadata["tol_minmax"] = kTolMinmax;
    f.metadata["t0"] = t0;
    f.check_finite();
    return f;
}

}  // namespace hjmm
