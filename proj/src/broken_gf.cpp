#include "hjmm/broken_gf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hjmm/errors.hpp"
#include "hjmm/grid.hpp"

namespace hjmm {

bool ChainBlock::analytic() const
{
    return std::all_of(steps.begin(), steps.end(), [](const StepGF& s) { return s.kind() == StepKind::Analytic; });
}

Vec ChainBlock::restrict(const Vec& v) const
{
    Vec r(dim());
    for (int i = 0; i < dim(); ++i) {
        r[i] = v[axes[std::size_t(i)]];
    }
    return r;
}

namespace {

double constant_part(const HamiltonianSpec& h)
{
    if (const auto* q = std::get_if<QuadraticPlusCompact>(&h.variant())) {
        return q->offset;
    }
    return 0.0;
}

ChainBlock make_block(std::vector<int> axes, std::shared_ptr<const HamiltonianSpec> h)
{
    ChainBlock b;
    b.axes = std::move(axes);
    b.A = h->quadratic_part();
    b.offset = constant_part(*h);
    b.window = h->support_radius();
    b.h = std::move(h);
    return b;
}

std::vector<ChainBlock> make_blocks(const HamiltonianSpec& h)
{
    if (std::holds_alternative<CubicExample>(h.variant())) {
        fail(ErrorKind::Construction,
             "the cubic example has no global broken-geodesics construction; use the local example solution");
    }
    std::vector<ChainBlock> blocks;
    if (const auto* s = std::get_if<SeparableConvexConcave>(&h.variant())) {
        blocks.push_back(make_block({0}, s->convex));
        blocks.push_back(make_block({1}, s->concave));
        return blocks;
    }
    const Mat A = h.quadratic_part();
    if (A.rows() == 2) {
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es{Eigen::Matrix2d(A)};
        const bool mixed = es.eigenvalues()[0] < 0.0 && es.eigenvalues()[1] > 0.0;
        if (mixed) {
            const auto& q = std::get<QuadraticPlusCompact>(h.variant());
            if (!q.V.is_zero() || A(0, 1) != 0.0) {
                fail(ErrorKind::Construction,
                     "mixed-signature quadratic part that does not split along the axes; only separable "
                     "convex-concave problems are supported");
            }
            const double T = h.horizon();
            blocks.push_back(make_block(
                {0}, std::make_shared<const HamiltonianSpec>(HamiltonianSpec::quadratic(mat1(A(0, 0)), {}, q.offset, T))));
            blocks.push_back(make_block(
                {1}, std::make_shared<const HamiltonianSpec>(HamiltonianSpec::quadratic(mat1(A(1, 1)), {}, 0.0, T))));
            return blocks;
        }
    }
    std::vector<int> axes(std::size_t(h.dim()));
    for (int i = 0; i < h.dim(); ++i) {
        axes[std::size_t(i)] = i;
    }
    blocks.push_back(make_block(std::move(axes), std::make_shared<const HamiltonianSpec>(h)));
    return blocks;
}

int definite_sign(const Mat& A)
{
    if (A.rows() == 1) {
        return A(0, 0) > 0.0 ? 1 : -1;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es{Eigen::Matrix2d(A)};
    if (es.eigenvalues()[0] > 0.0) {
        return 1;
    }
    if (es.eigenvalues()[1] < 0.0) {
        return -1;
    }
    fail(ErrorKind::Construction, "a single chain block needs a definite quadratic part");
}

std::vector<double> partition(double t0, double t, int N)
{
    std::vector<double> ts(std::size_t(N) + 2);
    for (int j = 0; j <= N + 1; ++j) {
        ts[std::size_t(j)] = t0 + (t - t0) * double(j) / double(N + 1);
    }
    ts.back() = t;
    return ts;
}

bool needs_twist_check(const ChainBlock& b) { return !b.h->perturbation_free(); }

// Smallest twist measure over all sub-intervals of all numeric blocks, or -1
// when some sub-interval fails.
double twist_margin(const std::vector<ChainBlock>& blocks, const std::vector<double>& ts, const TwistOptions& o)
{
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) {
        if (!needs_twist_check(b)) {
            continue;
        }
        // A uniform partition of an autonomous H repeats one interval shape.
        const std::size_t count = b.h->autonomous() ? 1 : ts.size() - 1;
        for (std::size_t j = 0; j < count; ++j) {
            const TwistReport r = twist_check_interval(*b.h, ts[j], ts[j + 1], o);
            if (!r.pass) {
                return -1.0;
            }
            margin = std::min(margin, r.min_derivative);
        }
    }
    return margin;
}

}  // namespace

BrokenGF build_broken_gf(const HamiltonianSpec& h, const DatumSpec& d, double t0, double t,
                         const BrokenGFOptions& options)
{
    require(t != t0, "build_broken_gf needs t != t0");
    require(std::min(t0, t) >= 0.0 && std::max(t0, t) <= h.horizon(), "instants must lie in [0, T]");
    require(d.dim() == h.dim(), "datum and Hamiltonian dimensions differ");
    if (d.smoothness() != Smoothness::C1 || !d.has_gradient()) {
        fail(ErrorKind::Construction, "datum '" + d.name() + "' is C0; mollify it before building a generating function");
    }
    std::vector<ChainBlock> blocks = make_blocks(h);

    int N = options.N;
    double margin = 0.0;
    if (N > 0) {
        margin = twist_margin(blocks, partition(t0, t, N), options.twist);
        if (margin < 0.0) {
            fail(ErrorKind::Construction, "twist check fails for N = " + std::to_string(N));
        }
    } else {
        for (N = 4;; N *= 2) {
            if (N > options.N_max) {
                fail(ErrorKind::Construction, "twist check fails for every N <= " + std::to_string(options.N_max));
            }
            margin = twist_margin(blocks, partition(t0, t, N), options.twist);
            if (margin >= 0.0) {
                break;
            }
        }
    }

    BrokenGF g;
    g.datum_ = d;
    g.h_ = std::make_shared<const HamiltonianSpec>(h);
    g.times_ = partition(t0, t, N);
    g.twist_margin_ = margin;
    const int dir = t > t0 ? 1 : -1;
    for (auto& b : blocks) {
        b.sense = definite_sign(b.A) * dir;
        for (std::size_t j = 0; j + 1 < g.times_.size(); ++j) {
            b.steps.push_back(step_gf(b.h, g.times_[j], g.times_[j + 1], options.shooting));
        }
    }
    if (blocks.size() == 2 && d.is_separable()) {
        blocks[0].datum = d.part(0);
        blocks[1].datum = d.part(1);
    }
    g.blocks_ = std::move(blocks);
    return g;
}

Signature BrokenGF::signature() const
{
    Signature s;
    const int steps = N() + 1;
    for (const auto& b : blocks_) {
        (b.sense > 0 ? s.n_plus : s.n_minus) += b.dim() * steps;
    }
    return s;
}

bool BrokenGF::analytic() const
{
    return std::all_of(blocks_.begin(), blocks_.end(), [](const ChainBlock& b) { return b.analytic(); });
}

bool BrokenGF::separable_datum() const { return blocks_.size() > 1 && blocks_.front().datum.has_value(); }

double BrokenGF::window() const
{
    double w = 0.0;
    for (const auto& b : blocks_) {
        w = std::max(w, b.window);
    }
    return w;
}

std::string BrokenGF::summary() const
{
    const Signature s = signature();
    std::ostringstream os;
    os << "N=" << N() << " steps=" << N() + 1 << " signature=(" << s.n_plus << "," << s.n_minus
       << ") blocks=" << blocks_.size() << (analytic() ? " analytic" : " numeric") << " window=" << window();
    return os.str();
}

double BrokenGF::value(const Vec& x, const Vec& xi, const std::vector<Vec>& U) const
{
    require(x.size() == dim() && xi.size() == dim() && int(U.size()) == N(), "broken GF evaluated with wrong sizes");
    double s = datum_.value(xi);
    for (const auto& b : blocks_) {
        Vec a = b.restrict(xi);
        for (std::size_t j = 0; j < b.steps.size(); ++j) {
            const Vec next = b.restrict(j < U.size() ? U[j] : x);
            s += b.steps[j].value(a, next);
            a = next;
        }
    }
    return s;
}

BrokenGF::Eval BrokenGF::evaluate(const Vec& x, const Vec& xi, const std::vector<Vec>& U) const
{
    require(x.size() == dim() && xi.size() == dim() && int(U.size()) == N(), "broken GF evaluated with wrong sizes");
    Eval e;
    e.value = datum_.value(xi);
    e.d_xi = datum_.gradient(xi);
    e.d_U.assign(U.size(), zeros(dim()));
    for (const auto& b : blocks_) {
        Vec a = b.restrict(xi);
        for (std::size_t j = 0; j < b.steps.size(); ++j) {
            const Vec next = b.restrict(j < U.size() ? U[j] : x);
            const StepEval s = b.steps[j].evaluate(a, next);
            e.value += s.value;
            Vec& left = j == 0 ? e.d_xi : e.d_U[j - 1];
            for (int i = 0; i < b.dim(); ++i) {
                left[b.axes[std::size_t(i)]] += s.d_start[i];
                if (j < U.size()) {
                    e.d_U[j][b.axes[std::size_t(i)]] += s.d_end[i];
                }
            }
            a = next;
        }
    }
    return e;
}

std::vector<Vec> BrokenGF::straight_chain(const Vec& xi, const Vec& x) const
{
    std::vector<Vec> U;
    const double span = t() - t0();
    for (int j = 1; j <= N(); ++j) {
        U.push_back(xi + (x - xi) * ((times_[std::size_t(j)] - t0()) / span));
    }
    return U;
}

QuadraticityAudit quadraticity_audit(const BrokenGF& g, double radius, int samples, std::uint64_t seed,
                                     double tolerance)
{
    require(radius > 0.0 && samples >= 1, "quadraticity_audit needs a positive radius and samples");
    QuadraticityAudit a;
    a.radius = radius;
    a.samples = samples;
    a.tolerance = tolerance;
    a.pass = true;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int k = g.dim();
    const int steps = g.N() + 1;
    double worst = -1.0;
    for (int s = 0; s < samples; ++s) {
        Vec x(k);
        for (int i = 0; i < k; ++i) {
            x[i] = kTwoPi * unit(rng);
        }
        std::vector<Vec> X(std::size_t(steps) + 1, x);
        double Q = 0.0;
        double smallest = std::numeric_limits<double>::infinity();
        for (const auto& b : g.blocks()) {
            for (int j = steps - 1; j >= 0; --j) {
                const StepGF& st = b.steps[std::size_t(j)];
                Vec w(b.dim());
                if (b.dim() == 1) {
                    w[0] = unit(rng) < 0.5 ? -1.0 : 1.0;
                } else {
                    const double ang = kTwoPi * unit(rng);
                    w << std::cos(ang), std::sin(ang);
                }
                const double r = radius * (1.0 + 2.0 * unit(rng));
                w *= r;
                smallest = std::min(smallest, r);
                const Vec dX = st.eps() * (b.A * w);
                for (int i = 0; i < b.dim(); ++i) {
                    const int ax = b.axes[std::size_t(i)];
                    X[std::size_t(j)][ax] = X[std::size_t(j) + 1][ax] - dX[i];
                }
                Q += st.eps() * (0.5 * w.dot(b.A * w) - b.offset);
            }
        }
        const std::vector<Vec> U(X.begin() + 1, X.end() - 1);
        const double S = g.value(x, X.front(), U);
        const double dev = std::abs(S - g.datum().value(X.front()) - Q);
        a.max_deviation = std::max(a.max_deviation, dev);
        const double rel = dev / (1.0 + std::abs(Q));
        if (rel > tolerance) {
            a.pass = false;
        }
        if (rel > worst) {
            worst = rel;
            a.worst_radius = smallest;
            a.worst_x = x[0];
        }
    }
    return a;
}

}  // namespace hjmm
