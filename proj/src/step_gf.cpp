#include "hjmm/step_gf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hjmm/errors.hpp"
#include "hjmm/flow.hpp"
#include "hjmm/grid.hpp"

namespace hjmm {

const char* to_string(StepKind k)
{
    switch (k) {
    case StepKind::Analytic: return "analytic";
    case StepKind::Numeric: return "numeric";
    case StepKind::Zero: return "zero";
    }
    return "zero";
}

StepGF StepGF::analytic(const Mat& A, double t0, double t1, double offset)
{
    require(t1 != t0, "a step needs a non-empty interval");
    require(A.rows() == A.cols() && (A.rows() == 1 || A.rows() == 2), "A must be 1x1 or 2x2");
    require(std::abs(A.determinant()) > 0.0, "A must be nondegenerate");
    StepGF s;
    s.kind_ = StepKind::Analytic;
    s.t0_ = t0;
    s.t1_ = t1;
    s.in_dim_ = s.out_dim_ = int(A.rows());
    s.A_ = A;
    s.A_inv_ = A.inverse();
    s.offset_ = offset;
    return s;
}

StepGF StepGF::numeric(std::shared_ptr<const HamiltonianSpec> h, double t0, double t1, ShootingOptions options)
{
    require(h != nullptr, "numeric step needs a Hamiltonian");
    require(t1 != t0, "a step needs a non-empty interval");
    StepGF s;
    s.kind_ = StepKind::Numeric;
    s.t0_ = t0;
    s.t1_ = t1;
    s.in_dim_ = s.out_dim_ = h->dim();
    s.options_ = options;
    s.steps_ = default_steps(t1 - t0);
    // Legendre guess from the quadratic part at infinity when there is one, so
    // that steps outside the perturbation support land on the first try.
    const bool has_quadratic = std::holds_alternative<QuadraticPlusCompact>(h->variant()) ||
                               std::holds_alternative<SeparableConvexConcave>(h->variant());
    s.A_ = has_quadratic ? h->quadratic_part() : h->hess_p(t0, zeros(h->dim()), zeros(h->dim()));
    if (std::abs(s.A_.determinant()) < 1e-8) {
        s.A_ = Mat::Zero(h->dim(), h->dim());
    } else {
        s.A_inv_ = s.A_.inverse();
    }
    s.h_ = std::move(h);
    return s;
}

StepGF StepGF::zero(int in_dim, int out_dim, double t0, double t1)
{
    require(in_dim >= 1 && in_dim <= 2 && out_dim >= 1 && out_dim <= 2, "dimensions must be 1 or 2");
    StepGF s;
    s.kind_ = StepKind::Zero;
    s.t0_ = t0;
    s.t1_ = t1;
    s.in_dim_ = in_dim;
    s.out_dim_ = out_dim;
    return s;
}

StepEval StepGF::evaluate(const Vec& X, const Vec& Y) const
{
    require(X.size() == in_dim_ && Y.size() == out_dim_, "step evaluated with mismatched dimensions");
    switch (kind_) {
    case StepKind::Zero: return {0.0, zeros(in_dim_), zeros(out_dim_)};
    case StepKind::Analytic: {
        const double e = eps();
        const Vec P = A_inv_ * (Y - X) / e;
        return {0.5 * (Y - X).dot(P) - offset_ * e, -P, P};
    }
    case StepKind::Numeric: return evaluate_numeric(X, Y);
    }
    return {};
}

Vec StepGF::shoot(const Vec& X, const Vec& Y) const { return -evaluate(X, Y).d_start; }

StepEval StepGF::evaluate_numeric(const Vec& X, const Vec& Y) const
{
    const HamiltonianSpec& h = *h_;
    const int k = in_dim_;
    const double e = eps();
    Vec P = A_.isZero() ? zeros(k) : Vec(A_inv_ * (Y - X) / e);

    auto land = [&](const Vec& p) { return integrate(h, PhaseState{t0_, X, p, 0.0}, t1_, steps_); };
    PhaseState end = land(P);
    Vec r = end.x - Y;
    const double tol = options_.tolerance * std::max(1.0, Y.norm());
    int it = 0;
    while (r.norm() > tol) {
        if (++it > options_.max_iter) {
            std::ostringstream os;
            os << "shooting did not converge on [" << t0_ << ", " << t1_ << "] (mismatch " << r.norm()
               << "); the step is too long for the twist condition, increase N";
            fail(ErrorKind::NoTwist, os.str());
        }
        Mat J(k, k);
        for (int j = 0; j < k; ++j) {
            Vec pj = P;
            const double d = options_.fd_step * (1.0 + std::abs(P[j]));
            pj[j] += d;
            J.col(j) = (land(pj).x - end.x) / d;
        }
        if (!(std::abs(J.determinant()) > 0.0)) {
            fail(ErrorKind::NoTwist, "singular momentum-to-endpoint map while shooting; increase N");
        }
        const Vec delta = -J.inverse() * r;
        double lambda = 1.0;
        PhaseState trial = land(P + delta);
        while ((trial.x - Y).norm() >= r.norm() && lambda > 1e-6) {
            lambda *= options_.damping;
            trial = land(P + lambda * delta);
        }
        P += lambda * delta;
        end = trial;
        r = end.x - Y;
    }
    return {end.action, -P, end.p};
}

StepGF step_gf(std::shared_ptr<const HamiltonianSpec> h, double t0, double t1, const ShootingOptions& options)
{
    require(h != nullptr, "step_gf needs a Hamiltonian");
    if (const auto* q = std::get_if<QuadraticPlusCompact>(&h->variant()); q && q->V.is_zero()) {
        return StepGF::analytic(q->A, t0, t1, q->offset);
    }
    if (const auto* s = std::get_if<SeparableConvexConcave>(&h->variant())) {
        const auto* a = std::get_if<QuadraticPlusCompact>(&s->convex->variant());
        const auto* b = std::get_if<QuadraticPlusCompact>(&s->concave->variant());
        if (a && b && a->V.is_zero() && b->V.is_zero()) {
            return StepGF::analytic(diag2(a->A(0, 0), b->A(0, 0)), t0, t1, a->offset + b->offset);
        }
    }
    return StepGF::numeric(std::move(h), t0, t1, options);
}

StepGF step_gf(const HamiltonianSpec& h, double t0, double t1, const ShootingOptions& options)
{
    return step_gf(std::make_shared<const HamiltonianSpec>(h), t0, t1, options);
}

GeneratingFunction::GeneratingFunction(StepGF step) : chain_{std::move(step)} {}

GeneratingFunction::GeneratingFunction(std::vector<StepGF> chain) : chain_(std::move(chain))
{
    require(!chain_.empty(), "a generating function needs at least one step");
    for (std::size_t i = 1; i < chain_.size(); ++i) {
        require(chain_[i - 1].out_dim() == chain_[i].in_dim(), "inner variable dimensions differ");
    }
}

double GeneratingFunction::value(const Vec& Q, const Vec& x, const std::vector<Vec>& w) const
{
    require(int(w.size()) == param_count(), "wrong number of inner variables");
    double v = 0.0;
    for (std::size_t i = 0; i < chain_.size(); ++i) {
        const Vec& a = i == 0 ? Q : w[i - 1];
        const Vec& b = i + 1 == chain_.size() ? x : w[i];
        v += chain_[i].value(a, b);
    }
    return v;
}

std::vector<Vec> GeneratingFunction::param_gradient(const Vec& Q, const Vec& x, const std::vector<Vec>& w) const
{
    require(int(w.size()) == param_count(), "wrong number of inner variables");
    std::vector<Vec> g;
    for (std::size_t i = 0; i < w.size(); ++i) {
        g.push_back(zeros(int(w[i].size())));
    }
    for (std::size_t i = 0; i < chain_.size(); ++i) {
        const Vec& a = i == 0 ? Q : w[i - 1];
        const Vec& b = i + 1 == chain_.size() ? x : w[i];
        const StepEval e = chain_[i].evaluate(a, b);
        if (i > 0) {
            g[i - 1] += e.d_start;
        }
        if (i + 1 < chain_.size()) {
            g[i] += e.d_end;
        }
    }
    return g;
}

GeneratingFunction compose_gf(const GeneratingFunction& S, const GeneratingFunction& F)
{
    require(S.out_dim() == F.in_dim(), "compose_gf: inner variable dimensions differ (" +
                                           std::to_string(S.out_dim()) + " vs " + std::to_string(F.in_dim()) + ")");
    std::vector<StepGF> chain = S.chain();
    chain.insert(chain.end(), F.chain().begin(), F.chain().end());
    return GeneratingFunction(std::move(chain));
}

namespace {

Eigen::VectorXd flatten(const std::vector<Vec>& w)
{
    Eigen::Index n = 0;
    for (const auto& v : w) {
        n += v.size();
    }
    Eigen::VectorXd z(n);
    Eigen::Index i = 0;
    for (const auto& v : w) {
        z.segment(i, v.size()) = v;
        i += v.size();
    }
    return z;
}

void unflatten(const Eigen::VectorXd& z, std::vector<Vec>& w)
{
    Eigen::Index i = 0;
    for (auto& v : w) {
        v = z.segment(i, v.size());
        i += v.size();
    }
}

}  // namespace

StationaryPoint stationary_point(const GeneratingFunction& g, const Vec& Q, const Vec& x, std::vector<Vec> guess)
{
    const int m = g.param_count();
    if (guess.empty()) {
        // Straight chain, proportional to elapsed time when the chain has a
        // net duration, to the step index otherwise.
        const auto& c = g.chain();
        const double total = c.back().t1() - c.front().t0();
        for (int i = 1; i <= m; ++i) {
            const double s = total != 0.0 ? (c[std::size_t(i)].t0() - c.front().t0()) / total : double(i) / (m + 1);
            guess.push_back(Q + s * (x - Q));
        }
    }
    require(int(guess.size()) == m, "guess has the wrong number of inner variables");
    StationaryPoint sp;
    sp.w = std::move(guess);
    auto grad = [&](const std::vector<Vec>& w) { return flatten(g.param_gradient(Q, x, w)); };
    Eigen::VectorXd z = flatten(sp.w);
    Eigen::VectorXd gz = grad(sp.w);
    for (int it = 0; it < 50 && gz.norm() > 1e-10; ++it) {
        const Eigen::Index n = z.size();
        Eigen::MatrixXd Hm(n, n);
        std::vector<Vec> w = sp.w;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = 1e-6 * (1.0 + std::abs(z[j]));
            Eigen::VectorXd zp = z;
            Eigen::VectorXd zm = z;
            zp[j] += d;
            zm[j] -= d;
            unflatten(zp, w);
            const Eigen::VectorXd gp = grad(w);
            unflatten(zm, w);
            Hm.col(j) = (gp - grad(w)) / (2.0 * d);
        }
        const Eigen::VectorXd step = Hm.fullPivLu().solve(-gz);
        z += step;
        unflatten(z, sp.w);
        gz = grad(sp.w);
    }
    sp.gradient_norm = gz.norm();
    sp.converged = sp.gradient_norm <= 1e-8;
    sp.value = g.value(Q, x, sp.w);
    return sp;
}

RelReport rel_check(const StepGF& step, int samples, std::uint64_t seed, double momentum_bound, double tolerance)
{
    require(step.kind() != StepKind::Zero, "rel_check needs a flow step");
    require(samples >= 1, "rel_check needs samples");
    RelReport r;
    r.samples = samples;
    const bool analytic = step.kind() == StepKind::Analytic;
    r.tolerance = tolerance > 0.0 ? tolerance : (analytic ? 1e-10 : 1e-4);
    // Central differences are exact on quadratics, so analytic steps afford a
    // wide stencil that keeps rounding far below their tolerance.
    const double h = analytic ? 1e-2 : 1e-4;
    const int k = step.in_dim();
    const HamiltonianSpec* H = step.hamiltonian();
    const bool periodic = H == nullptr || H->x_periodic();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(periodic ? 0.0 : -1.0, periodic ? kTwoPi : 1.0);
    std::uniform_real_distribution<double> up(-momentum_bound, momentum_bound);
    for (int s = 0; s < samples; ++s) {
        Vec X(k);
        Vec P(k);
        for (int i = 0; i < k; ++i) {
            X[i] = ux(rng);
            P[i] = up(rng);
        }
        Vec Y;
        Vec Pend;
        if (analytic) {
            Y = X + step.eps() * step.quadratic() * P;
            Pend = P;
        } else {
            const PhaseState e = integrate(*H, PhaseState{step.t0(), X, P, 0.0}, step.t1(), default_steps(step.eps()));
            Y = e.x;
            Pend = e.p;
        }
        const StepEval ev = step.evaluate(X, Y);
        r.max_flow_error = std::max({r.max_flow_error, (ev.d_start + P).norm(), (ev.d_end - Pend).norm()});
        for (int i = 0; i < k; ++i) {
            Vec Xp = X, Xm = X, Yp = Y, Ym = Y;
            Xp[i] += h;
            Xm[i] -= h;
            Yp[i] += h;
            Ym[i] -= h;
            const double dX = (step.value(Xp, Y) - step.value(Xm, Y)) / (2.0 * h);
            const double dY = (step.value(X, Yp) - step.value(X, Ym)) / (2.0 * h);
            r.max_fd_error = std::max({r.max_fd_error, std::abs(dX - ev.d_start[i]), std::abs(dY - ev.d_end[i])});
        }
    }
    r.pass = r.max_fd_error <= r.tolerance && r.max_flow_error <= r.tolerance;
    return r;
}

}  // namespace hjmm
