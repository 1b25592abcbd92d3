#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hjmm/datum.hpp"
#include "hjmm/flow.hpp"
#include "hjmm/hamiltonian.hpp"
#include "hjmm/step_gf.hpp"

namespace hjmm {

/// Counts of positive and negative directions of the block quadratic form.
struct Signature {
    int n_plus = 0;
    int n_minus = 0;
};

/// Characteristics launched from a 1-D block datum at t0 and carried to t:
/// launch points, arrival points and actions.
struct Wavefront {
    std::vector<double> xi;
    std::vector<double> x;
    std::vector<double> action;
    bool periodic = false;
};

/// Wavefronts computed on demand, one per launch count; shared by copies.
struct WavefrontCache {
    std::mutex mutex;
    std::map<int, std::shared_ptr<const Wavefront>> by_samples;
};

/// An independent chain acting on a subset of the coordinates. Separable
/// Hamiltonians (and diagonal perturbation-free ones) split into one block per
/// axis; everything else is a single block.
struct ChainBlock {
    std::vector<int> axes;
    std::shared_ptr<const HamiltonianSpec> h;  // component Hamiltonian on these axes
    std::vector<StepGF> steps;                 // N + 1 steps
    Mat A;                                     // quadratic part of h
    double offset = 0.0;                       // constant part of h (analytic blocks)
    int sense = 1;                             // +1: minimized, -1: maximized
    double window = 0.0;                       // momentum radius beyond which the steps are quadratic
    std::optional<DatumSpec> datum;            // own datum part when sigma separates along the blocks
    std::shared_ptr<WavefrontCache> wavefront = std::make_shared<WavefrontCache>();

    int dim() const { return int(axes.size()); }
    bool analytic() const;
    Vec restrict(const Vec& v) const;
};

struct BrokenGFOptions {
    int N = 0;          // intermediate points; 0 picks the smallest admissible count
    int N_max = 64;
    TwistOptions twist;
    ShootingOptions shooting;
};

/// S^t(x; xi, U) = sigma(xi) + sum_j S_j(X_j, X_{j+1}), X_0 = xi, X_{N+1} = x,
/// over the partition t0 < t_1 < ... < t (or the reversed one when t < t0).
class BrokenGF {
public:
    struct Eval {
        double value = 0.0;
        Vec d_xi;
        std::vector<Vec> d_U;
    };

    const DatumSpec& datum() const { return datum_; }
    const HamiltonianSpec& hamiltonian() const { return *h_; }
    double t0() const { return times_.front(); }
    double t() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }
    int N() const { return int(times_.size()) - 2; }
    int dim() const { return datum_.dim(); }
    const std::vector<ChainBlock>& blocks() const { return blocks_; }
    Signature signature() const;
    bool analytic() const;
    /// The datum splits along the blocks.
    bool separable_datum() const;
    /// Largest block window (momentum units).
    double window() const;
    /// Minimum twist measure over the checked sub-intervals (infinity when all steps are analytic).
    double twist_margin() const { return twist_margin_; }
    std::string summary() const;

    double value(const Vec& x, const Vec& xi, const std::vector<Vec>& U) const;
    Eval evaluate(const Vec& x, const Vec& xi, const std::vector<Vec>& U) const;
    /// Intermediate points on the straight chain from xi to x (time-proportional).
    std::vector<Vec> straight_chain(const Vec& xi, const Vec& x) const;

private:
    friend BrokenGF build_broken_gf(const HamiltonianSpec&, const DatumSpec&, double, double, const BrokenGFOptions&);
    BrokenGF() = default;

    DatumSpec datum_ = DatumSpec::builtin("constant");
    std::shared_ptr<const HamiltonianSpec> h_;
    std::vector<double> times_;
    std::vector<ChainBlock> blocks_;
    double twist_margin_ = 0.0;
};

/// Requires a C1 datum and t != t0. Automatic N doubles from 4 until every
/// sub-interval passes the twist check; Construction error past N_max.
BrokenGF build_broken_gf(const HamiltonianSpec& h, const DatumSpec& d, double t0, double t,
                         const BrokenGFOptions& options = {});
inline BrokenGF build_broken_gf(const HamiltonianSpec& h, const DatumSpec& d, double t, int N = 0)
{
    BrokenGFOptions o;
    o.N = N;
    return build_broken_gf(h, d, 0.0, t, o);
}

/// Samples step momenta w_j with radius <= |w_j| <= 3 radius, sets
/// X_j = X_{j+1} - eps_j A w_j backwards from x, and compares S - sigma(xi)
/// with sum_j eps_j (1/2 <A w_j, w_j> - offset).
struct QuadraticityAudit {
    double radius = 0.0;
    int samples = 0;
    double max_deviation = 0.0;
    double tolerance = 0.0;     // relative: deviation <= tolerance (1 + |Q|)
    double worst_radius = 0.0;  // smallest |w_j| in the worst sample
    double worst_x = 0.0;
    bool pass = false;
};

QuadraticityAudit quadraticity_audit(const BrokenGF& g, double radius, int samples, std::uint64_t seed = 1,
                                     double tolerance = 1e-10);

}  // namespace hjmm
