#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hjmm/hamiltonian.hpp"
#include "hjmm/linalg.hpp"

namespace hjmm {

enum class StepKind { Analytic, Numeric, Zero };

const char* to_string(StepKind k);

/// Value of a step generating function and its endpoint derivatives:
/// d_start = dS/dX_j = -P_j and d_end = dS/dX_{j+1} = P_{j+1}.
struct StepEval {
    double value = 0.0;
    Vec d_start;
    Vec d_end;
};

struct ShootingOptions {
    double tolerance = 1e-10;  // endpoint mismatch
    int max_iter = 50;
    double damping = 0.5;      // backtracking factor on the Newton step
    double fd_step = 1e-7;     // Jacobian difference step (relative to 1 + |P|)
};

/// Generating function S_{t0}^{t1}(X, Y) of the time-t0-to-t1 flow, endpoint
/// parameterized. The interval may run backwards (t1 < t0).
class StepGF {
public:
    /// 1/2 <A^{-1}(Y - X), Y - X> / eps - offset eps, for H = 1/2<Ap,p> + offset.
    static StepGF analytic(const Mat& A, double t0, double t1, double offset = 0.0);
    /// Shooting on the Hamiltonian flow with action quadrature.
    static StepGF numeric(std::shared_ptr<const HamiltonianSpec> h, double t0, double t1,
                          ShootingOptions options = {});
    /// Identically zero function of (X in R^in, Y in R^out).
    static StepGF zero(int in_dim, int out_dim, double t0 = 0.0, double t1 = 0.0);

    StepKind kind() const { return kind_; }
    double t0() const { return t0_; }
    double t1() const { return t1_; }
    double eps() const { return t1_ - t0_; }
    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }
    /// Quadratic part A of the Hamiltonian (the Legendre guess uses it).
    const Mat& quadratic() const { return A_; }
    const HamiltonianSpec* hamiltonian() const { return h_.get(); }

    double value(const Vec& X, const Vec& Y) const { return evaluate(X, Y).value; }
    StepEval evaluate(const Vec& X, const Vec& Y) const;
    /// Initial momentum of the connecting characteristic.
    Vec shoot(const Vec& X, const Vec& Y) const;

private:
    StepGF() = default;
    StepEval evaluate_numeric(const Vec& X, const Vec& Y) const;

    StepKind kind_ = StepKind::Zero;
    double t0_ = 0.0;
    double t1_ = 0.0;
    int in_dim_ = 1;
    int out_dim_ = 1;
    Mat A_;
    Mat A_inv_;
    double offset_ = 0.0;
    std::shared_ptr<const HamiltonianSpec> h_;
    ShootingOptions options_;
    int steps_ = 1;
};

/// Analytic for perturbation-free quadratic H, numeric otherwise.
StepGF step_gf(const HamiltonianSpec& h, double t0, double t1, const ShootingOptions& options = {});
StepGF step_gf(std::shared_ptr<const HamiltonianSpec> h, double t0, double t1, const ShootingOptions& options = {});

/// Chain G(Q, x; w_1..w_m) = S_0(Q, w_1) + ... + S_m(w_m, x).
class GeneratingFunction {
public:
    explicit GeneratingFunction(StepGF step);
    explicit GeneratingFunction(std::vector<StepGF> chain);

    int in_dim() const { return chain_.front().in_dim(); }
    int out_dim() const { return chain_.back().out_dim(); }
    int param_count() const { return int(chain_.size()) - 1; }
    const std::vector<StepGF>& chain() const { return chain_; }

    double value(const Vec& Q, const Vec& x, const std::vector<Vec>& w) const;
    /// dG/dw_i for every inner variable.
    std::vector<Vec> param_gradient(const Vec& Q, const Vec& x, const std::vector<Vec>& w) const;

private:
    std::vector<StepGF> chain_;
};

/// Sum with the shared variable adjoined as a parameter; dimensions must agree.
GeneratingFunction compose_gf(const GeneratingFunction& S, const GeneratingFunction& F);

struct StationaryPoint {
    std::vector<Vec> w;
    double value = 0.0;
    double gradient_norm = 0.0;
    bool converged = false;
};

/// Newton on dG/dw = 0 from `guess` (straight chain when empty).
StationaryPoint stationary_point(const GeneratingFunction& g, const Vec& Q, const Vec& x,
                                 std::vector<Vec> guess = {});

/// Endpoint-derivative identities of one step, checked against central
/// differences of the value and against the flow launched from (X, P_j).
struct RelReport {
    int samples = 0;
    double max_fd_error = 0.0;    // |FD(dS) - (-P_j, P_{j+1})|
    double max_flow_error = 0.0;  // endpoint / end-momentum mismatch of the flow from (X, P_j)
    double tolerance = 0.0;
    bool pass = false;
};

RelReport rel_check(const StepGF& step, int samples, std::uint64_t seed, double momentum_bound = 2.0,
                    double tolerance = -1.0);

}  // namespace hjmm
