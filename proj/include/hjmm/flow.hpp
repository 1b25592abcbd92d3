#pragma once

#include "hjmm/datum.hpp"
#include "hjmm/hamiltonian.hpp"
#include "hjmm/linalg.hpp"

namespace hjmm {

/// Point of the extended phase space with the action accumulated since launch.
struct PhaseState {
    double t = 0.0;
    Vec x;
    Vec p;
    double action = 0.0;
};

struct VectorField {
    Vec dx;  // dH/dp
    Vec dp;  // -dH/dx
};

VectorField vector_field(const HamiltonianSpec& h, double t, const Vec& x, const Vec& p);

inline constexpr double kStepsPerUnitTime = 200.0;

/// RK4 steps used for a span of the given length: ceil(200 |span|), at least 1.
int default_steps(double span);

/// Classical RK4 with fixed step from `from.t` to `t1` (either direction);
/// the action integrand p . dH/dp - H shares the stages.
PhaseState integrate(const HamiltonianSpec& h, const PhaseState& from, double t1, int steps);
PhaseState integrate(const HamiltonianSpec& h, const PhaseState& from, double t1);

struct TwistOptions {
    int samples = 41;          // per axis of X and of P
    double threshold = 1e-3;   // delta_twist
    double momentum_window = 0.0;  // |P| bound; 0 picks max(R_V, 2) + 1
    double fd_step = 1e-5;
};

struct TwistReport {
    double s = 0.0;
    double t = 0.0;
    int samples = 0;        // total (X, P) samples
    double min_derivative = 0.0;  // min |dx/dP| (1-D) or min |det| (2-D)
    double threshold = 0.0;
    double momentum_window = 0.0;
    double worst_x = 0.0;
    double worst_p = 0.0;
    bool analytic = false;
    bool pass = false;
};

/// Requires 0 <= s < t <= horizon.
TwistReport twist_check(const HamiltonianSpec& h, double s, double t, const TwistOptions& options = {});
/// Same diagnostic for the flow from `from` to `to` in either direction.
TwistReport twist_check_interval(const HamiltonianSpec& h, double from, double to, const TwistOptions& options = {});

/// Launch from (0, x0, d sigma(x0)) and integrate to t.
PhaseState characteristics_from_datum(const HamiltonianSpec& h, const DatumSpec& d, const Vec& x0, double t);

}  // namespace hjmm
