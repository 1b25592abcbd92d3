#pragma once

#include <vector>

#include "hjmm/cubic_example.hpp"
#include "hjmm/datum.hpp"
#include "hjmm/field.hpp"
#include "hjmm/grid.hpp"
#include "hjmm/hamiltonian.hpp"

namespace hjmm {

/// Global Lax-Friedrichs on a tensor grid. Non-periodic axes extrapolate
/// linearly into one ghost cell on each side.
struct LFConfig {
    SpaceGrid grid;
    double dt = 0.0;            // 0: largest step the CFL ratio allows, re-chosen every step
    std::vector<double> theta;  // per axis; empty: adaptive, from the slopes present at each step
    double cfl = 0.5;           // dt * sum_i theta_i / dx_i
    double theta_safety = 1.1;
    int threads = 1;
};

/// Requires the CFL bound at configuration time (Cfl error) and again at every
/// step when theta adapts. Times ascend from t0.
SolutionField lf_solve(const HamiltonianSpec& h, const DatumSpec& d, const LFConfig& cfg,
                       const std::vector<double>& times, double t0 = 0.0);
SolutionField lf_solve(const HamiltonianSpec& h, const std::vector<double>& initial, const LFConfig& cfg,
                       const std::vector<double>& times, double t0 = 0.0);

struct ViscosityPoint {
    double t = 0.0;
    Vec x;
};

struct ViscosityProbe {
    double tau = 0.0;
    Vec p;
};

struct ViscosityEntry {
    double t = 0.0;
    Vec x;
    bool sub = true;  // subsolution side (superdifferential probe) or supersolution side
    ViscosityProbe probe;
    double residual = 0.0;  // tau + H(t, x, p)
    bool violated = false;
};

struct ViscosityCheckOptions {
    double tolerance = -1.0;  // negative: 1e-2 scaled with the grid spacing
    double kink = 0.05;       // one-sided slopes further apart than this mark a kink
    /// Explicit probes, applied on whichever side they belong to; when empty
    /// the corners and centre of each estimated cone are probed.
    std::vector<ViscosityProbe> probes;
};

struct SlopeEstimate {
    double tau = 0.0;
    Vec left;   // one-sided quotients, Richardson-extrapolated
    Vec right;
    bool super_nonempty = false;
    bool sub_nonempty = false;
};

struct ViscosityCheckReport {
    std::vector<ViscosityEntry> entries;
    std::vector<SlopeEstimate> slopes;  // one per point
    double worst = 0.0;                 // largest violation beyond the tolerance side, signed residual
    double tolerance = 0.0;
    bool pass = true;
};

/// Points must lie on the grid and at stored times.
ViscosityCheckReport viscosity_check(const SolutionField& u, const HamiltonianSpec& h,
                                     const std::vector<ViscosityPoint>& points,
                                     const ViscosityCheckOptions& options = {});

/// Closed-form example solution sampled on a 1-D grid; tagged analytic-example.
SolutionField example_field(const SpaceGrid& grid, const std::vector<double>& times,
                            const ExampleWindow& window = {});

struct SplittingConfig {
    double t = 2.0;
    std::vector<std::size_t> cells = {256, 512, 1024};  // grid refinements on [-window, window]
    double window = 3.0;
    double joint_half_width = 0.1;
    double probe_dx = 0.01;  // grid spacing of the example field used for the probe
    int threads = 1;
};

struct SplittingLevel {
    std::size_t cells = 0;
    double dx = 0.0;
    double lf_value = 0.0;
    double gap = 0.0;           // |u_LF(t, 0) + 1/4|
    double scheme_error = 0.0;  // |u_LF(next level) - u_LF(this level)|; 0 on the finest level
};

struct SplittingReport {
    double t = 0.0;
    double minmax_value = 0.0;
    double probe_p = 0.0;
    double probe_residual = 0.0;
    bool probe_fails = false;
    std::vector<SplittingLevel> levels;
    double lf_value = 0.0;  // finest level
    double gap = 0.0;
    double scheme_error = 0.0;  // between the two finest levels
    bool gap_exceeds_error = false;  // gap > 3 * scheme error at every refined level
    bool gap_persists = false;       // gap does not shrink under refinement (beyond the scheme error)
    bool lf_subsolution = false;     // viscosity check of the LF field at (t, 0)
    double lf_sub_worst = 0.0;
};

SplittingReport splitting_report(const SplittingConfig& cfg = {});

}  // namespace hjmm
