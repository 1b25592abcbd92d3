#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hjmm/datum.hpp"
#include "hjmm/field.hpp"
#include "hjmm/grid.hpp"
#include "hjmm/hamiltonian.hpp"
#include "hjmm/minmax.hpp"

namespace hjmm {

struct SemigroupOptions {
    SolveOptions solve;       // solve.t0 is ignored; instants come from the experiment
    double tolerance = 5e-3;  // solver tolerance used by every audit
    double c0_eps = 0.05;     // mollifier width applied to C0 data before solving
    int mollify_samples = 4096;
};

/// J^{t, t1} on grid data: the data are re-entered through the monotone cubic
/// surrogate and the minmax problem is solved over [t1, t] (a reversed chain
/// when t < t1, which swaps min and max).
struct Propagator {
    std::shared_ptr<const HamiltonianSpec> h;
    double t1 = 0.0;
    double t = 0.0;
    SemigroupOptions options;
};

std::vector<double> propagate(const Propagator& pr, const SpaceGrid& grid, const std::vector<double>& f);
/// Same, starting from a datum (used as is when C1, mollified when C0).
std::vector<double> propagate(const Propagator& pr, const SpaceGrid& grid, const DatumSpec& d);

/// The datum a propagation actually starts from.
DatumSpec c1_surrogate(const DatumSpec& d, const SemigroupOptions& options);
/// Monotone cubic surrogate of grid data; on 2-D grids a sum a(x1) + b(x2) is
/// kept separable.
DatumSpec grid_surrogate(const SpaceGrid& grid, const std::vector<double>& f);

struct ResidualReport {
    std::string experiment;  // markov, hysteresis, nonexpansive, hamiltonian-continuity, c0-cauchy
    std::vector<double> instants;
    double residual = 0.0;
    double bound = 0.0;      // right-hand side the residual is held against (tolerance included)
    double tolerance = 0.0;
    Vec worst_x;
    std::map<std::string, double> details;
    bool pass = false;
};

ResidualReport markov_residual(const HamiltonianSpec& h, const DatumSpec& d, double t1, double t2, double t3,
                               const SpaceGrid& grid, const SemigroupOptions& options = {});
ResidualReport hysteresis_residual(const HamiltonianSpec& h, const DatumSpec& d, double t1, double t2,
                                   const SpaceGrid& grid, const SemigroupOptions& options = {});

/// Hysteresis on every ordered pair of `instants` and Markov on every ordered
/// triple, with the measured constant C = max markov / max hysteresis.
struct ImplicationTable {
    std::vector<ResidualReport> hysteresis;
    std::vector<ResidualReport> markov;
    double delta = 0.0;        // largest hysteresis residual
    double markov_max = 0.0;
    double constant = 0.0;     // markov_max / delta (0 when delta is 0)
    double assumed_constant = 2.0;
    bool premise = false;      // every hysteresis residual <= tolerance
    bool conclusion = false;   // markov_max <= assumed_constant * delta + tolerance
};

ImplicationTable implication_table(const HamiltonianSpec& h, const DatumSpec& d, const std::vector<double>& instants,
                                   const SpaceGrid& grid, const SemigroupOptions& options = {});

/// Periodic convolution with a smooth bump of half-width eps, sampled at
/// `samples` points per period and re-interpolated with exact slopes.
DatumSpec mollify(const DatumSpec& d, double eps, int samples = 4096);

struct C0Result {
    SolutionField field;                     // from the last width of the schedule
    ResidualReport report;                   // experiment c0-cauchy
    std::vector<double> solution_distances;  // |u_n - u_{n+1}| over all stored times
    std::vector<double> datum_distances;     // |sigma_n - sigma_{n+1}|
    double last_deviation = 0.0;             // |sigma_last - sigma| on the grid
    bool bounded = false;
    bool decreasing = false;
};

C0Result c0_solve(const HamiltonianSpec& h, const DatumSpec& d, const std::vector<double>& schedule,
                  const SpaceGrid& grid, const std::vector<double>& times, const SemigroupOptions& options = {});

/// Final fields of two schedules agree within 2 (max last deviation + tolerance).
ResidualReport schedule_agreement(const C0Result& a, const C0Result& b, double tolerance);

ResidualReport nonexpansive_audit(const HamiltonianSpec& h, const DatumSpec& d1, const DatumSpec& d2, double t,
                                  const SpaceGrid& grid, const SemigroupOptions& options = {});

/// Oscillation of u1 - u2 against t times the oscillation of H1 - H2 over the
/// grid and the visited momentum window.
ResidualReport hamiltonian_continuity_audit(const HamiltonianSpec& h1, const HamiltonianSpec& h2, const DatumSpec& d,
                                            double t, const SpaceGrid& grid, const SemigroupOptions& options = {});

}  // namespace hjmm
