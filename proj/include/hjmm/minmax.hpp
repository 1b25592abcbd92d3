#pragma once

#include <vector>

#include "hjmm/broken_gf.hpp"
#include "hjmm/field.hpp"
#include "hjmm/grid.hpp"

namespace hjmm {

enum class ModeKind { AllPlus, AllMinus, BlockSeparable, Bounds };

const char* to_string(ModeKind m);

struct SignatureMode {
    ModeKind kind = ModeKind::AllPlus;
    /// Mixed signature with a datum that does not separate: only the Hopf
    /// bounds are available.
    bool degraded = false;
};

/// AllPlus / AllMinus for definite signatures; mixed signatures give
/// BlockSeparable when the datum separates along the blocks, Bounds otherwise.
SignatureMode derive_mode(const BrokenGF& g);

enum class Search {
    Auto,       // Wavefront on 1-D blocks, Grid otherwise
    Grid,       // coarse grid on xi with straight chains, then BFGS on (xi, U)
    Wavefront,  // critical points from characteristics of the datum, then a stationarity check on (xi, U)
};

struct MinmaxOptions {
    int optimizer_grid = 41;      // coarse points per parameter axis
    int wavefront_samples = 512;  // launches per period
    int polish_starts = 4;
    double gtol = 1e-9;           // gradient norm accepted as stationary
    Search search = Search::Auto;
};

inline constexpr double kTolMinmax = 1e-6;

struct MinmaxResult {
    ModeKind mode = ModeKind::AllPlus;
    double value = 0.0;
    double lower = 0.0;  // Bounds mode; equal to value otherwise
    double upper = 0.0;
    Vec xi;              // optimizer location (single-block modes)
    std::vector<Vec> U;
    double gradient_norm = 0.0;
    /// S on the straight chain at the returned xi: an upper bound for AllPlus,
    /// a lower bound for AllMinus.
    double probe_value = 0.0;
    bool clamped = false;
};

/// Requires a mode consistent with g's signature.
MinmaxResult minmax_solve(const BrokenGF& g, const Vec& x, const SignatureMode& mode, const MinmaxOptions& options = {});
double minmax_value(const BrokenGF& g, const Vec& x, const SignatureMode& mode, const MinmaxOptions& options = {});
double minmax_value(const BrokenGF& g, const Vec& x, const MinmaxOptions& options = {});

/// Value of one block on its own: extremum over (xi_b, U_b) of
/// sigma_b(xi_b) + sum_j S_j. Needs the block's own datum part.
double block_value(const BrokenGF& g, std::size_t block, double x, const MinmaxOptions& options = {});

struct HopfBounds {
    double lower = 0.0;  // max over the minus block of min over the plus block
    double upper = 0.0;  // min over the plus block of max over the minus block
    bool clamped = false;
};

/// Separable Hamiltonian (two 1-D blocks of opposite sense), any C1 datum.
HopfBounds hopf_bounds(const BrokenGF& g, const Vec& x, const MinmaxOptions& options = {});

struct SolveOptions {
    double t0 = 0.0;
    BrokenGFOptions gf;
    MinmaxOptions minmax;
    int threads = 1;
};

/// Minmax field on grid x times. The slice at t0 is the datum itself; Bounds
/// mode fills both `values` (lower) and `upper`.
SolutionField solve_field(const HamiltonianSpec& h, const DatumSpec& d, const SpaceGrid& grid,
                          const std::vector<double>& times, const SolveOptions& options = {});

}  // namespace hjmm
