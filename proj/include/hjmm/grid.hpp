#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "hjmm/linalg.hpp"

namespace hjmm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One axis of a tensor grid. Periodic axes hold n points on [lo, hi) with
/// hi - lo the period; non-periodic axes hold n points on [lo, hi].
struct Axis {
    double lo = 0.0;
    double hi = kTwoPi;
    std::size_t n = 64;
    bool periodic = true;

    double spacing() const { return periodic ? (hi - lo) / double(n) : (hi - lo) / double(n - 1); }
    double coord(std::size_t i) const { return lo + double(i) * spacing(); }
    double period() const { return hi - lo; }
};

/// Reduce a coordinate onto [0, period). Depends only on the period so that
/// x and x + period map to the same representative whenever x + period is exact.
double reduce_periodic(double x, double period);

class SpaceGrid {
public:
    SpaceGrid() = default;
    explicit SpaceGrid(std::vector<Axis> axes);

    static SpaceGrid torus(std::size_t n, int dim = 1, double period = kTwoPi);
    static SpaceGrid line(double lo, double hi, std::size_t n);

    int dim() const { return int(axes_.size()); }
    const Axis& axis(int i) const { return axes_[std::size_t(i)]; }
    const std::vector<Axis>& axes() const { return axes_; }
    std::size_t size() const;

    /// Flat index is row-major: the last axis varies fastest.
    Vec point(std::size_t flat) const;
    std::size_t flat_index(std::size_t i0, std::size_t i1 = 0) const;
    std::vector<Vec> points() const;

    /// Same axes with n scaled by `factor` on every axis.
    SpaceGrid refined(std::size_t factor) const;

    bool operator==(const SpaceGrid& other) const;

private:
    std::vector<Axis> axes_;
};

}  // namespace hjmm
