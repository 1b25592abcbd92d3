#pragma once

#include <vector>

#include "hjmm/datum.hpp"
#include "hjmm/grid.hpp"

namespace hjmm {

/// Fritsch-Carlson slopes for samples y with uniform spacing h: centred
/// secant averages, zeroed at local extrema and limited so every cell stays
/// monotone. Non-periodic ends use one-sided secants.
std::vector<double> fritsch_carlson_slopes(const std::vector<double>& y, double h, bool periodic);

/// Piecewise cubic Hermite interpolant of grid data (tensor product in 2-D,
/// zero cross derivatives). C1 across cells.
class HermiteGrid {
public:
    HermiteGrid(SpaceGrid grid, std::vector<double> values);

    const SpaceGrid& grid() const { return grid_; }
    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;

private:
    struct Cell {
        std::size_t i0, i1;
        double s;  // local coordinate in [0, 1]
    };
    Cell locate(int axis, double x) const;

    SpaceGrid grid_;
    std::vector<double> f_;
    std::vector<std::vector<double>> slopes_;  // per axis, flat-indexed like f_
};

/// C1 surrogate datum of grid values (the re-entry interpolant for grid data).
DatumSpec monotone_cubic(const SpaceGrid& grid, std::vector<double> values);

}  // namespace hjmm
