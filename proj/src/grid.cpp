#include "hjmm/grid.hpp"

#include <cmath>
#include <string>

#include "hjmm/errors.hpp"

namespace hjmm {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::IntegrationBlowup: return "integration-blowup";
    case ErrorKind::NoTwist: return "no-twist";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::WindowTooSmall: return "window-too-small";
    case ErrorKind::Config: return "config";
    case ErrorKind::Cfl: return "cfl";
    case ErrorKind::Solver: return "solver";
    }
    return "unknown";
}

double reduce_periodic(double x, double period)
{
    double r = std::fmod(x, period);
    if (r < 0.0) {
        r += period;
    }
    if (r >= period) {
        r = 0.0;
    }
    return r;
}

SpaceGrid::SpaceGrid(std::vector<Axis> axes) : axes_(std::move(axes))
{
    require(axes_.size() == 1 || axes_.size() == 2, "grid dimension must be 1 or 2");
    for (const auto& a : axes_) {
        require(a.n >= 8, "grid needs at least 8 points per axis, got " + std::to_string(a.n));
        require(a.hi > a.lo, "grid bounds must satisfy hi > lo");
    }
}

SpaceGrid SpaceGrid::torus(std::size_t n, int dim, double period)
{
    std::vector<Axis> axes(std::size_t(dim), Axis{0.0, period, n, true});
    return SpaceGrid(std::move(axes));
}

SpaceGrid SpaceGrid::line(double lo, double hi, std::size_t n)
{
    return SpaceGrid({Axis{lo, hi, n, false}});
}

std::size_t SpaceGrid::size() const
{
    std::size_t s = 1;
    for (const auto& a : axes_) {
        s *= a.n;
    }
    return s;
}

Vec SpaceGrid::point(std::size_t flat) const
{
    if (dim() == 1) {
        return vec1(axes_[0].coord(flat));
    }
    const std::size_t n1 = axes_[1].n;
    return vec2(axes_[0].coord(flat / n1), axes_[1].coord(flat % n1));
}

std::size_t SpaceGrid::flat_index(std::size_t i0, std::size_t i1) const
{
    return dim() == 1 ? i0 : i0 * axes_[1].n + i1;
}

std::vector<Vec> SpaceGrid::points() const
{
    std::vector<Vec> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out.push_back(point(i));
    }
    return out;
}

SpaceGrid SpaceGrid::refined(std::size_t factor) const
{
    std::vector<Axis> axes = axes_;
    for (auto& a : axes) {
        a.n = a.periodic ? a.n * factor : (a.n - 1) * factor + 1;
    }
    return SpaceGrid(std::move(axes));
}

bool SpaceGrid::operator==(const SpaceGrid& other) const
{
    if (axes_.size() != other.axes_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const Axis& a = axes_[i];
        const Axis& b = other.axes_[i];
        if (a.lo != b.lo || a.hi != b.hi || a.n != b.n || a.periodic != b.periodic) {
            return false;
        }
    }
    return true;
}

}  // namespace hjmm
