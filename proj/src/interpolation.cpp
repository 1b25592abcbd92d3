#include "hjmm/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "hjmm/errors.hpp"

namespace hjmm {

std::vector<double> fritsch_carlson_slopes(const std::vector<double>& y, double h, bool periodic)
{
    const std::size_t n = y.size();
    require(n >= 2, "need at least two samples");
    const std::size_t cells = periodic ? n : n - 1;
    std::vector<double> delta(cells);
    for (std::size_t k = 0; k < cells; ++k) {
        delta[k] = (y[(k + 1) % n] - y[k]) / h;
    }
    std::vector<double> m(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!periodic && k == 0) {
            m[k] = delta[0];
            continue;
        }
        if (!periodic && k == n - 1) {
            m[k] = delta[cells - 1];
            continue;
        }
        const double left = delta[(k + cells - 1) % cells];
        const double right = delta[k % cells];
        m[k] = left * right <= 0.0 ? 0.0 : 0.5 * (left + right);
    }
    for (std::size_t k = 0; k < cells; ++k) {
        const std::size_t k1 = (k + 1) % n;
        if (delta[k] == 0.0) {
            m[k] = 0.0;
            m[k1] = 0.0;
            continue;
        }
        const double a = m[k] / delta[k];
        const double b = m[k1] / delta[k];
        if (a < 0.0) {
            m[k] = 0.0;
        }
        if (b < 0.0) {
            m[k1] = 0.0;
        }
        const double r = a * a + b * b;
        if (r > 9.0) {
            const double tau = 3.0 / std::sqrt(r);
            m[k] = tau * a * delta[k];
            m[k1] = tau * b * delta[k];
        }
    }
    return m;
}

HermiteGrid::HermiteGrid(SpaceGrid grid, std::vector<double> values) : grid_(std::move(grid)), f_(std::move(values))
{
    require(f_.size() == grid_.size(), "Hermite interpolant needs one value per grid point");
    for (double v : f_) {
        require(std::isfinite(v), "grid values must be finite");
    }
    slopes_.assign(std::size_t(grid_.dim()), std::vector<double>(f_.size()));
    if (grid_.dim() == 1) {
        slopes_[0] = fritsch_carlson_slopes(f_, grid_.axis(0).spacing(), grid_.axis(0).periodic);
        return;
    }
    const std::size_t n0 = grid_.axis(0).n;
    const std::size_t n1 = grid_.axis(1).n;
    std::vector<double> line;
    for (std::size_t j = 0; j < n1; ++j) {
        line.resize(n0);
        for (std::size_t i = 0; i < n0; ++i) {
            line[i] = f_[grid_.flat_index(i, j)];
        }
        const auto m = fritsch_carlson_slopes(line, grid_.axis(0).spacing(), grid_.axis(0).periodic);
        for (std::size_t i = 0; i < n0; ++i) {
            slopes_[0][grid_.flat_index(i, j)] = m[i];
        }
    }
    for (std::size_t i = 0; i < n0; ++i) {
        line.resize(n1);
        for (std::size_t j = 0; j < n1; ++j) {
            line[j] = f_[grid_.flat_index(i, j)];
        }
        const auto m = fritsch_carlson_slopes(line, grid_.axis(1).spacing(), grid_.axis(1).periodic);
        for (std::size_t j = 0; j < n1; ++j) {
            slopes_[1][grid_.flat_index(i, j)] = m[j];
        }
    }
}

HermiteGrid::Cell HermiteGrid::locate(int axis, double x) const
{
    const Axis& a = grid_.axis(axis);
    const double h = a.spacing();
    if (a.periodic) {
        const double r = reduce_periodic(x - a.lo, a.period());
        double s = r / h;
        std::size_t k = std::min(std::size_t(s), a.n - 1);
        s -= double(k);
        return {k, (k + 1) % a.n, std::clamp(s, 0.0, 1.0)};
    }
    if (!(x >= a.lo - 1e-12 && x <= a.hi + 1e-12)) {
        fail(ErrorKind::Domain, "interpolant evaluated outside its grid");
    }
    double s = std::clamp((x - a.lo) / h, 0.0, double(a.n - 1));
    std::size_t k = std::min(std::size_t(s), a.n - 2);
    return {k, k + 1, s - double(k)};
}

namespace {

struct Basis {
    double v0, v1, d0, d1;     // value basis at s (h00, h01) and slope basis (h10, h11), unscaled
    double dv0, dv1, dd0, dd1;  // derivatives with respect to s
};

Basis hermite(double s)
{
    const double s2 = s * s;
    const double s3 = s2 * s;
    return {2 * s3 - 3 * s2 + 1, -2 * s3 + 3 * s2, s3 - 2 * s2 + s, s3 - s2,
            6 * s2 - 6 * s,      -6 * s2 + 6 * s,  3 * s2 - 4 * s + 1, 3 * s2 - 2 * s};
}

}  // namespace

double HermiteGrid::value(const Vec& x) const
{
    require(x.size() == grid_.dim(), "interpolant evaluated with mismatched dimension");
    const Cell c0 = locate(0, x[0]);
    const double h0 = grid_.axis(0).spacing();
    const Basis b0 = hermite(c0.s);
    if (grid_.dim() == 1) {
        const auto& m = slopes_[0];
        return b0.v0 * f_[c0.i0] + b0.v1 * f_[c0.i1] + h0 * (b0.d0 * m[c0.i0] + b0.d1 * m[c0.i1]);
    }
    const Cell c1 = locate(1, x[1]);
    const double h1 = grid_.axis(1).spacing();
    const Basis b1 = hermite(c1.s);
    const std::size_t idx[2][2] = {{grid_.flat_index(c0.i0, c1.i0), grid_.flat_index(c0.i0, c1.i1)},
                                   {grid_.flat_index(c0.i1, c1.i0), grid_.flat_index(c0.i1, c1.i1)}};
    const double w0[2] = {b0.v0, b0.v1};
    const double w1[2] = {b1.v0, b1.v1};
    const double g0[2] = {b0.d0, b0.d1};
    const double g1[2] = {b1.d0, b1.d1};
    double out = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const std::size_t k = idx[a][b];
            out += w0[a] * w1[b] * f_[k] + h0 * g0[a] * w1[b] * slopes_[0][k] + h1 * w0[a] * g1[b] * slopes_[1][k];
        }
    }
    return out;
}

Vec HermiteGrid::gradient(const Vec& x) const
{
    require(x.size() == grid_.dim(), "interpolant evaluated with mismatched dimension");
    const Cell c0 = locate(0, x[0]);
    const double h0 = grid_.axis(0).spacing();
    const Basis b0 = hermite(c0.s);
    if (grid_.dim() == 1) {
        const auto& m = slopes_[0];
        return vec1((b0.dv0 * f_[c0.i0] + b0.dv1 * f_[c0.i1]) / h0 + b0.dd0 * m[c0.i0] + b0.dd1 * m[c0.i1]);
    }
    const Cell c1 = locate(1, x[1]);
    const double h1 = grid_.axis(1).spacing();
    const Basis b1 = hermite(c1.s);
    const std::size_t idx[2][2] = {{grid_.flat_index(c0.i0, c1.i0), grid_.flat_index(c0.i0, c1.i1)},
                                   {grid_.flat_index(c0.i1, c1.i0), grid_.flat_index(c0.i1, c1.i1)}};
    const double w0[2] = {b0.v0, b0.v1};
    const double w1[2] = {b1.v0, b1.v1};
    const double g0[2] = {b0.d0, b0.d1};
    const double g1[2] = {b1.d0, b1.d1};
    const double dw0[2] = {b0.dv0 / h0, b0.dv1 / h0};
    const double dw1[2] = {b1.dv0 / h1, b1.dv1 / h1};
    const double dg0[2] = {b0.dd0, b0.dd1};
    const double dg1[2] = {b1.dd0, b1.dd1};
    double gx = 0.0;
    double gy = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const std::size_t k = idx[a][b];
            gx += dw0[a] * w1[b] * f_[k] + dg0[a] * w1[b] * slopes_[0][k] + h1 * dw0[a] * g1[b] * slopes_[1][k];
            gy += w0[a] * dw1[b] * f_[k] + h0 * g0[a] * dw1[b] * slopes_[0][k] + w0[a] * dg1[b] * slopes_[1][k];
        }
    }
    return vec2(gx, gy);
}

DatumSpec monotone_cubic(const SpaceGrid& grid, std::vector<double> values)
{
    auto interp = std::make_shared<const HermiteGrid>(grid, std::move(values));
    std::vector<AxisDomain> domain;
    for (const auto& a : grid.axes()) {
        domain.push_back(AxisDomain{a.periodic, a.lo, a.hi});
    }
    return DatumSpec::from_functions(
        "monotone-cubic", std::move(domain), Smoothness::C1, [interp](const Vec& x) { return interp->value(x); },
        [interp](const Vec& x) { return interp->gradient(x); });
}

}  // namespace hjmm
