#include "hjmm/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hjmm/errors.hpp"

namespace hjmm {

const char* to_string(Method m)
{
    switch (m) {
    case Method::Minmax: return "minmax";
    case Method::Viscosity: return "viscosity";
    case Method::AnalyticExample: return "analytic-example";
    }
    return "minmax";
}

std::size_t SolutionField::time_index(double t) const
{
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] == t) {
            return k;
        }
    }
    fail(ErrorKind::Contract, "time " + format_number(t) + " is not a slice of the field");
}

void SolutionField::check_finite() const
{
    require(values.size() == times.size(), "field needs one slice per time");
    auto check = [&](const std::vector<std::vector<double>>& vs) {
        for (std::size_t k = 0; k < vs.size(); ++k) {
            require(vs[k].size() == grid.size(), "field slice has the wrong size");
            for (std::size_t i = 0; i < vs[k].size(); ++i) {
                if (!std::isfinite(vs[k][i])) {
                    fail(ErrorKind::Solver, "non-finite field value at t = " + format_number(times[k]) +
                                                ", point " + std::to_string(i));
                }
            }
        }
    };
    check(values);
    if (upper) {
        check(*upper);
    }
}

std::string format_number(double v)
{
    if (v == 0.0) {
        return "0";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s(buf);
    if (s == "-0") {
        return "0";
    }
    return s;
}

namespace {

void write_rows(std::ostream& os, const SolutionField& f)
{
    const bool two = f.grid.dim() == 2;
    for (std::size_t k = 0; k < f.times.size(); ++k) {
        const std::string t = format_number(f.times[k]);
        for (std::size_t i = 0; i < f.grid.size(); ++i) {
            const Vec x = f.grid.point(i);
            std::string prefix = t + "," + format_number(x[0]) + ",";
            if (two) {
                prefix += format_number(x[1]) + ",";
            }
            if (f.upper) {
                os << prefix << format_number(f.values[k][i]) << ",minmax_lower\n";
                os << prefix << format_number((*f.upper)[k][i]) << ",minmax_upper\n";
            } else {
                os << prefix << format_number(f.values[k][i]) << "," << to_string(f.method) << "\n";
            }
        }
    }
}

}  // namespace

void write_csv(std::ostream& os, const SolutionField& field) { write_csv(os, {&field}); }

void write_csv(std::ostream& os, const std::vector<const SolutionField*>& fields)
{
    require(!fields.empty(), "nothing to write");
    const int dim = fields.front()->grid.dim();
    for (const auto* f : fields) {
        require(f->grid.dim() == dim, "fields written together must share the dimension");
    }
    os << (dim == 2 ? "t,x,x2,u,method\n" : "t,x,u,method\n");
    for (const auto* f : fields) {
        write_rows(os, *f);
    }
}

LipschitzAudit lipschitz_audit(const SolutionField& field, const HamiltonianSpec& h, double slack)
{
    LipschitzAudit a;
    a.slack = slack;
    if (field.times.size() < 2) {
        return a;
    }
    const auto& g = field.grid;
    const int k = g.dim();
    auto slices = [&](auto&& visit) {
        visit(field.values);
        if (field.upper) {
            visit(*field.upper);
        }
    };
    // Spatial slopes bound the momenta the field visits.
    double B = 0.0;
    slices([&](const std::vector<std::vector<double>>& vs) {
        for (const auto& u : vs) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                const std::size_t n1 = k == 1 ? 1 : g.axis(1).n;
                const std::size_t idx[2] = {i / n1, i % n1};
                double sq = 0.0;
                for (int ax = 0; ax < k; ++ax) {
                    const Axis& axis = g.axis(ax);
                    const std::size_t pos = idx[ax];
                    if (!axis.periodic && pos + 1 >= axis.n) {
                        continue;
                    }
                    const std::size_t nb = (pos + 1) % axis.n;
                    const std::size_t j = ax == 0 ? g.flat_index(nb, idx[1]) : g.flat_index(idx[0], nb);
                    const double s = (u[j] - u[i]) / axis.spacing();
                    sq += s * s;
                }
                B = std::max(B, std::sqrt(sq));
            }
        }
    });
    a.momentum_bound = B;
    slices([&](const std::vector<std::vector<double>>& vs) {
        for (std::size_t s = 1; s < vs.size(); ++s) {
            const double dt = field.times[s] - field.times[s - 1];
            if (dt == 0.0) {
                continue;
            }
            a.c_lip = std::max(a.c_lip, sup_norm(vs[s], vs[s - 1]) / std::abs(dt));
        }
    });
    // sup |H| on the visited compact set: grid points (subsampled), sampled
    // instants and |p| <= B.
    const std::size_t stride = std::max<std::size_t>(1, g.size() / 256);
    const int np = 33;
    for (double t : {field.times.front(), 0.5 * (field.times.front() + field.times.back()), field.times.back()}) {
        for (std::size_t i = 0; i < g.size(); i += stride) {
            const Vec x = g.point(i);
            for (int m = 0; m < np; ++m) {
                const double r = -B + 2.0 * B * m / (np - 1);
                if (k == 1) {
                    a.sup_h = std::max(a.sup_h, std::abs(h.value(t, x, vec1(r))));
                    continue;
                }
                for (int l = 0; l < np; ++l) {
                    const double q = -B + 2.0 * B * l / (np - 1);
                    if (r * r + q * q > B * B) {
                        continue;
                    }
                    a.sup_h = std::max(a.sup_h, std::abs(h.value(t, x, vec2(r, q))));
                }
            }
        }
    }
    a.pass = a.c_lip <= (1.0 + slack) * a.sup_h + 1e-9;
    return a;
}

double sup_norm(const std::vector<double>& a, const std::vector<double>& b)
{
    require(a.size() == b.size(), "sup_norm needs equal sizes");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

double oscillation(const std::vector<double>& a, const std::vector<double>& b)
{
    require(a.size() == b.size() && !a.empty(), "oscillation needs equal non-empty sizes");
    double lo = a[0] - b[0];
    double hi = lo;
    for (std::size_t i = 1; i < a.size(); ++i) {
        lo = std::min(lo, a[i] - b[i]);
        hi = std::max(hi, a[i] - b[i]);
    }
    return hi - lo;
}

}  // namespace hjmm
