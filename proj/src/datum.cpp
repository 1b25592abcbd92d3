#include "hjmm/datum.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "hjmm/cubic_example.hpp"
#include "hjmm/errors.hpp"

namespace hjmm {

struct DatumSpec::Lazy {
    std::once_flag once;
    double lipschitz = 0.0;
};

namespace {

Vec wave_vector(const BuiltinParams& p, int dim)
{
    Vec w = Vec::Ones(dim);
    if (!p.wave.empty()) {
        require(int(p.wave.size()) == dim, "wave vector length must match the datum dimension");
        for (int i = 0; i < dim; ++i) {
            require(p.wave[std::size_t(i)] == std::round(p.wave[std::size_t(i)]),
                    "wave vector entries must be integers to stay periodic");
            w[i] = p.wave[std::size_t(i)];
        }
    }
    return w;
}

std::vector<AxisDomain> torus_domain(int dim)
{
    require(dim == 1 || dim == 2, "datum dimension must be 1 or 2");
    return std::vector<AxisDomain>(std::size_t(dim), AxisDomain{});
}

// Cubic-example datum: sigma' = v, with v the positive root for x < -eps, the
// negative root for x > eps, and a Hermite cubic joint in between.
struct CubicDatum {
    double eps;
    double v0, m0;  // v and v' at -eps; odd symmetry gives (-v0, m0) at +eps
    double sigma_edge;

    explicit CubicDatum(double e) : eps(e)
    {
        v0 = cubic_root(ExampleBranch::VPlus, -eps);
        m0 = 1.0 / (1.0 - 3.0 * v0 * v0);
        sigma_edge = branch_sigma(v0);
    }

    static double branch_sigma(double v) { return 0.5 * v * v - 0.75 * v * v * v * v; }

    double slope(double x) const
    {
        if (x < -eps) {
            return cubic_root(ExampleBranch::VPlus, x);
        }
        if (x > eps) {
            return cubic_root(ExampleBranch::VMinus, x);
        }
        const double h = 2.0 * eps;
        const double s = (x + eps) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * (-v0) +
               (s3 - s2) * h * m0;
    }

    double value(double x) const
    {
        if (x < -eps) {
            return branch_sigma(cubic_root(ExampleBranch::VPlus, x));
        }
        if (x > eps) {
            return branch_sigma(cubic_root(ExampleBranch::VMinus, x));
        }
        const double h = 2.0 * eps;
        const double s = (x + eps) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double s4 = s3 * s;
        const double integral = (0.5 * s4 - s3 + s) * v0 + (0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2) * h * m0 +
                                (-0.5 * s4 + s3) * (-v0) + (0.25 * s4 - s3 / 3.0) * h * m0;
        return sigma_edge + h * integral;
    }
};

double periodic_linear(const std::vector<std::pair<double, double>>& knots, double period, double x)
{
    // knots sorted by abscissa in [0, period); wrap the last segment.
    const std::size_t n = knots.size();
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    std::size_t hi = std::size_t(it - knots.begin());
    const std::pair<double, double>& right = hi == n ? knots.front() : knots[hi];
    const std::pair<double, double>& left = hi == 0 ? knots.back() : knots[hi - 1];
    double xl = left.first;
    double xr = right.first;
    if (hi == 0) {
        xl -= period;
    }
    if (hi == n) {
        xr += period;
    }
    const double w = (x - xl) / (xr - xl);
    return left.second + w * (right.second - left.second);
}

double table_lookup(const Axis& a, double x, std::size_t& i0, std::size_t& i1)
{
    const double h = a.spacing();
    double s = (x - a.lo) / h;
    if (a.periodic) {
        double fl = std::floor(s);
        double w = s - fl;
        long k = long(fl);
        long n = long(a.n);
        k = ((k % n) + n) % n;
        i0 = std::size_t(k);
        i1 = std::size_t((k + 1) % n);
        return w;
    }
    s = std::clamp(s, 0.0, double(a.n - 1));
    std::size_t k = std::min(std::size_t(std::floor(s)), a.n - 2);
    i0 = k;
    i1 = k + 1;
    return s - double(k);
}

}  // namespace

const char* to_string(Smoothness s) { return s == Smoothness::C1 ? "C1" : "C0"; }

const std::vector<std::string>& DatumSpec::catalog()
{
    static const std::vector<std::string> names = {"cos",      "sin",      "shifted-absolute-sine",
                                                   "piecewise-linear", "constant", "cubic-example"};
    return names;
}

DatumSpec DatumSpec::from_functions(std::string name, std::vector<AxisDomain> domain, Smoothness smoothness,
                                    ValueFn value, GradFn gradient)
{
    require(domain.size() == 1 || domain.size() == 2, "datum dimension must be 1 or 2");
    require(bool(value), "datum needs a value function");
    require(smoothness == Smoothness::C0 || bool(gradient), "C1 data must expose a derivative evaluator");
    DatumSpec d;
    d.name_ = std::move(name);
    d.domain_ = std::move(domain);
    d.smoothness_ = smoothness;
    d.value_ = std::move(value);
    if (smoothness == Smoothness::C1) {
        d.grad_ = std::move(gradient);
    }
    d.lazy_ = std::make_shared<Lazy>();
    return d;
}

DatumSpec DatumSpec::builtin(const std::string& name, const BuiltinParams& p, int dim)
{
    if (name == "cos" || name == "sin") {
        const Vec w = wave_vector(p, dim);
        const bool is_cos = name == "cos";
        const double a = p.amplitude;
        const double phase = p.phase;
        const double c = p.offset;
        auto value = [=](const Vec& x) {
            const double arg = w.dot(x) + phase;
            return a * (is_cos ? std::cos(arg) : std::sin(arg)) + c;
        };
        auto grad = [=](const Vec& x) -> Vec {
            const double arg = w.dot(x) + phase;
            return (a * (is_cos ? -std::sin(arg) : std::cos(arg))) * w;
        };
        std::ostringstream os;
        os << name << "(amplitude=" << a << ", phase=" << phase << ", offset=" << c << ")";
        return from_functions(os.str(), torus_domain(dim), Smoothness::C1, value, grad);
    }
    if (name == "shifted-absolute-sine") {
        const Vec w = wave_vector(p, dim);
        const double a = p.amplitude;
        const double shift = p.shift;
        const double c = p.offset;
        auto value = [=](const Vec& x) { return a * std::abs(std::sin(w.dot(x) - shift)) + c; };
        std::ostringstream os;
        os << name << "(amplitude=" << a << ", shift=" << shift << ", offset=" << c << ")";
        return from_functions(os.str(), torus_domain(dim), Smoothness::C0, value);
    }
    if (name == "piecewise-linear") {
        require(dim == 1, "piecewise-linear datum is one-dimensional");
        std::vector<std::pair<double, double>> knots = p.knots;
        if (knots.empty()) {
            // Default hat: zero on half the circle, peak 1 at pi.
            knots = {{0.0, 0.0}, {0.5 * std::numbers::pi, 0.0}, {std::numbers::pi, 1.0}, {1.5 * std::numbers::pi, 0.0}};
        }
        for (auto& k : knots) {
            require(std::isfinite(k.first) && std::isfinite(k.second), "piecewise-linear knots must be finite");
            k.first = reduce_periodic(k.first, kTwoPi);
            k.second = p.amplitude * k.second + p.offset;
        }
        std::sort(knots.begin(), knots.end());
        for (std::size_t i = 1; i < knots.size(); ++i) {
            require(knots[i].first > knots[i - 1].first, "piecewise-linear knots must be distinct");
        }
        require(knots.size() >= 2, "piecewise-linear datum needs at least two knots");
        auto value = [knots](const Vec& x) { return periodic_linear(knots, kTwoPi, x[0]); };
        return from_functions("piecewise-linear", torus_domain(1), Smoothness::C0, value);
    }
    if (name == "constant") {
        const double c = p.value;
        auto value = [c](const Vec&) { return c; };
        auto grad = [dim](const Vec&) -> Vec { return Vec::Zero(dim); };
        std::ostringstream os;
        os << "constant(" << c << ")";
        return from_functions(os.str(), torus_domain(dim), Smoothness::C1, value, grad);
    }
    if (name == "cubic-example") {
        require(dim == 1, "cubic-example datum is one-dimensional");
        require(p.joint_half_width > 0.0 && p.joint_half_width < 0.38, "joint half-width must lie in (0, 0.38)");
        require(p.window > p.joint_half_width, "cubic-example window must exceed the joint");
        const auto cd = std::make_shared<const CubicDatum>(p.joint_half_width);
        auto value = [cd](const Vec& x) { return cd->value(x[0]); };
        auto grad = [cd](const Vec& x) { return vec1(cd->slope(x[0])); };
        std::vector<AxisDomain> domain{AxisDomain{false, -p.window, p.window}};
        std::ostringstream os;
        os << "cubic-example(eps=" << p.joint_half_width << ")";
        return from_functions(os.str(), std::move(domain), Smoothness::C1, value, grad);
    }
    fail(ErrorKind::Config, "unknown builtin datum '" + name + "'");
}

DatumSpec DatumSpec::table(const SpaceGrid& grid, std::vector<double> values)
{
    require(values.size() == grid.size(), "table needs one value per grid point");
    for (double v : values) {
        require(std::isfinite(v), "table values must be finite");
    }
    std::vector<AxisDomain> domain;
    for (const auto& a : grid.axes()) {
        domain.push_back(AxisDomain{a.periodic, a.lo, a.hi});
    }
    auto data = std::make_shared<const std::vector<double>>(std::move(values));
    auto value = [grid, data](const Vec& x) {
        const auto& v = *data;
        std::size_t a0, a1;
        const double w0 = table_lookup(grid.axis(0), x[0], a0, a1);
        if (grid.dim() == 1) {
            return (1.0 - w0) * v[a0] + w0 * v[a1];
        }
        std::size_t b0, b1;
        const double w1 = table_lookup(grid.axis(1), x[1], b0, b1);
        const double lo = (1.0 - w1) * v[grid.flat_index(a0, b0)] + w1 * v[grid.flat_index(a0, b1)];
        const double hi = (1.0 - w1) * v[grid.flat_index(a1, b0)] + w1 * v[grid.flat_index(a1, b1)];
        return (1.0 - w0) * lo + w0 * hi;
    };
    return from_functions("table", std::move(domain), Smoothness::C0, value);
}

DatumSpec DatumSpec::separable(const DatumSpec& first, const DatumSpec& second)
{
    require(first.dim() == 1 && second.dim() == 1, "separable datum needs two one-dimensional parts");
    const Smoothness s =
        first.smoothness() == Smoothness::C1 && second.smoothness() == Smoothness::C1 ? Smoothness::C1 : Smoothness::C0;
    auto value = [first, second](const Vec& x) { return first.value(vec1(x[0])) + second.value(vec1(x[1])); };
    GradFn grad;
    if (s == Smoothness::C1) {
        grad = [first, second](const Vec& x) {
            return vec2(first.gradient(vec1(x[0]))[0], second.gradient(vec1(x[1]))[0]);
        };
    }
    DatumSpec d = from_functions(first.name() + " + " + second.name(), {first.domain()[0], second.domain()[0]}, s,
                                 value, grad);
    d.parts_ = std::make_shared<const std::pair<DatumSpec, DatumSpec>>(first, second);
    return d;
}

bool DatumSpec::periodic() const
{
    return std::all_of(domain_.begin(), domain_.end(), [](const AxisDomain& a) { return a.periodic; });
}

Vec DatumSpec::reduce(const Vec& x) const
{
    require(x.size() == dim(), "datum evaluated with mismatched dimension");
    Vec r = x;
    for (int i = 0; i < dim(); ++i) {
        const AxisDomain& a = domain_[std::size_t(i)];
        if (a.periodic) {
            r[i] = a.lo == 0.0 ? reduce_periodic(x[i], a.hi) : a.lo + reduce_periodic(x[i] - a.lo, a.hi - a.lo);
        } else if (!(x[i] >= a.lo - 1e-12 && x[i] <= a.hi + 1e-12)) {
            std::ostringstream os;
            os << "datum '" << name_ << "' evaluated at x = " << x[i] << " outside [" << a.lo << ", " << a.hi << "]";
            fail(ErrorKind::Domain, os.str());
        }
    }
    return r;
}

double DatumSpec::value(const Vec& x) const { return value_(reduce(x)); }

Vec DatumSpec::gradient(const Vec& x) const
{
    if (!grad_) {
        fail(ErrorKind::Contract, "datum '" + name_ + "' is C0 and has no derivative; mollify it first");
    }
    return grad_(reduce(x));
}

const DatumSpec& DatumSpec::part(int i) const
{
    require(bool(parts_), "datum is not separable");
    require(i == 0 || i == 1, "separable part index must be 0 or 1");
    return i == 0 ? parts_->first : parts_->second;
}

DatumSpec DatumSpec::shifted(double c) const
{
    const DatumSpec base = *this;
    GradFn grad;
    if (grad_) {
        grad = [base](const Vec& x) { return base.gradient(x); };
    }
    std::ostringstream os;
    os << name_ << " + " << c;
    DatumSpec d = from_functions(os.str(), domain_, smoothness_, [base, c](const Vec& x) { return base.value(x) + c; },
                                 grad);
    if (parts_) {
        d.parts_ = std::make_shared<const std::pair<DatumSpec, DatumSpec>>(parts_->first.shifted(c), parts_->second);
    }
    return d;
}

DatumSpec DatumSpec::negated() const
{
    const DatumSpec base = *this;
    GradFn grad;
    if (grad_) {
        grad = [base](const Vec& x) -> Vec { return -base.gradient(x); };
    }
    DatumSpec d = from_functions("-(" + name_ + ")", domain_, smoothness_,
                                 [base](const Vec& x) { return -base.value(x); }, grad);
    if (parts_) {
        d.parts_ =
            std::make_shared<const std::pair<DatumSpec, DatumSpec>>(parts_->first.negated(), parts_->second.negated());
    }
    return d;
}

std::vector<double> DatumSpec::sample(const SpaceGrid& grid) const
{
    require(grid.dim() == dim(), "grid and datum dimensions differ");
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = value(grid.point(i));
    }
    return out;
}

double DatumSpec::lipschitz_bound() const
{
    std::call_once(lazy_->once, [this] {
        std::vector<Axis> axes;
        const std::size_t n = dim() == 1 ? 4096 : 256;
        for (const auto& a : domain_) {
            axes.push_back(Axis{a.lo, a.hi, a.periodic ? n : n + 1, a.periodic});
        }
        const SpaceGrid fine(axes);
        double m = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            const Vec x = fine.point(i);
            if (grad_) {
                m = std::max(m, grad_(reduce(x)).norm());
                continue;
            }
            const double u = value(x);
            double sq = 0.0;
            for (int k = 0; k < dim(); ++k) {
                const Axis& a = fine.axis(k);
                Vec y = x;
                y[k] += a.spacing();
                if (!a.periodic && y[k] > a.hi) {
                    continue;
                }
                const double s = (value(y) - u) / a.spacing();
                sq += s * s;
            }
            m = std::max(m, std::sqrt(sq));
        }
        lazy_->lipschitz = m;
    });
    return lazy_->lipschitz;
}

double sup_distance(const DatumSpec& a, const DatumSpec& b, const SpaceGrid& grid, std::size_t oversample)
{
    require(a.dim() == b.dim() && a.dim() == grid.dim(), "sup_distance needs matching dimensions");
    const SpaceGrid fine = grid.refined(oversample);
    double m = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const Vec x = fine.point(i);
        m = std::max(m, std::abs(a.value(x) - b.value(x)));
    }
    return m;
}

}  // namespace hjmm
