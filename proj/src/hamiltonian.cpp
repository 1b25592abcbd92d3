#include "hjmm/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjmm/errors.hpp"
#include "hjmm/grid.hpp"

namespace hjmm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kSupportProbeMomenta = 64;

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& at, double step)
{
    Vec g(at.size());
    for (int i = 0; i < at.size(); ++i) {
        Vec plus = at;
        Vec minus = at;
        plus[i] += step;
        minus[i] -= step;
        g[i] = (f(plus) - f(minus)) / (2.0 * step);
    }
    return g;
}

Vec sub1(const Vec& v, int i) { return vec1(v[i]); }

}  // namespace

const char* to_string(Convexity c)
{
    switch (c) {
    case Convexity::Convex: return "convex";
    case Convexity::Concave: return "concave";
    case Convexity::None: return "none";
    }
    return "none";
}

double bump(double s)
{
    s = std::abs(s);
    if (s >= 1.0) {
        return 0.0;
    }
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double bump_derivative(double s)
{
    const double a = std::abs(s);
    if (a >= 1.0) {
        return 0.0;
    }
    const double q = 1.0 - a * a;
    const double d = bump(a) * (-2.0 * a / (q * q));
    return s < 0.0 ? -d : d;
}

Perturbation Perturbation::cos_bump(double amplitude, double radius, const Vec& wave)
{
    require(radius > 0.0, "cos_bump support radius must be positive");
    Perturbation v;
    v.support_radius = radius;
    v.autonomous = true;
    v.value = [=](double, const Vec& x, const Vec& p) {
        return amplitude * std::cos(wave.dot(x)) * bump(p.norm() / radius);
    };
    v.grad_x = [=](double, const Vec& x, const Vec& p) -> Vec {
        return (-amplitude * std::sin(wave.dot(x)) * bump(p.norm() / radius)) * wave;
    };
    v.grad_p = [=](double, const Vec& x, const Vec& p) -> Vec {
        const double r = p.norm();
        if (r == 0.0 || r >= radius) {
            return Vec::Zero(p.size());
        }
        const double scale = amplitude * std::cos(wave.dot(x)) * bump_derivative(r / radius) / (radius * r);
        return scale * p;
    };
    // sup |bump'| on [0,1) is about 2.17, attained near s = 0.76.
    v.sup_grad_x = std::abs(amplitude) * wave.norm();
    v.sup_grad_p = std::abs(amplitude) * 2.2 / radius;
    std::ostringstream name;
    name << "cos_bump(amplitude=" << amplitude << ", radius=" << radius << ")";
    v.name = name.str();
    return v;
}

HamiltonianSpec::HamiltonianSpec(Variant v, double horizon) : variant_(std::move(v)), horizon_(horizon)
{
    require(horizon_ > 0.0, "time horizon must be positive");
    validate();
}

HamiltonianSpec HamiltonianSpec::quadratic(Mat A, Perturbation V, double offset, double horizon)
{
    return HamiltonianSpec(QuadraticPlusCompact{std::move(A), std::move(V), offset}, horizon);
}

HamiltonianSpec HamiltonianSpec::free_particle(double a, double horizon)
{
    return quadratic(mat1(a), Perturbation::none(), 0.0, horizon);
}

HamiltonianSpec HamiltonianSpec::separable(const HamiltonianSpec& convex, const HamiltonianSpec& concave,
                                           double horizon)
{
    return HamiltonianSpec(SeparableConvexConcave{std::make_shared<const HamiltonianSpec>(convex),
                                                  std::make_shared<const HamiltonianSpec>(concave)},
                           horizon);
}

HamiltonianSpec HamiltonianSpec::cubic_example(double window, double horizon)
{
    require(window > 0.0, "cubic example window must be positive");
    return HamiltonianSpec(CubicExample{window}, horizon);
}

HamiltonianSpec HamiltonianSpec::custom1d(Custom1D spec, double horizon)
{
    require(bool(spec.h), "custom Hamiltonian needs a callable");
    return HamiltonianSpec(std::move(spec), horizon);
}

void HamiltonianSpec::validate() const
{
    std::visit(overloaded{
                   [&](const QuadraticPlusCompact& q) {
                       require(q.A.rows() == q.A.cols() && (q.A.rows() == 1 || q.A.rows() == 2),
                               "A must be a 1x1 or 2x2 matrix");
                       require((q.A - q.A.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "A must be symmetric");
                       require(std::abs(q.A.determinant()) > 1e-12, "A must be nondegenerate (det(A) != 0)");
                       if (q.V.is_zero()) {
                           return;
                       }
                       require(q.V.support_radius > 0.0, "V needs a declared support radius R_V > 0");
                       const int k = int(q.A.rows());
                       const double R = q.V.support_radius;
                       // 64 momenta beyond R_V per sampled (t, x).
                       for (double t : {0.0, 0.5 * horizon_, horizon_}) {
                           for (int ix = 0; ix < 8; ++ix) {
                               Vec x = Vec::Constant(k, kTwoPi * ix / 8.0);
                               if (k == 2) {
                                   x[1] = kTwoPi * ((3 * ix) % 8) / 8.0;
                               }
                               for (int m = 0; m < kSupportProbeMomenta; ++m) {
                                   const double radius = R * (1.0 + 1e-3 + 2.0 * m / kSupportProbeMomenta);
                                   Vec p(k);
                                   if (k == 1) {
                                       p[0] = (m % 2 == 0) ? radius : -radius;
                                   } else {
                                       const double a = kTwoPi * m / kSupportProbeMomenta;
                                       p << radius * std::cos(a), radius * std::sin(a);
                                   }
                                   const double v = q.V.value(t, x, p);
                                   if (v != 0.0) {
                                       std::ostringstream os;
                                       os << "V is not supported in |p| <= R_V = " << R << ": V = " << v
                                          << " at |p| = " << radius;
                                       fail(ErrorKind::Contract, os.str());
                                   }
                               }
                           }
                       }
                   },
                   [&](const SeparableConvexConcave& s) {
                       require(s.convex && s.concave, "separable Hamiltonian needs both components");
                       require(s.convex->dim() == 1 && s.concave->dim() == 1,
                               "separable components must be one-dimensional");
                       constexpr double c = 1e-8;
                       for (double p = -5.0; p <= 5.0; p += 0.25) {
                           for (int ix = 0; ix < 8; ++ix) {
                               const Vec x = vec1(kTwoPi * ix / 8.0);
                               const double h1 = s.convex->hess_p(0.0, x, vec1(p))(0, 0);
                               const double h2 = s.concave->hess_p(0.0, x, vec1(p))(0, 0);
                               if (h1 < c) {
                                   fail(ErrorKind::Contract, "H1 is not p-convex on samples");
                               }
                               if (h2 > -c) {
                                   fail(ErrorKind::Contract, "H2 is not p-concave on samples");
                               }
                           }
                       }
                   },
                   [](const CubicExample&) {},
                   [](const Custom1D&) {},
               },
               variant_);
}

int HamiltonianSpec::dim() const
{
    return std::visit(overloaded{
                          [](const QuadraticPlusCompact& q) { return int(q.A.rows()); },
                          [](const SeparableConvexConcave&) { return 2; },
                          [](const CubicExample&) { return 1; },
                          [](const Custom1D&) { return 1; },
                      },
                      variant_);
}

bool HamiltonianSpec::autonomous() const
{
    return std::visit(overloaded{
                          [](const QuadraticPlusCompact& q) { return q.V.is_zero() || q.V.autonomous; },
                          [](const SeparableConvexConcave& s) {
                              return s.convex->autonomous() && s.concave->autonomous();
                          },
                          [](const CubicExample&) { return true; },
                          [](const Custom1D& c) { return c.autonomous; },
                      },
                      variant_);
}

bool HamiltonianSpec::x_periodic() const { return !std::holds_alternative<CubicExample>(variant_); }

std::string HamiltonianSpec::describe() const
{
    return std::visit(overloaded{
                          [](const QuadraticPlusCompact& q) {
                              std::ostringstream os;
                              os << "quadratic_plus_compact(A=[";
                              for (Eigen::Index i = 0; i < q.A.size(); ++i) {
                                  os << (i ? " " : "") << q.A(i / q.A.cols(), i % q.A.cols());
                              }
                              os << "], V=" << q.V.name
                                 << ", offset=" << q.offset << ")";
                              return os.str();
                          },
                          [](const SeparableConvexConcave& s) {
                              return "separable(" + s.convex->describe() + " + " + s.concave->describe() + ")";
                          },
                          [](const CubicExample&) { return std::string("cubic_example(p - p^3 - x)"); },
                          [](const Custom1D& c) {
                              return "custom1d(" + c.name + ", " + std::string(to_string(c.convexity)) + ")";
                          },
                      },
                      variant_);
}

double HamiltonianSpec::value(double t, const Vec& x, const Vec& p) const
{
    require(x.size() == dim() && p.size() == dim(), "Hamiltonian evaluated with mismatched dimensions");
    return std::visit(overloaded{
                          [&](const QuadraticPlusCompact& q) {
                              double h = 0.5 * p.dot(q.A * p) + q.offset;
                              if (!q.V.is_zero()) {
                                  h += q.V.value(t, x, p);
                              }
                              return h;
                          },
                          [&](const SeparableConvexConcave& s) {
                              return s.convex->value(t, sub1(x, 0), sub1(p, 0)) +
                                     s.concave->value(t, sub1(x, 1), sub1(p, 1));
                          },
                          [&](const CubicExample&) { return p[0] - p[0] * p[0] * p[0] - x[0]; },
                          [&](const Custom1D& c) { return c.h(t, x[0], p[0]); },
                      },
                      variant_);
}

Vec HamiltonianSpec::grad_p(double t, const Vec& x, const Vec& p) const
{
    require(x.size() == dim() && p.size() == dim(), "Hamiltonian evaluated with mismatched dimensions");
    return std::visit(
        overloaded{
            [&](const QuadraticPlusCompact& q) -> Vec {
                Vec g = q.A * p;
                if (!q.V.is_zero()) {
                    if (q.V.grad_p) {
                        g += q.V.grad_p(t, x, p);
                    } else {
                        g += fd_gradient([&](const Vec& pp) { return q.V.value(t, x, pp); }, p,
                                         kFiniteDifferenceStep);
                    }
                }
                return g;
            },
            [&](const SeparableConvexConcave& s) -> Vec {
                return vec2(s.convex->grad_p(t, sub1(x, 0), sub1(p, 0))[0],
                            s.concave->grad_p(t, sub1(x, 1), sub1(p, 1))[0]);
            },
            [&](const CubicExample&) -> Vec { return vec1(1.0 - 3.0 * p[0] * p[0]); },
            [&](const Custom1D& c) -> Vec {
                const double d = kFiniteDifferenceStep;
                return vec1((c.h(t, x[0], p[0] + d) - c.h(t, x[0], p[0] - d)) / (2.0 * d));
            },
        },
        variant_);
}

Vec HamiltonianSpec::grad_x(double t, const Vec& x, const Vec& p) const
{
    require(x.size() == dim() && p.size() == dim(), "Hamiltonian evaluated with mismatched dimensions");
    return std::visit(
        overloaded{
            [&](const QuadraticPlusCompact& q) -> Vec {
                if (q.V.is_zero()) {
                    return Vec::Zero(x.size());
                }
                if (q.V.grad_x) {
                    return q.V.grad_x(t, x, p);
                }
                return fd_gradient([&](const Vec& xx) { return q.V.value(t, xx, p); }, x, kFiniteDifferenceStep);
            },
            [&](const SeparableConvexConcave& s) -> Vec {
                return vec2(s.convex->grad_x(t, sub1(x, 0), sub1(p, 0))[0],
                            s.concave->grad_x(t, sub1(x, 1), sub1(p, 1))[0]);
            },
            [&](const CubicExample&) -> Vec { return vec1(-1.0); },
            [&](const Custom1D& c) -> Vec {
                const double d = kFiniteDifferenceStep;
                return vec1((c.h(t, x[0] + d, p[0]) - c.h(t, x[0] - d, p[0])) / (2.0 * d));
            },
        },
        variant_);
}

Mat HamiltonianSpec::hess_p(double t, const Vec& x, const Vec& p) const
{
    return std::visit(
        overloaded{
            [&](const QuadraticPlusCompact& q) -> Mat {
                Mat H = q.A;
                if (!q.V.is_zero()) {
                    const int k = int(p.size());
                    const double d = 1e-5;
                    for (int j = 0; j < k; ++j) {
                        Vec pp = p;
                        Vec pm = p;
                        pp[j] += d;
                        pm[j] -= d;
                        const Vec col = (grad_p(t, x, pp) - grad_p(t, x, pm)) / (2.0 * d);
                        for (int i = 0; i < k; ++i) {
                            H(i, j) = col[i];
                        }
                    }
                }
                return H;
            },
            [&](const SeparableConvexConcave& s) -> Mat {
                return diag2(s.convex->hess_p(t, sub1(x, 0), sub1(p, 0))(0, 0),
                             s.concave->hess_p(t, sub1(x, 1), sub1(p, 1))(0, 0));
            },
            [&](const CubicExample&) -> Mat { return mat1(-6.0 * p[0]); },
            [&](const Custom1D& c) -> Mat {
                const double d = 1e-4;
                return mat1((c.h(t, x[0], p[0] + d) - 2.0 * c.h(t, x[0], p[0]) + c.h(t, x[0], p[0] - d)) / (d * d));
            },
        },
        variant_);
}

Mat HamiltonianSpec::quadratic_part() const
{
    return std::visit(overloaded{
                          [](const QuadraticPlusCompact& q) -> Mat { return q.A; },
                          [](const SeparableConvexConcave& s) -> Mat {
                              return diag2(s.convex->quadratic_part()(0, 0), s.concave->quadratic_part()(0, 0));
                          },
                          [](const CubicExample&) -> Mat {
                              fail(ErrorKind::Construction,
                                   "the cubic example has no quadratic part at infinity");
                          },
                          [](const Custom1D& c) -> Mat {
                              if (c.convexity == Convexity::None) {
                                  fail(ErrorKind::Construction,
                                       "custom Hamiltonian without convexity tag has no quadratic form");
                              }
                              return mat1(c.convexity == Convexity::Convex ? 1.0 : -1.0);
                          },
                      },
                      variant_);
}

double HamiltonianSpec::support_radius() const
{
    return std::visit(overloaded{
                          [](const QuadraticPlusCompact& q) { return q.V.is_zero() ? 0.0 : q.V.support_radius; },
                          [](const SeparableConvexConcave& s) {
                              return std::max(s.convex->support_radius(), s.concave->support_radius());
                          },
                          [](const CubicExample&) { return 0.0; },
                          [](const Custom1D&) { return 0.0; },
                      },
                      variant_);
}

bool HamiltonianSpec::perturbation_free() const
{
    return std::visit(overloaded{
                          [](const QuadraticPlusCompact& q) { return q.V.is_zero(); },
                          [](const SeparableConvexConcave& s) {
                              return s.convex->perturbation_free() && s.concave->perturbation_free();
                          },
                          [](const CubicExample&) { return false; },
                          [](const Custom1D&) { return false; },
                      },
                      variant_);
}

double HamiltonianSpec::speed_bound(double B) const
{
    return std::visit(overloaded{
                          [&](const QuadraticPlusCompact& q) {
                              const Eigen::SelfAdjointEigenSolver<Mat> es(q.A);
                              const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
                              return norm * B + q.V.sup_grad_p;
                          },
                          [&](const SeparableConvexConcave& s) {
                              return std::max(s.convex->speed_bound(B), s.concave->speed_bound(B));
                          },
                          [&](const CubicExample&) { return std::max(1.0, 3.0 * B * B - 1.0); },
                          [&](const Custom1D&) {
                              double m = 0.0;
                              for (int i = 0; i <= 64; ++i) {
                                  const double p = -B + 2.0 * B * i / 64.0;
                                  for (int ix = 0; ix < 8; ++ix) {
                                      m = std::max(m, std::abs(grad_p(0.0, vec1(kTwoPi * ix / 8.0), vec1(p))[0]));
                                  }
                              }
                              return m;
                          },
                      },
                      variant_);
}

double HamiltonianSpec::force_bound(double B) const
{
    return std::visit(overloaded{
                          [&](const QuadraticPlusCompact& q) { return q.V.sup_grad_x; },
                          [&](const SeparableConvexConcave& s) {
                              return std::max(s.convex->force_bound(B), s.concave->force_bound(B));
                          },
                          [&](const CubicExample&) { return 1.0; },
                          [&](const Custom1D&) {
                              double m = 0.0;
                              for (int i = 0; i <= 32; ++i) {
                                  const double p = -B + 2.0 * B * i / 32.0;
                                  for (int ix = 0; ix < 16; ++ix) {
                                      m = std::max(m, std::abs(grad_x(0.0, vec1(kTwoPi * ix / 16.0), vec1(p))[0]));
                                  }
                              }
                              return m;
                          },
                      },
                      variant_);
}

}  // namespace hjmm
