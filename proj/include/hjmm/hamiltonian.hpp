#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>

#include "hjmm/linalg.hpp"

namespace hjmm {

enum class Convexity { Convex, Concave, None };

const char* to_string(Convexity c);

/// Compactly supported momentum perturbation V(t, x, p).
///
/// Gradients are optional; when absent the Hamiltonian falls back to central
/// differences. `support_radius` is the declared R_V: V vanishes for |p| > R_V.
struct Perturbation {
    using ScalarFn = std::function<double(double t, const Vec& x, const Vec& p)>;
    using VectorFn = std::function<Vec(double t, const Vec& x, const Vec& p)>;

    ScalarFn value;
    VectorFn grad_x;
    VectorFn grad_p;
    double support_radius = 0.0;
    bool autonomous = true;
    /// sup |dV/dx| and sup |dV/dp|, used for optimizer windows.
    double sup_grad_x = 0.0;
    double sup_grad_p = 0.0;
    std::string name = "none";

    bool is_zero() const { return !value; }

    static Perturbation none() { return {}; }

    /// amplitude * cos(<wave, x>) * bump(|p| / radius) with the smooth bump
    /// exp(1 - 1 / (1 - s^2)) on s < 1.
    static Perturbation cos_bump(double amplitude, double radius, const Vec& wave);
};

/// Smooth compactly supported bump on [0, 1), equal to 1 at the origin.
double bump(double s);
double bump_derivative(double s);

class HamiltonianSpec;

/// H = 1/2 <A p, p> + V(t, x, p) + offset.
struct QuadraticPlusCompact {
    Mat A;
    Perturbation V;
    double offset = 0.0;
};

/// H(t, x, p) = H1(t, x1, p1) + H2(t, x2, p2); H1 p-convex, H2 p-concave.
struct SeparableConvexConcave {
    std::shared_ptr<const HamiltonianSpec> convex;
    std::shared_ptr<const HamiltonianSpec> concave;
};

/// H(x, p) = p - p^3 - x on the line, restricted to [-window, window].
struct CubicExample {
    double window = 3.0;
};

/// Scalar 1-D Hamiltonian h(t, x, p) with a convexity tag; derivatives by
/// central differences with step 1e-5.
struct Custom1D {
    std::function<double(double t, double x, double p)> h;
    Convexity convexity = Convexity::None;
    std::string name = "custom";
    bool autonomous = true;
};

class HamiltonianSpec {
public:
    using Variant = std::variant<QuadraticPlusCompact, SeparableConvexConcave, CubicExample, Custom1D>;

    static constexpr double kFiniteDifferenceStep = 1e-5;

    static HamiltonianSpec quadratic(Mat A, Perturbation V = Perturbation::none(), double offset = 0.0,
                                     double horizon = 10.0);
    static HamiltonianSpec free_particle(double a = 1.0, double horizon = 10.0);
    static HamiltonianSpec separable(const HamiltonianSpec& convex, const HamiltonianSpec& concave,
                                     double horizon = 10.0);
    static HamiltonianSpec cubic_example(double window = 3.0, double horizon = 10.0);
    static HamiltonianSpec custom1d(Custom1D spec, double horizon = 10.0);

    const Variant& variant() const { return variant_; }
    int dim() const;
    double horizon() const { return horizon_; }
    bool autonomous() const;
    /// True when H is 2π-periodic in x (everything but the cubic example).
    bool x_periodic() const;
    std::string describe() const;

    double value(double t, const Vec& x, const Vec& p) const;
    Vec grad_p(double t, const Vec& x, const Vec& p) const;
    Vec grad_x(double t, const Vec& x, const Vec& p) const;
    /// Second momentum derivative (1-D) or Hessian diagonal; finite differences
    /// except for the closed-form variants.
    Mat hess_p(double t, const Vec& x, const Vec& p) const;

    /// Quadratic part A when H has the form 1/2<Ap,p> + V (block diagonal for
    /// separable H). Custom1D returns the sign of its convexity tag.
    Mat quadratic_part() const;
    /// Declared momentum support radius of V (0 when V is absent).
    double support_radius() const;
    bool perturbation_free() const;

    /// sup |dH/dp| over |p| <= momentum_bound (analytic bound where available,
    /// sampled otherwise).
    double speed_bound(double momentum_bound) const;
    /// sup |dH/dx| (force bound) over all (t, x) and |p| <= momentum_bound.
    double force_bound(double momentum_bound) const;

private:
    HamiltonianSpec(Variant v, double horizon);
    void validate() const;

    Variant variant_;
    double horizon_ = 10.0;
};

}  // namespace hjmm
