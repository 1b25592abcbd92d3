#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjmm/grid.hpp"
#include "hjmm/linalg.hpp"

namespace hjmm {

enum class Smoothness { C1, C0 };

const char* to_string(Smoothness s);

/// Where a datum lives: per axis either a circle of given period or a closed
/// interval of the line.
struct AxisDomain {
    bool periodic = true;
    double lo = 0.0;
    double hi = kTwoPi;
};

/// Parameters for the builtin catalog. Unused fields are ignored by a given
/// builtin.
struct BuiltinParams {
    double amplitude = 1.0;
    double phase = 0.0;
    double offset = 0.0;
    double shift = 0.0;
    double value = 0.0;            // constant
    std::vector<double> wave;      // integer frequency vector; defaults to all ones
    std::vector<std::pair<double, double>> knots;  // piecewise-linear (x, y), one period
    double joint_half_width = 0.1;  // cubic-example
    double window = 3.0;            // cubic-example line domain [-window, window]
};

/// Immutable initial datum sigma with optional derivative.
class DatumSpec {
public:
    using ValueFn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;

    /// Builtin catalog: cos, sin, shifted-absolute-sine, piecewise-linear,
    /// constant, cubic-example.
    static const std::vector<std::string>& catalog();
    static DatumSpec builtin(const std::string& name, const BuiltinParams& params = {}, int dim = 1);
    /// Linear interpolation of grid samples; C0.
    static DatumSpec table(const SpaceGrid& grid, std::vector<double> values);
    /// sigma(x1, x2) = sigma1(x1) + sigma2(x2).
    static DatumSpec separable(const DatumSpec& first, const DatumSpec& second);
    static DatumSpec from_functions(std::string name, std::vector<AxisDomain> domain, Smoothness smoothness,
                                    ValueFn value, GradFn gradient = {});

    int dim() const { return int(domain_.size()); }
    Smoothness smoothness() const { return smoothness_; }
    const std::string& name() const { return name_; }
    const std::vector<AxisDomain>& domain() const { return domain_; }
    bool periodic() const;

    /// sigma(x); periodic axes are reduced, line axes are range-checked.
    double value(const Vec& x) const;
    /// d sigma(x); only available for C1 data.
    Vec gradient(const Vec& x) const;
    bool has_gradient() const { return bool(grad_); }

    bool is_separable() const { return bool(parts_); }
    const DatumSpec& part(int i) const;

    DatumSpec shifted(double c) const;
    DatumSpec negated() const;

    std::vector<double> sample(const SpaceGrid& grid) const;
    /// sup |grad sigma| estimated on a fine sampling (one-sided slopes for C0).
    double lipschitz_bound() const;

private:
    DatumSpec() = default;
    Vec reduce(const Vec& x) const;

    std::string name_;
    std::vector<AxisDomain> domain_;
    Smoothness smoothness_ = Smoothness::C1;
    ValueFn value_;
    GradFn grad_;
    std::shared_ptr<const std::pair<DatumSpec, DatumSpec>> parts_;
    struct Lazy;
    std::shared_ptr<Lazy> lazy_;
};

/// Convenience wrapper: eval_datum(d, x).
inline double eval_datum(const DatumSpec& d, const Vec& x) { return d.value(x); }

/// sup over a fine sampling (`oversample` times the grid density) of |a - b|.
double sup_distance(const DatumSpec& a, const DatumSpec& b, const SpaceGrid& grid, std::size_t oversample = 8);

}  // namespace hjmm
