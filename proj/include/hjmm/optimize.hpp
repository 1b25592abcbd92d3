#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hjmm {

/// Objective returning f(z); fills the gradient when `grad` is non-null.
using Objective = std::function<double(const Eigen::VectorXd& z, Eigen::VectorXd* grad)>;

struct BfgsResult {
    Eigen::VectorXd z;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Quasi-Newton descent (GSL vector_bfgs2). Stops at |grad| <= gtol, on
/// stalled line searches, or after max_iter iterations. Exceptions thrown by
/// the objective propagate.
BfgsResult bfgs_minimize(const Objective& f, const Eigen::VectorXd& z0, double gtol = 1e-10, int max_iter = 400,
                         double initial_step = 0.01);

/// Minimum of a scalar function on [lo, hi] by Brent's method.
struct ScalarMin {
    double x = 0.0;
    double value = 0.0;
};

ScalarMin brent_minimize(const std::function<double(double)>& f, double lo, double hi);

}  // namespace hjmm
