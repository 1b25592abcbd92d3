#pragma once

#include <Eigen/Dense>

namespace hjmm {

/// Spatial points and momenta. Dimension is 1 or 2; the fixed upper bound keeps
/// everything on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2, 2>;

inline Vec vec1(double a)
{
    Vec v(1);
    v << a;
    return v;
}

inline Vec vec2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

inline Vec zeros(int dim) { return Vec::Zero(dim); }

inline Mat mat1(double a)
{
    Mat m(1, 1);
    m << a;
    return m;
}

inline Mat diag2(double a, double b)
{
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

}  // namespace hjmm
