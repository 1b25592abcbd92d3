#include "hjmm/optimize.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace hjmm {

namespace {

struct Context {
    const Objective* f;
    Eigen::Index n;
    std::exception_ptr error;
};

Eigen::Map<const Eigen::VectorXd> view(const gsl_vector* v)
{
    return {v->data, Eigen::Index(v->size)};
}

double call(Context& c, const gsl_vector* v, gsl_vector* g)
{
    if (c.error) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    try {
        const Eigen::VectorXd z = view(v);
        Eigen::VectorXd grad(c.n);
        const double value = (*c.f)(z, g ? &grad : nullptr);
        if (g) {
            for (Eigen::Index i = 0; i < c.n; ++i) {
                gsl_vector_set(g, std::size_t(i), grad[i]);
            }
        }
        return value;
    } catch (...) {
        c.error = std::current_exception();
        if (g) {
            gsl_vector_set_all(g, 0.0);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double f_only(const gsl_vector* v, void* p) { return call(*static_cast<Context*>(p), v, nullptr); }
void df_only(const gsl_vector* v, void* p, gsl_vector* g) { call(*static_cast<Context*>(p), v, g); }
void fdf(const gsl_vector* v, void* p, double* f, gsl_vector* g) { *f = call(*static_cast<Context*>(p), v, g); }

}  // namespace

BfgsResult bfgs_minimize(const Objective& f, const Eigen::VectorXd& z0, double gtol, int max_iter,
                         double initial_step)
{
    static std::once_flag quiet;
    std::call_once(quiet, [] { gsl_set_error_handler_off(); });

    const Eigen::Index n = z0.size();
    Context ctx{&f, n, nullptr};
    gsl_multimin_function_fdf fn{&f_only, &df_only, &fdf, std::size_t(n), &ctx};
    gsl_vector* x = gsl_vector_alloc(std::size_t(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        gsl_vector_set(x, std::size_t(i), z0[i]);
    }
    gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, std::size_t(n));
    gsl_multimin_fdfminimizer_set(s, &fn, x, initial_step, 0.1);

    BfgsResult r;
    auto grad_norm = [&] { return gsl_blas_dnrm2(gsl_multimin_fdfminimizer_gradient(s)); };
    r.converged = grad_norm() <= gtol;
    while (!r.converged && !ctx.error && r.iterations < max_iter) {
        ++r.iterations;
        if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) {
            break;
        }
        r.converged = grad_norm() <= gtol;
    }
    if (!ctx.error) {
        r.z = view(gsl_multimin_fdfminimizer_x(s));
        r.value = gsl_multimin_fdfminimizer_minimum(s);
        r.gradient_norm = grad_norm();
    }
    gsl_multimin_fdfminimizer_free(s);
    gsl_vector_free(x);
    if (ctx.error) {
        std::rethrow_exception(ctx.error);
    }
    return r;
}

ScalarMin brent_minimize(const std::function<double(double)>& f, double lo, double hi)
{
    std::uintmax_t iterations = 200;
    const auto [x, v] = boost::math::tools::brent_find_minima(f, lo, hi, 40, iterations);
    return {x, v};
}

}  // namespace hjmm
