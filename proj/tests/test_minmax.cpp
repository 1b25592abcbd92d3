#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hjmm/broken_gf.hpp"
#include "hjmm/cubic_example.hpp"
#include "hjmm/errors.hpp"
#include "hjmm/minmax.hpp"

using namespace hjmm;

namespace {

constexpr double pi = std::numbers::pi;

// Brute-force Hopf-Lax for H = a p^2 / 2: extremum over y of sigma(y) + (x - y)^2 / (2 a t).
double hopf_lax(double (*sigma)(double), double a, double t, double x)
{
    const bool minimize = a > 0;
    double best = minimize ? 1e300 : -1e300;
    double arg = 0.0;
    auto f = [&](double y) { return sigma(y) + (x - y) * (x - y) / (2 * a * t); };
    for (int i = 0; i <= 200000; ++i) {
        const double y = x - 8.0 + 16.0 * i / 200000;
        const double v = f(y);
        if (minimize ? v < best : v > best) {
            best = v;
            arg = y;
        }
    }
    for (double h = 16.0 / 200000; h > 1e-13; h *= 0.5) {
        for (double y : {arg - h, arg + h}) {
            const double v = f(y);
            if (minimize ? v < best : v > best) {
                best = v;
                arg = y;
            }
        }
    }
    return best;
}

double cos1(double y) { return std::cos(y); }
double negcos(double y) { return -std::cos(y); }

}  // namespace

TEST_CASE("free particle values")
{
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const BrokenGF g = build_broken_gf(fp, cosd, 0.5, 3);
    CHECK(derive_mode(g).kind == ModeKind::AllPlus);
    CHECK(minmax_value(g, vec1(0.0)) == doctest::Approx(hopf_lax(cos1, 1.0, 0.5, 0.0)).epsilon(1e-9));
    CHECK(minmax_value(g, vec1(0.0)) == doctest::Approx(1.0).epsilon(1e-9));

    const BrokenGF g1 = build_broken_gf(fp, cosd, 1.0, 3);
    CHECK(minmax_value(g1, vec1(pi)) == doctest::Approx(-1.0).epsilon(1e-9));

    for (double x : {0.3, 1.7, 2.9, 5.0}) {
        const double oracle = hopf_lax(cos1, 1.0, 1.0, x);
        MinmaxOptions grid;
        grid.search = Search::Grid;
        const MinmaxResult w = minmax_solve(g1, vec1(x), derive_mode(g1));
        const MinmaxResult q = minmax_solve(g1, vec1(x), derive_mode(g1), grid);
        CHECK(std::abs(w.value - oracle) <= 1e-8);
        CHECK(std::abs(q.value - oracle) <= 1e-8);
        // the straight chain at the optimizer is a feasible probe
        CHECK(w.value <= w.probe_value + 1e-12);
    }
}

TEST_CASE("mode must match the signature")
{
    const BrokenGF g = build_broken_gf(HamiltonianSpec::free_particle(), DatumSpec::builtin("cos"), 0.5, 1);
    try {
        minmax_value(g, vec1(0.0), SignatureMode{ModeKind::AllMinus, false});
        FAIL("expected a contract error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
    }
}

TEST_CASE("separable convex-concave value")
{
    const HamiltonianSpec sep = HamiltonianSpec::separable(HamiltonianSpec::free_particle(),
                                                           HamiltonianSpec::quadratic(mat1(-1.0)));
    const DatumSpec d = DatumSpec::separable(DatumSpec::builtin("cos"), DatumSpec::builtin("cos"));
    const BrokenGF g = build_broken_gf(sep, d, 0.5, 2);
    CHECK(derive_mode(g).kind == ModeKind::BlockSeparable);
    CHECK(minmax_value(g, vec2(0.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-9));
    const double x1 = 0.9;
    const double x2 = 2.2;
    const double expect = hopf_lax(cos1, 1.0, 0.5, x1) + hopf_lax(cos1, -1.0, 0.5, x2);
    CHECK(minmax_value(g, vec2(x1, x2)) == doctest::Approx(expect).epsilon(1e-8));

    // With a separable datum the Hopf bounds close on the same value.
    const HopfBounds hb = hopf_bounds(g, vec2(x1, x2));
    CHECK(std::abs(hb.lower - expect) <= 2 * kTolMinmax);
    CHECK(std::abs(hb.upper - expect) <= 2 * kTolMinmax);
}

TEST_CASE("Hopf bounds for a mixed datum")
{
    const HamiltonianSpec sep = HamiltonianSpec::separable(HamiltonianSpec::free_particle(),
                                                           HamiltonianSpec::quadratic(mat1(-1.0)));
    const DatumSpec d = DatumSpec::builtin("cos", {}, 2);  // cos(x1 + x2)
    const BrokenGF g = build_broken_gf(sep, d, 0.3, 1);
    const SignatureMode m = derive_mode(g);
    CHECK(m.kind == ModeKind::Bounds);
    CHECK(m.degraded);
    const MinmaxResult r = minmax_solve(g, vec2(0.0, 0.0), m);
    CHECK(std::isfinite(r.lower));
    CHECK(std::isfinite(r.upper));
    CHECK(r.lower <= r.upper);

    const BrokenGF small = build_broken_gf(sep, d, 1e-4, 1);
    const Vec x = vec2(0.4, -1.1);
    const HopfBounds hb = hopf_bounds(small, x);
    CHECK(std::abs(hb.lower - d.value(x)) <= 1e-3);
    CHECK(std::abs(hb.upper - d.value(x)) <= 1e-3);
}

TEST_CASE("solve_field")
{
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const SpaceGrid grid = SpaceGrid::torus(32);
    SolveOptions o;
    o.gf.N = 3;

    BuiltinParams c;
    c.value = 0.37;
    const SolutionField flat = solve_field(fp, DatumSpec::builtin("constant", c), grid, {0.0, 0.5, 1.0}, o);
    for (const auto& slice : flat.values) {
        for (double v : slice) {
            CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
        }
    }

    const DatumSpec cosd = DatumSpec::builtin("cos");
    const SolutionField u = solve_field(fp, cosd, grid, {0.0, 0.5, 1.0}, o);
    CHECK(u.method == Method::Minmax);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(u.values[0][i] - cosd.value(grid.point(i))) <= 1e-8);
    }
    CHECK(u.values[1][0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(u.values[2][16] == doctest::Approx(-1.0).epsilon(1e-9));  // x = pi

    // Additive equivariance.
    BuiltinParams shifted;
    shifted.offset = 0.8;
    const SolutionField v = solve_field(fp, DatumSpec::builtin("cos", shifted), grid, {0.0, 0.5, 1.0}, o);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(v.values[k][i] - u.values[k][i] - 0.8) <= 1e-12);
        }
    }

    // The concave problem is the convex one for -sigma, negated.
    BuiltinParams neg;
    neg.amplitude = -1.0;
    const SolutionField cv =
        solve_field(HamiltonianSpec::quadratic(mat1(-1.0)), cosd, grid, {0.0, 0.5, 1.0}, o);
    const SolutionField mirror = solve_field(fp, DatumSpec::builtin("cos", neg), grid, {0.0, 0.5, 1.0}, o);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(cv.values[2][i] + mirror.values[2][i]) <= 1e-9);
        CHECK(std::abs(cv.values[2][i] - hopf_lax(cos1, -1.0, 1.0, grid.point(i)[0])) <= 1e-8);
        CHECK(std::abs(mirror.values[2][i] - hopf_lax(negcos, 1.0, 1.0, grid.point(i)[0])) <= 1e-8);
    }
}

TEST_CASE("step count does not change the value")
{
    const HamiltonianSpec h =
        HamiltonianSpec::quadratic(mat1(1.0), Perturbation::cos_bump(0.05, 2.0, vec1(1.0)));
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const BrokenGF a = build_broken_gf(h, cosd, 0.5, 4);
    const BrokenGF b = build_broken_gf(h, cosd, 0.5, 9);
    for (double x : {0.0, 1.3, 3.0}) {
        CHECK(std::abs(minmax_value(a, vec1(x)) - minmax_value(b, vec1(x))) <= 1e-4);
    }
}

TEST_CASE("non-convex example solution")
{
    for (double t : {2.0, 3.0, 5.0}) {
        CHECK(example_solution(t, 0.0) == -0.25);
        CHECK(example_gf(t, 0.0, 1.0 - t) == doctest::Approx(-0.25).epsilon(1e-14));
        CHECK(example_gf(t, 0.0, -1.0 - t) == doctest::Approx(-0.25).epsilon(1e-14));
        CHECK(std::abs(example_gf_dxi(t, 0.0, 1.0 - t)) <= 1e-12);
        CHECK(example_gf_dx(t, 0.0, 1.0 - t) == doctest::Approx(1.0));
        CHECK(example_gf_dx(t, 0.0, -1.0 - t) == doctest::Approx(-1.0));
    }
    for (double x : {-0.3, -0.01, 0.2}) {
        const ExampleBranch b = x < 0 ? ExampleBranch::VPlus : ExampleBranch::VMinus;
        const double v = cubic_root(b, x);
        CHECK(std::abs(v - v * v * v - x) <= 1e-12);
        CHECK((x < 0 ? v > 0 : v < 0));
    }
    const Superdifferential s = example_superdifferential(3.0);
    CHECK(s.tau == 0.0);
    CHECK(s.p_lo == -1.0);
    CHECK(s.p_hi == 1.0);
    CHECK(s.sub_empty);
    CHECK(std::abs(s.left_slope - 1.0) <= 1e-6);
    CHECK(std::abs(s.right_slope + 1.0) <= 1e-6);
    CHECK(s.consistent);
    try {
        example_solution(1.0, 0.0);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
    }
}
