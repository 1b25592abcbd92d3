#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "hjmm/broken_gf.hpp"
#include "hjmm/errors.hpp"
#include "hjmm/flow.hpp"
#include "hjmm/minmax.hpp"
#include "hjmm/step_gf.hpp"

using namespace hjmm;

namespace {

HamiltonianSpec bumped(double amplitude = 0.1, double radius = 1.0)
{
    return HamiltonianSpec::quadratic(mat1(1.0), Perturbation::cos_bump(amplitude, radius, vec1(1.0)));
}

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Contract;
}

}  // namespace

TEST_CASE("quadratic step values")
{
    const StepGF s = step_gf(HamiltonianSpec::free_particle(), 0.0, 0.25);
    CHECK(s.kind() == StepKind::Analytic);
    CHECK(s.value(vec1(0.0), vec1(1.0)) == doctest::Approx(2.0).epsilon(1e-15));

    const StepGF c = step_gf(HamiltonianSpec::quadratic(mat1(-1.0)), 0.0, 0.5);
    CHECK(c.value(vec1(0.0), vec1(1.0)) == doctest::Approx(-1.0).epsilon(1e-15));
    const StepEval e = c.evaluate(vec1(0.0), vec1(1.0));
    // P = A^{-1} dX / eps on both ends
    CHECK(e.d_start[0] == doctest::Approx(2.0));
    CHECK(e.d_end[0] == doctest::Approx(-2.0));
}

TEST_CASE("shooting step matches action quadrature")
{
    auto h = std::make_shared<const HamiltonianSpec>(bumped());
    const StepGF s = step_gf(h, 0.0, 0.1);
    CHECK(s.kind() == StepKind::Numeric);
    const Vec X = vec1(0.0);
    const Vec Y = vec1(0.05);
    const Vec P = s.shoot(X, Y);
    const PhaseState end = integrate(*h, PhaseState{0.0, X, P, 0.0}, 0.1, 4000);
    CHECK(std::abs(end.x[0] - Y[0]) <= 1e-9);
    CHECK(std::abs(s.value(X, Y) - end.action) <= 1e-6);
}

TEST_CASE("endpoint derivative identities")
{
    const RelReport a = rel_check(step_gf(HamiltonianSpec::free_particle(), 0.0, 0.2), 100, 7);
    CHECK(a.pass);
    CHECK(a.tolerance == 1e-10);

    auto h = std::make_shared<const HamiltonianSpec>(bumped(0.05, 2.0));
    const RelReport n = rel_check(step_gf(h, 0.0, 0.1), 100, 7);
    CHECK(n.samples == 100);
    CHECK(n.tolerance == 1e-4);
    CHECK(n.pass);
    CHECK(n.max_fd_error <= 1e-4);
    CHECK(n.max_flow_error <= 1e-4);
}

TEST_CASE("composition")
{
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const double eps = 0.3;
    const GeneratingFunction g = compose_gf(GeneratingFunction(step_gf(fp, 0.0, eps)),
                                            GeneratingFunction(step_gf(fp, eps, 2 * eps)));
    CHECK(g.param_count() == 1);
    const double Q = 0.2;
    const double x = 1.1;
    const StationaryPoint sp = stationary_point(g, vec1(Q), vec1(x));
    CHECK(sp.converged);
    CHECK(sp.w[0][0] == doctest::Approx((Q + x) / 2).epsilon(1e-9));
    CHECK(sp.value == doctest::Approx((x - Q) * (x - Q) / (4 * eps)).epsilon(1e-9));

    // A step followed by its time reverse cancels for every inner point.
    auto h = std::make_shared<const HamiltonianSpec>(bumped(0.05, 2.0));
    const GeneratingFunction r = compose_gf(GeneratingFunction(step_gf(h, 0.0, 0.2)),
                                            GeneratingFunction(step_gf(h, 0.2, 0.0)));
    for (double w : {0.1, 0.45, 0.9}) {
        CHECK(std::abs(r.value(vec1(0.3), vec1(0.3), {vec1(w)})) <= 1e-8);
        CHECK(std::abs(r.param_gradient(vec1(0.3), vec1(0.3), {vec1(w)})[0][0]) <= 1e-6);
    }

    CHECK(kind_of([&] {
              compose_gf(GeneratingFunction(StepGF::zero(2, 2)), GeneratingFunction(step_gf(fp, 0.0, eps)));
          }) == ErrorKind::Contract);
}

TEST_CASE("broken generating function reproduces the characteristics")
{
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const BrokenGF g = build_broken_gf(fp, cosd, 0.5, 1);
    CHECK(g.N() == 1);
    CHECK(g.times()[1] == doctest::Approx(0.25));
    for (double x : {0.0, 0.7, 2.0, 4.5}) {
        const MinmaxResult r = minmax_solve(g, vec1(x), derive_mode(g));
        REQUIRE(r.U.size() == 1);
        const PhaseState c = characteristics_from_datum(fp, cosd, r.xi, 0.5);
        CHECK(c.x[0] == doctest::Approx(x).epsilon(1e-6));
        const PhaseState mid = characteristics_from_datum(fp, cosd, r.xi, 0.25);
        CHECK(mid.x[0] == doctest::Approx(r.U[0][0]).epsilon(1e-6));
        const BrokenGF::Eval e = g.evaluate(vec1(x), r.xi, r.U);
        CHECK(std::abs(e.d_xi[0]) <= 1e-6);
        CHECK(std::abs(e.d_U[0][0]) <= 1e-6);
    }

    const BrokenGF tiny = build_broken_gf(fp, cosd, 1e-9, 3);
    const Vec x = vec1(0.8);
    CHECK(tiny.value(x, x, tiny.straight_chain(x, x)) == doctest::Approx(std::cos(0.8)).epsilon(1e-12));
}

TEST_CASE("signature and step count")
{
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const BrokenGF concave = build_broken_gf(HamiltonianSpec::quadratic(mat1(-1.0)), cosd, 0.5, 3);
    CHECK(concave.signature().n_plus == 0);
    CHECK(concave.signature().n_minus == 4);

    const BrokenGF plus = build_broken_gf(HamiltonianSpec::free_particle(), cosd, 0.5, 5);
    CHECK(plus.signature().n_plus == 6);
    CHECK(plus.signature().n_minus == 0);

    const HamiltonianSpec sep = HamiltonianSpec::separable(HamiltonianSpec::free_particle(),
                                                           HamiltonianSpec::quadratic(mat1(-1.0)));
    const BrokenGF mixed = build_broken_gf(sep, DatumSpec::builtin("cos", {}, 2), 0.5, 2);
    CHECK(mixed.signature().n_plus + mixed.signature().n_minus == 6);
    CHECK(mixed.signature().n_plus == 3);

    // Automatic N starts at 4 and passes for a mild perturbation.
    const BrokenGF autoN = build_broken_gf(bumped(0.05, 2.0), cosd, 0.5);
    CHECK(autoN.N() >= 4);
    CHECK(autoN.N() <= 64);
    CHECK(autoN.twist_margin() > 0.0);

    CHECK(kind_of([&] { build_broken_gf(HamiltonianSpec::free_particle(), DatumSpec::builtin("shifted-absolute-sine"), 0.5); }) ==
          ErrorKind::Construction);
    CHECK(kind_of([&] { build_broken_gf(HamiltonianSpec::free_particle(), cosd, 0.0); }) == ErrorKind::Contract);
}

TEST_CASE("quadratic at infinity")
{
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const BrokenGF free = build_broken_gf(HamiltonianSpec::free_particle(), cosd, 0.5, 3);
    for (double radius : {0.1, 10.0, 1e3}) {
        const QuadraticityAudit a = quadraticity_audit(free, radius, 50);
        CHECK(a.pass);
        CHECK(a.max_deviation <= 1e-10 * (1 + radius * radius));
    }

    const BrokenGF bump = build_broken_gf(bumped(), cosd, 0.5, 4);
    const QuadraticityAudit far = quadraticity_audit(bump, 1.5, 40);
    CHECK(far.pass);
    const QuadraticityAudit near = quadraticity_audit(bump, 0.2, 40);
    CHECK_FALSE(near.pass);
    CHECK(near.max_deviation > near.tolerance);
    CHECK(near.worst_radius < 1.0);
}
