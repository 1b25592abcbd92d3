#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hjmm/cubic_example.hpp"
#include "hjmm/datum.hpp"
#include "hjmm/errors.hpp"
#include "hjmm/flow.hpp"

using namespace hjmm;

TEST_CASE("vector field examples")
{
    const HamiltonianSpec cubic = HamiltonianSpec::cubic_example();
    VectorField f = vector_field(cubic, 0.0, vec1(0.0), vec1(0.0));
    CHECK(f.dx[0] == doctest::Approx(1.0));
    CHECK(f.dp[0] == doctest::Approx(1.0));
    f = vector_field(cubic, 0.0, vec1(0.0), vec1(1.0));
    CHECK(f.dx[0] == doctest::Approx(-2.0));
    CHECK(f.dp[0] == doctest::Approx(1.0));

    f = vector_field(HamiltonianSpec::free_particle(), 0.0, vec1(0.4), vec1(3.0));
    CHECK(f.dx[0] == 3.0);
    CHECK(f.dp[0] == 0.0);

    // Custom variants fall back on central differences.
    const HamiltonianSpec c = HamiltonianSpec::custom1d({[](double, double x, double p) { return p * p * p + std::sin(x); },
                                                         Convexity::None, "cubic-sin"});
    f = vector_field(c, 0.0, vec1(0.3), vec1(0.5));
    CHECK(f.dx[0] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(f.dp[0] == doctest::Approx(-std::cos(0.3)).epsilon(1e-9));
}

TEST_CASE("cubic example characteristics follow the closed form")
{
    const HamiltonianSpec cubic = HamiltonianSpec::cubic_example();
    const double x0 = 0.3;
    const double v = -0.4;
    for (double t : {0.25, 1.0}) {
        const PhaseState s = integrate(cubic, PhaseState{0.0, vec1(x0), vec1(v), 0.0}, t, int(std::lround(200 * t)));
        const double x = x0 + t - 3 * v * v * t - 3 * v * t * t - t * t * t;
        CHECK(s.x[0] == doctest::Approx(x).epsilon(1e-8));
        CHECK(s.p[0] == doctest::Approx(v + t).epsilon(1e-8));
    }
}

TEST_CASE("free particle action and reversibility")
{
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const PhaseState s = integrate(fp, PhaseState{0.0, vec1(0.0), vec1(1.0), 0.0}, 1.0, 200);
    CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.p[0] == 1.0);
    CHECK(s.action == doctest::Approx(0.5).epsilon(1e-14));

    const HamiltonianSpec cubic = HamiltonianSpec::cubic_example();
    const PhaseState a = integrate(cubic, PhaseState{0.0, vec1(0.2), vec1(0.1), 0.0}, 1.0, 200);
    const PhaseState b = integrate(cubic, a, 0.0, 200);
    CHECK(std::abs(b.x[0] - 0.2) <= 1e-7);
    CHECK(std::abs(b.p[0] - 0.1) <= 1e-7);
    CHECK(std::abs(b.action) <= 1e-7);
}

TEST_CASE("energy conservation and action additivity")
{
    const HamiltonianSpec h = HamiltonianSpec::quadratic(mat1(1.0), Perturbation::cos_bump(0.2, 1.0, vec1(1.0)));
    const PhaseState start{0.0, vec1(0.4), vec1(0.3), 0.0};
    const double e0 = h.value(0.0, start.x, start.p);
    const PhaseState mid = integrate(h, start, 0.6);
    const PhaseState end = integrate(h, mid, 1.5);
    CHECK(std::abs(h.value(0.0, end.x, end.p) - e0) <= 1e-6);
    const PhaseState direct = integrate(h, start, 1.5);
    CHECK(std::abs(direct.action - end.action) <= 1e-8);
    CHECK(std::abs(direct.x[0] - end.x[0]) <= 1e-8);

    const HamiltonianSpec h2 = HamiltonianSpec::quadratic(diag2(1.0, 2.0), Perturbation::cos_bump(0.2, 1.0, vec2(1.0, 1.0)));
    const PhaseState s2{0.0, vec2(0.4, 1.0), vec2(0.3, -0.2), 0.0};
    const PhaseState e2 = integrate(h2, s2, 1.0);
    CHECK(std::abs(h2.value(0.0, e2.x, e2.p) - h2.value(0.0, s2.x, s2.p)) <= 1e-6);
}

TEST_CASE("integration blowup carries the failing time")
{
    const HamiltonianSpec h = HamiltonianSpec::custom1d({[](double, double, double p) { return p * p * p * p; },
                                                         Convexity::Convex, "quartic"});
    try {
        integrate(h, PhaseState{0.0, vec1(0.0), vec1(1e80), 0.0}, 1.0, 10);
        FAIL("expected a blowup");
    } catch (const IntegrationBlowup& e) {
        CHECK(e.kind() == ErrorKind::IntegrationBlowup);
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 1.0);
    }
}

TEST_CASE("twist check")
{
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const TwistReport r = twist_check(fp, 0.25, 0.75);
    CHECK(r.analytic);
    CHECK(r.min_derivative == 0.5);
    CHECK(r.pass);
    CHECK_FALSE(twist_check(fp, 0.0, 5e-4).pass);

    const HamiltonianSpec cubic = HamiltonianSpec::cubic_example();
    TwistOptions o;
    o.momentum_window = 2.0;
    const TwistReport shortstep = twist_check(cubic, 1.0, 1.05, o);
    CHECK_FALSE(shortstep.analytic);
    CHECK(shortstep.samples == 41 * 41);
    CHECK(shortstep.pass);
    const TwistReport longstep = twist_check(cubic, 1.0, 3.0, o);
    CHECK_FALSE(longstep.pass);
    CHECK(longstep.min_derivative < 1e-3);

    // The perturbed case goes through the sampled finite-difference sweep.
    // With amplitude 0.05 and radius 2, H_pp stays within [0.74, 1.21].
    const HamiltonianSpec h = HamiltonianSpec::quadratic(mat1(1.0), Perturbation::cos_bump(0.05, 2.0, vec1(1.0)));
    const TwistReport p = twist_check(h, 0.0, 0.2);
    CHECK_FALSE(p.analytic);
    CHECK(p.pass);
    CHECK(p.min_derivative > 0.2 * 0.7);
    CHECK(p.min_derivative < 0.2 * 1.3);

    try {
        twist_check(fp, 0.5, 0.5);
        FAIL("expected a contract error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
    }
}

TEST_CASE("characteristics from the datum")
{
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    BuiltinParams c;
    c.value = 0.7;
    PhaseState s = characteristics_from_datum(fp, DatumSpec::builtin("constant", c), vec1(1.3), 2.0);
    CHECK(s.x[0] == 1.3);
    CHECK(s.p[0] == 0.0);
    CHECK(s.action == 0.0);

    s = characteristics_from_datum(fp, DatumSpec::builtin("cos"), vec1(std::numbers::pi / 2), 1.0);
    CHECK(s.x[0] == doctest::Approx(std::numbers::pi / 2 - 1.0).epsilon(1e-12));
    CHECK(s.p[0] == doctest::Approx(-1.0).epsilon(1e-12));

    const HamiltonianSpec cubic = HamiltonianSpec::cubic_example();
    const DatumSpec d = DatumSpec::builtin("cubic-example");
    for (double x0 : {-1.5, 0.8}) {
        const double v = d.gradient(vec1(x0))[0];
        s = characteristics_from_datum(cubic, d, vec1(x0), 0.7);
        CHECK(s.p[0] == doctest::Approx(v + 0.7).epsilon(1e-10));
    }

    try {
        characteristics_from_datum(fp, DatumSpec::builtin("shifted-absolute-sine"), vec1(0.0), 1.0);
        FAIL("expected a contract error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
    }
}
