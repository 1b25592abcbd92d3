#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"
#include "hjmm/errors.hpp"
#include "hjmm/semigroup.hpp"

using namespace hjmm;

namespace {

// max_y f(y) - (x - y)^2 / (2 s) on a fine grid of y.
double sup_convolution(const std::function<double(double)>& f, double x, double s, int n = 80000)
{
    const double r = 4.0;
    double best = -1e300;
    for (int i = 0; i <= n; ++i) {
        const double y = x - r + 2.0 * r * i / n;
        best = std::max(best, f(y) - (x - y) * (x - y) / (2.0 * s));
    }
    return best;
}

double inf_convolution(const std::function<double(double)>& f, double x, double s, int n)
{
    return -sup_convolution([&](double y) { return -f(y); }, x, s, n);
}

Propagator fp_prop(double t1, double t)
{
    return Propagator{std::make_shared<const HamiltonianSpec>(HamiltonianSpec::free_particle()), t1, t, {}};
}

}  // namespace

TEST_CASE("identity and free particle propagation")
{
    const SpaceGrid g = SpaceGrid::torus(64);
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const std::vector<double> f = cosd.sample(g);
    const std::vector<double> same = propagate(fp_prop(0.3, 0.3), g, f);
    CHECK(sup_norm(same, f) <= 1e-10);

    const std::vector<double> fwd = propagate(fp_prop(0.0, 0.5), g, cosd);
    CHECK(std::abs(fwd[0] - 1.0) <= 1e-8);

    const std::vector<double> bwd = propagate(fp_prop(0.5, 0.0), g, cosd);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 4) {
        const double x = g.point(i)[0];
        err = std::max(err, std::abs(bwd[i] - sup_convolution([](double y) { return std::cos(y); }, x, 0.5)));
    }
    CHECK(err <= 1e-6);
}

TEST_CASE("Markov residuals")
{
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const SpaceGrid g = SpaceGrid::torus(128);
    const auto t0 = std::chrono::steady_clock::now();
    const ResidualReport r = markov_residual(HamiltonianSpec::free_particle(), cosd, 0.0, 0.5, 1.0, g);
    MESSAGE("free particle markov residual " << r.residual << " in "
                                               << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                                               << " s");
    CHECK(r.residual <= 5e-3);
    CHECK(r.pass);
    CHECK(r.experiment == "markov");

    const ResidualReport deg = markov_residual(HamiltonianSpec::free_particle(), cosd, 0.2, 0.2, 0.7, g);
    CHECK(deg.residual <= 1e-10);
    CHECK_THROWS_AS(markov_residual(HamiltonianSpec::free_particle(), cosd, 0.5, 0.2, 0.7, g), Error);

    const HamiltonianSpec sep = HamiltonianSpec::separable(HamiltonianSpec::free_particle(),
                                                           HamiltonianSpec::quadratic(mat1(-1.0)));
    const DatumSpec d2 = DatumSpec::separable(cosd, cosd);
    const ResidualReport s = markov_residual(sep, d2, 0.0, 0.3, 0.6, SpaceGrid::torus(32, 2));
    MESSAGE("separable markov residual " << s.residual);
    CHECK(s.residual <= 5e-3);
}

TEST_CASE("hysteresis residuals")
{
    const SpaceGrid g = SpaceGrid::torus(128);
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const DatumSpec cosd = DatumSpec::builtin("cos");
    CHECK(hysteresis_residual(fp, cosd, 0.4, 0.4, g).residual <= 1e-10);

    const ResidualReport r = hysteresis_residual(fp, cosd, 0.0, 0.5, g);
    CHECK(r.residual <= 5e-3);

    // Hat datum: the nested inf-then-sup oracle loses the peak.
    const DatumSpec hat = DatumSpec::builtin("piecewise-linear");
    const ResidualReport h = hysteresis_residual(fp, hat, 0.0, 0.5, g);
    SemigroupOptions o;
    const DatumSpec sm = c1_surrogate(hat, o);
    auto sigma = [&](double y) { return sm.value(vec1(y)); };
    const double x = std::numbers::pi;
    const double nested = sup_convolution([&](double y) { return inf_convolution(sigma, y, 0.5, 4000); }, x, 0.5, 4000);
    const double gap = sigma(x) - nested;
    MESSAGE("hat hysteresis residual " << h.residual << ", oracle gap at the peak " << gap);
    CHECK(gap > 0.05);
    CHECK(h.residual > 0.05);
    CHECK(h.residual >= gap - 5e-3);
}

TEST_CASE("mollifier")
{
    const SpaceGrid g = SpaceGrid::torus(256);
    const DatumSpec cosd = DatumSpec::builtin("cos");
    double prev = 1e9;
    for (double eps : {0.2, 0.1, 0.05}) {
        const double dev = sup_distance(mollify(cosd, eps), cosd, g);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev <= 2e-3);

    const DatumSpec sas = DatumSpec::builtin("shifted-absolute-sine");
    const DatumSpec m = mollify(sas, 0.1);
    CHECK(m.smoothness() == Smoothness::C1);
    CHECK(sup_distance(m, sas, g) <= 0.1);
    // The gradient matches a centred difference of the value.
    for (double x : {0.3, 1.7, 3.14159, 5.0}) {
        const double fd = (m.value(vec1(x + 1e-6)) - m.value(vec1(x - 1e-6))) / 2e-6;
        CHECK(std::abs(m.gradient(vec1(x))[0] - fd) <= 1e-5);
    }

    BuiltinParams c;
    c.value = 0.37;
    const DatumSpec k = mollify(DatumSpec::builtin("constant", c), 0.1);
    for (std::size_t i = 0; i < g.size(); i += 7) {
        CHECK(k.value(g.point(i)) == 0.37);
    }
    CHECK_THROWS_AS(mollify(cosd, 0.0), Error);
}

TEST_CASE("C0 extension by schedules")
{
    const SpaceGrid g = SpaceGrid::torus(64);
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const DatumSpec sas = DatumSpec::builtin("shifted-absolute-sine");
    const C0Result a = c0_solve(fp, sas, {0.2, 0.1, 0.05, 0.025}, g, {0.5});
    REQUIRE(a.solution_distances.size() == 3);
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(a.solution_distances[n] <= a.datum_distances[n] + 5e-3);
    }
    CHECK(a.decreasing);
    CHECK(a.report.pass);

    const C0Result b = c0_solve(fp, sas, {0.15, 0.075, 0.0375}, g, {0.5});
    const ResidualReport agree = schedule_agreement(a, b, 5e-3);
    CHECK(agree.pass);

    const C0Result smooth = c0_solve(fp, DatumSpec::builtin("cos"), {0.1, 0.05}, g, {0.5});
    CHECK(smooth.solution_distances[0] <= smooth.datum_distances[0] + 5e-3);
    CHECK_THROWS_AS(c0_solve(fp, sas, {0.1, 0.2}, g, {0.5}), Error);
}

TEST_CASE("nonexpansive and Hamiltonian continuity audits")
{
    const SpaceGrid g = SpaceGrid::torus(64);
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const DatumSpec cosd = DatumSpec::builtin("cos");
    BuiltinParams lifted;
    lifted.offset = 0.1;
    const ResidualReport sh = nonexpansive_audit(fp, cosd, DatumSpec::builtin("cos", lifted), 0.5, g);
    CHECK(std::abs(sh.residual - 0.1) <= 1e-12);
    CHECK(sh.pass);

    const ResidualReport cs = nonexpansive_audit(fp, cosd, DatumSpec::builtin("sin"), 0.5, g);
    CHECK(cs.details.at("datum_distance") <= std::sqrt(2.0) + 1e-9);
    CHECK(cs.pass);
    CHECK(nonexpansive_audit(fp, cosd, cosd, 0.5, g).residual <= 1e-12);

    const HamiltonianSpec shifted = HamiltonianSpec::quadratic(mat1(1.0), Perturbation::none(), 0.2);
    const ResidualReport c0 = hamiltonian_continuity_audit(fp, shifted, cosd, 0.5, g);
    CHECK(c0.residual <= 1e-10);
    CHECK(std::abs(c0.details.at("drift") - 0.1) <= 1e-10);
    CHECK(c0.pass);

    const HamiltonianSpec bumped = HamiltonianSpec::quadratic(mat1(1.0), Perturbation::cos_bump(0.1, 2.0, vec1(1.0)));
    const ResidualReport c1 = hamiltonian_continuity_audit(fp, bumped, cosd, 0.5, g);
    CHECK(c1.pass);
    CHECK(c1.details.at("slack") > 0.0);
    CHECK(hamiltonian_continuity_audit(fp, fp, cosd, 0.5, g).residual <= 1e-12);
}

TEST_CASE("implication table")
{
    const SpaceGrid g = SpaceGrid::torus(64);
    const ImplicationTable t =
        implication_table(HamiltonianSpec::free_particle(), DatumSpec::builtin("cos"), {0.0, 0.3, 0.6}, g);
    CHECK(t.hysteresis.size() == 3);
    CHECK(t.markov.size() == 1);
    CHECK(t.premise);
    CHECK(t.conclusion);
}
