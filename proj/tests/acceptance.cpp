// Acceptance run: one line per criterion with its runtime. Exit status is the
// number of failed criteria.
#include <boost/math/tools/minima.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hjmm/cubic_example.hpp"
#include "hjmm/errors.hpp"
#include "hjmm/experiment.hpp"
#include "hjmm/minmax.hpp"
#include "hjmm/semigroup.hpp"
#include "hjmm/step_gf.hpp"
#include "hjmm/viscosity.hpp"

using namespace hjmm;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " FAILED(" << what << ")";
        }
    }
};

struct Criterion {
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> body;
};

HamiltonianSpec bumped(double amplitude = 0.05)
{
    return HamiltonianSpec::quadratic(mat1(1.0), Perturbation::cos_bump(amplitude, 2.0, vec1(1.0)));
}

HamiltonianSpec saddle()
{
    return HamiltonianSpec::separable(HamiltonianSpec::free_particle(), HamiltonianSpec::quadratic(mat1(-1.0)));
}

// Extremum over y of cos(y) + sign (x - y)^2 / (2t): a dense scan, then Brent
// on the best bracket. sign = +1 gives the min (convex part), -1 the max.
double hopf_lax_oracle(double x, double t, double sign)
{
    auto f = [&](double y) { return sign * (std::cos(y) + sign * (x - y) * (x - y) / (2.0 * t)); };
    const double r = 2.0 * kTwoPi;
    const int n = 20000;
    double best_y = x;
    double best = f(x);
    for (int i = 0; i <= n; ++i) {
        const double y = x - r + 2.0 * r * i / n;
        if (f(y) < best) {
            best = f(y);
            best_y = y;
        }
    }
    const double h = 2.0 * r / n;
    const auto m = boost::math::tools::brent_find_minima(f, best_y - h, best_y + h, 52);
    return sign * m.second;
}

void splitting(Outcome& o)
{
    for (double t : {2.0, 3.0, 5.0}) {
        o.expect(example_solution(t, 0.0) == -0.25, "example value at t");
    }
    const double p = 1.0 / std::sqrt(3.0);
    const double direct = HamiltonianSpec::cubic_example().value(0.0, vec1(0.0), vec1(p));
    o.expect(std::abs(direct - 2.0 / (3.0 * std::sqrt(3.0))) <= 1e-12, "H(0, 1/sqrt3)");

    const SplittingReport r = splitting_report();
    o.expect(r.minmax_value == -0.25, "minmax value");
    o.expect(std::abs(r.probe_residual - 2.0 / (3.0 * std::sqrt(3.0))) <= 1e-12, "probe residual");
    o.expect(r.probe_fails, "probe fails");
    for (std::size_t i = 0; i + 1 < r.levels.size(); ++i) {
        o.expect(r.levels[i].gap > 3.0 * r.levels[i].scheme_error, "gap over 3x scheme error");
    }
    o.expect(r.gap_exceeds_error, "report flag");
    o.detail << "u(2,0)=-0.25 probe=" << r.probe_residual;
    for (const auto& l : r.levels) {
        o.detail << " [" << l.cells << ": gap " << l.gap << " err " << l.scheme_error << "]";
    }
}

void convex_coincidence(Outcome& o)
{
    const HamiltonianSpec h = bumped();
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const std::vector<double> times = {0.25, 0.5, 1.0};
    std::vector<double> gaps;
    for (std::size_t n : {256, 512}) {
        const SpaceGrid g = SpaceGrid::torus(n);
        LFConfig c;
        c.grid = g;
        const SolutionField lf = lf_solve(h, cosd, c, times);
        const SolutionField mm = solve_field(h, cosd, g, times);
        double gap = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            gap = std::max(gap, sup_norm(lf.values[k], mm.values[k]));
        }
        gaps.push_back(gap);
    }
    o.expect(gaps[0] <= 0.05, "gap at 256 points");
    o.expect(gaps[1] < gaps[0], "gap shrinks");
    o.detail << "gap 256=" << gaps[0] << " 512=" << gaps[1];
}

void markov(Outcome& o)
{
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const SpaceGrid g = SpaceGrid::torus(128);
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    SemigroupOptions base;
    const ResidualReport r0 = markov_residual(fp, cosd, 0.0, 0.5, 1.0, g, base);
    const int N0 = int(solve_field(fp, cosd, g, {1.0}).metadata.at("N"));
    SemigroupOptions fine = base;
    fine.solve.gf.N = 2 * N0 + 1;
    fine.solve.minmax.optimizer_grid = 2 * base.solve.minmax.optimizer_grid - 1;
    fine.solve.minmax.wavefront_samples = 2 * base.solve.minmax.wavefront_samples;
    const ResidualReport r1 = markov_residual(fp, cosd, 0.0, 0.5, 1.0, g, fine);
    SemigroupOptions finer = fine;
    finer.solve.gf.N = 2 * fine.solve.gf.N + 1;
    finer.solve.minmax.optimizer_grid = 2 * fine.solve.minmax.optimizer_grid - 1;
    finer.solve.minmax.wavefront_samples = 2 * fine.solve.minmax.wavefront_samples;
    const ResidualReport r2 = markov_residual(fp, cosd, 0.0, 0.5, 1.0, g, finer);
    o.expect(r0.residual <= 5e-3, "free particle residual");
    o.expect(r1.residual <= r0.residual + 1e-4, "refinement within noise floor");
    o.expect(r2.residual <= r1.residual + 1e-4, "second refinement within noise floor");

    const DatumSpec d2 = DatumSpec::separable(cosd, cosd);
    const ResidualReport s = markov_residual(saddle(), d2, 0.0, 0.3, 0.6, SpaceGrid::torus(32, 2));
    o.expect(s.residual <= 5e-3, "separable residual");
    o.detail << "free particle " << r0.residual << " -> " << r1.residual << " -> " << r2.residual << " (N " << N0
             << " -> " << fine.solve.gf.N << " -> " << finer.solve.gf.N << "), separable " << s.residual;
}

void separable_formula(Outcome& o)
{
    const double t = 0.5;
    const HamiltonianSpec h = saddle();
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const DatumSpec d = DatumSpec::separable(cosd, cosd);
    const SpaceGrid g = SpaceGrid::torus(10, 2);
    const SolutionField u = solve_field(h, d, g, {t});
    const SpaceGrid line = SpaceGrid::torus(10);
    const SolutionField a = solve_field(HamiltonianSpec::free_particle(), cosd, line, {t});
    const SolutionField b = solve_field(HamiltonianSpec::quadratic(mat1(-1.0)), cosd, line, {t});
    const BrokenGF gf = build_broken_gf(h, d, t);
    double parts = 0.0;
    double oracle = 0.0;
    double hopf = 0.0;
    int points = 0;
    for (std::size_t i = 0; i < 10; i += 2) {
        for (std::size_t j = 0; j < 10; j += 2) {
            const double v = u.values[0][g.flat_index(i, j)];
            parts = std::max(parts, std::abs(v - a.values[0][i] - b.values[0][j]));
            const double x1 = line.point(i)[0];
            const double x2 = line.point(j)[0];
            oracle = std::max(oracle, std::abs(v - hopf_lax_oracle(x1, t, 1.0) - hopf_lax_oracle(x2, t, -1.0)));
            const HopfBounds hb = hopf_bounds(gf, vec2(x1, x2));
            hopf = std::max({hopf, std::abs(v - hb.lower), std::abs(v - hb.upper)});
            ++points;
        }
    }
    o.expect(points == 25, "25 points");
    o.expect(parts <= 1e-6, "sum of 1-D parts");
    o.expect(oracle <= 1e-6, "brute-force min/max oracle");
    o.expect(hopf <= 2.0 * kTolMinmax, "Hopf bounds");
    o.detail << "25 pts: |u - parts| " << parts << ", |u - oracle| " << oracle << ", |u - hopf| " << hopf;
}

DatumSpec random_datum(std::mt19937_64& rng)
{
    static const std::vector<std::string> names = {"cos", "sin", "shifted-absolute-sine", "piecewise-linear",
                                                   "constant"};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BuiltinParams p;
    p.amplitude = 0.3 + 1.2 * u(rng);
    p.phase = kTwoPi * u(rng);
    p.shift = kTwoPi * u(rng);
    p.offset = u(rng) - 0.5;
    p.value = 2.0 * u(rng) - 1.0;
    return DatumSpec::builtin(names[std::size_t(u(rng) * double(names.size())) % names.size()], p);
}

void nonexpansive(Outcome& o)
{
    std::mt19937_64 rng(20240601);
    const SpaceGrid g = SpaceGrid::torus(64);
    const HamiltonianSpec h = bumped();
    double min_slack = 1e300;
    for (int k = 0; k < 20; ++k) {
        const DatumSpec d1 = random_datum(rng);
        const DatumSpec d2 = random_datum(rng);
        const ResidualReport r = nonexpansive_audit(h, d1, d2, 0.5, g);
        min_slack = std::min(min_slack, r.bound - r.residual);
        o.expect(r.pass, "pair " + std::to_string(k) + " " + d1.name() + " / " + d2.name());
    }
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const std::vector<std::pair<HamiltonianSpec, HamiltonianSpec>> pairs = {
        {HamiltonianSpec::free_particle(), HamiltonianSpec::quadratic(mat1(1.0), Perturbation::none(), 0.2)},
        {HamiltonianSpec::free_particle(), bumped(0.1)},
        {bumped(0.05), bumped(0.1)},
        {HamiltonianSpec::free_particle(), HamiltonianSpec::free_particle(1.2)},
        {bumped(0.1), HamiltonianSpec::quadratic(mat1(1.0), Perturbation::cos_bump(0.1, 1.5, vec1(2.0)))},
    };
    double min_cont = 1e300;
    for (const auto& [h1, h2] : pairs) {
        const ResidualReport r = hamiltonian_continuity_audit(h1, h2, cosd, 0.5, g);
        min_cont = std::min(min_cont, r.bound - r.residual);
        o.expect(r.pass, "continuity " + h1.describe() + " / " + h2.describe());
    }
    o.detail << "20 pairs, min slack " << min_slack << "; 5 continuity pairs, min slack " << min_cont;
}

void gfqi_structure(Outcome& o)
{
    const RelReport a = rel_check(step_gf(HamiltonianSpec::free_particle(), 0.0, 0.125), 100, 3);
    o.expect(a.pass && a.tolerance == 1e-10, "analytic REL");
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const HamiltonianSpec h = bumped();
    const BrokenGF g = build_broken_gf(h, cosd, 0.5);
    auto shared = std::make_shared<const HamiltonianSpec>(h);
    double rel = 0.0;
    for (std::size_t j = 0; j + 1 < g.times().size(); ++j) {
        const RelReport r = rel_check(step_gf(shared, g.times()[j], g.times()[j + 1]), 100, 11 + j);
        rel = std::max({rel, r.max_fd_error, r.max_flow_error});
        o.expect(r.pass && r.max_fd_error <= 1e-4 && r.max_flow_error <= 1e-4, "numeric REL");
    }
    const QuadraticityAudit q = quadraticity_audit(g, 1.5 * h.support_radius(), 40);
    o.expect(q.pass, "quadraticity beyond the support");
    for (int N : {2, 5}) {
        const BrokenGF f = build_broken_gf(HamiltonianSpec::free_particle(), cosd, 0.5, N);
        o.expect(f.signature().n_plus == N + 1 && f.signature().n_minus == 0, "signature convex");
        const BrokenGF c = build_broken_gf(HamiltonianSpec::quadratic(mat1(-1.0)), cosd, 0.5, N);
        o.expect(c.signature().n_minus == N + 1 && c.signature().n_plus == 0, "signature concave");
    }
    const BrokenGF s = build_broken_gf(saddle(), DatumSpec::builtin("cos", {}, 2), 0.5, 3);
    o.expect(s.signature().n_plus == 4 && s.signature().n_minus == 4, "signature mixed");

    const BrokenGF fine = build_broken_gf(h, cosd, 0.5, 2 * g.N() + 1);
    double inv = 0.0;
    for (double x : {0.0, 0.7, 1.9, 3.1, 4.4, 5.8}) {
        inv = std::max(inv, std::abs(minmax_value(g, vec1(x)) - minmax_value(fine, vec1(x))));
    }
    o.expect(inv <= 1e-4, "N vs 2N+1");
    o.detail << "REL numeric " << rel << ", quadraticity dev " << q.max_deviation << ", N " << g.N() << " vs "
             << fine.N() << ": " << inv;
}

void c0_extension(Outcome& o)
{
    const SpaceGrid g = SpaceGrid::torus(64);
    const HamiltonianSpec fp = HamiltonianSpec::free_particle();
    const DatumSpec d = DatumSpec::builtin("shifted-absolute-sine");
    const C0Result a = c0_solve(fp, d, {0.2, 0.1, 0.05, 0.025}, g, {0.5});
    for (std::size_t n = 0; n < a.solution_distances.size(); ++n) {
        o.expect(a.solution_distances[n] <= a.datum_distances[n] + 5e-3, "bounded by datum distance");
    }
    o.expect(a.decreasing, "decreasing");
    const C0Result b = c0_solve(fp, d, {0.16, 0.08, 0.04, 0.02}, g, {0.5});
    const ResidualReport agree = schedule_agreement(a, b, 5e-3);
    o.expect(agree.pass, "schedule agreement");
    o.detail << "distances";
    for (double v : a.solution_distances) {
        o.detail << " " << v;
    }
    o.detail << "; schedules differ by " << agree.residual << " <= " << agree.bound;
}

void properties(Outcome& o)
{
    const DatumSpec cosd = DatumSpec::builtin("cos");
    const SpaceGrid g = SpaceGrid::torus(64);
    // Additive equivariance.
    double equi = 0.0;
    for (const HamiltonianSpec& h : {HamiltonianSpec::free_particle(), bumped(), HamiltonianSpec::quadratic(mat1(-1.0))}) {
        const SolutionField u = solve_field(h, cosd, g, {0.5});
        const SolutionField v = solve_field(h, cosd.shifted(0.375), g, {0.5});
        for (std::size_t i = 0; i < g.size(); ++i) {
            equi = std::max(equi, std::abs(v.values[0][i] - u.values[0][i] - 0.375));
        }
    }
    o.expect(equi <= 1e-12, "additive equivariance");

    // Identity propagator.
    const std::vector<double> f = DatumSpec::builtin("shifted-absolute-sine").sample(g);
    Propagator pr{std::make_shared<const HamiltonianSpec>(bumped()), 0.4, 0.4, {}};
    o.expect(sup_norm(propagate(pr, g, f), f) <= 1e-10, "identity on grid data");
    o.expect(sup_norm(propagate(pr, g, cosd), cosd.sample(g)) <= 1e-10, "identity on a datum");

    // Weak duality on every Hopf evaluation.
    int evaluations = 0;
    double duality = -1e300;
    const SpaceGrid g2 = SpaceGrid::torus(8, 2);
    for (const DatumSpec& d : {DatumSpec::builtin("cos", {}, 2), DatumSpec::separable(cosd, DatumSpec::builtin("sin"))}) {
        for (double t : {0.25, 0.5, 1.0}) {
            const BrokenGF gf = build_broken_gf(saddle(), d, t);
            for (const Vec& x : g2.points()) {
                const HopfBounds b = hopf_bounds(gf, x);
                duality = std::max(duality, b.lower - b.upper);
                ++evaluations;
            }
        }
    }
    o.expect(duality <= 0.0, "lower <= upper");

    // LF monotonicity.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    LFConfig c;
    c.grid = g;
    c.theta = {2.5};
    c.dt = 0.01;
    bool ordered = true;
    for (int k = 0; k < 10; ++k) {
        const double amp = u01(rng);
        const double phase = kTwoPi * u01(rng);
        const double lift = 0.3 * u01(rng);
        const double centre = kTwoPi * u01(rng);
        std::vector<double> a(g.size());
        std::vector<double> b(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.point(i)[0];
            a[i] = amp * std::sin(x + phase) + 0.2 * std::cos(2.0 * x);
            b[i] = a[i] + lift * std::exp(std::cos(x - centre) - 1.0);
        }
        const SolutionField ua = lf_solve(bumped(), a, c, {0.2, 0.5});
        const SolutionField ub = lf_solve(bumped(), b, c, {0.2, 0.5});
        for (std::size_t s = 0; s < 2; ++s) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                ordered = ordered && ua.values[s][i] <= ub.values[s][i];
            }
        }
    }
    o.expect(ordered, "LF monotone");

    // Byte-identical artifacts.
    namespace fs = std::filesystem;
    const std::string cfg = R"({"experiment": "compare", "hamiltonian": {"type": "free_particle"},
        "datum": {"builtin": "cos"}, "grid": {"type": "torus", "n": 64}, "times": [0.25, 0.5]})";
    std::string bytes[2];
    for (int k = 0; k < 2; ++k) {
        RunOverrides ov;
        ov.out_dir = (fs::temp_directory_path() / ("hjmm_acceptance_" + std::to_string(k))).string();
        ov.seed = 17;
        const RunOutcome r = run_config_text(cfg, "repro", ov);
        std::ifstream is(r.field_path, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        bytes[k] = ss.str();
    }
    o.expect(!bytes[0].empty() && bytes[0] == bytes[1], "byte-identical CSV");
    o.detail << "equivariance " << equi << ", " << evaluations << " Hopf evaluations max(lower-upper) " << duality
             << ", LF ordered " << (ordered ? "yes" : "no") << ", CSV " << bytes[0].size() << " bytes identical";
}

}  // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {"1 splitting example", 60, splitting},
        {"2 convex coincidence", 120, convex_coincidence},
        {"3 Markov property", 360, markov},
        {"4 separable formula", 120, separable_formula},
        {"5 nonexpansiveness", 180, nonexpansive},
        {"6 GFQI structure", 120, gfqi_structure},
        {"7 C0 extension", 180, c0_extension},
        {"8 property suite", 120, properties},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " error: " << e.what();
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (s > c.budget_s) {
            o.pass = false;
            o.detail << " over the " << c.budget_s << " s budget";
        }
        std::printf("%s  %-22s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.name, s, o.detail.str().c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed;
}
