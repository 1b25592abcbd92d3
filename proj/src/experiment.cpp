#include "hjmm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "hjmm/errors.hpp"
#include "hjmm/minmax.hpp"
#include "hjmm/semigroup.hpp"
#include "hjmm/viscosity.hpp"
#include "json.hpp"

namespace hjmm {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::Config, "config: " + msg); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!j.is_object()) {
        config_error(where + " must be an object");
    }
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!ok.count(k)) {
            config_error("unknown key '" + k + "' in " + where);
        }
    }
}

double num(const json& j, const char* key, double fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        config_error(std::string("'") + key + "' must be a number");
    }
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) {
        config_error(std::string("'") + key + "' must be finite");
    }
    return v;
}

int integer(const json& j, const char* key, int fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number_integer()) {
        config_error(std::string("'") + key + "' must be an integer");
    }
    return j.at(key).get<int>();
}

std::vector<double> numbers(const json& j, const char* key, bool needed)
{
    if (!j.contains(key)) {
        if (needed) {
            config_error(std::string("missing '") + key + "'");
        }
        return {};
    }
    const json& a = j.at(key);
    if (!a.is_array()) {
        config_error(std::string("'") + key + "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : a) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            config_error(std::string("'") + key + "' must be an array of finite numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

const json& section(const json& j, const char* key)
{
    if (!j.contains(key)) {
        config_error(std::string("missing '") + key + "'");
    }
    return j.at(key);
}

Mat matrix(const json& j)
{
    if (j.is_number()) {
        return mat1(j.get<double>());
    }
    if (!j.is_array() || j.empty() || j.size() > 2) {
        config_error("'A' must be a number or a 1x1 / 2x2 array");
    }
    const std::size_t n = j.size();
    Mat A = Mat::Zero(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t r = 0; r < n; ++r) {
        if (!j[r].is_array() || j[r].size() != n) {
            config_error("'A' must be square");
        }
        for (std::size_t c = 0; c < n; ++c) {
            if (!j[r][c].is_number()) {
                config_error("'A' entries must be numbers");
            }
            A(Eigen::Index(r), Eigen::Index(c)) = j[r][c].get<double>();
        }
    }
    return A;
}

HamiltonianSpec hamiltonian(const json& j)
{
    allow_keys(j, "hamiltonian",
               {"type", "a", "A", "offset", "perturbation", "convex", "concave", "window", "horizon"});
    if (!j.contains("type") || !j.at("type").is_string()) {
        config_error("hamiltonian needs a string 'type'");
    }
    const std::string type = j.at("type").get<std::string>();
    const double horizon = num(j, "horizon", 10.0);
    if (type == "free_particle") {
        return HamiltonianSpec::free_particle(num(j, "a", 1.0), horizon);
    }
    if (type == "quadratic") {
        const Mat A = matrix(section(j, "A"));
        Perturbation V = Perturbation::none();
        if (j.contains("perturbation")) {
            const json& p = j.at("perturbation");
            allow_keys(p, "perturbation", {"type", "amplitude", "radius", "wave"});
            if (p.value("type", std::string()) != "cos_bump") {
                config_error("perturbation type must be cos_bump");
            }
            std::vector<double> w = numbers(p, "wave", false);
            if (w.empty()) {
                w.assign(std::size_t(A.rows()), 1.0);
            }
            if (w.size() != std::size_t(A.rows())) {
                config_error("perturbation wave has the wrong dimension");
            }
            Vec wave = Vec::Zero(Eigen::Index(w.size()));
            for (std::size_t i = 0; i < w.size(); ++i) {
                wave[Eigen::Index(i)] = w[i];
            }
            V = Perturbation::cos_bump(num(p, "amplitude", 0.05), num(p, "radius", 2.0), wave);
        }
        return HamiltonianSpec::quadratic(A, V, num(j, "offset", 0.0), horizon);
    }
    if (type == "separable") {
        return HamiltonianSpec::separable(hamiltonian(section(j, "convex")), hamiltonian(section(j, "concave")),
                                          horizon);
    }
    if (type == "cubic_example") {
        return HamiltonianSpec::cubic_example(num(j, "window", 3.0), horizon);
    }
    config_error("unknown hamiltonian type '" + type + "'");
}

DatumSpec datum(const json& j)
{
    if (j.is_object() && j.contains("separable")) {
        allow_keys(j, "datum", {"separable"});
        const json& parts = j.at("separable");
        if (!parts.is_array() || parts.size() != 2) {
            config_error("separable datum needs two parts");
        }
        return DatumSpec::separable(datum(parts[0]), datum(parts[1]));
    }
    allow_keys(j, "datum",
               {"builtin", "dim", "amplitude", "phase", "offset", "shift", "value", "wave", "knots",
                "joint_half_width", "window"});
    if (!j.contains("builtin") || !j.at("builtin").is_string()) {
        config_error("datum needs a string 'builtin' or a 'separable' pair");
    }
    BuiltinParams p;
    p.amplitude = num(j, "amplitude", p.amplitude);
    p.phase = num(j, "phase", p.phase);
    p.offset = num(j, "offset", p.offset);
    p.shift = num(j, "shift", p.shift);
    p.value = num(j, "value", p.value);
    p.wave = numbers(j, "wave", false);
    p.joint_half_width = num(j, "joint_half_width", p.joint_half_width);
    p.window = num(j, "window", p.window);
    if (j.contains("knots")) {
        for (const auto& k : j.at("knots")) {
            if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
                config_error("knots must be [x, y] pairs");
            }
            p.knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
    }
    return DatumSpec::builtin(j.at("builtin").get<std::string>(), p, integer(j, "dim", 1));
}

SpaceGrid grid(const json& j)
{
    allow_keys(j, "grid", {"type", "n", "dim", "period", "lo", "hi"});
    const std::string type = j.value("type", std::string("torus"));
    const int n = integer(j, "n", 64);
    if (n < 2) {
        config_error("grid needs n >= 2");
    }
    if (type == "torus") {
        const int dim = integer(j, "dim", 1);
        if (dim != 1 && dim != 2) {
            config_error("grid dim must be 1 or 2");
        }
        return SpaceGrid::torus(std::size_t(n), dim, num(j, "period", kTwoPi));
    }
    if (type == "line") {
        const double lo = num(j, "lo", -1.0);
        const double hi = num(j, "hi", 1.0);
        if (!(hi > lo)) {
            config_error("line grid needs hi > lo");
        }
        return SpaceGrid::line(lo, hi, std::size_t(n));
    }
    config_error("unknown grid type '" + type + "'");
}

SolveOptions solver(const json& root, int threads)
{
    SolveOptions s;
    s.threads = threads;
    if (!root.contains("solver")) {
        return s;
    }
    const json& j = root.at("solver");
    allow_keys(j, "solver", {"N", "optimizer_grid", "wavefront_samples", "polish_starts", "search"});
    s.gf.N = integer(j, "N", 0);
    s.minmax.optimizer_grid = integer(j, "optimizer_grid", s.minmax.optimizer_grid);
    s.minmax.wavefront_samples = integer(j, "wavefront_samples", s.minmax.wavefront_samples);
    s.minmax.polish_starts = integer(j, "polish_starts", s.minmax.polish_starts);
    if (s.gf.N < 0 || s.minmax.optimizer_grid < 3 || s.minmax.wavefront_samples < 16) {
        config_error("solver needs N >= 0, optimizer_grid >= 3, wavefront_samples >= 16");
    }
    const std::string search = j.value("search", std::string("auto"));
    if (search == "auto") {
        s.minmax.search = Search::Auto;
    } else if (search == "grid") {
        s.minmax.search = Search::Grid;
    } else if (search == "wavefront") {
        s.minmax.search = Search::Wavefront;
    } else {
        config_error("solver search must be auto, grid or wavefront");
    }
    return s;
}

LFConfig lf_config(const json& root, const SpaceGrid& g, int threads)
{
    LFConfig c;
    c.grid = g;
    c.threads = threads;
    if (root.contains("lf")) {
        const json& j = root.at("lf");
        allow_keys(j, "lf", {"dt", "theta", "cfl", "theta_safety"});
        c.dt = num(j, "dt", 0.0);
        c.theta = numbers(j, "theta", false);
        c.cfl = num(j, "cfl", c.cfl);
        c.theta_safety = num(j, "theta_safety", c.theta_safety);
    }
    return c;
}

void check_instants(const std::vector<double>& ts, const HamiltonianSpec& h, const char* what)
{
    for (double t : ts) {
        if (t < 0.0 || t > h.horizon()) {
            std::ostringstream os;
            os << what << " " << t << " lies outside [0, " << h.horizon() << "]";
            config_error(os.str());
        }
    }
}

void check_dims(const HamiltonianSpec& h, const DatumSpec& d, const SpaceGrid& g)
{
    if (h.dim() != d.dim() || h.dim() != g.dim()) {
        config_error("hamiltonian, datum and grid dimensions differ");
    }
}

json vec_json(const Vec& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

json field_json(const SolutionField& f)
{
    json j;
    j["method"] = to_string(f.method);
    j["times"] = f.times;
    json m = json::object();
    for (const auto& [k, v] : f.metadata) {
        m[k] = v;
    }
    j["metadata"] = m;
    j["notes"] = f.notes;
    return j;
}

json residual_json(const ResidualReport& r)
{
    json j;
    j["experiment"] = r.experiment;
    j["instants"] = r.instants;
    j["residual"] = r.residual;
    j["bound"] = r.bound;
    j["tolerance"] = r.tolerance;
    j["slack"] = r.bound - r.residual;
    if (r.worst_x.size() > 0) {
        j["worst_x"] = vec_json(r.worst_x);
    }
    json d = json::object();
    for (const auto& [k, v] : r.details) {
        d[k] = v;
    }
    j["details"] = d;
    j["pass"] = r.pass;
    return j;
}

struct Context {
    json cfg;
    std::string tag;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct Produced {
    std::vector<SolutionField> fields;
    json report;
    bool pass = false;
};

SemigroupOptions semigroup_options(const Context& c, double tol)
{
    SemigroupOptions o;
    o.solve = solver(c.cfg, c.threads);
    o.tolerance = tol;
    o.c0_eps = num(c.cfg, "c0_eps", o.c0_eps);
    return o;
}

Produced run_solve(const Context& c)
{
    const HamiltonianSpec h = hamiltonian(section(c.cfg, "hamiltonian"));
    const DatumSpec d = datum(section(c.cfg, "datum"));
    const SpaceGrid g = grid(section(c.cfg, "grid"));
    check_dims(h, d, g);
    const std::vector<double> times = numbers(c.cfg, "times", true);
    check_instants(times, h, "time");
    Produced p;
    SolveOptions so = solver(c.cfg, c.threads);
    so.t0 = num(c.cfg, "t0", 0.0);
    p.fields.push_back(solve_field(h, d, g, times, so));
    const LipschitzAudit audit = lipschitz_audit(p.fields[0], h);
    p.report["hamiltonian"] = h.describe();
    p.report["datum"] = d.name();
    p.report["field"] = field_json(p.fields[0]);
    p.report["lipschitz_audit"] = {{"c_lip", audit.c_lip},
                                   {"sup_h", audit.sup_h},
                                   {"momentum_bound", audit.momentum_bound},
                                   {"pass", audit.pass}};
    p.pass = audit.pass;
    return p;
}

Produced run_compare(const Context& c)
{
    const HamiltonianSpec h = hamiltonian(section(c.cfg, "hamiltonian"));
    const DatumSpec d = datum(section(c.cfg, "datum"));
    const SpaceGrid g = grid(section(c.cfg, "grid"));
    check_dims(h, d, g);
    const std::vector<double> times = numbers(c.cfg, "times", true);
    check_instants(times, h, "time");
    const double tol = num(c.cfg, "tolerance", 0.05);
    Produced p;
    p.fields.push_back(solve_field(h, d, g, times, solver(c.cfg, c.threads)));
    p.fields.push_back(lf_solve(h, d, lf_config(c.cfg, g, c.threads), times));
    json gaps = json::array();
    double gap = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double e = sup_norm(p.fields[0].values[k], p.fields[1].values[k]);
        gaps.push_back({{"t", times[k]}, {"gap", e}});
        gap = std::max(gap, e);
    }
    p.report["hamiltonian"] = h.describe();
    p.report["datum"] = d.name();
    p.report["gaps"] = gaps;
    p.report["gap"] = gap;
    p.report["tolerance"] = tol;
    p.report["minmax"] = field_json(p.fields[0]);
    p.report["viscosity"] = field_json(p.fields[1]);
    p.pass = gap <= tol;
    return p;
}

Produced run_markov(const Context& c)
{
    const HamiltonianSpec h = hamiltonian(section(c.cfg, "hamiltonian"));
    const DatumSpec d = datum(section(c.cfg, "datum"));
    const SpaceGrid g = grid(section(c.cfg, "grid"));
    check_dims(h, d, g);
    const std::vector<double> inst = numbers(c.cfg, "instants", true);
    check_instants(inst, h, "instant");
    if (inst.size() < 3 || !std::is_sorted(inst.begin(), inst.end())) {
        config_error("markov needs at least three ascending instants");
    }
    const SemigroupOptions o = semigroup_options(c, num(c.cfg, "tolerance", 5e-3));
    Produced p;
    p.report["hamiltonian"] = h.describe();
    p.report["datum"] = d.name();
    if (inst.size() == 3) {
        const ResidualReport r = markov_residual(h, d, inst[0], inst[1], inst[2], g, o);
        p.report["residual"] = residual_json(r);
        p.pass = r.pass;
    } else {
        const ImplicationTable t = implication_table(h, d, inst, g, o);
        json hy = json::array();
        json mk = json::array();
        for (const auto& r : t.hysteresis) {
            hy.push_back(residual_json(r));
        }
        for (const auto& r : t.markov) {
            mk.push_back(residual_json(r));
        }
        p.report["hysteresis"] = hy;
        p.report["markov"] = mk;
        p.report["implication"] = {{"delta", t.delta},
                                   {"markov_max", t.markov_max},
                                   {"measured_constant", t.constant},
                                   {"assumed_constant", t.assumed_constant},
                                   {"premise", t.premise},
                                   {"conclusion", t.conclusion}};
        p.pass = t.markov_max <= o.tolerance;
    }
    SolveOptions so = o.solve;
    so.t0 = inst.front();
    p.fields.push_back(solve_field(h, c1_surrogate(d, o), g, {inst.begin() + 1, inst.end()}, so));
    return p;
}

Produced run_hysteresis(const Context& c)
{
    const HamiltonianSpec h = hamiltonian(section(c.cfg, "hamiltonian"));
    const DatumSpec d = datum(section(c.cfg, "datum"));
    const SpaceGrid g = grid(section(c.cfg, "grid"));
    check_dims(h, d, g);
    const std::vector<double> inst = numbers(c.cfg, "instants", true);
    check_instants(inst, h, "instant");
    if (inst.size() != 2) {
        config_error("hysteresis needs two instants");
    }
    const SemigroupOptions o = semigroup_options(c, num(c.cfg, "tolerance", 5e-3));
    const ResidualReport r = hysteresis_residual(h, d, inst[0], inst[1], g, o);
    Produced p;
    p.report["hamiltonian"] = h.describe();
    p.report["datum"] = d.name();
    p.report["residual"] = residual_json(r);
    p.pass = r.pass;
    SolveOptions so = o.solve;
    so.t0 = inst[0];
    p.fields.push_back(solve_field(h, c1_surrogate(d, o), g, {inst[1]}, so));
    return p;
}

Produced run_splitting(const Context& c)
{
    SplittingConfig s;
    s.threads = c.threads;
    if (c.cfg.contains("splitting")) {
        const json& j = c.cfg.at("splitting");
        allow_keys(j, "splitting", {"t", "cells", "window", "joint_half_width", "probe_dx"});
        s.t = num(j, "t", s.t);
        s.window = num(j, "window", s.window);
        s.joint_half_width = num(j, "joint_half_width", s.joint_half_width);
        s.probe_dx = num(j, "probe_dx", s.probe_dx);
        if (j.contains("cells")) {
            s.cells.clear();
            for (double v : numbers(j, "cells", true)) {
                if (v < 8 || v != std::floor(v)) {
                    config_error("splitting cells must be integers >= 8");
                }
                s.cells.push_back(std::size_t(v));
            }
        }
    }
    const SplittingReport r = splitting_report(s);
    Produced p;
    json levels = json::array();
    for (const auto& l : r.levels) {
        levels.push_back({{"cells", l.cells},
                          {"dx", l.dx},
                          {"lf_value", l.lf_value},
                          {"gap", l.gap},
                          {"scheme_error", l.scheme_error}});
    }
    p.report["t"] = r.t;
    p.report["minmax_value"] = r.minmax_value;
    p.report["probe_p"] = r.probe_p;
    p.report["probe_residual"] = r.probe_residual;
    p.report["probe_fails"] = r.probe_fails;
    p.report["levels"] = levels;
    p.report["lf_value"] = r.lf_value;
    p.report["gap"] = r.gap;
    p.report["scheme_error"] = r.scheme_error;
    p.report["gap_exceeds_error"] = r.gap_exceeds_error;
    p.report["gap_persists"] = r.gap_persists;
    p.report["lf_subsolution"] = r.lf_subsolution;
    p.report["lf_sub_worst"] = r.lf_sub_worst;
    // The experiment passes when it separates the two notions of solution.
    p.pass = r.probe_fails && r.gap_exceeds_error;
    const std::size_t n = std::size_t(std::lround(1.0 / s.probe_dx)) + 1;
    p.fields.push_back(example_field(SpaceGrid::line(-0.5, 0.5, n), {r.t}));
    return p;
}

Produced run_hopf(const Context& c)
{
    const HamiltonianSpec h = hamiltonian(section(c.cfg, "hamiltonian"));
    const DatumSpec d = datum(section(c.cfg, "datum"));
    const SpaceGrid g = grid(section(c.cfg, "grid"));
    check_dims(h, d, g);
    if (!std::holds_alternative<SeparableConvexConcave>(h.variant())) {
        config_error("hopf needs a separable hamiltonian");
    }
    const std::vector<double> times = numbers(c.cfg, "times", true);
    check_instants(times, h, "time");
    for (double t : times) {
        if (t <= 0.0) {
            config_error("hopf times must be positive");
        }
    }
    const SolveOptions so = solver(c.cfg, c.threads);
    Produced p;
    SolutionField value = solve_field(h, d, g, times, so);
    SolutionField bounds;
    bounds.grid = g;
    bounds.times = times;
    bounds.method = Method::Minmax;
    bounds.values.assign(times.size(), std::vector<double>(g.size()));
    bounds.upper = bounds.values;
    const std::vector<Vec> pts = g.points();
    double duality = -1e300;
    double equality = 0.0;
    double parts = 0.0;
    bool clamped = false;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const BrokenGF gf = build_broken_gf(h, d, 0.0, times[k], so.gf);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const HopfBounds b = hopf_bounds(gf, pts[i], so.minmax);
            bounds.values[k][i] = b.lower;
            (*bounds.upper)[k][i] = b.upper;
            clamped = clamped || b.clamped;
            duality = std::max(duality, b.lower - b.upper);
            if (d.is_separable()) {
                const double v = value.values[k][i];
                equality = std::max({equality, std::abs(v - b.lower), std::abs(v - b.upper)});
                const double sum = block_value(gf, 0, pts[i][0], so.minmax) + block_value(gf, 1, pts[i][1], so.minmax);
                parts = std::max(parts, std::abs(v - sum));
            }
        }
    }
    const bool separable = d.is_separable();
    p.report["hamiltonian"] = h.describe();
    p.report["datum"] = d.name();
    p.report["mode"] = separable ? "block-separable" : "bounds";
    p.report["weak_duality_worst"] = duality;  // max lower - upper, <= 0 when it holds
    p.report["weak_duality"] = duality <= 0.0;
    p.report["clamped"] = clamped;
    p.report["tol_minmax"] = kTolMinmax;
    if (separable) {
        p.report["bounds_equal_value"] = equality;
        p.report["parts_sum_deviation"] = parts;
    }
    p.report["field"] = field_json(value);
    p.pass = duality <= 0.0 && (!separable || (equality <= 2.0 * kTolMinmax && parts <= 1e-6));
    p.fields.push_back(std::move(value));
    p.fields.push_back(std::move(bounds));
    return p;
}

Produced run_c0(const Context& c)
{
    const HamiltonianSpec h = hamiltonian(section(c.cfg, "hamiltonian"));
    const DatumSpec d = datum(section(c.cfg, "datum"));
    const SpaceGrid g = grid(section(c.cfg, "grid"));
    check_dims(h, d, g);
    const std::vector<double> times = numbers(c.cfg, "times", true);
    check_instants(times, h, "time");
    const std::vector<double> schedule = numbers(c.cfg, "schedule", true);
    const std::vector<double> schedule2 = numbers(c.cfg, "schedule2", false);
    const SemigroupOptions o = semigroup_options(c, num(c.cfg, "tolerance", 5e-3));
    const C0Result a = c0_solve(h, d, schedule, g, times, o);
    Produced p;
    p.report["hamiltonian"] = h.describe();
    p.report["datum"] = d.name();
    p.report["schedule"] = schedule;
    p.report["solution_distances"] = a.solution_distances;
    p.report["datum_distances"] = a.datum_distances;
    p.report["bounded"] = a.bounded;
    p.report["decreasing"] = a.decreasing;
    p.report["cauchy"] = residual_json(a.report);
    p.pass = a.report.pass;
    if (!schedule2.empty()) {
        const C0Result b = c0_solve(h, d, schedule2, g, times, o);
        const ResidualReport agree = schedule_agreement(a, b, o.tolerance);
        p.report["schedule2"] = schedule2;
        p.report["agreement"] = residual_json(agree);
        p.pass = p.pass && agree.pass;
    }
    p.report["field"] = field_json(a.field);
    p.fields.push_back(a.field);
    return p;
}

struct Entry {
    ExperimentInfo info;
    Produced (*run)(const Context&);
};

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> e = {
        {{"solve", "minmax solution field on a grid at the given times", {"hamiltonian", "datum", "grid", "times"}},
         run_solve},
        {{"compare", "minmax against Lax-Friedrichs, sup gap per time", {"hamiltonian", "datum", "grid", "times"}},
         run_compare},
        {{"markov", "composition residual over ordered instants (table when more than three)",
          {"hamiltonian", "datum", "grid", "instants"}},
         run_markov},
        {{"hysteresis", "forward then backward propagation against the datum",
          {"hamiltonian", "datum", "grid", "instants"}},
         run_hysteresis},
        {{"splitting", "cubic example: minmax value, subsolution probe, Lax-Friedrichs gap under refinement", {}},
         run_splitting},
        {{"hopf", "Hopf lower and upper bounds for a separable convex-concave Hamiltonian",
          {"hamiltonian", "datum", "grid", "times"}},
         run_hopf},
        {{"c0", "mollified approximating sequence for a C0 datum with Cauchy diagnostic",
          {"hamiltonian", "datum", "grid", "times", "schedule"}},
         run_c0},
    };
    return e;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    os << text;
    os.close();
    if (!os) {
        fail(ErrorKind::Config, "cannot write " + path.string());
    }
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog()
{
    static const std::vector<ExperimentInfo> c = [] {
        std::vector<ExperimentInfo> out;
        for (const auto& e : entries()) {
            out.push_back(e.info);
        }
        return out;
    }();
    return c;
}

std::string catalog_json()
{
    json a = json::array();
    for (const auto& e : experiment_catalog()) {
        a.push_back({{"tag", e.tag}, {"description", e.description}, {"required", e.required}});
    }
    return a.dump(2) + "\n";
}

RunOutcome run_config_text(const std::string& text, const std::string& default_tag, const RunOverrides& o)
{
    Context c;
    try {
        c.cfg = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error(std::string("parse error: ") + e.what());
    }
    allow_keys(c.cfg, "config",
               {"experiment", "tag", "description", "hamiltonian", "datum", "grid", "times", "t0", "instants",
                "solver", "lf", "tolerance", "seed", "threads", "schedule", "schedule2", "c0_eps", "splitting"});
    if (!c.cfg.contains("experiment") || !c.cfg.at("experiment").is_string()) {
        config_error("missing string 'experiment'");
    }
    const std::string experiment = c.cfg.at("experiment").get<std::string>();
    const auto it = std::find_if(entries().begin(), entries().end(),
                                 [&](const Entry& e) { return e.info.tag == experiment; });
    if (it == entries().end()) {
        config_error("unknown experiment '" + experiment + "'");
    }
    for (const auto& key : it->info.required) {
        if (!c.cfg.contains(key)) {
            config_error("experiment '" + experiment + "' needs '" + key + "'");
        }
    }
    c.tag = c.cfg.contains("tag") && c.cfg.at("tag").is_string() ? c.cfg.at("tag").get<std::string>() : default_tag;
    if (!std::regex_match(c.tag, std::regex("[A-Za-z0-9_.-]+"))) {
        config_error("tag must use letters, digits, '.', '_' or '-'");
    }
    if (c.cfg.contains("seed") && !c.cfg.at("seed").is_number_unsigned()) {
        config_error("'seed' must be a non-negative integer");
    }
    c.seed = o.seed ? *o.seed : c.cfg.value("seed", std::uint64_t(0));
    c.threads = o.threads ? *o.threads : integer(c.cfg, "threads", 1);
    if (c.threads < 1) {
        config_error("threads must be >= 1");
    }

    std::filesystem::path out(o.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (!std::filesystem::is_directory(out)) {
        config_error("output directory " + out.string() + " is not writable");
    }

    Produced p;
    try {
        p = it->run(c);
    } catch (const nlohmann::json::exception& e) {
        config_error(e.what());
    }

    json report;
    report["experiment"] = experiment;
    report["tag"] = c.tag;
    report["seed"] = c.seed;
    for (auto& [k, v] : p.report.items()) {
        report[k] = v;
    }
    report["pass"] = p.pass;

    RunOutcome r;
    r.tag = c.tag;
    r.report = report.dump(2) + "\n";
    r.field_path = (out / ("field_" + c.tag + ".csv")).string();
    r.report_path = (out / ("report_" + c.tag + ".json")).string();
    std::ostringstream csv;
    std::vector<const SolutionField*> fs;
    for (const auto& f : p.fields) {
        fs.push_back(&f);
    }
    write_csv(csv, fs);
    write_text(r.field_path, csv.str());
    write_text(r.report_path, r.report);
    r.exit_code = p.pass ? 0 : 2;
    return r;
}

HamiltonianSpec hamiltonian_from_json(const std::string& text)
{
    try {
        return hamiltonian(json::parse(text));
    } catch (const json::exception& e) {
        config_error(e.what());
    }
}

DatumSpec datum_from_json(const std::string& text)
{
    try {
        return datum(json::parse(text));
    } catch (const json::exception& e) {
        config_error(e.what());
    }
}

RunOutcome run_config_file(const std::string& path, const RunOverrides& o)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        config_error("cannot read " + path);
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return run_config_text(ss.str(), std::filesystem::path(path).stem().string(), o);
}

}  // namespace hjmm
