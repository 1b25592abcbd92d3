#include "hjmm/hjmm.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "hjmm/errors.hpp"
#include "hjmm/experiment.hpp"
#include "hjmm/minmax.hpp"
#include "hjmm/viscosity.hpp"

struct hjmm_hamiltonian {
    hjmm::HamiltonianSpec h;
};
struct hjmm_datum {
    hjmm::DatumSpec d;
};
struct hjmm_grid {
    hjmm::SpaceGrid g;
};
struct hjmm_field {
    hjmm::SolutionField f;
};
struct hjmm_run {
    hjmm::RunOutcome r;
};

namespace {

thread_local std::string g_last_error;

hjmm_status status_of(hjmm::ErrorKind k)
{
    switch (k) {
    case hjmm::ErrorKind::Contract: return HJMM_ERR_CONTRACT;
    case hjmm::ErrorKind::Domain: return HJMM_ERR_DOMAIN;
    case hjmm::ErrorKind::IntegrationBlowup: return HJMM_ERR_INTEGRATION_BLOWUP;
    case hjmm::ErrorKind::NoTwist: return HJMM_ERR_NO_TWIST;
    case hjmm::ErrorKind::Construction: return HJMM_ERR_CONSTRUCTION;
    case hjmm::ErrorKind::WindowTooSmall: return HJMM_ERR_WINDOW_TOO_SMALL;
    case hjmm::ErrorKind::Config: return HJMM_ERR_CONFIG;
    case hjmm::ErrorKind::Cfl: return HJMM_ERR_CFL;
    case hjmm::ErrorKind::Solver: return HJMM_ERR_SOLVER;
    }
    return HJMM_ERR_INTERNAL;
}

template <class F>
hjmm_status guard(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return HJMM_OK;
    } catch (const hjmm::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HJMM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return HJMM_ERR_INTERNAL;
    }
}

hjmm_status null_arg(const char* what)
{
    g_last_error = std::string("null argument: ") + what;
    return HJMM_ERR_NULL_ARGUMENT;
}

char* dup(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) {
        std::memcpy(p, s.c_str(), s.size() + 1);
    }
    return p;
}

}  // namespace

extern "C" {

const char* hjmm_version(void) { return "1.0.0"; }

const char* hjmm_status_string(hjmm_status s)
{
    switch (s) {
    case HJMM_OK: return "ok";
    case HJMM_ERR_CONTRACT: return "contract";
    case HJMM_ERR_DOMAIN: return "domain";
    case HJMM_ERR_INTEGRATION_BLOWUP: return "integration-blowup";
    case HJMM_ERR_NO_TWIST: return "no-twist";
    case HJMM_ERR_CONSTRUCTION: return "construction";
    case HJMM_ERR_WINDOW_TOO_SMALL: return "window-too-small";
    case HJMM_ERR_CONFIG: return "config";
    case HJMM_ERR_CFL: return "cfl";
    case HJMM_ERR_SOLVER: return "solver";
    case HJMM_ERR_NULL_ARGUMENT: return "null-argument";
    case HJMM_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* hjmm_last_error(void) { return g_last_error.c_str(); }

hjmm_status hjmm_hamiltonian_from_json(const char* json, hjmm_hamiltonian** out)
{
    if (!json || !out) {
        return null_arg("json/out");
    }
    return guard([&] { *out = new hjmm_hamiltonian{hjmm::hamiltonian_from_json(json)}; });
}

hjmm_status hjmm_hamiltonian_free_particle(double a, hjmm_hamiltonian** out)
{
    if (!out) {
        return null_arg("out");
    }
    return guard([&] { *out = new hjmm_hamiltonian{hjmm::HamiltonianSpec::free_particle(a)}; });
}

int hjmm_hamiltonian_dim(const hjmm_hamiltonian* h) { return h ? h->h.dim() : 0; }
void hjmm_hamiltonian_free(hjmm_hamiltonian* h) { delete h; }

hjmm_status hjmm_datum_from_json(const char* json, hjmm_datum** out)
{
    if (!json || !out) {
        return null_arg("json/out");
    }
    return guard([&] { *out = new hjmm_datum{hjmm::datum_from_json(json)}; });
}

hjmm_status hjmm_datum_builtin(const char* name, hjmm_datum** out)
{
    if (!name || !out) {
        return null_arg("name/out");
    }
    return guard([&] { *out = new hjmm_datum{hjmm::DatumSpec::builtin(name)}; });
}

hjmm_status hjmm_datum_value(const hjmm_datum* d, const double* x, double* out)
{
    if (!d || !x || !out) {
        return null_arg("datum/x/out");
    }
    return guard([&] {
        hjmm::Vec v(d->d.dim());
        for (int i = 0; i < d->d.dim(); ++i) {
            v[i] = x[i];
        }
        *out = d->d.value(v);
    });
}

void hjmm_datum_free(hjmm_datum* d) { delete d; }

hjmm_status hjmm_grid_torus(size_t n, int dim, hjmm_grid** out)
{
    if (!out) {
        return null_arg("out");
    }
    return guard([&] {
        hjmm::require(n >= 2 && (dim == 1 || dim == 2), "torus grid needs n >= 2 and dim 1 or 2");
        *out = new hjmm_grid{hjmm::SpaceGrid::torus(n, dim)};
    });
}

hjmm_status hjmm_grid_line(double lo, double hi, size_t n, hjmm_grid** out)
{
    if (!out) {
        return null_arg("out");
    }
    return guard([&] {
        hjmm::require(n >= 2 && hi > lo, "line grid needs n >= 2 and hi > lo");
        *out = new hjmm_grid{hjmm::SpaceGrid::line(lo, hi, n)};
    });
}

size_t hjmm_grid_size(const hjmm_grid* g) { return g ? g->g.size() : 0; }
void hjmm_grid_free(hjmm_grid* g) { delete g; }

hjmm_status hjmm_solve(const hjmm_hamiltonian* h, const hjmm_datum* d, const hjmm_grid* g, const double* times,
                       size_t n_times, int threads, hjmm_field** out)
{
    if (!h || !d || !g || !out || (!times && n_times > 0)) {
        return null_arg("hamiltonian/datum/grid/times/out");
    }
    return guard([&] {
        hjmm::SolveOptions o;
        o.threads = threads > 0 ? threads : 1;
        *out = new hjmm_field{hjmm::solve_field(h->h, d->d, g->g, {times, times + n_times}, o)};
    });
}

hjmm_status hjmm_solve_viscosity(const hjmm_hamiltonian* h, const hjmm_datum* d, const hjmm_grid* g,
                                 const double* times, size_t n_times, hjmm_field** out)
{
    if (!h || !d || !g || !out || (!times && n_times > 0)) {
        return null_arg("hamiltonian/datum/grid/times/out");
    }
    return guard([&] {
        hjmm::LFConfig c;
        c.grid = g->g;
        *out = new hjmm_field{hjmm::lf_solve(h->h, d->d, c, {times, times + n_times})};
    });
}

size_t hjmm_field_times(const hjmm_field* f) { return f ? f->f.times.size() : 0; }

hjmm_status hjmm_field_slice(const hjmm_field* f, size_t k, const double** values, size_t* n)
{
    if (!f || !values || !n) {
        return null_arg("field/values/n");
    }
    return guard([&] {
        hjmm::require(k < f->f.values.size(), "slice index out of range");
        *values = f->f.values[k].data();
        *n = f->f.values[k].size();
    });
}

hjmm_status hjmm_field_csv(const hjmm_field* f, char** out)
{
    if (!f || !out) {
        return null_arg("field/out");
    }
    return guard([&] {
        std::ostringstream os;
        hjmm::write_csv(os, f->f);
        *out = dup(os.str());
    });
}

void hjmm_field_free(hjmm_field* f) { delete f; }

size_t hjmm_experiment_count(void) { return hjmm::experiment_catalog().size(); }

hjmm_status hjmm_experiment_info(size_t i, const char** tag, const char** description)
{
    if (!tag || !description) {
        return null_arg("tag/description");
    }
    return guard([&] {
        const auto& c = hjmm::experiment_catalog();
        hjmm::require(i < c.size(), "experiment index out of range");
        *tag = c[i].tag.c_str();
        *description = c[i].description.c_str();
    });
}

hjmm_status hjmm_catalog_json(char** out)
{
    if (!out) {
        return null_arg("out");
    }
    return guard([&] { *out = dup(hjmm::catalog_json()); });
}

hjmm_status hjmm_run_config(const char* path, const char* out_dir, const uint64_t* seed, int threads, hjmm_run** out)
{
    if (!path || !out) {
        return null_arg("path/out");
    }
    return guard([&] {
        hjmm::RunOverrides o;
        if (out_dir) {
            o.out_dir = out_dir;
        }
        if (seed) {
            o.seed = *seed;
        }
        if (threads > 0) {
            o.threads = threads;
        }
        *out = new hjmm_run{hjmm::run_config_file(path, o)};
    });
}

int hjmm_run_exit_code(const hjmm_run* r) { return r ? r->r.exit_code : 1; }
const char* hjmm_run_report(const hjmm_run* r) { return r ? r->r.report.c_str() : ""; }
const char* hjmm_run_field_path(const hjmm_run* r) { return r ? r->r.field_path.c_str() : ""; }
const char* hjmm_run_report_path(const hjmm_run* r) { return r ? r->r.report_path.c_str() : ""; }
void hjmm_run_free(hjmm_run* r) { delete r; }

void hjmm_string_free(char* s) { std::free(s); }

}  // extern "C"
