/* C interface to the hjmm solver library. All handles are opaque; every call
 * that can fail returns an hjmm_status and leaves a message for
 * hjmm_last_error() on the calling thread. */
#ifndef HJMM_H
#define HJMM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HJMM_API __declspec(dllexport)
#else
#define HJMM_API __attribute__((visibility("default")))
#endif

typedef enum hjmm_status {
    HJMM_OK = 0,
    HJMM_ERR_CONTRACT = 1,
    HJMM_ERR_DOMAIN = 2,
    HJMM_ERR_INTEGRATION_BLOWUP = 3,
    HJMM_ERR_NO_TWIST = 4,
    HJMM_ERR_CONSTRUCTION = 5,
    HJMM_ERR_WINDOW_TOO_SMALL = 6,
    HJMM_ERR_CONFIG = 7,
    HJMM_ERR_CFL = 8,
    HJMM_ERR_SOLVER = 9,
    HJMM_ERR_NULL_ARGUMENT = 10,
    HJMM_ERR_INTERNAL = 11
} hjmm_status;

typedef struct hjmm_hamiltonian hjmm_hamiltonian;
typedef struct hjmm_datum hjmm_datum;
typedef struct hjmm_grid hjmm_grid;
typedef struct hjmm_field hjmm_field;
typedef struct hjmm_run hjmm_run;

HJMM_API const char* hjmm_version(void);
HJMM_API const char* hjmm_status_string(hjmm_status s);
/* Message of the last failed call on this thread; empty after success. */
HJMM_API const char* hjmm_last_error(void);

/* Hamiltonian and datum from the JSON objects used in run configs. */
HJMM_API hjmm_status hjmm_hamiltonian_from_json(const char* json, hjmm_hamiltonian** out);
HJMM_API hjmm_status hjmm_hamiltonian_free_particle(double a, hjmm_hamiltonian** out);
HJMM_API int hjmm_hamiltonian_dim(const hjmm_hamiltonian* h);
HJMM_API void hjmm_hamiltonian_free(hjmm_hamiltonian* h);

HJMM_API hjmm_status hjmm_datum_from_json(const char* json, hjmm_datum** out);
HJMM_API hjmm_status hjmm_datum_builtin(const char* name, hjmm_datum** out);
HJMM_API hjmm_status hjmm_datum_value(const hjmm_datum* d, const double* x, double* out);
HJMM_API void hjmm_datum_free(hjmm_datum* d);

HJMM_API hjmm_status hjmm_grid_torus(size_t n, int dim, hjmm_grid** out);
HJMM_API hjmm_status hjmm_grid_line(double lo, double hi, size_t n, hjmm_grid** out);
HJMM_API size_t hjmm_grid_size(const hjmm_grid* g);
HJMM_API void hjmm_grid_free(hjmm_grid* g);

/* Minmax field at ascending times from t = 0; default solver settings. */
HJMM_API hjmm_status hjmm_solve(const hjmm_hamiltonian* h, const hjmm_datum* d, const hjmm_grid* g,
                                const double* times, size_t n_times, int threads, hjmm_field** out);
/* Lax-Friedrichs field with the default adaptive step. */
HJMM_API hjmm_status hjmm_solve_viscosity(const hjmm_hamiltonian* h, const hjmm_datum* d, const hjmm_grid* g,
                                          const double* times, size_t n_times, hjmm_field** out);
HJMM_API size_t hjmm_field_times(const hjmm_field* f);
/* Borrowed pointer to grid-size values of slice k; valid until hjmm_field_free. */
HJMM_API hjmm_status hjmm_field_slice(const hjmm_field* f, size_t k, const double** values, size_t* n);
/* CSV text (t,x[,x2],u,method); release with hjmm_string_free. */
HJMM_API hjmm_status hjmm_field_csv(const hjmm_field* f, char** out);
HJMM_API void hjmm_field_free(hjmm_field* f);

/* Experiment catalog as JSON; release with hjmm_string_free. */
HJMM_API size_t hjmm_experiment_count(void);
HJMM_API hjmm_status hjmm_experiment_info(size_t i, const char** tag, const char** description);
HJMM_API hjmm_status hjmm_catalog_json(char** out);

/* Runs one config file. seed may be NULL and threads <= 0 to keep the config
 * values. Config and solver failures return an error status; a completed run
 * reports its own exit code (0 pass, 2 over tolerance). */
HJMM_API hjmm_status hjmm_run_config(const char* path, const char* out_dir, const uint64_t* seed, int threads,
                                     hjmm_run** out);
HJMM_API int hjmm_run_exit_code(const hjmm_run* r);
HJMM_API const char* hjmm_run_report(const hjmm_run* r);
HJMM_API const char* hjmm_run_field_path(const hjmm_run* r);
HJMM_API const char* hjmm_run_report_path(const hjmm_run* r);
HJMM_API void hjmm_run_free(hjmm_run* r);

HJMM_API void hjmm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
