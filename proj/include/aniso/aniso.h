#ifndef ANISO_ANISO_H
#define ANISO_ANISO_H

/*
 * C interface to the anisotropic lattice walk library.
 *
 * Every fallible call returns an aniso_status. On failure the message of the
 * most recent error on the calling thread is available from aniso_last_error().
 * Handles are opaque and owned by the caller; release them with the matching
 * *_destroy function. Strings returned through char** must be released with
 * aniso_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ANISO_BUILDING_LIBRARY)
#    define ANISO_API __declspec(dllexport)
#  else
#    define ANISO_API __declspec(dllimport)
#  endif
#else
#  define ANISO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aniso_status {
  ANISO_OK = 0,
  ANISO_ERR_INVALID_ARGUMENT = 1,
  ANISO_ERR_INVALID_ENVIRONMENT = 2,
  ANISO_ERR_OUT_OF_RANGE = 3,
  ANISO_ERR_SINGULARITY = 4,
  ANISO_ERR_DEGENERATE = 5,
  ANISO_ERR_UNKNOWN_TEST = 6,
  ANISO_ERR_IO = 7,
  ANISO_ERR_PARSE = 8,
  ANISO_ERR_INTERNAL = 9
} aniso_status;

typedef enum aniso_method { ANISO_METHOD_DIRECT = 0, ANISO_METHOD_CONSTRUCTIVE = 1 } aniso_method;

typedef enum aniso_density_variant {
  ANISO_DENSITY_INVERSE = 0,   /* law of A^{-1}(t) */
  ANISO_DENSITY_COMPLEMENT = 1 /* law of t - A^{-1}(t) */
} aniso_density_variant;

typedef struct aniso_env aniso_env;
typedef struct aniso_path aniso_path;
typedef struct aniso_timechange aniso_timechange;

typedef struct aniso_cesaro {
  double gamma1;
  double gamma2;
  double tau;     /* valid when has_tau != 0 */
  int has_tau;
  int swapped;    /* input had gamma1 < gamma2 and was reflected */
} aniso_cesaro;

typedef struct aniso_decomposition {
  uint64_t H;
  uint64_t V;
  uint64_t H_star;
} aniso_decomposition;

typedef struct aniso_endpoint {
  int64_t c1;
  int64_t c2;
  uint64_t H;
  uint64_t V;
  uint64_t H_star;
} aniso_endpoint;

typedef struct aniso_density_row {
  double v;
  double pdf; /* +inf at the support endpoints */
  double cdf;
} aniso_density_row;

ANISO_API const char* aniso_version(void);
ANISO_API const char* aniso_last_error(void);
ANISO_API const char* aniso_status_name(aniso_status status);
ANISO_API void aniso_string_free(char* s);

/* Seed for stream `name`, replica `index`, derived from a master seed. */
ANISO_API uint64_t aniso_derive_seed(uint64_t master, const char* name, uint64_t index);

/* Environments. `text` is a preset name (simple, comb, hphc), inline JSON, or a path to a JSON file. */
ANISO_API aniso_status aniso_env_create(const char* text, aniso_env** out);
ANISO_API void aniso_env_destroy(aniso_env* env);
ANISO_API aniso_status aniso_env_probability(const aniso_env* env, int64_t level, double* out);
ANISO_API aniso_status aniso_env_validate(const aniso_env* env, int64_t probe_range, int* valid,
                                          int64_t* offending_level, int* has_offending_level);
ANISO_API aniso_status aniso_env_cesaro(const aniso_env* env, int64_t n_max, aniso_cesaro* out);
ANISO_API aniso_status aniso_env_to_json(const aniso_env* env, char** json_out);

/* Stored paths. */
ANISO_API aniso_status aniso_path_simulate(const aniso_env* env, uint64_t steps, uint64_t seed, aniso_method method,
                                           aniso_path** out);
ANISO_API void aniso_path_destroy(aniso_path* path);
ANISO_API uint64_t aniso_path_steps(const aniso_path* path);
ANISO_API aniso_status aniso_path_point(const aniso_path* path, uint64_t n, int64_t* c1, int64_t* c2);
/* 1 for a horizontal step n -> n + 1, 0 for vertical. */
ANISO_API aniso_status aniso_path_step_kind(const aniso_path* path, uint64_t n, int* horizontal);
ANISO_API aniso_status aniso_path_decomposition(const aniso_path* path, aniso_decomposition* out);
/* #{k in 1..horizon : C_component(k) = level}, component 1 or 2. */
ANISO_API aniso_status aniso_path_local_time(const aniso_path* path, int component, int64_t level,
                                             uint64_t horizon, uint64_t* out);
ANISO_API aniso_status aniso_path_write_csv(const aniso_path* path, const char* file);
ANISO_API aniso_status aniso_path_decomposition_json(const aniso_path* path, char** json_out);

/* Ensemble endpoints; out must hold `replicas` entries. Replica r uses aniso_derive_seed(seed, "simulate", r). */
ANISO_API aniso_status aniso_simulate_ensemble(const aniso_env* env, uint64_t steps, uint64_t replicas, uint64_t seed,
                                               aniso_method method, unsigned workers, aniso_endpoint* out);

/* Y(t) = W(A^{-1}(t)) per replica; out must hold `replicas` values. */
ANISO_API aniso_status aniso_oscillating_sample(double gamma1, double gamma2, double t, double dt, uint64_t replicas,
                                                uint64_t seed, unsigned workers, double* out);

/* Time change of one grid Wiener path. */
ANISO_API aniso_status aniso_timechange_create(double horizon, double dt, double gamma1, double gamma2, uint64_t seed,
                                               aniso_timechange** out);
ANISO_API void aniso_timechange_destroy(aniso_timechange* tc);
ANISO_API aniso_status aniso_timechange_eval(const aniso_timechange* tc, double t, double* out);
ANISO_API aniso_status aniso_timechange_inverse(const aniso_timechange* tc, double s, double* out);
ANISO_API aniso_status aniso_timechange_final(const aniso_timechange* tc, double* out);
ANISO_API aniso_status aniso_timechange_wiener(const aniso_timechange* tc, double t, double* out);

/* Closed-form densities. */
ANISO_API aniso_status aniso_density(double t, double gamma1, double gamma2, aniso_density_variant variant, double v,
                                     double* out);
ANISO_API aniso_status aniso_density_cdf(double t, double gamma1, double gamma2, aniso_density_variant variant,
                                         double v, double* out);
ANISO_API aniso_status aniso_density_table(double t, double gamma1, double gamma2, aniso_density_variant variant,
                                           size_t points, aniso_density_row* rows);

/* Verification. params_json may be NULL; the report is returned as a JSON object. */
ANISO_API aniso_status aniso_verify_run(const char* name, const char* params_json, uint64_t seed, unsigned workers,
                                        char** report_json);
/* JSON array of test names; acceptance != 0 lists the acceptance plan instead. */
ANISO_API aniso_status aniso_verify_names(int acceptance, char** json_out);
/* JSON array of names a suite expression ("all", "abel,lil") expands to. */
ANISO_API aniso_status aniso_verify_expand(const char* suite, char** json_out);

#ifdef __cplusplus
}
#endif

#endif
