/*
 * lobcal C API.
 *
 * Opaque handles own their data and are released with the matching
 * lobcal_*_free function (free(NULL) is a no-op). Every fallible call returns
 * a lobcal_status; on failure a human-readable message is available from
 * lobcal_last_error() on the calling thread until the next failing call.
 */
#ifndef LOBCAL_H
#define LOBCAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LOBCAL_BUILDING_LIBRARY)
#    define LOBCAL_API __declspec(dllexport)
#  else
#    define LOBCAL_API __declspec(dllimport)
#  endif
#else
#  define LOBCAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lobcal_status {
    LOBCAL_OK = 0,
    LOBCAL_ERR_INVALID_ARGUMENT = 1, /* null handle, bad enum, bad index */
    LOBCAL_ERR_PARAMETER = 2,        /* model parameter out of range */
    LOBCAL_ERR_CONFIG = 3,           /* inconsistent configuration */
    LOBCAL_ERR_PARSE = 4,            /* malformed input file */
    LOBCAL_ERR_IO = 5,               /* filesystem failure */
    LOBCAL_ERR_MISSING_FEATURE = 6,  /* required feature absent */
    LOBCAL_ERR_INTERNAL = 99
} lobcal_status;

typedef enum lobcal_metric { LOBCAL_METRIC_WASSERSTEIN = 0, LOBCAL_METRIC_MSE = 1 } lobcal_metric;
typedef enum lobcal_aggregation { LOBCAL_AGG_MAX = 0, LOBCAL_AGG_MEAN = 1 } lobcal_aggregation;
typedef enum lobcal_normalization {
    LOBCAL_NORM_TARGET = 0,
    LOBCAL_NORM_JOINT = 1,
    LOBCAL_NORM_NONE = 2
} lobcal_normalization;

#define LOBCAL_NUM_PARAMS 6
#define LOBCAL_NUM_FEATURES 6

/* [delta, lambda0, c_lambda, delta_s, alpha, mu] */
typedef struct lobcal_params {
    double delta;
    double lambda0;
    double c_lambda;
    double delta_s;
    double alpha;
    double mu;
} lobcal_params;

typedef struct lobcal_sim_config {
    int32_t n_providers;
    int32_t n_takers;
    int64_t steps;
    int64_t warmup_steps;
    int64_t p0;
    uint64_t seed;
    uint64_t replicate_index;
} lobcal_sim_config;

typedef struct lobcal_objective_spec {
    const int* feature_ids; /* borrowed; copied by the callee */
    size_t n_features;
    lobcal_metric metric;
    lobcal_aggregation aggregation;
    lobcal_normalization normalization;
    int32_t replicates;
} lobcal_objective_spec;

typedef struct lobcal_search_space {
    double lo[LOBCAL_NUM_PARAMS];
    double hi[LOBCAL_NUM_PARAMS];
} lobcal_search_space;

typedef struct lobcal_pso_settings {
    int32_t population;
    double inertia;
    double c1;
    double c2;
    uint32_t threads; /* 0 = hardware concurrency */
} lobcal_pso_settings;

typedef struct lobcal_grid_spec {
    int32_t dims[2]; /* indices into the parameter vector */
    double lo[2];
    double hi[2];
    int32_t resolution[2];
    lobcal_params base;
} lobcal_grid_spec;

typedef struct lobcal_validation {
    size_t n_features;
    int feature_ids[LOBCAL_NUM_FEATURES];
    double wasserstein[LOBCAL_NUM_FEATURES];
    double mse[LOBCAL_NUM_FEATURES];
    double mean_wasserstein;
    double mean_mse;
} lobcal_validation;

typedef struct lobcal_trace lobcal_trace;
typedef struct lobcal_features lobcal_features;
typedef struct lobcal_calibration lobcal_calibration;
typedef struct lobcal_grid lobcal_grid;

/* --- misc ---------------------------------------------------------------- */

LOBCAL_API const char* lobcal_version(void);
LOBCAL_API const char* lobcal_last_error(void);
LOBCAL_API const char* lobcal_status_string(lobcal_status status);

/* Derives a namespaced seed from a master seed (e.g. label "target"). */
LOBCAL_API uint64_t lobcal_derive_seed(uint64_t master, const char* label, uint64_t index);

/* Writes `content` to a sibling temp file and renames it over `path`. */
LOBCAL_API lobcal_status lobcal_write_text_atomic(const char* path, const char* content);

/* --- parameters ---------------------------------------------------------- */

LOBCAL_API lobcal_status lobcal_preset(const char* name, lobcal_params* out);
LOBCAL_API lobcal_status lobcal_params_validate(const lobcal_params* params);
LOBCAL_API void lobcal_sim_config_default(lobcal_sim_config* out);
LOBCAL_API void lobcal_objective_spec_default(lobcal_objective_spec* out);
LOBCAL_API void lobcal_search_space_default(lobcal_search_space* out);
LOBCAL_API void lobcal_pso_settings_default(lobcal_pso_settings* out);
LOBCAL_API void lobcal_grid_spec_default(lobcal_grid_spec* out);
LOBCAL_API lobcal_status lobcal_precompute_sigma_q(double delta_s, double* out);

/* --- simulation ---------------------------------------------------------- */

LOBCAL_API lobcal_status lobcal_simulate(const lobcal_params* params, const lobcal_sim_config* config,
                                         lobcal_trace** out);
/* Also writes every book event (step,event,side,price,volume,order_id) to
 * event_log_path as CSV. */
LOBCAL_API lobcal_status lobcal_simulate_with_event_log(const lobcal_params* params,
                                                        const lobcal_sim_config* config,
                                                        const char* event_log_path, lobcal_trace** out);
LOBCAL_API void lobcal_trace_free(lobcal_trace* trace);
LOBCAL_API size_t lobcal_trace_length(const lobcal_trace* trace);
/* Row i as {best_bid, best_ask, traded_volume, best_bid_volume, best_ask_volume}. */
LOBCAL_API lobcal_status lobcal_trace_record(const lobcal_trace* trace, size_t i, int64_t out[5]);
LOBCAL_API lobcal_status lobcal_trace_write_csv(const lobcal_trace* trace, const char* path);
LOBCAL_API lobcal_status lobcal_trace_write_metadata(const lobcal_trace* trace, const char* path);
LOBCAL_API lobcal_status lobcal_trace_read_csv(const char* path, lobcal_trace** out);

/* --- features ------------------------------------------------------------ */

LOBCAL_API lobcal_status lobcal_features_extract(const lobcal_trace* trace, const int* feature_ids, size_t n,
                                                 lobcal_features** out);
/* Ingests a feature CSV (t,f1,...) or a trace CSV (converted to all six features). */
LOBCAL_API lobcal_status lobcal_features_read(const char* path, lobcal_features** out);
LOBCAL_API lobcal_status lobcal_features_write_csv(const lobcal_features* features, const char* path);
LOBCAL_API void lobcal_features_free(lobcal_features* features);
LOBCAL_API int lobcal_features_has(const lobcal_features* features, int feature_id);
/* Length of one series, 0 when absent. */
LOBCAL_API size_t lobcal_features_length(const lobcal_features* features, int feature_id);
LOBCAL_API lobcal_status lobcal_features_values(const lobcal_features* features, int feature_id, double* out,
                                                size_t capacity);
LOBCAL_API lobcal_status lobcal_features_require(const lobcal_features* features, const int* feature_ids,
                                                 size_t n);

/* --- discrepancy / validation ------------------------------------------- */

LOBCAL_API lobcal_status lobcal_wasserstein(const double* x, size_t nx, const double* y, size_t ny, double* out);
LOBCAL_API lobcal_status lobcal_mse(const double* x, size_t nx, const double* y, size_t ny, double* out);
/* Objective value F of `params` against `target`; per_feature (may be NULL)
 * receives spec->n_features values. */
LOBCAL_API lobcal_status lobcal_evaluate_objective(const lobcal_objective_spec* spec, const lobcal_features* target,
                                                   const lobcal_params* params, const lobcal_sim_config* config,
                                                   double* aggregate, double* per_feature);
LOBCAL_API lobcal_status lobcal_validate(const lobcal_features* target, const lobcal_features* simulated,
                                         lobcal_validation* out);
LOBCAL_API lobcal_status lobcal_validation_write(const lobcal_validation* report, const char* path);

/* --- calibration --------------------------------------------------------- */

LOBCAL_API lobcal_status lobcal_calibrate(const lobcal_features* target, const lobcal_objective_spec* spec,
                                          const lobcal_search_space* space, const lobcal_pso_settings* pso,
                                          const lobcal_sim_config* base, int64_t budget, uint64_t seed,
                                          lobcal_calibration** out);
LOBCAL_API void lobcal_calibration_free(lobcal_calibration* cal);
LOBCAL_API lobcal_status lobcal_calibration_best(const lobcal_calibration* cal, lobcal_params* params,
                                                 double* value);
LOBCAL_API size_t lobcal_calibration_history_length(const lobcal_calibration* cal);
LOBCAL_API lobcal_status lobcal_calibration_history(const lobcal_calibration* cal, double* out, size_t capacity);
LOBCAL_API int64_t lobcal_calibration_evaluations(const lobcal_calibration* cal);
/* Simulation config used for every candidate (seed included). */
LOBCAL_API lobcal_status lobcal_calibration_sim_config(const lobcal_calibration* cal, lobcal_sim_config* out);
LOBCAL_API lobcal_status lobcal_calibration_write(const lobcal_calibration* cal, const char* json_path,
                                                  const char* history_csv_path);

/* --- identifiability grid ------------------------------------------------ */

LOBCAL_API lobcal_status lobcal_grid_run(const lobcal_grid_spec* spec, const lobcal_features* target,
                                         const lobcal_sim_config* config, double q, uint32_t threads,
                                         lobcal_grid** out);
LOBCAL_API void lobcal_grid_free(lobcal_grid* grid);
LOBCAL_API size_t lobcal_grid_cells(const lobcal_grid* grid);
/* K in 1..6. */
LOBCAL_API lobcal_status lobcal_grid_probability(const lobcal_grid* grid, int k, double* probability,
                                                 int64_t* cardinality);
/* i in 2..6; beta_i = |I_i| / |I_{i-1}|. */
LOBCAL_API lobcal_status lobcal_grid_beta(const lobcal_grid* grid, int i, double* beta);
LOBCAL_API lobcal_status lobcal_grid_cell(const lobcal_grid* grid, size_t cell, double coords[2],
                                          double d[LOBCAL_NUM_FEATURES]);
LOBCAL_API lobcal_status lobcal_grid_write(const lobcal_grid* grid, const char* cells_csv_path,
                                           const char* summary_csv_path, const char* metadata_path);

#ifdef __cplusplus
}
#endif

#endif /* LOBCAL_H */
