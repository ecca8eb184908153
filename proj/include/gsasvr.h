/*
 * C interface to the gsasvr library: epsilon-SVR with golden-sine
 * hyperparameter tuning for one-step-ahead time-series forecasting.
 *
 * Every function returns a gsasvr_status. On failure a description of the
 * last error on the calling thread is available from gsasvr_last_error().
 * Handles are opaque and owned by the caller; release them with the
 * matching *_destroy function. Strings returned by the library stay valid
 * until the owning handle is destroyed or modified.
 */
#ifndef GSASVR_H
#define GSASVR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GSASVR_BUILDING)
#define GSASVR_API __declspec(dllexport)
#else
#define GSASVR_API __declspec(dllimport)
#endif
#else
#define GSASVR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 0-3 double as CLI exit codes. */
typedef enum gsasvr_status {
  GSASVR_OK = 0,
  GSASVR_ERR_USAGE = 1,     /* invalid argument or configuration */
  GSASVR_ERR_DATA = 2,      /* unreadable, malformed or too-short input */
  GSASVR_ERR_COMPUTE = 3,   /* estimation, training or evaluation failure */
  GSASVR_ERR_IO = 4,        /* report could not be read or written */
  GSASVR_ERR_MISMATCH = 5   /* report failed validation */
} gsasvr_status;

typedef enum gsasvr_param {
  GSASVR_PARAM_C = 0,
  GSASVR_PARAM_GAMMA = 1,
  GSASVR_PARAM_EPSILON = 2
} gsasvr_param;

typedef struct gsasvr_request gsasvr_request;
typedef struct gsasvr_report gsasvr_report;
typedef struct gsasvr_model gsasvr_model;

typedef void (*gsasvr_progress_fn)(size_t iteration, double best_fitness, void* user);
typedef void (*gsasvr_log_fn)(int is_warning, const char* message, void* user);
/* Objective for gsasvr_optimize; writes the value to *out and returns 0 on
 * success, nonzero to abort the run. */
typedef int (*gsasvr_objective_fn)(const double* position, size_t dim, double* out, void* user);

GSASVR_API const char* gsasvr_version(void);
GSASVR_API const char* gsasvr_last_error(void);
GSASVR_API const char* gsasvr_status_name(gsasvr_status status);
/* Routes library diagnostics; NULL restores the stderr default. */
GSASVR_API void gsasvr_set_log_callback(gsasvr_log_fn fn, void* user);

/* ---- Tuning requests ---------------------------------------------------
 * A request starts with the reference defaults: population 20, 50
 * iterations, seed 42, golden_sine, C and gamma in [4^-7, 4^4], epsilon in
 * [4^-7, 0.25], split 0.8, fitness on the test set, train-only scaling,
 * close column. */
GSASVR_API gsasvr_status gsasvr_request_create(gsasvr_request** out);
GSASVR_API void gsasvr_request_destroy(gsasvr_request* req);

/* Quote CSV with header Date,Open,High,Low,Close,Adj Close,Volume. */
GSASVR_API gsasvr_status gsasvr_request_set_input(gsasvr_request* req, const char* path);
/* Uses an in-memory series instead of a CSV. Label may be NULL. */
GSASVR_API gsasvr_status gsasvr_request_set_series(gsasvr_request* req, const double* values,
                                                   size_t n, const char* label);
/* "close" or "adj_close". */
GSASVR_API gsasvr_status gsasvr_request_set_column(gsasvr_request* req, const char* column);
GSASVR_API gsasvr_status gsasvr_request_set_seed(gsasvr_request* req, uint64_t seed);
/* m = 0 and tau = 0 clears the override and re-enables estimation. */
GSASVR_API gsasvr_status gsasvr_request_set_embedding(gsasvr_request* req, size_t m, size_t tau);
GSASVR_API gsasvr_status gsasvr_request_set_population(gsasvr_request* req, size_t population);
GSASVR_API gsasvr_status gsasvr_request_set_iterations(gsasvr_request* req, size_t iterations);
/* golden_sine, random_search, particle_swarm or grey_wolf. */
GSASVR_API gsasvr_status gsasvr_request_set_optimizer(gsasvr_request* req, const char* name);
/* Comma-separated optimizer names for gsasvr_compare. */
GSASVR_API gsasvr_status gsasvr_request_set_optimizers(gsasvr_request* req, const char* names);
GSASVR_API gsasvr_status gsasvr_request_set_bounds(gsasvr_request* req, gsasvr_param param,
                                                   double lower, double upper);
GSASVR_API gsasvr_status gsasvr_request_set_split(gsasvr_request* req, double ratio);
/* "test_set" or "validation_split". */
GSASVR_API gsasvr_status gsasvr_request_set_fitness_target(gsasvr_request* req, const char* target);
/* Nonzero takes min/max over the whole series instead of the training rows. */
GSASVR_API gsasvr_status gsasvr_request_set_full_series_scaling(gsasvr_request* req, int enabled);
GSASVR_API gsasvr_status gsasvr_request_set_jobs(gsasvr_request* req, size_t jobs);
GSASVR_API gsasvr_status gsasvr_request_set_progress(gsasvr_request* req, gsasvr_progress_fn fn,
                                                     void* user);

typedef struct gsasvr_embedding_info {
  size_t m;
  size_t tau;
  int estimated;           /* 1 when m and tau came from AMI / FNN */
  size_t series_length;
  size_t rows;
  size_t train_rows;
  size_t test_rows;
} gsasvr_embedding_info;

GSASVR_API gsasvr_status gsasvr_embed(const gsasvr_request* req, gsasvr_embedding_info* out);
/* Writes the unscaled embedded rows as CSV: index,split,x1..xm,y. */
GSASVR_API gsasvr_status gsasvr_embed_write(const gsasvr_request* req, const char* path);

/* ---- Reports ---------------------------------------------------------- */
GSASVR_API gsasvr_status gsasvr_tune(const gsasvr_request* req, gsasvr_report** out);
GSASVR_API gsasvr_status gsasvr_compare(const gsasvr_request* req, gsasvr_report** out);
GSASVR_API void gsasvr_report_destroy(gsasvr_report* report);
/* Pretty-printed JSON document. */
GSASVR_API const char* gsasvr_report_json(const gsasvr_report* report);
/* One-line summary (tune reports only; empty for comparisons). */
GSASVR_API const char* gsasvr_report_summary(const gsasvr_report* report);
GSASVR_API gsasvr_status gsasvr_report_write(const gsasvr_report* report, const char* path);

/* Recomputes MSE/MAPE from stored forecasts. GSASVR_ERR_MISMATCH lists the
 * offending fields in gsasvr_last_error(). */
GSASVR_API gsasvr_status gsasvr_validate_report_file(const char* path, double tolerance);

/* ---- SVR and optimizer primitives ------------------------------------- */
/* x is row-major n*d. kkt_tolerance <= 0 selects the default 1e-3. */
GSASVR_API gsasvr_status gsasvr_svr_train(const double* x, size_t n, size_t d, const double* y,
                                          double c, double gamma, double epsilon,
                                          double kkt_tolerance, gsasvr_model** out);
GSASVR_API void gsasvr_model_destroy(gsasvr_model* model);
GSASVR_API gsasvr_status gsasvr_svr_predict(const gsasvr_model* model, const double* x, size_t d,
                                            double* out);
GSASVR_API size_t gsasvr_model_support_count(const gsasvr_model* model);
GSASVR_API double gsasvr_model_bias(const gsasvr_model* model);

GSASVR_API gsasvr_status gsasvr_optimize(gsasvr_objective_fn fn, void* user, const double* lower,
                                         const double* upper, size_t dim, const char* algorithm,
                                         size_t population, size_t iterations, uint64_t seed,
                                         double* best_position, double* best_fitness);

#ifdef __cplusplus
}
#endif

#endif /* GSASVR_H */
