/* C interface for the htevim estimation library.
 *
 * All objects are opaque handles created and destroyed through these
 * functions. Calls return htevim_status; on failure the handle outputs are
 * untouched and htevim_last_error() describes the problem (thread-local).
 * Result tables own their storage; cell pointers stay valid until the result
 * is freed.
 */

#ifndef HTEVIM_H
#define HTEVIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum htevim_status {
  HTEVIM_OK = 0,
  HTEVIM_ERR_INVALID_ARGUMENT = 1, /* bad handles, unknown keys, bad flags */
  HTEVIM_ERR_DATA = 2,             /* unreadable/invalid dataset            */
  HTEVIM_ERR_RUNTIME = 3,          /* estimation failure                    */
  HTEVIM_ERR_IO = 4                /* file writing failure                  */
} htevim_status;

typedef struct htevim_dataset htevim_dataset;
typedef struct htevim_options htevim_options;
typedef struct htevim_result htevim_result;

const char* htevim_version(void);
const char* htevim_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

/* covariates is row-major n x p; names may be NULL for w1..wp defaults.
 * The dataset is validated on ingest. */
htevim_status htevim_dataset_create(const double* covariates, size_t n,
                                    size_t p, const double* treatment,
                                    const double* outcome,
                                    const char* const* names,
                                    htevim_dataset** out);

/* covariate_cols NULL (with covariate_count 0) selects every column other
 * than treatment and outcome. rows_dropped (optional) receives the number of
 * rows discarded for missing values. The dataset is validated on ingest. */
htevim_status htevim_dataset_read_csv(const char* path,
                                      const char* treatment_col,
                                      const char* outcome_col,
                                      const char* const* covariate_cols,
                                      size_t covariate_count,
                                      htevim_dataset** out, int* rows_dropped);

htevim_status htevim_dataset_n(const htevim_dataset* data, size_t* out);
htevim_status htevim_dataset_p(const htevim_dataset* data, size_t* out);
void htevim_dataset_free(htevim_dataset* data);

/* ---- options ----------------------------------------------------------- */

/* Flat key/value configuration; the same keys as the config file format.
 * Core keys: estimands, families, subset, metalearner, seed, level,
 * crossfit.folds, outcome.learner, propensity.learner, hal.*, tmle.*;
 * simulation keys: dgp, n_grid, reps, workers, out. */
htevim_status htevim_options_create(htevim_options** out);
htevim_status htevim_options_set(htevim_options* opt, const char* key,
                                 const char* value);
htevim_status htevim_options_load_file(htevim_options* opt, const char* path);
void htevim_options_free(htevim_options* opt);

/* ---- operations -------------------------------------------------------- */

/* Estimate the requested estimand/family grid on one dataset. Reads keys:
 * estimands (default "vte"), families (default "ss,ee,tmle"), subset
 * (covariate names, required for vima/vimb), metalearner, seed, level,
 * plus learner configuration. */
htevim_status htevim_estimate(const htevim_dataset* data,
                              const htevim_options* opt, htevim_result** out);

/* VIMa ranking across every single-covariate subset. */
htevim_status htevim_rank(const htevim_dataset* data, const htevim_options* opt,
                          htevim_result** out);

/* Simulation benchmark. When key "out" is set, writes metrics.csv,
 * replicates.csv and metadata.txt into that directory. The returned result
 * is the metrics table. */
htevim_status htevim_simulate(const htevim_options* opt, htevim_result** out);

/* ---- results ----------------------------------------------------------- */

size_t htevim_result_rows(const htevim_result* result);
size_t htevim_result_cols(const htevim_result* result);
const char* htevim_result_column_name(const htevim_result* result, size_t col);
const char* htevim_result_cell(const htevim_result* result, size_t row,
                               size_t col);
/* Total failed replicates (simulate) or failed rows (estimate/rank). */
int htevim_result_failed_count(const htevim_result* result);
htevim_status htevim_result_write_csv(const htevim_result* result,
                                      const char* path);
htevim_status htevim_result_write_markdown(const htevim_result* result,
                                           const char* path);
void htevim_result_free(htevim_result* result);

#ifdef __cplusplus
}
#endif

#endif /* HTEVIM_H */
