#ifndef SHIFTLINE_H
#define SHIFTLINE_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ShlStatus {
  SHL_STATUS_OK = 0,
  SHL_STATUS_NULL_POINTER = 1,
  SHL_STATUS_INVALID_UTF8 = 2,
  SHL_STATUS_DOMAIN = 3,
  SHL_STATUS_DEGENERATE = 4,
  SHL_STATUS_INCOMPATIBLE = 5,
  SHL_STATUS_DIMENSION_MISMATCH = 6,
  SHL_STATUS_ZERO_CLASSIFIER = 7,
  SHL_STATUS_NON_CONVERGENCE = 8,
  SHL_STATUS_CONFIG = 9,
  SHL_STATUS_SCHEMA = 10,
  SHL_STATUS_IO = 11,
  SHL_STATUS_PANIC = 12,
} ShlStatus;

typedef enum ShlTransform {
  SHL_TRANSFORM_LINEAR = 0,
  SHL_TRANSFORM_PROBIT = 1,
  SHL_TRANSFORM_LOGIT = 2,
} ShlTransform;

/**
 * A validated scenario config.
 */
typedef struct ShlConfig ShlConfig;

/**
 * A list of evaluation records.
 */
typedef struct ShlRecords ShlRecords;

/**
 * The outcome of a scenario run.
 */
typedef struct ShlResult ShlResult;

/**
 * One record's metrics. `n_id`/`n_ood` are 0 for exact accuracies.
 */
typedef struct ShlPoint {
  double acc_id;
  double acc_id_ci_lo;
  double acc_id_ci_hi;
  double acc_ood;
  double acc_ood_ci_lo;
  double acc_ood_ci_hi;
  uint64_t n_id;
  uint64_t n_ood;
} ShlPoint;

typedef struct ShlTrendFit {
  double slope;
  double intercept;
  double r_squared;
  size_t n_points;
} ShlTrendFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on this thread.
 */
const char *shl_last_error_message(void);

const char *shl_version(void);

double shl_normal_cdf(double x);

enum ShlStatus shl_probit(double p, double *result);

/**
 * Transform an accuracy. With `clamp_n > 0`, values at 0 or 1 are first
 * moved half a sample inside the interval.
 */
enum ShlStatus shl_transform(double p, enum ShlTransform kind, uint64_t clamp_n, double *result);

enum ShlStatus shl_clopper_pearson(uint64_t successes,
                                   uint64_t n,
                                   double confidence,
                                   double *lo,
                                   double *hi);

enum ShlStatus shl_theorem_bound(double beta,
                                 double gamma,
                                 double sigma,
                                 size_t d,
                                 double confidence_delta,
                                 double *result);

struct ShlRecords *shl_records_new(void);

/**
 * Append a record with exact (closed-form) accuracies.
 */
enum ShlStatus shl_records_push_exact(struct ShlRecords *records, double acc_id, double acc_ood);

/**
 * Append a record from correct-prediction counts, with Clopper-Pearson
 * intervals at `confidence`.
 */
enum ShlStatus shl_records_push_counts(struct ShlRecords *records,
                                       uint64_t correct_id,
                                       uint64_t n_id,
                                       uint64_t correct_ood,
                                       uint64_t n_ood,
                                       double confidence);

/**
 * Read the scored rows of a results CSV; skipped rows are dropped.
 */
enum ShlStatus shl_records_read_csv(const char *path, struct ShlRecords **records);

/**
 * Number of records; 0 for NULL.
 */
size_t shl_records_len(const struct ShlRecords *records);

enum ShlStatus shl_records_get(const struct ShlRecords *records,
                               size_t index,
                               struct ShlPoint *point);

void shl_records_free(struct ShlRecords *records);

enum ShlStatus shl_fit_trend(const struct ShlRecords *records,
                             enum ShlTransform transform,
                             struct ShlTrendFit *fit);

/**
 * Parse a TOML scenario config.
 */
enum ShlStatus shl_config_parse(const char *text, struct ShlConfig **config);

enum ShlStatus shl_config_load(const char *path, struct ShlConfig **config);

enum ShlStatus shl_config_set_seed(struct ShlConfig *config, uint64_t seed);

void shl_config_free(struct ShlConfig *config);

/**
 * Run the scenario described by `config`. `threads == 0` uses the default
 * worker pool; results do not depend on the thread count.
 */
enum ShlStatus shl_scenario_run(const struct ShlConfig *config,
                                size_t threads,
                                struct ShlResult **result);

/**
 * Copy of the scored records of a run, sorted by model id.
 */
enum ShlStatus shl_result_records(const struct ShlResult *result, struct ShlRecords **records);

/**
 * Trend fitted over one record group of a run (`"all"` covers every record).
 */
enum ShlStatus shl_result_fit(const struct ShlResult *result,
                              const char *group,
                              struct ShlTrendFit *fit);

/**
 * Write records.csv and fit.json (and scatter.svg if `plot`) into `out_dir`.
 */
enum ShlStatus shl_result_write(const struct ShlResult *result, const char *out_dir, bool plot);

void shl_result_free(struct ShlResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHIFTLINE_H */
