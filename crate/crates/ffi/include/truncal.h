/* C interface for the truncal library. Generated by cbindgen; do not edit. */

#ifndef TRUNCAL_H
#define TRUNCAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum TruncalStatus {
  TRUNCAL_STATUS_OK = 0,
  TRUNCAL_STATUS_NULL_POINTER = 1,
  TRUNCAL_STATUS_INVALID_ARGUMENT = 2,
  TRUNCAL_STATUS_NAN_INPUT = 3,
  TRUNCAL_STATUS_DIMENSION_MISMATCH = 4,
  TRUNCAL_STATUS_INVALID_LABEL = 5,
  TRUNCAL_STATUS_EMPTY_DATASET = 6,
  TRUNCAL_STATUS_MALFORMED_CODE = 7,
  TRUNCAL_STATUS_DIMENSION_LIMIT = 8,
  TRUNCAL_STATUS_PRECONDITION = 9,
  // A witness failed verification: a library bug, not a user error.
  TRUNCAL_STATUS_INCONSISTENCY = 10,
  TRUNCAL_STATUS_DATA_FORMAT = 11,
  TRUNCAL_STATUS_IO = 12,
  TRUNCAL_STATUS_PANIC = 13,
} TruncalStatus;

// Opaque truncation configuration (dimension and budget).
typedef struct TruncalConfig TruncalConfig;

// Opaque labeled dataset.
typedef struct TruncalDataset TruncalDataset;

// Opaque trained model.
typedef struct TruncalModel TruncalModel;

// Bound-calculator output mirrored as a plain C struct.
typedef struct TruncalBoundReport {
  size_t n;
  size_t d;
  size_t k;
  double delta;
  double c;
  double complexity_term;
  double confidence_term;
  double total;
} TruncalBoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the most recent failure on this thread.
const char *truncal_last_error_message(void);

// Create a truncation configuration; requires 2k < d (k = 0 allowed).
//
// # Safety
// `out` must point to writable storage for one pointer.
enum TruncalStatus truncal_config_new(size_t d, size_t k, struct TruncalConfig **out);

// # Safety
// `cfg` must come from `truncal_config_new` and not be freed twice.
void truncal_config_free(struct TruncalConfig *cfg);

// # Safety
// `cfg` must be a live handle.
size_t truncal_config_d(const struct TruncalConfig *cfg);

// # Safety
// `cfg` must be a live handle.
size_t truncal_config_k(const struct TruncalConfig *cfg);

// Sign with the convention sgn(0) = +1; rejects NaN.
//
// # Safety
// `out` must point to writable storage for one `int32_t`.
enum TruncalStatus truncal_sign(double value, int32_t *out);

// Truncated sum of `u` (middle d-2k order statistics).
//
// # Safety
// `u` must point to `len` readable doubles; `out` to one writable double.
enum TruncalStatus truncal_tsum(const struct TruncalConfig *cfg,
                                const double *u,
                                size_t len,
                                double *out);

// Truncated inner product of `w` and `x`.
//
// # Safety
// `w` and `x` must point to `len` readable doubles; `out` to one double.
enum TruncalStatus truncal_trunc_inner(const struct TruncalConfig *cfg,
                                       const double *w,
                                       const double *x,
                                       size_t len,
                                       double *out);

// Sum of the d-2k smallest order statistics of `u`.
//
// # Safety
// As for [`truncal_tsum`].
enum TruncalStatus truncal_lower_sum(const struct TruncalConfig *cfg,
                                     const double *u,
                                     size_t len,
                                     double *out);

// Sum of the d-2k largest order statistics of `u`.
//
// # Safety
// As for [`truncal_tsum`].
enum TruncalStatus truncal_upper_sum(const struct TruncalConfig *cfg,
                                     const double *u,
                                     size_t len,
                                     double *out);

// Range of the truncated inner product over the l0 ball, with
// attainability flags for each end.
//
// # Safety
// Vector pointers must cover `len` doubles; out pointers must be writable.
enum TruncalStatus truncal_robust_range(const struct TruncalConfig *cfg,
                                        const double *w,
                                        const double *x,
                                        size_t len,
                                        double *out_lo,
                                        double *out_hi,
                                        bool *out_lo_attained,
                                        bool *out_hi_attained);

// Exact adversarial 0-1 loss indicator for one sample. `y` is +1 or -1.
//
// # Safety
// As for [`truncal_robust_range`].
enum TruncalStatus truncal_robust_misclassified(const struct TruncalConfig *cfg,
                                                const double *w,
                                                const double *x,
                                                size_t len,
                                                int32_t y,
                                                bool *out);

// Worst-case perturbation witness. When the sample can be fooled,
// writes the witness into `out_witness` (length `len`) and sets
// `*out_found = true`; otherwise sets `*out_found = false` and leaves
// the buffer untouched.
//
// # Safety
// `out_witness` must point to `len` writable doubles.
enum TruncalStatus truncal_worst_case_witness(const struct TruncalConfig *cfg,
                                              const double *w,
                                              const double *x,
                                              size_t len,
                                              int32_t y,
                                              double *out_witness,
                                              bool *out_found);

// Brute-force reference range (d at most 10).
//
// # Safety
// As for [`truncal_robust_range`].
enum TruncalStatus truncal_brute_force_range(const struct TruncalConfig *cfg,
                                             const double *w,
                                             const double *x,
                                             size_t len,
                                             double *out_lo,
                                             double *out_hi);

// Brute-force reference misclassification check (d at most 10).
//
// # Safety
// As for [`truncal_robust_misclassified`].
enum TruncalStatus truncal_brute_force_robust(const struct TruncalConfig *cfg,
                                              const double *w,
                                              const double *x,
                                              size_t len,
                                              int32_t y,
                                              bool *out);

// Sign of the truncated inner product computed through the sign code
// (encode + decode), exercising the coding path end to end.
//
// # Safety
// As for [`truncal_trunc_inner`].
enum TruncalStatus truncal_trunc_sign_via_code(const struct TruncalConfig *cfg,
                                               const double *w,
                                               const double *x,
                                               size_t len,
                                               int32_t *out_sign);

// Growth bound (e n m / d)^d in log space. Either out pointer may be
// null to skip that output.
//
// # Safety
// Non-null out pointers must be writable.
enum TruncalStatus truncal_growth_bound_t(size_t n,
                                          size_t d,
                                          size_t k,
                                          double *out_log,
                                          double *out_value);

// Growth bound 1 + (e n m / d)^d in log space.
//
// # Safety
// As for [`truncal_growth_bound_t`].
enum TruncalStatus truncal_growth_bound_ttilde(size_t n,
                                               size_t d,
                                               size_t k,
                                               double *out_log,
                                               double *out_value);

// Generalization bound at confidence 1 - delta; requires n > d+1 and
// 0 < 2k < d.
//
// # Safety
// `out` must point to one writable `TruncalBoundReport`.
enum TruncalStatus truncal_generalization_bound(size_t n,
                                                size_t d,
                                                size_t k,
                                                double delta,
                                                struct TruncalBoundReport *out);

// Smallest n > d+1 whose bound total is at most epsilon.
//
// # Safety
// `out_n` must point to one writable `size_t`.
enum TruncalStatus truncal_sample_complexity(double epsilon,
                                             double delta,
                                             size_t d,
                                             size_t k,
                                             size_t *out_n);

// Read a dataset CSV (header x1,...,xd,y).
//
// # Safety
// `path` must be a NUL-terminated string; `out` writable.
enum TruncalStatus truncal_dataset_read_csv(const char *path, struct TruncalDataset **out);

// Write a dataset as CSV.
//
// # Safety
// `ds` must be a live handle; `path` a NUL-terminated string.
enum TruncalStatus truncal_dataset_write_csv(const struct TruncalDataset *ds, const char *path);

// # Safety
// `ds` must be a live handle or null.
size_t truncal_dataset_len(const struct TruncalDataset *ds);

// # Safety
// `ds` must be a live handle or null.
size_t truncal_dataset_dim(const struct TruncalDataset *ds);

// # Safety
// `ds` must come from a dataset constructor and not be freed twice.
void truncal_dataset_free(struct TruncalDataset *ds);

// Adversarially train on a dataset handle. `l2_cap <= 0` disables the
// projection. Returns a model handle.
//
// # Safety
// `ds` must be a live handle; `out` writable.
enum TruncalStatus truncal_train(const struct TruncalDataset *ds,
                                 size_t k,
                                 size_t epochs,
                                 double step_size,
                                 size_t restarts,
                                 uint64_t seed,
                                 double l2_cap,
                                 bool bias,
                                 struct TruncalModel **out);

// Read a model JSON file.
//
// # Safety
// `path` must be NUL-terminated; `out` writable.
enum TruncalStatus truncal_model_read(const char *path, struct TruncalModel **out);

// Write a model JSON file.
//
// # Safety
// `model` must be a live handle; `path` NUL-terminated.
enum TruncalStatus truncal_model_write(const struct TruncalModel *model, const char *path);

// # Safety
// `model` must be a live handle or null.
size_t truncal_model_dim(const struct TruncalModel *model);

// # Safety
// `model` must be a live handle or null.
size_t truncal_model_k(const struct TruncalModel *model);

// # Safety
// `model` must be a live handle or null.
bool truncal_model_bias(const struct TruncalModel *model);

// Copy the model weights into `buf` (length `len`, which must equal the
// model dimension).
//
// # Safety
// `buf` must point to `len` writable doubles.
enum TruncalStatus truncal_model_weights(const struct TruncalModel *model, double *buf, size_t len);

// Exact robust error of a model on a dataset (the bias column is
// appended automatically for bias models).
//
// # Safety
// `model` and `ds` must be live handles; `out` writable.
enum TruncalStatus truncal_model_robust_loss(const struct TruncalModel *model,
                                             const struct TruncalDataset *ds,
                                             double *out);

// # Safety
// `model` must come from a model constructor and not be freed twice.
void truncal_model_free(struct TruncalModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRUNCAL_H */
