#ifndef PARTIAL_KNN_H
#define PARTIAL_KNN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlStatus {
  PL_STATUS_OK = 0,
  PL_STATUS_NULL_POINTER = 1,
  PL_STATUS_INVALID_ARGUMENT = 2,
  PL_STATUS_PARSE_ERROR = 3,
  PL_STATUS_IO_ERROR = 4,
  PL_STATUS_DIMENSION_MISMATCH = 5,
  PL_STATUS_PANIC = 6,
} PlStatus;

typedef struct PlClassifier PlClassifier;

typedef struct PlDataset PlDataset;

// Classifier parameters. `d0 = 0` means unset; uniform mode requires it.
typedef struct PlConfig {
  double c1;
  double delta;
  size_t max_iter;
  // 0 pointwise, 1 uniform.
  int32_t uniform;
  size_t d0;
} PlConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the same thread.
const char *pl_last_error_message(void);

// Fills `out` with c1 = 0.5, delta = 0.1, max_iter = 400, pointwise.
//
// # Safety
// `out` must be null or point to writable memory for one `PlConfig`.
enum PlStatus pl_config_default(struct PlConfig *out);

// Reads a CSV with header `x1..xd,bag[,y]`. `num_labels = 0` infers the
// label count from the largest label seen.
//
// # Safety
// `path` must be a nul-terminated string and `out` a writable pointer slot.
enum PlStatus pl_dataset_from_csv(const char *path, size_t num_labels, struct PlDataset **out);

// Builds a dataset from `n` row-major feature vectors of length `dim` and
// one bag bitmask per row (bit `y - 1` set when label `y` is a candidate).
//
// # Safety
// `features` must hold `n * dim` doubles and `bag_masks` `n` values.
enum PlStatus pl_dataset_new(const double *features,
                             size_t n,
                             size_t dim,
                             const uint64_t *bag_masks,
                             size_t num_labels,
                             struct PlDataset **out);

// Number of examples; 0 for a null handle.
//
// # Safety
// `dataset` must be null or a live handle.
size_t pl_dataset_len(const struct PlDataset *dataset);

// Feature dimension; 0 for a null handle.
//
// # Safety
// `dataset` must be null or a live handle.
size_t pl_dataset_dim(const struct PlDataset *dataset);

// # Safety
// `dataset` must be null or a handle not yet freed.
void pl_dataset_free(struct PlDataset *dataset);

// Copies the training set and builds its neighbor index. `config` may be
// null for the defaults.
//
// # Safety
// `train` must be a live handle, `config` null or valid, `out` writable.
enum PlStatus pl_classifier_new(const struct PlDataset *train,
                                const struct PlConfig *config,
                                struct PlClassifier **out);

// Predicts one label (1-based). `iterations` may be null; otherwise it
// receives the number of neighbors examined.
//
// # Safety
// `x` must hold `dim` doubles; `label` must be writable.
enum PlStatus pl_classifier_predict(const struct PlClassifier *classifier,
                                    const double *x,
                                    size_t dim,
                                    size_t *label,
                                    size_t *iterations);

// Predicts `n` row-major queries into `labels`.
//
// # Safety
// `xs` must hold `n * dim` doubles and `labels` room for `n` values.
enum PlStatus pl_classifier_predict_batch(const struct PlClassifier *classifier,
                                          const double *xs,
                                          size_t n,
                                          size_t dim,
                                          size_t *labels);

// # Safety
// `classifier` must be null or a handle not yet freed.
void pl_classifier_free(struct PlClassifier *classifier);

// Elimination threshold for `n` training points at neighborhood size `k`.
//
// # Safety
// `config` null or valid; `out` writable.
enum PlStatus pl_threshold(size_t n,
                           size_t k,
                           double delta,
                           size_t num_labels,
                           const struct PlConfig *config,
                           double *out);

// Column-rank test on a bag-generation matrix given row-major with
// `2^num_labels - 1` rows in ascending bag-mask order.
//
// # Safety
// `entries` must hold `(2^num_labels - 1) * num_labels` doubles.
enum PlStatus pl_is_reconstructible(const double *entries,
                                    size_t num_labels,
                                    double tol,
                                    bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARTIAL_KNN_H */
