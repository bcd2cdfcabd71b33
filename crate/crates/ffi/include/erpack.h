#ifndef ERPACK_H
#define ERPACK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ErpackStatus {
  ERPACK_STATUS_OK = 0,
  ERPACK_STATUS_NULL_POINTER = 1,
  ERPACK_STATUS_INVALID_ARGUMENT = 2,
  ERPACK_STATUS_IO = 3,
  ERPACK_STATUS_PARSE = 4,
  ERPACK_STATUS_SOLVER = 5,
  ERPACK_STATUS_BUFFER_TOO_SMALL = 6,
  ERPACK_STATUS_PANIC = 7,
} ErpackStatus;

typedef enum ErpackDoiMode {
  ERPACK_DOI_MODE_NONE = 0,
  ERPACK_DOI_MODE_VARYING = 1,
  ERPACK_DOI_MODE_FLEXIBLE = 2,
} ErpackDoiMode;

typedef enum ErpackPricing {
  ERPACK_PRICING_EXACT = 0,
  ERPACK_PRICING_HEURISTIC = 1,
  ERPACK_PRICING_HYBRID = 2,
} ErpackPricing;

/*
 Pair costs over observations `0..n`, plus their names when read from a
 file.
 */
typedef struct ErpackInstance ErpackInstance;

/*
 Outcome of one solve.
 */
typedef struct ErpackSolution ErpackSolution;

/*
 Solver settings. Obtain defaults from [`erpack_config_default`].
 */
typedef struct ErpackConfig {
  enum ErpackDoiMode doi;
  /*
   Rungs per observation besides the top one; flexible mode only.
   */
  uint32_t k;
  double epsilon;
  enum ErpackPricing pricing;
  /*
   Columns per pricing sweep.
   */
  uint32_t max_columns;
  uint32_t threads;
  uint64_t seed;
} ErpackConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until the
 next failing call on the same thread.
 */
const char *erpack_last_error(void);

/*
 Static description of a status code.
 */
const char *erpack_status_message(enum ErpackStatus status);

struct ErpackConfig erpack_config_default(void);

/*
 Empty instance over `n` observations; every pair starts blocked.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum ErpackStatus erpack_instance_new(size_t n, struct ErpackInstance **out);

/*
 Allows observations `a` and `b` to share a cluster at cost `theta`.

 # Safety
 `instance` must be a live handle from this library.
 */
enum ErpackStatus erpack_instance_add_pair(struct ErpackInstance *instance,
                                           size_t a,
                                           size_t b,
                                           double theta);

/*
 Reads `id1,id2,theta` records.

 # Safety
 `path` must be a nul-terminated string and `out` writable.
 */
enum ErpackStatus erpack_instance_read_theta(const char *path, struct ErpackInstance **out);

/*
 Reads `id1,id2,p` records with `theta = bias - p`.

 # Safety
 `path` must be a nul-terminated string and `out` writable.
 */
enum ErpackStatus erpack_instance_read_pairs(const char *path,
                                             double bias,
                                             struct ErpackInstance **out);

/*
 Number of observations, zero for a null handle.

 # Safety
 `instance` must be null or a live handle.
 */
size_t erpack_instance_len(const struct ErpackInstance *instance);

/*
 External id of observation `d` for file-backed instances, null
 otherwise. Owned by the instance.

 # Safety
 `instance` must be null or a live handle.
 */
const char *erpack_instance_name(const struct ErpackInstance *instance, size_t d);

/*
 # Safety
 `instance` must be null or a handle not yet freed.
 */
void erpack_instance_free(struct ErpackInstance *instance);

/*
 Column generation followed by integerization. A null `config` means
 the defaults.

 # Safety
 `instance` must be a live handle, `config` null or valid, `out` writable.
 */
enum ErpackStatus erpack_solve(const struct ErpackInstance *instance,
                               const struct ErpackConfig *config,
                               struct ErpackSolution **out);

/*
 Column generation bound; NaN for a null handle.

 # Safety
 `solution` must be null or a live handle.
 */
double erpack_solution_lp_objective(const struct ErpackSolution *solution);

/*
 Total cost of the returned clustering; NaN for a null handle.

 # Safety
 `solution` must be null or a live handle.
 */
double erpack_solution_ilp_objective(const struct ErpackSolution *solution);

/*
 # Safety
 `solution` must be null or a live handle.
 */
size_t erpack_solution_iterations(const struct ErpackSolution *solution);

/*
 # Safety
 `solution` must be null or a live handle.
 */
size_t erpack_solution_columns(const struct ErpackSolution *solution);

/*
 Whether the last pricing pass proved the bound.

 # Safety
 `solution` must be null or a live handle.
 */
bool erpack_solution_exact(const struct ErpackSolution *solution);

/*
 Copies one cluster label per observation into `labels`. On
 `BufferTooSmall`, `*written` holds the required length.

 # Safety
 `labels` must point to `capacity` writable elements, `written` must be
 writable.
 */
enum ErpackStatus erpack_solution_labels(const struct ErpackSolution *solution,
                                         size_t *labels,
                                         size_t capacity,
                                         size_t *written);

/*
 # Safety
 `solution` must be null or a handle not yet freed.
 */
void erpack_solution_free(struct ErpackSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERPACK_H */
