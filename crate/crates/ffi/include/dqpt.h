#ifndef DQPT_H
#define DQPT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Columns of a quench trajectory.
typedef enum DqptColumn {
  DQPT_COLUMN_TIME = 0,
  DQPT_COLUMN_QFI_Z = 1,
  DQPT_COLUMN_QFI_OPTIMAL = 2,
  DQPT_COLUMN_RATE = 3,
  DQPT_COLUMN_LOSCHMIDT = 4,
  DQPT_COLUMN_ENERGY = 5,
  DQPT_COLUMN_NORM = 6,
} DqptColumn;

typedef enum DqptConvention {
  DQPT_CONVENTION_PRODUCIBILITY = 0,
  DQPT_CONVENTION_LINEAR = 1,
} DqptConvention;

typedef enum DqptStatus {
  DQPT_STATUS_OK = 0,
  DQPT_STATUS_NULL_POINTER = 1,
  DQPT_STATUS_INVALID_ARGUMENT = 2,
  DQPT_STATUS_NUMERICAL = 3,
  DQPT_STATUS_CAP_EXCEEDED = 4,
  DQPT_STATUS_IO = 5,
  DQPT_STATUS_PANIC = 6,
} DqptStatus;

// Opaque closed-system trajectory.
typedef struct DqptQuench DqptQuench;

// Two-parameter fit: `(a, N0)` for the log law, `(alpha, beta)` for the
// linear law.
typedef struct DqptFit {
  double p0;
  double p1;
  double residual;
  double r_squared;
} DqptFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *dqpt_last_error(void);

// Library version as a static string.
const char *dqpt_version(void);

// Quench from the x-polarized state. `opt_every` = 0 skips the optimal
// direction. On success `*out` owns a new handle.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum DqptStatus dqpt_quench_run(size_t n_sites,
                                double j,
                                double jp,
                                double h,
                                double t_max,
                                double dt,
                                size_t opt_every,
                                struct DqptQuench **out);

// Number of time points in a trajectory (0 for a null handle).
//
// # Safety
// `q` must be null or a live handle.
size_t dqpt_quench_len(const struct DqptQuench *q);

// Copies one column into `buf`, which must hold `len` values with `len`
// equal to `dqpt_quench_len`. Optimal QFI entries that were not evaluated
// are NaN.
//
// # Safety
// `q` must be a live handle and `buf` must point to `len` writable doubles.
enum DqptStatus dqpt_quench_column(const struct DqptQuench *q,
                                   enum DqptColumn column,
                                   double *buf,
                                   size_t len);

// Releases a trajectory. Null is ignored.
//
// # Safety
// `q` must be null or a handle from `dqpt_quench_run` not yet freed.
void dqpt_quench_free(struct DqptQuench *q);

// Certified entanglement depth for QFI density `f_q` on `n_sites` spins.
//
// # Safety
// `depth` must point to writable storage.
enum DqptStatus dqpt_entanglement_depth(double f_q,
                                        size_t n_sites,
                                        enum DqptConvention convention,
                                        size_t *depth);

// Earliest peak reaching `fraction` of the global maximum, refined by a
// parabola through the three samples around it.
//
// # Safety
// `times` and `values` must point to `len` readable doubles; `t_c` and
// `f_star` must be writable.
enum DqptStatus dqpt_find_first_peak(const double *times,
                                     const double *values,
                                     size_t len,
                                     double fraction,
                                     double *t_c,
                                     double *f_star);

// Fits `f* = a ln(N / N0)`.
//
// # Safety
// `ns` and `f_stars` must point to `len` readable values; `out` must be
// writable.
enum DqptStatus dqpt_fit_log_divergence(const size_t *ns,
                                        const double *f_stars,
                                        size_t len,
                                        struct DqptFit *out);

// Fits `t_c = alpha N + beta`.
//
// # Safety
// `ns` and `t_cs` must point to `len` readable values; `out` must be
// writable.
enum DqptStatus dqpt_fit_linear_time(const size_t *ns,
                                     const double *t_cs,
                                     size_t len,
                                     struct DqptFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DQPT_H */
