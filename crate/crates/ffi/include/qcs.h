#ifndef QCS_H
#define QCS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Initialization for [`qcs_pgd_recover`].
 */
typedef enum {
  QCS_INIT_ZERO = 0,
  /**
   * Use the `x0` buffer.
   */
  QCS_INIT_GIVEN = 1,
  /**
   * Draw from the model's generator with `init_seed`.
   */
  QCS_INIT_RANDOM = 2,
} QcsInit;

typedef enum {
  QCS_MATRIX_KIND_GAUSSIAN = 0,
  QCS_MATRIX_KIND_RADEMACHER = 1,
} QcsMatrixKind;

typedef enum {
  QCS_STATUS_OK = 0,
  QCS_STATUS_NULL_POINTER = 1,
  QCS_STATUS_INVALID_PARAMETER = 2,
  QCS_STATUS_DIMENSION_MISMATCH = 3,
  QCS_STATUS_NON_FINITE = 4,
  QCS_STATUS_INVALID_LEVEL = 5,
  QCS_STATUS_UNSUPPORTED_MODEL = 6,
  QCS_STATUS_SIZE_LIMIT = 7,
  QCS_STATUS_IO = 8,
  QCS_STATUS_CONFIG = 9,
  QCS_STATUS_PANIC = 10,
} QcsStatus;

/**
 * Opaque sensing instance handle.
 */
typedef struct QcsInstance QcsInstance;

/**
 * Opaque signal model handle.
 */
typedef struct QcsModel QcsModel;

/**
 * Opaque quantizer handle.
 */
typedef struct QcsQuantizer QcsQuantizer;

typedef struct {
  double slope;
  double intercept;
  double r2;
} QcsSlopeFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *qcs_last_error(void);

/**
 * Static description of a status code.
 */
const char *qcs_status_string(QcsStatus status);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QcsStatus qcs_quantizer_sign(QcsQuantizer **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QcsStatus qcs_quantizer_uniform(double delta, QcsQuantizer **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QcsStatus qcs_quantizer_saturated(double delta, uintptr_t levels, QcsQuantizer **out);

/**
 * # Safety
 * `q` must be NULL or a handle from a `qcs_quantizer_*` constructor that has
 * not been freed.
 */
void qcs_quantizer_free(QcsQuantizer *q);

/**
 * Resolution `Δ` of the quantizer, NaN for a NULL handle.
 *
 * # Safety
 * `q` must be NULL or a live quantizer handle.
 */
double qcs_quantizer_resolution(const QcsQuantizer *q);

/**
 * Elementwise quantization of `len` values.
 *
 * # Safety
 * `values` and `out` must each point to `len` doubles.
 */
QcsStatus qcs_quantize(const QcsQuantizer *q, const double *values, uintptr_t len, double *out);

/**
 * Samples an `m x n` ensemble; `dither_level = 0` disables dithering.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QcsStatus qcs_instance_sample(QcsMatrixKind kind,
                              double dither_level,
                              uintptr_t m,
                              uintptr_t n,
                              uint64_t seed,
                              QcsInstance **out);

/**
 * Wraps a caller-supplied row-major `m x n` matrix and `m` dithers.
 *
 * # Safety
 * `matrix` must point to `m * n` doubles, `dither` to `m` doubles and `out`
 * to writable storage for one handle.
 */
QcsStatus qcs_instance_from_parts(const double *matrix,
                                  const double *dither,
                                  uintptr_t m,
                                  uintptr_t n,
                                  QcsInstance **out);

/**
 * # Safety
 * `inst` must be NULL or a live instance handle.
 */
void qcs_instance_free(QcsInstance *inst);

/**
 * # Safety
 * `inst` must be a live instance handle; `m_out`/`n_out` may be NULL.
 */
QcsStatus qcs_instance_dims(const QcsInstance *inst, uintptr_t *m_out, uintptr_t *n_out);

/**
 * Copies the row-major matrix into `out` (`m * n` doubles).
 *
 * # Safety
 * `out` must point to `len` doubles.
 */
QcsStatus qcs_instance_matrix(const QcsInstance *inst, double *out, uintptr_t len);

/**
 * Copies the dither vector into `out` (`m` doubles).
 *
 * # Safety
 * `out` must point to `len` doubles.
 */
QcsStatus qcs_instance_dither(const QcsInstance *inst, double *out, uintptr_t len);

/**
 * `y = Q(A x - τ)`.
 *
 * # Safety
 * `x` must point to `n` doubles and `y_out` to `m` doubles.
 */
QcsStatus qcs_measure(const QcsInstance *inst,
                      const QcsQuantizer *q,
                      const double *x,
                      uintptr_t n,
                      double *y_out,
                      uintptr_t m);

/**
 * Flips `floor(zeta * m)` measurements by one level.
 *
 * # Safety
 * `y` and `out` must each point to `m` doubles.
 */
QcsStatus qcs_corrupt(const QcsQuantizer *q,
                      const double *y,
                      uintptr_t m,
                      double zeta,
                      uint64_t seed,
                      double *out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QcsStatus qcs_model_sparse(uintptr_t k, uintptr_t n, double alpha, double beta, QcsModel **out);

/**
 * Column-major `n1 x n2` matrices of rank at most `rank`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QcsStatus qcs_model_low_rank(uintptr_t rank,
                             uintptr_t n1,
                             uintptr_t n2,
                             double alpha,
                             double beta,
                             QcsModel **out);

/**
 * ℓ1 ball of radius `sqrt(k)`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
QcsStatus qcs_model_l1_ball(double k, uintptr_t n, double alpha, double beta, QcsModel **out);

/**
 * # Safety
 * `model` must be NULL or a live model handle.
 */
void qcs_model_free(QcsModel *model);

/**
 * Ambient dimension, 0 for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live model handle.
 */
uintptr_t qcs_model_dim(const QcsModel *model);

/**
 * # Safety
 * `out` must point to `len` doubles.
 */
QcsStatus qcs_model_gen_signal(const QcsModel *model, uint64_t seed, double *out, uintptr_t len);

/**
 * Projection onto the structure set followed by the norm annulus.
 *
 * # Safety
 * `u` and `out` must each point to `len` doubles.
 */
QcsStatus qcs_model_project(const QcsModel *model, const double *u, uintptr_t len, double *out);

/**
 * Runs projected gradient descent and writes the final iterate to
 * `estimate` (`n` doubles). `x0` is read only for [`QcsInit::Given`].
 *
 * # Safety
 * `y` must point to `m` doubles, `estimate` to `n` doubles and `x0` (when
 * used) to `n` doubles.
 */
QcsStatus qcs_pgd_recover(const QcsModel *model,
                          const QcsQuantizer *q,
                          const QcsInstance *inst,
                          const double *y,
                          uintptr_t m,
                          double eta,
                          uintptr_t iterations,
                          QcsInit init,
                          const double *x0,
                          uint64_t init_seed,
                          double *estimate,
                          uintptr_t n);

/**
 * Least-squares slope of `log10(err)` against `log10(m)`.
 *
 * # Safety
 * `ms` and `errs` must each point to `len` doubles; `out` must be writable.
 */
QcsStatus qcs_fit_slope(const double *ms, const double *errs, uintptr_t len, QcsSlopeFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCS_H */
