#ifndef HELMCLOAK_H
#define HELMCLOAK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_ARGUMENT = 2,
  HC_STATUS_BRANCH_CUT = 3,
  HC_STATUS_SINGULAR = 4,
  HC_STATUS_DIVERGENCE_REGION = 5,
  HC_STATUS_UNSUPPORTED = 6,
  HC_STATUS_NUMERICAL = 7,
  HC_STATUS_PANIC = 8,
} HcStatus;

/**
 * Cloak of a disk by four devices for one point source and wavenumber.
 */
typedef struct HcCloak HcCloak;

/**
 * Sound-soft kite scattering a point source.
 */
typedef struct HcScatter HcScatter;

/**
 * Complex number passed by value.
 */
typedef struct {
  double re;
  double im;
} HcComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t hc_last_error_message(char *buf, size_t len);

/**
 * J_n(z).
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
HcStatus hc_bessel_j(int32_t n, HcComplex z, HcComplex *result);

/**
 * H_n^(1)(z).
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
HcStatus hc_hankel1(int32_t n, HcComplex z, HcComplex *result);

/**
 * G(x - y) = (i/4) H_0(k |x - y|).
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
HcStatus hc_green(double x1, double x2, double y1, double y2, HcComplex k, HcComplex *result);

/**
 * k = i sqrt(-i omega / sigma).
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
HcStatus hc_heat_wavenumber(HcComplex omega, double sigma, HcComplex *result);

/**
 * Time samples u(p T / N), p = 0..N, from 2N + 2 transform samples at
 * s_q = c - i q dw of the contour built from (t_final, n_steps).
 *
 * # Safety
 * `samples` must hold `n_samples` values and `result` room for
 * `n_steps + 1` doubles.
 */
HcStatus hc_inverse_laplace(const HcComplex *samples,
                            size_t n_samples,
                            double t_final,
                            size_t n_steps,
                            double *result);

/**
 * Standard four-device cloak of the disk (center, delta_c) with `n_int`
 * boundary nodes, truncated at `order`.
 *
 * # Safety
 * `handle` must be null or valid for writes.
 */
HcStatus hc_cloak_new(double center_x,
                      double center_y,
                      double delta_c,
                      size_t n_int,
                      double source_x,
                      double source_y,
                      HcComplex k,
                      size_t order,
                      HcCloak **handle);

/**
 * # Safety
 * `handle` must come from [`hc_cloak_new`] and not be used afterwards.
 */
void hc_cloak_free(HcCloak *handle);

/**
 * Truncated multipole field u_e^(M)(x).
 *
 * # Safety
 * `handle` must be a live cloak; `result` null or valid for writes.
 */
HcStatus hc_cloak_exterior_field(const HcCloak *handle, double x, double y, HcComplex *result);

/**
 * Green-identity field u_c(x) (equal to -u_i inside the disk, 0 outside).
 *
 * # Safety
 * `handle` must be a live cloak; `result` null or valid for writes.
 */
HcStatus hc_cloak_interior_field(const HcCloak *handle, double x, double y, HcComplex *result);

/**
 * Solve the combined-field equation; `eta <= 0` picks |k|.
 *
 * # Safety
 * `handle` must be null or valid for writes.
 */
HcStatus hc_scatter_new(double center_x,
                        double center_y,
                        double scale,
                        size_t n_nodes,
                        HcComplex k,
                        double eta,
                        double source_x,
                        double source_y,
                        HcScatter **handle);

/**
 * # Safety
 * `handle` must come from [`hc_scatter_new`] and not be used afterwards.
 */
void hc_scatter_free(HcScatter *handle);

/**
 * Scattered field u_s(x); `warning` (optional) is set to 1 near or inside
 * the obstacle.
 *
 * # Safety
 * `handle` must be live; `result` null or valid; `warning` null or valid.
 */
HcStatus hc_scatter_field(const HcScatter *handle,
                          double x,
                          double y,
                          HcComplex *result,
                          int32_t *warning);

/**
 * max |u_i + u_s| at boundary points between the nodes, and the
 * condition estimate of the solve.
 *
 * # Safety
 * `handle` must be live; the out-pointers null or valid.
 */
HcStatus hc_scatter_diagnostics(const HcScatter *handle, double *residual, double *condition);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HELMCLOAK_H */
