#ifndef OPDELOC_H
#define OPDELOC_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Battery quench axis.
 */
typedef enum OdlAxis {
  OdlAxis_X = 0,
  OdlAxis_Z = 1,
} OdlAxis;

/**
 * Graph family selector for ensemble entry points.
 */
typedef enum OdlGraphFamily {
  OdlGraphFamily_Complete = 0,
  OdlGraphFamily_Star = 1,
  /**
   * Uses the `k` and `p` arguments.
   */
  OdlGraphFamily_WattsStrogatz = 2,
} OdlGraphFamily;

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum OdlStatus {
  OdlStatus_Ok = 0,
  /**
   * A pointer argument was null or an argument was out of range.
   */
  OdlStatus_InvalidArgument = 1,
  /**
   * The computation itself rejected the input (domain error).
   */
  OdlStatus_Domain = 2,
  /**
   * Internal failure (panic caught at the boundary).
   */
  OdlStatus_Internal = 3,
} OdlStatus;

/**
 * Opaque ensemble curve: grid times with per-point mean and standard error.
 */
typedef struct OdlCurve OdlCurve;

/**
 * Opaque single-realization power series.
 */
typedef struct OdlPowerSeries OdlPowerSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `cap`). Returns the full message length.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be null (length query).
 */
uintptr_t odl_last_error(char *buf, uintptr_t cap);

/**
 * Ensemble-averaged K-complexity curve of the size-`size` initial string.
 * The grid is `0, dt, 2 dt, .., t_max`.
 *
 * # Safety
 * `out` must be a valid pointer; on `Ok` it receives a handle that must be
 * freed with [`odl_curve_free`].
 */
enum OdlStatus odl_ck_curve_ensemble(enum OdlGraphFamily family,
                                     uintptr_t k,
                                     double p,
                                     uintptr_t l,
                                     uintptr_t size,
                                     double t_max,
                                     double dt,
                                     uintptr_t realizations,
                                     uint64_t seed,
                                     struct OdlCurve **out);

/**
 * Ensemble-averaged battery power curve; `p_max`/`t_star` (of the mean
 * curve) are written when the pointers are non-null.
 *
 * # Safety
 * `out` must be valid; `p_max`/`t_star` may be null. The handle must be
 * freed with [`odl_curve_free`].
 */
enum OdlStatus odl_battery_ensemble(enum OdlGraphFamily family,
                                    uintptr_t k,
                                    double p,
                                    uintptr_t l,
                                    enum OdlAxis axis,
                                    double t_max,
                                    double dt,
                                    uintptr_t realizations,
                                    uint64_t seed,
                                    double *p_max,
                                    double *t_star,
                                    struct OdlCurve **out);

/**
 * Delocalization ratio R between the size-`L/2` and size-1 ensemble curves.
 *
 * # Safety
 * `r_mean`, `r_stderr` must be valid writable pointers.
 */
enum OdlStatus odl_delocalization_ratio(enum OdlGraphFamily family,
                                        uintptr_t k,
                                        double p,
                                        uintptr_t l,
                                        double t_max,
                                        double dt,
                                        double window_lo,
                                        double window_hi,
                                        uintptr_t realizations,
                                        uint64_t seed,
                                        double *r_mean,
                                        double *r_stderr);

/**
 * Single-realization charging curve on the complete graph with a seeded
 * coupling draw (bandwidth-rescaled internally).
 *
 * # Safety
 * `out` must be valid; free the handle with [`odl_power_series_free`].
 */
enum OdlStatus odl_charging_power_complete(uintptr_t l,
                                           enum OdlAxis axis,
                                           double t_max,
                                           double dt,
                                           uint64_t seed,
                                           struct OdlPowerSeries **out);

/**
 * Number of grid points in a curve.
 *
 * # Safety
 * `curve` must be a live handle from this library.
 */
uintptr_t odl_curve_len(const struct OdlCurve *curve);

/**
 * Reads one grid point of a curve. Out-pointers may be null to skip fields.
 *
 * # Safety
 * `curve` must be a live handle; non-null out-pointers must be writable.
 */
enum OdlStatus odl_curve_get(const struct OdlCurve *curve,
                             uintptr_t index,
                             double *t,
                             double *mean,
                             double *stderr);

/**
 * Releases a curve handle. Null is a no-op.
 *
 * # Safety
 * `curve` must be a handle from this library, not yet freed.
 */
void odl_curve_free(struct OdlCurve *curve);

/**
 * Number of grid points in a power series.
 *
 * # Safety
 * `ps` must be a live handle from this library.
 */
uintptr_t odl_power_series_len(const struct OdlPowerSeries *ps);

/**
 * Reads one grid point `(t, E, P)`; out-pointers may be null.
 *
 * # Safety
 * `ps` must be a live handle; non-null out-pointers must be writable.
 */
enum OdlStatus odl_power_series_get(const struct OdlPowerSeries *ps,
                                    uintptr_t index,
                                    double *t,
                                    double *energy,
                                    double *power);

/**
 * Maximum average power of a series and the refined time it occurs at.
 *
 * # Safety
 * `ps` must be a live handle; non-null out-pointers must be writable.
 */
enum OdlStatus odl_power_series_max(const struct OdlPowerSeries *ps, double *p_max, double *t_star);

/**
 * Releases a power-series handle. Null is a no-op.
 *
 * # Safety
 * `ps` must be a handle from this library, not yet freed.
 */
void odl_power_series_free(struct OdlPowerSeries *ps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPDELOC_H */
