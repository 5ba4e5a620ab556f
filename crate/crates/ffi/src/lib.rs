//! C ABI for the opdeloc library.
//!
//! Conventions: every fallible call returns an [`OdlStatus`]; results are
//! returned through out-pointers to opaque handles that must be released
//! with the matching `odl_*_free`. The last error message of the calling
//! thread is available through [`odl_last_error`]. All pointers must be
//! non-null unless documented otherwise; sizes are element counts.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use opdeloc::battery::charging_power;
use opdeloc::ensemble::{battery_ensemble, ck_curve_ensemble, ratio_ensemble, GraphFamily};
use opdeloc::krylov::time_grid;
use opdeloc::opspace::BatteryAxis;
use opdeloc::{CouplingMatrix, Error, Graph};

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdlStatus {
    Ok = 0,
    /// A pointer argument was null or an argument was out of range.
    InvalidArgument = 1,
    /// The computation itself rejected the input (domain error).
    Domain = 2,
    /// Internal failure (panic caught at the boundary).
    Internal = 3,
}

/// Graph family selector for ensemble entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdlGraphFamily {
    Complete = 0,
    Star = 1,
    /// Uses the `k` and `p` arguments.
    WattsStrogatz = 2,
}

/// Battery quench axis.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdlAxis {
    X = 0,
    Z = 1,
}

/// Opaque ensemble curve: grid times with per-point mean and standard error.
pub struct OdlCurve {
    times: Vec<f64>,
    mean: Vec<f64>,
    stderr: Vec<f64>,
}

/// Opaque single-realization power series.
pub struct OdlPowerSeries {
    inner: opdeloc::battery::PowerSeries,
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.to_string());
}

fn status_of(err: &Error) -> OdlStatus {
    match err {
        Error::Io(_) => OdlStatus::Internal,
        _ => OdlStatus::Domain,
    }
}

fn family_of(family: OdlGraphFamily, k: usize, p: f64) -> GraphFamily {
    match family {
        OdlGraphFamily::Complete => GraphFamily::Complete,
        OdlGraphFamily::Star => GraphFamily::Star,
        OdlGraphFamily::WattsStrogatz => GraphFamily::WattsStrogatz { k, p },
    }
}

fn axis_of(axis: OdlAxis) -> BatteryAxis {
    match axis {
        OdlAxis::X => BatteryAxis::X,
        OdlAxis::Z => BatteryAxis::Z,
    }
}

fn guarded(f: impl FnOnce() -> OdlStatus) -> OdlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            OdlStatus::Internal
        }
    }
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `cap`). Returns the full message length.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (length query).
#[no_mangle]
pub unsafe extern "C" fn odl_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Ensemble-averaged K-complexity curve of the size-`size` initial string.
/// The grid is `0, dt, 2 dt, .., t_max`.
///
/// # Safety
/// `out` must be a valid pointer; on `Ok` it receives a handle that must be
/// freed with [`odl_curve_free`].
#[no_mangle]
pub unsafe extern "C" fn odl_ck_curve_ensemble(
    family: OdlGraphFamily,
    k: usize,
    p: f64,
    l: usize,
    size: usize,
    t_max: f64,
    dt: f64,
    realizations: usize,
    seed: u64,
    out: *mut *mut OdlCurve,
) -> OdlStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return OdlStatus::InvalidArgument;
    }
    guarded(|| {
        let times = time_grid(t_max, dt);
        match ck_curve_ensemble(family_of(family, k, p), l, size, &times, realizations, seed)
        {
            Ok(st) => {
                *out = Box::into_raw(Box::new(OdlCurve {
                    times,
                    mean: st.mean,
                    stderr: st.stderr,
                }));
                OdlStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Ensemble-averaged battery power curve; `p_max`/`t_star` (of the mean
/// curve) are written when the pointers are non-null.
///
/// # Safety
/// `out` must be valid; `p_max`/`t_star` may be null. The handle must be
/// freed with [`odl_curve_free`].
#[no_mangle]
pub unsafe extern "C" fn odl_battery_ensemble(
    family: OdlGraphFamily,
    k: usize,
    p: f64,
    l: usize,
    axis: OdlAxis,
    t_max: f64,
    dt: f64,
    realizations: usize,
    seed: u64,
    p_max: *mut f64,
    t_star: *mut f64,
    out: *mut *mut OdlCurve,
) -> OdlStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return OdlStatus::InvalidArgument;
    }
    guarded(|| {
        let times = time_grid(t_max, dt);
        match battery_ensemble(
            family_of(family, k, p),
            l,
            axis_of(axis),
            &times,
            realizations,
            seed,
        ) {
            Ok(be) => {
                if !p_max.is_null() {
                    *p_max = be.p_max;
                }
                if !t_star.is_null() {
                    *t_star = be.t_star;
                }
                *out = Box::into_raw(Box::new(OdlCurve {
                    times: be.times,
                    mean: be.power.mean,
                    stderr: be.power.stderr,
                }));
                OdlStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Delocalization ratio R between the size-`L/2` and size-1 ensemble curves.
///
/// # Safety
/// `r_mean`, `r_stderr` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn odl_delocalization_ratio(
    family: OdlGraphFamily,
    k: usize,
    p: f64,
    l: usize,
    t_max: f64,
    dt: f64,
    window_lo: f64,
    window_hi: f64,
    realizations: usize,
    seed: u64,
    r_mean: *mut f64,
    r_stderr: *mut f64,
) -> OdlStatus {
    if r_mean.is_null() || r_stderr.is_null() {
        set_error("output pointer is null");
        return OdlStatus::InvalidArgument;
    }
    guarded(|| {
        let times = time_grid(t_max, dt);
        match ratio_ensemble(
            family_of(family, k, p),
            l,
            &times,
            (window_lo, window_hi),
            realizations,
            seed,
        ) {
            Ok(rs) => {
                *r_mean = rs.r_mean;
                *r_stderr = rs.r_stderr;
                OdlStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Single-realization charging curve on the complete graph with a seeded
/// coupling draw (bandwidth-rescaled internally).
///
/// # Safety
/// `out` must be valid; free the handle with [`odl_power_series_free`].
#[no_mangle]
pub unsafe extern "C" fn odl_charging_power_complete(
    l: usize,
    axis: OdlAxis,
    t_max: f64,
    dt: f64,
    seed: u64,
    out: *mut *mut OdlPowerSeries,
) -> OdlStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return OdlStatus::InvalidArgument;
    }
    guarded(|| {
        let result = (|| -> opdeloc::Result<opdeloc::battery::PowerSeries> {
            let g = Graph::complete(l)?;
            let mut rng = opdeloc::ensemble::stream_rng(seed, 0);
            let j = CouplingMatrix::sample(&g, &mut rng).rescale_to_unit_bandwidth()?;
            charging_power(&j, axis_of(axis), &time_grid(t_max, dt))
        })();
        match result {
            Ok(ps) => {
                *out = Box::into_raw(Box::new(OdlPowerSeries { inner: ps }));
                OdlStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Number of grid points in a curve.
///
/// # Safety
/// `curve` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn odl_curve_len(curve: *const OdlCurve) -> usize {
    if curve.is_null() {
        return 0;
    }
    (*curve).times.len()
}

/// Reads one grid point of a curve. Out-pointers may be null to skip fields.
///
/// # Safety
/// `curve` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn odl_curve_get(
    curve: *const OdlCurve,
    index: usize,
    t: *mut f64,
    mean: *mut f64,
    stderr: *mut f64,
) -> OdlStatus {
    if curve.is_null() {
        set_error("curve handle is null");
        return OdlStatus::InvalidArgument;
    }
    let c = &*curve;
    if index >= c.times.len() {
        set_error("index out of range");
        return OdlStatus::InvalidArgument;
    }
    if !t.is_null() {
        *t = c.times[index];
    }
    if !mean.is_null() {
        *mean = c.mean[index];
    }
    if !stderr.is_null() {
        *stderr = c.stderr[index];
    }
    OdlStatus::Ok
}

/// Releases a curve handle. Null is a no-op.
///
/// # Safety
/// `curve` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odl_curve_free(curve: *mut OdlCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of grid points in a power series.
///
/// # Safety
/// `ps` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn odl_power_series_len(ps: *const OdlPowerSeries) -> usize {
    if ps.is_null() {
        return 0;
    }
    (*ps).inner.times.len()
}

/// Reads one grid point `(t, E, P)`; out-pointers may be null.
///
/// # Safety
/// `ps` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn odl_power_series_get(
    ps: *const OdlPowerSeries,
    index: usize,
    t: *mut f64,
    energy: *mut f64,
    power: *mut f64,
) -> OdlStatus {
    if ps.is_null() {
        set_error("series handle is null");
        return OdlStatus::InvalidArgument;
    }
    let s = &(*ps).inner;
    if index >= s.times.len() {
        set_error("index out of range");
        return OdlStatus::InvalidArgument;
    }
    if !t.is_null() {
        *t = s.times[index];
    }
    if !energy.is_null() {
        *energy = s.energy[index];
    }
    if !power.is_null() {
        *power = s.power[index];
    }
    OdlStatus::Ok
}

/// Maximum average power of a series and the refined time it occurs at.
///
/// # Safety
/// `ps` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn odl_power_series_max(
    ps: *const OdlPowerSeries,
    p_max: *mut f64,
    t_star: *mut f64,
) -> OdlStatus {
    if ps.is_null() {
        set_error("series handle is null");
        return OdlStatus::InvalidArgument;
    }
    let s = &(*ps).inner;
    if !p_max.is_null() {
        *p_max = s.p_max;
    }
    if !t_star.is_null() {
        *t_star = s.t_star;
    }
    OdlStatus::Ok
}

/// Releases a power-series handle. Null is a no-op.
///
/// # Safety
/// `ps` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odl_power_series_free(ps: *mut OdlPowerSeries) {
    if !ps.is_null() {
        drop(Box::from_raw(ps));
    }
}
