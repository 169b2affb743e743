//! C ABI over helmcloak.
//!
//! Every function returns an [`HcStatus`]; results go through out-pointers.
//! The message of the last failure on the calling thread is available from
//! [`hc_last_error_message`]. Handles are opaque and must be released with
//! their `_free` function.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use helmcloak::cloak::{
    exterior_cloak_field, interior_cloak_field, multipole_coefficients, quadrature,
    BoundaryQuadrature, CloakGeometry, MultipoleCoefficients, PointSource,
};
use helmcloak::error::Error;
use helmcloak::heat::{build_contour, heat_wavenumber, inverse_laplace};
use helmcloak::scatter::{
    boundary_residual, choose_eta, scattered_field, CfieSystem, DensitySolution, Kite,
    ObstacleDiscretization,
};
use helmcloak::specfun::{bessel_j, hankel1, SpecfunError};
use helmcloak::C64;
use num_complex::Complex64;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BranchCut = 3,
    Singular = 4,
    DivergenceRegion = 5,
    Unsupported = 6,
    Numerical = 7,
    Panic = 8,
}

/// Complex number passed by value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcComplex {
    pub re: f64,
    pub im: f64,
}

impl From<HcComplex> for Complex64 {
    fn from(c: HcComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for HcComplex {
    fn from(c: Complex64) -> Self {
        HcComplex { re: c.re, im: c.im }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::Specfun(SpecfunError::BranchCut) => HcStatus::BranchCut,
        Error::Specfun(_) | Error::InvalidArgument(_) => HcStatus::InvalidArgument,
        Error::Singular(_) => HcStatus::Singular,
        Error::DivergenceRegion => HcStatus::DivergenceRegion,
        Error::Unsupported(_) => HcStatus::Unsupported,
        Error::Numerical(_) => HcStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), HcStatus>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside helmcloak".into());
            HcStatus::Panic
        }
    }
}

fn check<T>(r: helmcloak::Result<T>) -> Result<T, HcStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn out<'a, T>(p: *mut T) -> Result<&'a mut T, HcStatus> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| {
        set_error("null pointer argument".into());
        HcStatus::NullPointer
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: buf has len bytes and n < len.
            unsafe {
                std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// J_n(z).
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_bessel_j(n: i32, z: HcComplex, result: *mut HcComplex) -> HcStatus {
    guard(|| {
        let r = out(result)?;
        *r = check(bessel_j(n, z.into()).map_err(Error::from))?.into();
        Ok(())
    })
}

/// H_n^(1)(z).
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_hankel1(n: i32, z: HcComplex, result: *mut HcComplex) -> HcStatus {
    guard(|| {
        let r = out(result)?;
        *r = check(hankel1(n, z.into()).map_err(Error::from))?.into();
        Ok(())
    })
}

/// G(x - y) = (i/4) H_0(k |x - y|).
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_green(
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    k: HcComplex,
    result: *mut HcComplex,
) -> HcStatus {
    guard(|| {
        let r = out(result)?;
        *r = check(helmcloak::graf::green([x1, x2], [y1, y2], k.into()))?.into();
        Ok(())
    })
}

/// k = i sqrt(-i omega / sigma).
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_heat_wavenumber(omega: HcComplex, sigma: f64, result: *mut HcComplex) -> HcStatus {
    guard(|| {
        let r = out(result)?;
        *r = check(heat_wavenumber(omega.into(), sigma))?.into();
        Ok(())
    })
}

/// Time samples u(p T / N), p = 0..N, from 2N + 2 transform samples at
/// s_q = c - i q dw of the contour built from (t_final, n_steps).
///
/// # Safety
/// `samples` must hold `n_samples` values and `result` room for
/// `n_steps + 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_inverse_laplace(
    samples: *const HcComplex,
    n_samples: usize,
    t_final: f64,
    n_steps: usize,
    result: *mut f64,
) -> HcStatus {
    guard(|| {
        if samples.is_null() || result.is_null() {
            set_error("null pointer argument".into());
            return Err(HcStatus::NullPointer);
        }
        let c = check(build_contour(t_final, n_steps))?;
        if n_samples != c.n_samples {
            set_error(format!("expected {} samples", c.n_samples));
            return Err(HcStatus::InvalidArgument);
        }
        // SAFETY: documented buffer sizes.
        let s = unsafe { std::slice::from_raw_parts(samples, n_samples) };
        let s: Vec<C64> = s.iter().map(|&v| v.into()).collect();
        let u = check(inverse_laplace(&s, &c))?;
        // SAFETY: documented buffer sizes.
        unsafe { std::ptr::copy_nonoverlapping(u.as_ptr(), result, u.len()) };
        Ok(())
    })
}

/// Cloak of a disk by four devices for one point source and wavenumber.
pub struct HcCloak {
    geom: CloakGeometry,
    quad: BoundaryQuadrature,
    source: PointSource,
    k: C64,
    coeffs: MultipoleCoefficients,
}

/// Standard four-device cloak of the disk (center, delta_c) with `n_int`
/// boundary nodes, truncated at `order`.
///
/// # Safety
/// `handle` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_cloak_new(
    center_x: f64,
    center_y: f64,
    delta_c: f64,
    n_int: usize,
    source_x: f64,
    source_y: f64,
    k: HcComplex,
    order: usize,
    handle: *mut *mut HcCloak,
) -> HcStatus {
    guard(|| {
        let h = out(handle)?;
        let geom = CloakGeometry::standard([center_x, center_y], delta_c, n_int);
        check(geom.validate())?;
        let quad = check(quadrature(&geom))?;
        let source = PointSource::new([source_x, source_y]);
        let k: C64 = k.into();
        let coeffs = check(multipole_coefficients(&geom, &quad, &source, k, order))?;
        *h = Box::into_raw(Box::new(HcCloak { geom, quad, source, k, coeffs }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`hc_cloak_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_cloak_free(handle: *mut HcCloak) {
    if !handle.is_null() {
        // SAFETY: created by Box::into_raw in hc_cloak_new.
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Truncated multipole field u_e^(M)(x).
///
/// # Safety
/// `handle` must be a live cloak; `result` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_cloak_exterior_field(
    handle: *const HcCloak,
    x: f64,
    y: f64,
    result: *mut HcComplex,
) -> HcStatus {
    guard(|| {
        // SAFETY: caller contract.
        let h = unsafe { handle.as_ref() }.ok_or(HcStatus::NullPointer)?;
        let r = out(result)?;
        *r = check(exterior_cloak_field([x, y], &h.coeffs, &h.geom))?.into();
        Ok(())
    })
}

/// Green-identity field u_c(x) (equal to -u_i inside the disk, 0 outside).
///
/// # Safety
/// `handle` must be a live cloak; `result` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_cloak_interior_field(
    handle: *const HcCloak,
    x: f64,
    y: f64,
    result: *mut HcComplex,
) -> HcStatus {
    guard(|| {
        // SAFETY: caller contract.
        let h = unsafe { handle.as_ref() }.ok_or(HcStatus::NullPointer)?;
        let r = out(result)?;
        *r = check(interior_cloak_field([x, y], &h.quad, &h.source, h.k))?.value.into();
        Ok(())
    })
}

/// Sound-soft kite scattering a point source.
pub struct HcScatter {
    kite: Kite,
    obst: ObstacleDiscretization,
    source: PointSource,
    density: DensitySolution,
}

/// Solve the combined-field equation; `eta <= 0` picks |k|.
///
/// # Safety
/// `handle` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_scatter_new(
    center_x: f64,
    center_y: f64,
    scale: f64,
    n_nodes: usize,
    k: HcComplex,
    eta: f64,
    source_x: f64,
    source_y: f64,
    handle: *mut *mut HcScatter,
) -> HcStatus {
    guard(|| {
        let h = out(handle)?;
        let kite = Kite { center: [center_x, center_y], scale };
        let obst = check(kite.discretize(n_nodes))?;
        let k: C64 = k.into();
        let eta = if eta > 0.0 { eta } else { choose_eta(k) };
        let source = PointSource::new([source_x, source_y]);
        let sys = check(CfieSystem::assemble(&obst, k, eta))?;
        let trace = check(
            obst.q
                .iter()
                .map(|&y| helmcloak::graf::green(y, source.position, k))
                .collect::<helmcloak::Result<Vec<_>>>(),
        )?;
        let density = check(sys.solve(&trace))?;
        *h = Box::into_raw(Box::new(HcScatter { kite, obst, source, density }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`hc_scatter_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_scatter_free(handle: *mut HcScatter) {
    if !handle.is_null() {
        // SAFETY: created by Box::into_raw in hc_scatter_new.
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Scattered field u_s(x); `warning` (optional) is set to 1 near or inside
/// the obstacle.
///
/// # Safety
/// `handle` must be live; `result` null or valid; `warning` null or valid.
#[no_mangle]
pub unsafe extern "C" fn hc_scatter_field(
    handle: *const HcScatter,
    x: f64,
    y: f64,
    result: *mut HcComplex,
    warning: *mut i32,
) -> HcStatus {
    guard(|| {
        // SAFETY: caller contract.
        let h = unsafe { handle.as_ref() }.ok_or(HcStatus::NullPointer)?;
        let r = out(result)?;
        let v = check(scattered_field([x, y], &h.obst, &h.density))?;
        *r = v.value.into();
        // SAFETY: caller contract.
        if let Some(w) = unsafe { warning.as_mut() } {
            *w = v.accuracy_warning as i32;
        }
        Ok(())
    })
}

/// max |u_i + u_s| at boundary points between the nodes, and the
/// condition estimate of the solve.
///
/// # Safety
/// `handle` must be live; the out-pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn hc_scatter_diagnostics(
    handle: *const HcScatter,
    residual: *mut f64,
    condition: *mut f64,
) -> HcStatus {
    guard(|| {
        // SAFETY: caller contract.
        let h = unsafe { handle.as_ref() }.ok_or(HcStatus::NullPointer)?;
        let res = out(residual)?;
        let k = h.density.k;
        let src = h.source.position;
        *res = check(boundary_residual(&h.kite, &h.obst, &h.density, &|x| {
            helmcloak::graf::green(x, src, k)
        }))?;
        *out(condition)? = h.density.condition_estimate;
        Ok(())
    })
}
