//! Active exterior cloaking for the two-dimensional Helmholtz equation at
//! complex wavenumbers, and a transient heat-equation pipeline built on it.
//!
//! Modules, bottom up:
//! - [`specfun`]: complex-argument Bessel and Hankel functions.
//! - [`graf`]: Green function, Graf source translation, truncation bounds.
//! - [`cloak`]: interior reproduction, multipole devices, error audits.
//! - [`scatter`]: sound-soft scattering by a combined-field Nyström solver.
//! - [`heat`]: Fourier-Laplace pipeline for time-domain thermal cloaking.
//! - [`cli`]: configuration-driven runner behind the `helmcloak` binary.

pub mod error;
pub mod cli;
pub mod cloak;
pub mod graf;
pub mod heat;
pub mod scatter;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// A point in the plane.
pub type Point = [f64; 2];

/// Regime flags of a wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Regime {
    /// Im k > 0.
    pub lossy: bool,
    /// Im k < 0.
    pub gain: bool,
    /// |Im k| > |Re k|, where homogeneous solutions obey a strong maximum principle.
    pub max_principle: bool,
}

/// Reject wavenumbers that are not finite or lie on (-inf, 0].
pub fn check_wavenumber(k: C64) -> Result<()> {
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(specfun::SpecfunError::NonFinite.into());
    }
    if specfun::on_branch_cut(k) {
        return Err(specfun::SpecfunError::BranchCut.into());
    }
    Ok(())
}

pub fn classify(k: C64) -> Regime {
    Regime {
        lossy: k.im > 0.0,
        gain: k.im < 0.0,
        max_principle: k.im.abs() > k.re.abs(),
    }
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
