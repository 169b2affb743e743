//! Green function of the Helmholtz operator, Graf translation of monopoles
//! and dipoles to a device center, and geometric truncation bounds.
//!
//! With theta = arg(x - x_j) - arg(y - x_j),
//!
//! G(x - y) = (i/4) sum_m H_m(k|x - x_j|) J_m(k|y - x_j|) e^{i m theta}
//!
//! for |y - x_j| < |x - x_j|. Terms m and -m are summed as pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::specfun::{bessel_j_range, hankel1_01, hankel1_range};
use crate::{check_wavenumber, dist, dot, sub, Point, C64};

const I: C64 = C64::new(0.0, 1.0);
const QUARTER_I: C64 = C64::new(0.0, 0.25);

/// G(x - y) = (i/4) H_0(k|x - y|).
pub fn green(x: Point, y: Point, k: C64) -> Result<C64> {
    check_wavenumber(k)?;
    let r = dist(x, y);
    if r == 0.0 {
        return Err(Error::Singular("x = y"));
    }
    Ok(QUARTER_I * hankel1_01(k * r)?.0)
}

/// Normal derivative of G(x - y) with respect to y along `nu`.
pub fn green_normal_derivative(x: Point, y: Point, nu: Point, k: C64) -> Result<C64> {
    check_wavenumber(k)?;
    let d = sub(y, x);
    let r = crate::norm(d);
    if r == 0.0 {
        return Err(Error::Singular("x = y"));
    }
    let h1 = hankel1_01(k * r)?.1;
    Ok(-QUARTER_I * k * h1 * (dot(d, nu) / r))
}

/// A monopole (and optionally a dipole with normal `nu`) at `y`, to be
/// re-expanded about the device center `x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceTranslation {
    pub y: Point,
    pub x_j: Point,
    #[serde(default)]
    pub nu: Option<Point>,
}

/// Products H_m(zx) J_{m-1}(zy), H_m(zx) J_m(zy), H_m(zx) J_{m+1}(zy) for
/// m = 0..=order.
///
/// At high order H_m overflows and J_m underflows long before their product
/// leaves the floating range, so once either gets extreme the product is
/// carried forward by ratios instead.
pub(crate) fn hj_products(order: usize, zx: C64, zy: C64) -> Result<Vec<[C64; 3]>> {
    const BIG: f64 = 1e250;
    let zero = C64::new(0.0, 0.0);
    let h = hankel1_range(order, zx)?;
    if zy == zero {
        let mut out = vec![[zero; 3]; order + 1];
        out[0][1] = h[0];
        if order >= 1 {
            out[1][0] = h[1];
        }
        return Ok(out);
    }
    let j = bessel_j_range(order + 1, zy)?;
    let jm1 = |m: usize| if m == 0 { -j[1] } else { j[m - 1] };
    let sane = |m: usize| {
        h[m].re.is_finite()
            && h[m].im.is_finite()
            && h[m].norm() < BIG
            && j[m].norm() > 1.0 / BIG
            && j[m + 1].norm() > 1.0 / BIG
    };
    let mut out = Vec::with_capacity(order + 1);
    let mut m = 0;
    while m <= order && sane(m) {
        out.push([h[m] * jm1(m), h[m] * j[m], h[m] * j[m + 1]]);
        m += 1;
    }
    if m > order {
        return Ok(out);
    }
    if m == 0 {
        return Err(Error::Numerical("Hankel function overflow at order 0".into()));
    }
    // rj[n] = J_n / J_{n-1} by backward recurrence
    let top = order + 2 + 30 + 2 * zy.norm().ceil() as usize;
    let mut rj = vec![zero; top + 2];
    for n in (1..=top).rev() {
        rj[n] = 1.0 / (2.0 * n as f64 / zy - rj[n + 1]);
    }
    // rh = H_n / H_{n-1} by forward recurrence
    let mut rh = h[1] / h[0];
    for n in 2..m {
        rh = 2.0 * (n - 1) as f64 / zx - 1.0 / rh;
    }
    let mut p = out[m - 1][1];
    while m <= order {
        rh = if m == 1 { h[1] / h[0] } else { 2.0 * (m - 1) as f64 / zx - 1.0 / rh };
        p *= rh * rj[m];
        out.push([p / rj[m], p, p * rj[m + 1]]);
        m += 1;
    }
    Ok(out)
}

struct Frame {
    zx: C64,
    zy: C64,
    theta: f64,
}

fn frame(x: Point, y: Point, x_j: Point, k: C64) -> Result<Frame> {
    check_wavenumber(k)?;
    let dx = sub(x, x_j);
    let dy = sub(y, x_j);
    let rx = crate::norm(dx);
    if rx == 0.0 {
        return Err(Error::Singular("x = x_j"));
    }
    let theta = dx[1].atan2(dx[0]) - dy[1].atan2(dy[0]);
    Ok(Frame { zx: k * rx, zy: k * crate::norm(dy), theta })
}

fn finite(v: C64) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical("truncated series overflowed".into()))
    }
}

/// Graf series of the monopole truncated to |m| <= `order`.
pub fn translated_green(x: Point, st: &SourceTranslation, k: C64, order: usize) -> Result<C64> {
    let f = frame(x, st.y, st.x_j, k)?;
    let p = hj_products(order, f.zx, f.zy)?;
    let mut s = p[0][1];
    for (m, t) in p.iter().enumerate().skip(1) {
        s += 2.0 * (m as f64 * f.theta).cos() * t[1];
    }
    finite(QUARTER_I * s)
}

/// Term-by-term normal derivative in y of the truncated Graf series.
pub fn translated_dipole(x: Point, st: &SourceTranslation, k: C64, order: usize) -> Result<C64> {
    let nu = st.nu.ok_or_else(|| invalid("dipole needs a normal"))?;
    let f = frame(x, st.y, st.x_j, k)?;
    let d = sub(st.y, st.x_j);
    let r = crate::norm(d);
    if r == 0.0 {
        return Err(Error::Singular("y = x_j"));
    }
    // d|y - x_j| / d nu and d theta / d nu
    let dr = dot(d, nu) / r;
    let dth = -(d[0] * nu[1] - d[1] * nu[0]) / (r * r);
    let p = hj_products(order, f.zx, f.zy)?;
    let mut s = -k * dr * p[0][2];
    for (m, t) in p.iter().enumerate().skip(1) {
        let (sn, cs) = (m as f64 * f.theta).sin_cos();
        let radial = 0.5 * k * dr * (t[0] - t[2]) * cs;
        let angular = m as f64 * dth * t[1] * sn;
        s += 2.0 * (radial - angular);
    }
    finite(QUARTER_I * s)
}

/// Monopole and dipole truncation errors at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationErrors {
    pub monopole: f64,
    /// Fails when no normal is given or y = x_j.
    pub dipole: Result<f64>,
}

pub fn truncation_errors(
    x: Point,
    st: &SourceTranslation,
    k: C64,
    order: usize,
) -> Result<TruncationErrors> {
    let monopole = (green(x, st.y, k)? - translated_green(x, st, k, order)?).norm();
    let dipole = match st.nu {
        None => Err(invalid("dipole needs a normal")),
        Some(nu) => green_normal_derivative(x, st.y, nu, k).and_then(|g| {
            Ok((g - translated_dipole(x, st, k, order)?).norm())
        }),
    };
    Ok(TruncationErrors { monopole, dipole })
}

/// a_x = max_y |y - x_j| / |x - x_j|; fails unless a_x < 1.
pub fn geometric_ratio(x: Point, sources: &[Point], x_j: Point) -> Result<f64> {
    let rx = dist(x, x_j);
    let ry = sources.iter().map(|&y| dist(y, x_j)).fold(0.0, f64::max);
    if ry == 0.0 && rx > 0.0 {
        return Ok(0.0);
    }
    if ry >= rx {
        return Err(Error::DivergenceRegion);
    }
    Ok(ry / rx)
}

/// Geometric bound model with fitted constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBoundModel {
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub m_fit: usize,
}

/// sum_{m > order} a^m / m, the tail of -ln(1 - a).
pub fn log_tail(a: f64, order: usize) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let mut m = order + 1;
    let mut pow = a.powi(m as i32);
    let mut s = 0.0;
    loop {
        let t = pow / m as f64;
        s += t;
        if t <= 1e-17 * s || pow == 0.0 {
            break;
        }
        pow *= a;
        m += 1;
    }
    s
}

/// a^(order+1) / (1 - a).
pub fn geometric_tail(a: f64, order: usize) -> f64 {
    a.powi(order as i32 + 1) / (1.0 - a)
}

fn check_ratio(a: f64) -> Result<()> {
    if (0.0..1.0).contains(&a) {
        Ok(())
    } else {
        Err(invalid(format!("ratio a = {a} must lie in [0, 1)")))
    }
}

/// (monopole bound, dipole bound) at truncation order `order`.
pub fn theoretical_bounds(model: &TruncationBoundModel, order: usize) -> Result<(f64, f64)> {
    check_ratio(model.a)?;
    Ok((model.c1 * log_tail(model.a, order), model.c2 * geometric_tail(model.a, order)))
}

/// Fit C1 and C2 so that the bound forms match the observed errors at
/// `m_fit`, taking the maxima over the (x, k) grid.
pub fn fit_bound_constant(
    x_grid: &[Point],
    k_grid: &[C64],
    st: &SourceTranslation,
    m_fit: usize,
) -> Result<TruncationBoundModel> {
    if x_grid.is_empty() || k_grid.is_empty() {
        return Err(invalid("empty fitting grid"));
    }
    let mut a: f64 = 0.0;
    for &x in x_grid {
        a = a.max(geometric_ratio(x, &[st.y], st.x_j)?);
    }
    let pairs: Vec<(Point, C64)> = x_grid
        .iter()
        .flat_map(|&x| k_grid.iter().map(move |&k| (x, k)))
        .collect();
    let fitted = pairs
        .par_iter()
        .map(|&(x, k)| {
            let e = truncation_errors(x, st, k, m_fit)?;
            let c1 = if a == 0.0 { 0.0 } else { e.monopole / log_tail(a, m_fit) };
            let c2 = match (st.nu, a) {
                (None, _) | (_, 0.0) => 0.0,
                _ => e.dipole? / geometric_tail(a, m_fit),
            };
            Ok((c1, c2))
        })
        .collect::<Result<Vec<_>>>()?;
    let (c1, c2) = fitted
        .into_iter()
        .fold((0.0f64, 0.0f64), |(p, q), (c1, c2)| (p.max(c1), q.max(c2)));
    Ok(TruncationBoundModel { a, c1, c2, m_fit })
}

/// The four wavenumber segments, each parametrised by theta in [0.5, 20].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WavenumberFamily {
    /// k = theta.
    Real,
    /// k = i theta.
    Imaginary,
    /// k = (1 + i sqrt 2) theta / sqrt 3.
    Dissipative,
    /// k = (99 - i sqrt 199) theta / 100.
    Amplifying,
}

pub const THETA_RANGE: (f64, f64) = (0.5, 20.0);

impl WavenumberFamily {
    pub const ALL: [WavenumberFamily; 4] = [
        WavenumberFamily::Real,
        WavenumberFamily::Imaginary,
        WavenumberFamily::Dissipative,
        WavenumberFamily::Amplifying,
    ];

    /// Unit-modulus direction of the segment.
    pub fn direction(self) -> C64 {
        match self {
            WavenumberFamily::Real => C64::new(1.0, 0.0),
            WavenumberFamily::Imaginary => I,
            WavenumberFamily::Dissipative => C64::new(1.0, 2f64.sqrt()) / 3f64.sqrt(),
            WavenumberFamily::Amplifying => C64::new(99.0, -199f64.sqrt()) / 100.0,
        }
    }

    pub fn at(self, theta: f64) -> C64 {
        self.direction() * theta
    }

    /// `n` equispaced samples over the theta range, endpoints included.
    pub fn samples(self, n: usize) -> Vec<C64> {
        let (lo, hi) = THETA_RANGE;
        match n {
            0 => vec![],
            1 => vec![self.at(lo)],
            _ => (0..n)
                .map(|i| self.at(lo + (hi - lo) * i as f64 / (n - 1) as f64))
                .collect(),
        }
    }
}
