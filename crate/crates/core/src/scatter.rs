//! Sound-soft scattering by a smooth obstacle A for Im k >= 0.
//!
//! The scattered field is the combined potential
//! u_s(x) = int_{dA} (dG(x - y)/dnu(y) - i eta G(x - y)) psi(y) dS(y),
//! and the Dirichlet condition becomes psi + K psi - i eta S psi = -2 u_i
//! with S and K the single- and double-layer operators scaled by 2. Both
//! kernels are log-singular on the diagonal; the trapezoid rule is corrected
//! with sixth-order Kapur-Rokhlin weights.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::specfun::{DirectHankel, Hankel01};
use crate::{check_wavenumber, dist, Point, C64};

/// Sixth-order Kapur-Rokhlin end corrections for a logarithmic singularity,
/// applied symmetrically at offsets 1..=6 from the excluded diagonal.
pub const KAPUR_ROKHLIN_6: [f64; 6] = [
    4.967_362_978_287_758,
    -16.205_015_048_591_26,
    25.851_537_618_326_39,
    -22.225_994_667_918_83,
    9.930_104_998_037_539,
    -1.817_995_878_141_594,
];

/// Corrected trapezoid rule for a 2 pi-periodic integrand with a log
/// singularity at sample `i`; `f[i]` is never read.
pub fn kapur_rokhlin_periodic(f: &[f64], i: usize) -> f64 {
    let n = f.len();
    let h = 2.0 * PI / n as f64;
    let mut s = 0.0;
    for (j, v) in f.iter().enumerate() {
        if j != i {
            s += v;
        }
    }
    for (l, g) in KAPUR_ROKHLIN_6.iter().enumerate() {
        let l = l + 1;
        s += g * (f[(i + l) % n] + f[(i + n - l % n) % n]);
    }
    h * s
}

/// Trapezoid weight between target i and source j, corrected near the diagonal.
fn kr_weight(i: usize, j: usize, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    let d = (i as isize - j as isize).rem_euclid(n as isize) as usize;
    let d = d.min(n - d);
    match d {
        0 => 0.0,
        1..=6 => h * (1.0 + KAPUR_ROKHLIN_6[d - 1]),
        _ => h,
    }
}

/// Samples of a 2 pi-periodic boundary parametrisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleDiscretization {
    pub n_nodes: usize,
    pub tau: Vec<f64>,
    pub q: Vec<Point>,
    pub dq: Vec<Point>,
    /// Outward unit normals.
    pub normals: Vec<Point>,
    /// |q'(tau)|.
    pub jacobian: Vec<f64>,
}

/// Kite shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kite {
    pub center: Point,
    pub scale: f64,
}

impl Kite {
    pub fn point(&self, t: f64) -> Point {
        let s = self.scale;
        [
            self.center[0] + s * (t.cos() + 0.65 * (2.0 * t).cos() - 0.65),
            self.center[1] + s * 1.5 * t.sin(),
        ]
    }

    pub fn derivative(&self, t: f64) -> Point {
        let s = self.scale;
        [s * (-t.sin() - 1.3 * (2.0 * t).sin()), s * 1.5 * t.cos()]
    }

    /// Largest distance from the center over a fine sampling.
    pub fn extent(&self) -> f64 {
        (0..4096)
            .map(|i| dist(self.point(2.0 * PI * i as f64 / 4096.0), self.center))
            .fold(0.0, f64::max)
    }

    pub fn discretize(&self, n_nodes: usize) -> Result<ObstacleDiscretization> {
        kite_obstacle(self.center, self.scale, n_nodes)
    }
}

/// q(t) = center + scale (cos t + 0.65 cos 2t - 0.65, 1.5 sin t), counterclockwise.
pub fn kite_obstacle(center: Point, scale: f64, n_nodes: usize) -> Result<ObstacleDiscretization> {
    if n_nodes < 16 || n_nodes % 2 != 0 {
        return Err(invalid("n_nodes must be even and at least 16"));
    }
    if !(scale > 0.0 && scale.is_finite()) || !center.iter().all(|c| c.is_finite()) {
        return Err(invalid("kite needs a finite center and positive scale"));
    }
    let kite = Kite { center, scale };
    let mut o = ObstacleDiscretization {
        n_nodes,
        tau: Vec::with_capacity(n_nodes),
        q: Vec::with_capacity(n_nodes),
        dq: Vec::with_capacity(n_nodes),
        normals: Vec::with_capacity(n_nodes),
        jacobian: Vec::with_capacity(n_nodes),
    };
    for i in 0..n_nodes {
        let t = 2.0 * PI * i as f64 / n_nodes as f64;
        let d = kite.derivative(t);
        let j = d[0].hypot(d[1]);
        o.tau.push(t);
        o.q.push(kite.point(t));
        o.dq.push(d);
        o.normals.push([d[1] / j, -d[0] / j]);
        o.jacobian.push(j);
    }
    Ok(o)
}

impl ObstacleDiscretization {
    /// Winding number of the sampled polygon around `x`.
    pub fn winding_number(&self, x: Point) -> i32 {
        let n = self.n_nodes;
        let mut total = 0.0;
        for i in 0..n {
            let a = self.q[i];
            let b = self.q[(i + 1) % n];
            let ta = (a[1] - x[1]).atan2(a[0] - x[0]);
            let tb = (b[1] - x[1]).atan2(b[0] - x[0]);
            let mut d = tb - ta;
            if d > PI {
                d -= 2.0 * PI;
            } else if d < -PI {
                d += 2.0 * PI;
            }
            total += d;
        }
        (total / (2.0 * PI)).round() as i32
    }

    pub fn contains(&self, x: Point) -> bool {
        self.winding_number(x) != 0
    }

    /// Largest arc length between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        let h = 2.0 * PI / self.n_nodes as f64;
        h * self.jacobian.iter().cloned().fold(0.0, f64::max)
    }

    /// Trapezoid arc length.
    pub fn perimeter(&self) -> f64 {
        let h = 2.0 * PI / self.n_nodes as f64;
        h * self.jacobian.iter().sum::<f64>()
    }

    pub fn distance(&self, x: Point) -> f64 {
        self.q.iter().map(|&y| dist(x, y)).fold(f64::INFINITY, f64::min)
    }
}

/// eta = |k| for Re k >= 0, else -|k|.
pub fn choose_eta(k: C64) -> f64 {
    if k.re >= 0.0 {
        k.norm()
    } else {
        -k.norm()
    }
}

fn check_scattering(k: C64, eta: f64) -> Result<()> {
    check_wavenumber(k)?;
    if k.im < 0.0 {
        return Err(Error::Unsupported("scattering with Im k < 0 (gain media)"));
    }
    if !(eta.is_finite() && eta != 0.0 && eta * k.re >= 0.0) {
        return Err(invalid(format!("coupling eta = {eta} needs eta != 0 and eta Re k >= 0")));
    }
    Ok(())
}

/// Combined kernel 2 (dG/dnu(y) - i eta G) at target x, source y with normal nu.
fn combined_kernel(h: &dyn Hankel01, eta: f64, x: Point, y: Point, nu: Point) -> Result<C64> {
    let k = h.k();
    let d = [x[0] - y[0], x[1] - y[1]];
    let r = d[0].hypot(d[1]);
    let (h0, h1) = h.h01(r)?;
    let dl = C64::new(0.0, 0.5) * k * h1 * ((d[0] * nu[0] + d[1] * nu[1]) / r);
    let sl = C64::new(0.0, 0.5) * h0;
    Ok(dl - C64::new(0.0, eta) * sl)
}

/// Factored Nystrom system for one wavenumber.
pub struct CfieSystem {
    k: C64,
    eta: f64,
    n: usize,
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl std::fmt::Debug for CfieSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CfieSystem")
            .field("k", &self.k)
            .field("eta", &self.eta)
            .field("n", &self.n)
            .field("condition", &self.condition)
            .finish()
    }
}

/// Above this 1-norm condition estimate the solve is refused.
pub const MAX_CONDITION: f64 = 1e12;

impl CfieSystem {
    pub fn assemble(obst: &ObstacleDiscretization, k: C64, eta: f64) -> Result<Self> {
        Self::assemble_with(obst, &DirectHankel(k), eta)
    }

    /// Assemble with a custom H_0/H_1 source (e.g. a table).
    pub fn assemble_with(obst: &ObstacleDiscretization, h: &dyn Hankel01, eta: f64) -> Result<Self> {
        let k = h.k();
        check_scattering(k, eta)?;
        let n = obst.n_nodes;
        let rows: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            return Ok(C64::new(1.0, 0.0));
                        }
                        let w = kr_weight(i, j, n) * obst.jacobian[j];
                        Ok(w * combined_kernel(h, eta, obst.q[i], obst.q[j], obst.normals[j])?)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        if a.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Numerical("non-finite system matrix".into()));
        }
        let norm1 = one_norm(&a);
        let lu = a.lu();
        let inv_norm = inverse_one_norm_estimate(&lu, n)
            .ok_or_else(|| Error::Numerical("singular system matrix".into()))?;
        let condition = norm1 * inv_norm;
        if !(condition.is_finite() && condition < MAX_CONDITION) {
            return Err(Error::Numerical(format!(
                "ill-conditioned system, condition estimate {condition:e}"
            )));
        }
        Ok(CfieSystem { k, eta, n, lu, condition })
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Density for the incident trace `u_inc` at the nodes.
    pub fn solve(&self, u_inc: &[C64]) -> Result<DensitySolution> {
        if u_inc.len() != self.n {
            return Err(invalid("trace length does not match the node count"));
        }
        let b = DVector::from_iterator(self.n, u_inc.iter().map(|v| -2.0 * v));
        let psi = self
            .lu
            .solve(&b)
            .ok_or_else(|| Error::Numerical("singular system matrix".into()))?;
        Ok(DensitySolution {
            psi: psi.iter().cloned().collect(),
            k: self.k,
            eta: self.eta,
            condition_estimate: self.condition,
        })
    }
}

fn one_norm(a: &DMatrix<C64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager's estimate of ||A^{-1}||_1 from an LU factorisation (P A = L U).
fn inverse_one_norm_estimate(
    lu: &nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
) -> Option<f64> {
    let l = lu.l();
    let u = lu.u();
    let solve_adjoint = |b: &DVector<C64>| -> Option<DVector<C64>> {
        // A^H = U^H L^H P
        let w = u.ad_solve_upper_triangular(b)?;
        let mut v = l.ad_solve_lower_triangular(&w)?;
        lu.p().inv_permute_rows(&mut v);
        Some(v)
    };
    let mut x = DVector::from_element(n, C64::new(1.0 / n as f64, 0.0));
    let mut est = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        est = y.iter().map(|v| v.norm()).sum::<f64>();
        let xi = y.map(|v| if v.norm() == 0.0 { C64::new(1.0, 0.0) } else { v / v.norm() });
        let z = solve_adjoint(&xi)?;
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        let zx = z.dotc(&x).re;
        if zmax <= zx {
            break;
        }
        x = DVector::from_element(n, C64::new(0.0, 0.0));
        x[jmax] = C64::new(1.0, 0.0);
    }
    Some(est)
}

/// Density psi at the nodes with the parameters it was solved for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySolution {
    pub psi: Vec<C64>,
    pub k: C64,
    pub eta: f64,
    pub condition_estimate: f64,
}

/// Solve psi + K psi - i eta S psi = -2 u_inc.
pub fn solve_density(
    obst: &ObstacleDiscretization,
    u_inc_trace: &[C64],
    k: C64,
    eta: f64,
) -> Result<DensitySolution> {
    CfieSystem::assemble(obst, k, eta)?.solve(u_inc_trace)
}

/// Scattered field with an accuracy flag for points near or inside A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteredValue {
    pub value: C64,
    pub accuracy_warning: bool,
}

pub fn scattered_field(
    x: Point,
    obst: &ObstacleDiscretization,
    density: &DensitySolution,
) -> Result<ScatteredValue> {
    scattered_field_with(x, obst, density, &DirectHankel(density.k))
}

pub fn scattered_field_with(
    x: Point,
    obst: &ObstacleDiscretization,
    density: &DensitySolution,
    h: &dyn Hankel01,
) -> Result<ScatteredValue> {
    if density.psi.len() != obst.n_nodes {
        return Err(invalid("density length does not match the node count"));
    }
    let near = obst.distance(x);
    if near == 0.0 {
        return Err(Error::Singular("evaluation point is a boundary node"));
    }
    let warn = near < obst.spacing() || obst.contains(x);
    Ok(ScatteredValue { value: layer_potential(x, obst, density, h)?, accuracy_warning: warn })
}

/// The trapezoid sum behind [`scattered_field_with`], without the
/// proximity checks.
pub fn layer_potential(
    x: Point,
    obst: &ObstacleDiscretization,
    density: &DensitySolution,
    h: &dyn Hankel01,
) -> Result<C64> {
    let mut out = [C64::new(0.0, 0.0)];
    layer_potentials(x, obst, std::slice::from_ref(density), h, &mut out)?;
    Ok(out[0])
}

/// Several densities sharing k and eta, with one kernel evaluation per node.
pub fn layer_potentials(
    x: Point,
    obst: &ObstacleDiscretization,
    densities: &[DensitySolution],
    h: &dyn Hankel01,
    out: &mut [C64],
) -> Result<()> {
    let Some(first) = densities.first() else {
        return Ok(());
    };
    if out.len() != densities.len()
        || densities.iter().any(|d| d.eta != first.eta || d.psi.len() != obst.n_nodes)
    {
        return Err(invalid("densities must share eta and match the node count"));
    }
    out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
    let step = 2.0 * PI / obst.n_nodes as f64;
    for j in 0..obst.n_nodes {
        let kern = 0.5 * step * obst.jacobian[j]
            * combined_kernel(h, first.eta, x, obst.q[j], obst.normals[j])?;
        for (o, d) in out.iter_mut().zip(densities) {
            *o += kern * d.psi[j];
        }
    }
    Ok(())
}

/// Trigonometric interpolation of periodic samples onto `m` >= n points.
pub fn upsample_periodic(v: &[C64], m: usize) -> Vec<C64> {
    let n = v.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut spec = v.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let mut big = vec![C64::new(0.0, 0.0); m];
    let half = n / 2;
    for f in 0..n {
        if f < half {
            big[f] = spec[f];
        } else if f > half {
            big[m - (n - f)] = spec[f];
        } else {
            // split the Nyquist mode evenly
            big[half] += 0.5 * spec[f];
            big[m - half] += 0.5 * spec[f];
        }
    }
    planner.plan_fft_inverse(m).process(&mut big);
    let scale = 1.0 / n as f64;
    big.into_iter().map(|c| c * scale).collect()
}

/// Max over the midpoints between nodes of |u_i + u_s| on dA, with u_s
/// from the jump relation applied to the density interpolated onto a
/// doubled grid.
pub fn boundary_residual(
    kite: &Kite,
    obst: &ObstacleDiscretization,
    density: &DensitySolution,
    incident: &dyn Fn(Point) -> Result<C64>,
) -> Result<f64> {
    let m = 2 * obst.n_nodes;
    let fine = kite.discretize(m)?;
    let psi = upsample_periodic(&density.psi, m);
    let h = DirectHankel(density.k);
    let mut worst: f64 = 0.0;
    for i in (1..m).step_by(2) {
        let mut s = psi[i];
        for j in 0..m {
            if j == i {
                continue;
            }
            let w = kr_weight(i, j, m) * fine.jacobian[j];
            s += w * combined_kernel(&h, density.eta, fine.q[i], fine.q[j], fine.normals[j])? * psi[j];
        }
        worst = worst.max((0.5 * s + incident(fine.q[i])?).norm());
    }
    Ok(worst)
}
