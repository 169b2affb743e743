//! Transient thermal cloaking through the Fourier-Laplace transform.
//!
//! A field u(x, t) with zero initial data is sampled at complex frequencies
//! omega_q = q dw + i c, each sample solves a Helmholtz problem with
//! k = i sqrt(-i omega / sigma), and the time series is recovered from a
//! truncated Bromwich integral evaluated with one FFT per point.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::cloak::{
    divergence_region, exterior_cloak_field_with, multipole_coefficients, quadrature,
    CloakGeometry, MultipoleCoefficients, PointSource,
};
use crate::error::{invalid, Error, Result};
use crate::scatter::{choose_eta, layer_potentials, CfieSystem, Kite, ObstacleDiscretization};
use crate::specfun::{HankelTable, Hankel01};
use crate::{check_wavenumber, dist, Point, C64};

/// sigma is the diffusivity; rho_c only scales sources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatMedium {
    pub sigma: f64,
    #[serde(default = "one")]
    pub rho_c: f64,
}

fn one() -> f64 {
    1.0
}

impl HeatMedium {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma must be positive"));
        }
        if !(self.rho_c > 0.0 && self.rho_c.is_finite()) {
            return Err(invalid("rho_c must be positive"));
        }
        Ok(())
    }
}

/// k = i sqrt(-i omega / sigma), principal root.
pub fn heat_wavenumber(omega: C64, sigma: f64) -> Result<C64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma must be positive"));
    }
    if omega == C64::new(0.0, 0.0) {
        return Err(invalid("zero frequency gives a zero wavenumber"));
    }
    let k = C64::new(0.0, 1.0) * (C64::new(0.0, -1.0) * omega / sigma).sqrt();
    check_wavenumber(k)?;
    Ok(k)
}

/// k with k^2 = -P(-i omega), coefficients in ascending order. Of the two
/// roots the one with Re k > 0 is kept, or Im k > 0 when Re k = 0.
pub fn polynomial_wavenumber(p_coeffs: &[C64], omega: C64) -> Result<C64> {
    let degree = p_coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0));
    if !matches!(degree, Some(d) if d >= 1) {
        return Err(invalid("polynomial must be nonconstant"));
    }
    let z = C64::new(0.0, -1.0) * omega;
    let p = p_coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
    let mut k = C64::new(0.0, 1.0) * p.sqrt();
    if k.re < 0.0 || (k.re == 0.0 && k.im < 0.0) {
        k = -k;
    }
    check_wavenumber(k)?;
    Ok(k)
}

/// Frequency ladder and time grid of the inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceContour {
    pub t_final: f64,
    pub n_steps: usize,
    pub n_samples: usize,
    pub dt: f64,
    pub big_t: f64,
    pub dw: f64,
    pub alpha: f64,
    pub shift: f64,
}

/// Target size of the periodisation error.
pub const CONTOUR_TOLERANCE: f64 = 1e-6;

pub fn build_contour(t_final: f64, n_steps: usize) -> Result<LaplaceContour> {
    build_contour_with_alpha(t_final, n_steps, 0.0)
}

pub fn build_contour_with_alpha(t_final: f64, n_steps: usize, alpha: f64) -> Result<LaplaceContour> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(invalid("T must be positive"));
    }
    if n_steps < 2 {
        return Err(invalid("N must be at least 2"));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha must be nonnegative"));
    }
    let n_samples = 2 * n_steps + 2;
    let dt = t_final / n_steps as f64;
    let big_t = n_samples as f64 * dt;
    let dw = 2.0 * PI / big_t;
    let shift = alpha - dw / (2.0 * PI) * CONTOUR_TOLERANCE.ln();
    Ok(LaplaceContour { t_final, n_steps, n_samples, dt, big_t, dw, alpha, shift })
}

impl LaplaceContour {
    /// omega_q = q dw + i c.
    pub fn frequency(&self, q: usize) -> C64 {
        C64::new(q as f64 * self.dw, self.shift)
    }

    /// s_q = -i omega_q = c - i q dw.
    pub fn laplace_point(&self, q: usize) -> C64 {
        C64::new(self.shift, -(q as f64) * self.dw)
    }

    /// t_p = p dt, with t_N = T exactly.
    pub fn time(&self, p: usize) -> f64 {
        if p == self.n_steps {
            self.t_final
        } else {
            p as f64 * self.dt
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|p| self.time(p)).collect()
    }
}

/// Reusable FFT plan for one contour.
#[derive(Clone)]
pub struct LaplaceInverter {
    contour: LaplaceContour,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for LaplaceInverter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LaplaceInverter").field("contour", &self.contour).finish()
    }
}

impl LaplaceInverter {
    pub fn new(contour: LaplaceContour) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(contour.n_samples);
        LaplaceInverter { contour, fft }
    }

    pub fn contour(&self) -> &LaplaceContour {
        &self.contour
    }

    /// In-place variant: `buf` holds the samples and is overwritten.
    pub fn invert_in_place(&self, buf: &mut [C64], out: &mut [f64]) -> Result<()> {
        let c = &self.contour;
        if buf.len() != c.n_samples || out.len() != c.n_steps + 1 {
            return Err(invalid(format!(
                "expected {} samples and {} outputs",
                c.n_samples,
                c.n_steps + 1
            )));
        }
        let first = buf[0];
        self.fft.process(buf);
        for (p, o) in out.iter_mut().enumerate() {
            let t = c.time(p);
            *o = 2.0 * (c.shift * t).exp() / c.big_t * (buf[p] - 0.5 * first).re;
        }
        Ok(())
    }

    pub fn invert(&self, samples: &[C64]) -> Result<Vec<f64>> {
        let mut buf = samples.to_vec();
        let mut out = vec![0.0; self.contour.n_steps + 1];
        self.invert_in_place(&mut buf, &mut out)?;
        Ok(out)
    }
}

/// u(t_p), p = 0..N, from samples of the transform at s_q = c - i q dw.
pub fn inverse_laplace(samples: &[C64], contour: &LaplaceContour) -> Result<Vec<f64>> {
    LaplaceInverter::new(*contour).invert(samples)
}

/// Uniform tensor grid; points are ordered with x fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn square(lo: f64, hi: f64, n: usize) -> Self {
        Grid { x_min: lo, x_max: hi, y_min: lo, y_max: hi, nx: n, ny: n }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(invalid("grid bounds must be finite and increasing"));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(invalid("grid needs at least 2 points per axis"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn point(&self, i: usize) -> Point {
        let (ix, iy) = (i % self.nx, i / self.nx);
        [self.x_min + ix as f64 * self.hx(), self.y_min + iy as f64 * self.hy()]
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn on_edge(&self, i: usize) -> bool {
        let (ix, iy) = (i % self.nx, i / self.nx);
        ix == 0 || iy == 0 || ix + 1 == self.nx || iy + 1 == self.ny
    }
}

/// Real temperatures per grid point and output time; values[i * n_times + p].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeFieldGrid {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Points where the field is singular or not physical; their values are 0.
    pub mask: Vec<bool>,
}

impl TimeFieldGrid {
    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn at(&self, point: usize, p: usize) -> f64 {
        self.values[point * self.n_times() + p]
    }

    pub fn series(&self, point: usize) -> &[f64] {
        let n = self.n_times();
        &self.values[point * n..(point + 1) * n]
    }

    pub fn snapshot(&self, p: usize) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.at(i, p)).collect()
    }

    /// max over time of |u| at each point.
    pub fn peak(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.series(i).iter().fold(0.0, |m: f64, v| m.max(v.abs())))
            .collect()
    }
}

/// Kite-shaped sound-soft obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleConfig {
    pub center: Point,
    pub scale: f64,
    pub n_nodes: usize,
    /// Coupling parameter; [`choose_eta`] per frequency when absent.
    #[serde(default)]
    pub eta: Option<f64>,
}

impl ObstacleConfig {
    pub fn kite(&self) -> Kite {
        Kite { center: self.center, scale: self.scale }
    }
}

/// Impulsive point source amplitude * delta(x - position) delta(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatScenario {
    pub medium: HeatMedium,
    pub source: PointSource,
    pub geometry: CloakGeometry,
    /// Multipole truncation M.
    pub order: usize,
    #[serde(default)]
    pub obstacle: Option<ObstacleConfig>,
    pub cloak: bool,
    pub t_final: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub alpha: f64,
    pub grid: Grid,
    /// Solve the obstacle problem at every stride-th frequency and
    /// interpolate linearly in q in between.
    #[serde(default = "one_usize")]
    pub scatter_stride: usize,
}

fn one_usize() -> usize {
    1
}

impl HeatScenario {
    pub fn validate(&self) -> Result<()> {
        self.medium.validate()?;
        self.geometry.validate()?;
        self.grid.validate()?;
        if !self.source.amplitude.is_finite() || !self.source.position.iter().all(|v| v.is_finite()) {
            return Err(invalid("source must be finite"));
        }
        if dist(self.source.position, self.geometry.center) <= self.geometry.delta_c {
            return Err(invalid("source must lie outside the closed cloaked disk"));
        }
        if self.order == 0 || self.order > 200 {
            return Err(invalid("order must be in 1..=200"));
        }
        if self.scatter_stride == 0 {
            return Err(invalid("scatter_stride must be at least 1"));
        }
        if let Some(o) = &self.obstacle {
            let kite = o.kite();
            kite.discretize(o.n_nodes)?;
            if dist(o.center, self.geometry.center) + kite.extent() >= self.geometry.delta_c {
                return Err(invalid("obstacle must lie inside the cloaked disk"));
            }
            if let Some(eta) = o.eta {
                if !(eta > 0.0 && eta.is_finite()) {
                    return Err(invalid("eta must be positive for heat wavenumbers"));
                }
            }
        }
        build_contour_with_alpha(self.t_final, self.n_steps, self.alpha)?;
        Ok(())
    }

    pub fn contour(&self) -> Result<LaplaceContour> {
        build_contour_with_alpha(self.t_final, self.n_steps, self.alpha)
    }

    /// Source strength in the Helmholtz problem: amplitude / (sigma rho_c).
    pub fn helmholtz_source(&self) -> PointSource {
        PointSource {
            position: self.source.position,
            amplitude: self.source.amplitude / (self.medium.sigma * self.medium.rho_c),
        }
    }
}

/// Time fields of one run; total = incident + cloak + scattered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFields {
    pub contour: LaplaceContour,
    pub cloaked: bool,
    pub incident: TimeFieldGrid,
    pub cloak: TimeFieldGrid,
    pub scattered: TimeFieldGrid,
    pub total: TimeFieldGrid,
}

struct Frequency {
    table: HankelTable,
    coeffs: Option<MultipoleCoefficients>,
    /// One density per toggle, only at solved frequencies.
    densities: Option<Vec<crate::scatter::DensitySolution>>,
}

/// Run with the configured toggle.
pub fn simulate_scenario(cfg: &HeatScenario) -> Result<ScenarioFields> {
    Ok(simulate(cfg, &[cfg.cloak])?.pop().expect("one toggle"))
}

/// Uncloaked and cloaked runs sharing every per-frequency solve.
pub fn simulate_comparison(cfg: &HeatScenario) -> Result<(ScenarioFields, ScenarioFields)> {
    let mut v = simulate(cfg, &[false, true])?;
    let on = v.pop().expect("two toggles");
    let off = v.pop().expect("two toggles");
    Ok((off, on))
}

fn simulate(cfg: &HeatScenario, toggles: &[bool]) -> Result<Vec<ScenarioFields>> {
    cfg.validate()?;
    let contour = cfg.contour()?;
    let inverter = LaplaceInverter::new(contour);
    let nq = contour.n_samples;
    let src = cfg.helmholtz_source();
    let geom = cfg.geometry;
    let devices = geom.devices();
    let grid = cfg.grid;
    let points = grid.points();
    let need_cloak = toggles.iter().any(|&t| t);

    let obstacle: Option<(ObstacleConfig, ObstacleDiscretization)> = match &cfg.obstacle {
        Some(o) => Some((*o, o.kite().discretize(o.n_nodes)?)),
        None => None,
    };

    // Every distance the tables see is bounded by the bounding box of the
    // grid, the devices, the source and the obstacle.
    let mut lo = [grid.x_min, grid.y_min];
    let mut hi = [grid.x_max, grid.y_max];
    let mut extra: Vec<Point> = devices.clone();
    extra.push(src.position);
    extra.push([geom.center[0] - geom.delta_c, geom.center[1] - geom.delta_c]);
    extra.push([geom.center[0] + geom.delta_c, geom.center[1] + geom.delta_c]);
    for p in &extra {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let r_max = 1.01 * (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    let mask_radius = 0.5 * grid.hx().min(grid.hy());
    let r_min = (1e-3 * mask_radius).min(1e-3);

    let solved_q = |q: usize| q % cfg.scatter_stride == 0 || q + 1 == nq;

    let quad = quadrature(&geom)?;
    let freqs: Vec<Frequency> = (0..nq)
        .into_par_iter()
        .map(|q| -> Result<Frequency> {
            let k = heat_wavenumber(contour.frequency(q), cfg.medium.sigma)?;
            let table = HankelTable::new(k, r_min, r_max)?;
            let coeffs = if need_cloak {
                Some(multipole_coefficients(&geom, &quad, &src, k, cfg.order)?)
            } else {
                None
            };
            let densities = match &obstacle {
                Some((o, disc)) if solved_q(q) => {
                    let eta = o.eta.unwrap_or_else(|| choose_eta(k));
                    let sys = CfieSystem::assemble_with(disc, &table, eta)?;
                    let mut out = Vec::with_capacity(toggles.len());
                    for &on in toggles {
                        let trace = disc
                            .q
                            .iter()
                            .map(|&y| {
                                let mut v = point_source(&table, &src, y)?;
                                if on {
                                    let c = coeffs.as_ref().expect("cloak coefficients");
                                    v += exterior_cloak_field_with(y, c, &geom, cfg.order, &table)?;
                                }
                                Ok(v)
                            })
                            .collect::<Result<Vec<_>>>()?;
                        out.push(sys.solve(&trace)?);
                    }
                    Some(out)
                }
                _ => None,
            };
            Ok(Frequency { table, coeffs, densities })
        })
        .collect::<Result<_>>()?;

    let n_times = contour.n_steps + 1;
    let nt = toggles.len();
    // per point: incident, cloak, then scattered per toggle
    let per_point: Vec<(bool, Vec<f64>)> = points
        .par_iter()
        .map(|&x| -> Result<(bool, Vec<f64>)> {
            let masked = dist(x, src.position) < mask_radius
                || devices.iter().any(|&d| dist(x, d) < mask_radius)
                || obstacle.as_ref().is_some_and(|(_, disc)| disc.contains(x));
            let mut out = vec![0.0; (2 + nt) * n_times];
            if masked {
                return Ok((true, out));
            }
            let mut inc = vec![C64::new(0.0, 0.0); nq];
            let mut clk = vec![C64::new(0.0, 0.0); nq];
            let mut sca = vec![vec![C64::new(0.0, 0.0); nq]; nt];
            let mut acc = vec![C64::new(0.0, 0.0); nt];
            for (q, f) in freqs.iter().enumerate() {
                inc[q] = point_source(&f.table, &src, x)?;
                if let Some(c) = &f.coeffs {
                    clk[q] = exterior_cloak_field_with(x, c, &geom, cfg.order, &f.table)?;
                }
                if let (Some((_, disc)), Some(ds)) = (&obstacle, &f.densities) {
                    layer_potentials(x, disc, ds, &f.table, &mut acc)?;
                    for (t, v) in acc.iter().enumerate() {
                        sca[t][q] = *v;
                    }
                }
            }
            if obstacle.is_some() && cfg.scatter_stride > 1 {
                for s in sca.iter_mut() {
                    interpolate_gaps(s, &solved_q);
                }
            }
            let mut buf = inc;
            inverter.invert_in_place(&mut buf, &mut out[..n_times])?;
            let mut buf = clk;
            inverter.invert_in_place(&mut buf, &mut out[n_times..2 * n_times])?;
            for (t, mut s) in sca.into_iter().enumerate() {
                let a = (2 + t) * n_times;
                inverter.invert_in_place(&mut s, &mut out[a..a + n_times])?;
            }
            if out.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!("non-finite temperature at {x:?}")));
            }
            Ok((false, out))
        })
        .collect::<Result<_>>()?;

    let times = contour.times();
    let mask: Vec<bool> = per_point.iter().map(|p| p.0).collect();
    let gather = |slot: usize, scale: f64| TimeFieldGrid {
        grid,
        times: times.clone(),
        values: per_point
            .iter()
            .flat_map(|p| p.1[slot * n_times..(slot + 1) * n_times].iter().map(move |v| v * scale))
            .collect(),
        mask: mask.clone(),
    };
    let incident = gather(0, 1.0);
    let cloak_field = gather(1, 1.0);
    let zero = gather(1, 0.0);
    Ok(toggles
        .iter()
        .enumerate()
        .map(|(t, &on)| {
            let cloak = if on { cloak_field.clone() } else { zero.clone() };
            let scattered = gather(2 + t, 1.0);
            let total = TimeFieldGrid {
                values: (0..incident.values.len())
                    .map(|i| incident.values[i] + cloak.values[i] + scattered.values[i])
                    .collect(),
                ..incident.clone()
            };
            ScenarioFields {
                contour,
                cloaked: on,
                incident: incident.clone(),
                cloak,
                scattered,
                total,
            }
        })
        .collect())
}

fn point_source(h: &dyn Hankel01, src: &PointSource, x: Point) -> Result<C64> {
    if src.amplitude == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let r = dist(x, src.position);
    if r == 0.0 {
        return Err(Error::Singular("point coincides with the source"));
    }
    Ok(src.amplitude * C64::new(0.0, 0.25) * h.h01(r)?.0)
}

fn interpolate_gaps(s: &mut [C64], solved: &dyn Fn(usize) -> bool) {
    let known: Vec<usize> = (0..s.len()).filter(|&q| solved(q)).collect();
    for w in known.windows(2) {
        let (a, b) = (w[0], w[1]);
        for q in a + 1..b {
            let t = (q - a) as f64 / (b - a) as f64;
            s[q] = s[a] * (1.0 - t) + s[b] * t;
        }
    }
}

/// u_max = 100 max over the closed disk and all output times of |incident|.
pub fn default_u_max(incident: &TimeFieldGrid, geom: &CloakGeometry) -> f64 {
    let peak = incident.peak();
    100.0
        * (0..incident.grid.len())
            .filter(|&i| !incident.mask[i] && dist(incident.grid.point(i), geom.center) <= geom.delta_c)
            .map(|i| peak[i])
            .fold(0.0, f64::max)
}

/// Per-device radius outside which the cloak stays below u_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafeRadius {
    pub device: Point,
    pub radius: f64,
    /// No radius inside the device's neighbourhood satisfies the bound.
    pub saturated: bool,
}

/// Among grid points closer to x_j than to any other device, the smallest
/// grid distance rho such that every point at distance >= rho has
/// max_t |u| <= u_max.
pub fn safe_radius(cloak: &TimeFieldGrid, devices: &[Point], u_max: f64) -> Result<Vec<SafeRadius>> {
    if !(u_max > 0.0 && u_max.is_finite()) {
        return Err(invalid("u_max must be positive"));
    }
    if devices.is_empty() {
        return Err(invalid("no devices"));
    }
    let peak = cloak.peak();
    let grid = cloak.grid;
    let mut cells: Vec<Vec<(f64, bool)>> = vec![Vec::new(); devices.len()];
    for i in 0..grid.len() {
        let x = grid.point(i);
        let (j, d) = devices
            .iter()
            .enumerate()
            .map(|(j, &p)| (j, dist(x, p)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let bad = cloak.mask[i] || peak[i] > u_max;
        cells[j].push((d, bad));
    }
    Ok(devices
        .iter()
        .zip(cells)
        .map(|(&device, mut cell)| {
            cell.sort_by(|a, b| a.0.total_cmp(&b.0));
            match cell.iter().rposition(|c| c.1) {
                None => SafeRadius { device, radius: 0.0, saturated: false },
                Some(last) if last + 1 < cell.len() => {
                    SafeRadius { device, radius: cell[last + 1].0, saturated: false }
                }
                Some(last) => SafeRadius { device, radius: cell[last].0, saturated: true },
            }
        })
        .collect())
}

/// Safe radii of one configuration next to the divergence circles R_j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub delta_c: f64,
    pub u_max: f64,
    pub region_radii: Vec<f64>,
    pub radii: Vec<SafeRadius>,
}

/// Cloak-only run and safe radii for one delta_C.
pub fn sweep_point(cfg: &HeatScenario) -> Result<SweepPoint> {
    let mut c = cfg.clone();
    c.cloak = true;
    c.obstacle = None;
    let run = simulate_scenario(&c)?;
    let u_max = default_u_max(&run.incident, &c.geometry);
    let region = divergence_region(&c.geometry, &quadrature(&c.geometry)?);
    let radii = safe_radius(&run.cloak, &c.geometry.devices(), u_max)?;
    Ok(SweepPoint { delta_c: c.geometry.delta_c, u_max, region_radii: region.radii, radii })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_closed_forms() {
        let k = heat_wavenumber(C64::new(0.0, 1.5), 1.5).unwrap();
        assert!((k - C64::new(0.0, 1.0)).norm() < 1e-15);
        let k = heat_wavenumber(C64::new(3.0, 0.2), 1.0).unwrap();
        assert!(k.im.abs() > k.re.abs());
        assert!(heat_wavenumber(C64::new(0.0, 0.0), 1.0).is_err());
        assert!(heat_wavenumber(C64::new(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn polynomial_examples() {
        let sq = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let k = polynomial_wavenumber(&sq, C64::new(2.0, 0.0)).unwrap();
        assert!((k - C64::new(2.0, 0.0)).norm() < 1e-15);
        let lin = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let k = polynomial_wavenumber(&lin, C64::new(0.0, 1.0)).unwrap();
        assert!((k - C64::new(0.0, 1.0)).norm() < 1e-15);
        let damped = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        let k = polynomial_wavenumber(&damped, C64::new(1.0, 0.0)).unwrap();
        assert!(k.im > 0.0);
        assert!((k * k + (C64::new(0.0, -1.0).powi(2) + C64::new(0.0, -1.0))).norm() < 1e-14);
        assert!(polynomial_wavenumber(&[C64::new(1.0, 0.0)], C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn contour_formulas() {
        let c = build_contour(4.0, 512).unwrap();
        assert_eq!(c.n_samples, 1026);
        assert_eq!(c.dt, 4.0 / 512.0);
        assert!((c.big_t - 1026.0 * c.dt).abs() < 1e-12);
        assert!((c.shift - c.dw / (2.0 * PI) * 6.0 * 10f64.ln()).abs() < 1e-12);
        assert_eq!(c.time(512), 4.0);
        assert!(c.time(c.n_steps) < c.big_t / 2.0);
        assert!(build_contour(0.0, 10).is_err());
        assert!(build_contour(1.0, 1).is_err());
        assert_eq!(build_contour(4.0, 1024).unwrap().n_samples, 2050);
    }

    #[test]
    fn inversion_of_t() {
        let c = build_contour(4.0, 512).unwrap();
        let s: Vec<C64> = (0..c.n_samples).map(|q| 1.0 / c.laplace_point(q).powi(2)).collect();
        let u = inverse_laplace(&s, &c).unwrap();
        for p in 64..=512 {
            let t = c.time(p);
            assert!((u[p] - t).abs() <= 1e-3 * t, "t = {t}");
        }
        assert!(inverse_laplace(&s[1..], &c).is_err());
    }

    #[test]
    fn grid_ordering() {
        let g = Grid::square(0.0, 10.0, 11);
        assert_eq!(g.point(0), [0.0, 0.0]);
        assert_eq!(g.point(12), [1.0, 1.0]);
        assert!(g.on_edge(10) && !g.on_edge(12));
    }

    fn field(grid: Grid, peak: impl Fn(Point) -> f64) -> TimeFieldGrid {
        TimeFieldGrid {
            grid,
            times: vec![0.0, 1.0],
            values: grid.points().iter().flat_map(|&x| [0.0, peak(x)]).collect(),
            mask: vec![false; grid.len()],
        }
    }

    #[test]
    fn safe_radius_is_grid_resolved() {
        let g = Grid::square(-5.0, 5.0, 11);
        let devs = [[-2.0, 0.0], [2.0, 0.0]];
        let f = field(g, |x| {
            let d = dist(x, devs[0]).min(dist(x, devs[1]));
            1.0 / (d + 0.1)
        });
        let r = safe_radius(&f, &devs, 0.6).unwrap();
        // violators have d < 1/0.6 - 0.1 = 1.567; the next grid distance is 2
        for s in &r {
            assert_eq!(s.radius, 2.0);
            assert!(!s.saturated);
        }
        let r = safe_radius(&f, &devs, 1e-6).unwrap();
        assert!(r.iter().all(|s| s.saturated));
        let r = safe_radius(&f, &devs, 100.0).unwrap();
        assert!(r.iter().all(|s| s.radius == 0.0));
    }
}
