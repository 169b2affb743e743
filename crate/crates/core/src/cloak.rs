//! Exterior cloaking of a disk Omega by multipolar devices on a ring.
//!
//! The Green identities give the cloak field
//! u_c(x) = int_{dOmega} [-(du_i/dnu) G(x - y) + u_i(y) dG(x - y)/dnu(y)] dS(y),
//! which equals -u_i inside Omega and 0 outside. Translating each arc's
//! sources to its device x_j gives
//! u_e^(M)(x) = (i/4) sum_j sum_{|m|<=M} b_{j,m} V_m(x - x_j).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graf::{green, green_normal_derivative};
use crate::specfun::{bessel_j_range, hankel1_forward, DirectHankel, Hankel01};
use crate::{check_wavenumber, dist, dot, sub, Point, C64};

const QUARTER_I: C64 = C64::new(0.0, 0.25);

/// A field that solves the Helmholtz equation near the closure of Omega.
pub trait IncidentField: Sync {
    fn value(&self, x: Point, k: C64) -> Result<C64>;
    /// Derivative at `y` along the unit vector `nu`.
    fn normal_derivative(&self, y: Point, nu: Point, k: C64) -> Result<C64>;
}

/// amplitude * G(x - position).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSource {
    pub position: Point,
    #[serde(default = "unit_amplitude")]
    pub amplitude: f64,
}

fn unit_amplitude() -> f64 {
    1.0
}

impl PointSource {
    pub fn new(position: Point) -> Self {
        PointSource { position, amplitude: 1.0 }
    }
}

impl IncidentField for PointSource {
    fn value(&self, x: Point, k: C64) -> Result<C64> {
        if self.amplitude == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(self.amplitude * green(x, self.position, k)?)
    }

    fn normal_derivative(&self, y: Point, nu: Point, k: C64) -> Result<C64> {
        if self.amplitude == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(self.amplitude * green_normal_derivative(self.position, y, nu, k)?)
    }
}

/// The zero field.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl IncidentField for ZeroField {
    fn value(&self, _: Point, _: C64) -> Result<C64> {
        Ok(C64::new(0.0, 0.0))
    }
    fn normal_derivative(&self, _: Point, _: Point, _: C64) -> Result<C64> {
        Ok(C64::new(0.0, 0.0))
    }
}

/// Disk Omega and a ring of devices around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloakGeometry {
    pub center: Point,
    pub delta_c: f64,
    pub delta_d: f64,
    pub n_dev: usize,
    pub phase: f64,
    pub n_int: usize,
}

impl CloakGeometry {
    /// Defaults: four devices on the diagonals at radius sqrt(2) delta_c.
    pub fn standard(center: Point, delta_c: f64, n_int: usize) -> Self {
        CloakGeometry {
            center,
            delta_c,
            delta_d: 2f64.sqrt() * delta_c,
            n_dev: 4,
            phase: PI / 4.0,
            n_int,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.center.iter().all(|c| c.is_finite())
            && self.delta_c.is_finite()
            && self.delta_d.is_finite()
            && self.phase.is_finite();
        if !finite {
            return Err(invalid("geometry has non-finite entries"));
        }
        if !(self.delta_c > 0.0 && self.delta_d > self.delta_c) {
            return Err(invalid("need delta_d > delta_c > 0"));
        }
        if self.n_dev < 3 {
            return Err(invalid("need at least three devices"));
        }
        if self.n_int == 0 || self.n_int % self.n_dev != 0 {
            return Err(invalid("n_int must be a positive multiple of n_dev"));
        }
        Ok(())
    }

    pub fn device_angle(&self, j: usize) -> f64 {
        self.phase + 2.0 * PI * j as f64 / self.n_dev as f64
    }

    pub fn device(&self, j: usize) -> Point {
        let (s, c) = self.device_angle(j).sin_cos();
        [self.center[0] + self.delta_d * c, self.center[1] + self.delta_d * s]
    }

    pub fn devices(&self) -> Vec<Point> {
        (0..self.n_dev).map(|j| self.device(j)).collect()
    }

    /// Whether `x` is strictly inside Omega.
    pub fn inside(&self, x: Point) -> bool {
        dist(x, self.center) < self.delta_c
    }
}

/// Midpoint nodes on dOmega, grouped by arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryQuadrature {
    pub nodes: Vec<Point>,
    pub normals: Vec<Point>,
    pub weights: Vec<f64>,
    pub arc_index: Vec<usize>,
}

pub fn build_geometry(
    center: Point,
    delta_c: f64,
    delta_d: f64,
    n_dev: usize,
    phase: f64,
    n_int: usize,
) -> Result<(CloakGeometry, BoundaryQuadrature)> {
    let geom = CloakGeometry { center, delta_c, delta_d, n_dev, phase, n_int };
    let quad = quadrature(&geom)?;
    Ok((geom, quad))
}

/// Nodes for an already assembled geometry.
pub fn quadrature(geom: &CloakGeometry) -> Result<BoundaryQuadrature> {
    geom.validate()?;
    let per_arc = geom.n_int / geom.n_dev;
    let h = 2.0 * PI / geom.n_int as f64;
    let w = 2.0 * PI * geom.delta_c / geom.n_int as f64;
    let mut q = BoundaryQuadrature {
        nodes: Vec::with_capacity(geom.n_int),
        normals: Vec::with_capacity(geom.n_int),
        weights: vec![w; geom.n_int],
        arc_index: Vec::with_capacity(geom.n_int),
    };
    for j in 0..geom.n_dev {
        let start = geom.device_angle(j) - PI / geom.n_dev as f64;
        for i in 0..per_arc {
            let (s, c) = (start + (i as f64 + 0.5) * h).sin_cos();
            q.nodes.push([geom.center[0] + geom.delta_c * c, geom.center[1] + geom.delta_c * s]);
            q.normals.push([c, s]);
            q.arc_index.push(j);
        }
    }
    Ok(q)
}

/// Incident values and normal derivatives at the quadrature nodes.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub u: Vec<C64>,
    pub du: Vec<C64>,
}

impl BoundaryData {
    pub fn sample(quad: &BoundaryQuadrature, u_i: &dyn IncidentField, k: C64) -> Result<Self> {
        let mut u = Vec::with_capacity(quad.nodes.len());
        let mut du = Vec::with_capacity(quad.nodes.len());
        for (&y, &nu) in quad.nodes.iter().zip(&quad.normals) {
            u.push(u_i.value(y, k)?);
            du.push(u_i.normal_derivative(y, nu, k)?);
        }
        Ok(BoundaryData { u, du })
    }
}

/// A value with a flag raised when quadrature accuracy is doubtful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub value: C64,
    pub accuracy_warning: bool,
}

/// Quadrature of the Green identity with precomputed boundary data.
pub fn interior_cloak_from_data(
    x: Point,
    quad: &BoundaryQuadrature,
    data: &BoundaryData,
    k: C64,
) -> Result<FieldValue> {
    check_wavenumber(k)?;
    let spacing = quad.weights.first().copied().unwrap_or(0.0);
    let mut near = false;
    let mut s = C64::new(0.0, 0.0);
    for i in 0..quad.nodes.len() {
        let y = quad.nodes[i];
        let d = dist(x, y);
        if d == 0.0 {
            return Err(Error::Singular("evaluation point is a quadrature node"));
        }
        near |= d < spacing;
        if data.u[i] == C64::new(0.0, 0.0) && data.du[i] == C64::new(0.0, 0.0) {
            continue;
        }
        let g = green(x, y, k)?;
        let dg = green_normal_derivative(x, y, quad.normals[i], k)?;
        s += quad.weights[i] * (-data.du[i] * g + data.u[i] * dg);
    }
    Ok(FieldValue { value: s, accuracy_warning: near })
}

/// u_c(x) by the midpoint rule on dOmega.
pub fn interior_cloak_field(
    x: Point,
    quad: &BoundaryQuadrature,
    u_i: &dyn IncidentField,
    k: C64,
) -> Result<FieldValue> {
    let data = BoundaryData::sample(quad, u_i, k)?;
    interior_cloak_from_data(x, quad, &data, k)
}

/// Table b_{j,m}, j = 0..n_dev, m = -M..=M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipoleCoefficients {
    pub k: C64,
    pub m_max: usize,
    pub n_dev: usize,
    /// Row-major, row j holds m = -M..=M.
    pub b: Vec<C64>,
}

impl MultipoleCoefficients {
    pub fn get(&self, j: usize, m: i32) -> C64 {
        let w = 2 * self.m_max + 1;
        self.b[j * w + (m + self.m_max as i32) as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.b.iter().all(|v| *v == C64::new(0.0, 0.0))
    }
}

fn parity(m: usize) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn multipole_coefficients_from_data(
    geom: &CloakGeometry,
    quad: &BoundaryQuadrature,
    data: &BoundaryData,
    k: C64,
    m_max: usize,
) -> Result<MultipoleCoefficients> {
    check_wavenumber(k)?;
    let w = 2 * m_max + 1;
    let mut b = vec![C64::new(0.0, 0.0); geom.n_dev * w];
    let devices = geom.devices();
    for i in 0..quad.nodes.len() {
        if data.u[i] == C64::new(0.0, 0.0) && data.du[i] == C64::new(0.0, 0.0) {
            continue;
        }
        let j = quad.arc_index[i];
        let d = sub(quad.nodes[i], devices[j]);
        let r = crate::norm(d);
        let nu = quad.normals[i];
        let phi = d[1].atan2(d[0]);
        let dr = dot(d, nu) / r;
        let dphi = (d[0] * nu[1] - d[1] * nu[0]) / (r * r);
        let jv = bessel_j_range(m_max + 1, k * r)?;
        let row = &mut b[j * w..(j + 1) * w];
        for m in 0..=m_max {
            let jp = if m == 0 { -jv[1] } else { 0.5 * (jv[m - 1] - jv[m + 1]) };
            for sign in [1i32, -1] {
                if m == 0 && sign < 0 {
                    continue;
                }
                let mi = sign * m as i32;
                let p = if sign < 0 { parity(m) } else { 1.0 };
                let e = C64::from_polar(1.0, -(mi as f64) * phi);
                // U_m = J_m(k r) e^{-i m phi}
                let um = p * jv[m] * e;
                let dum = p * (k * jp * dr - C64::new(0.0, mi as f64) * jv[m] * dphi) * e;
                row[(mi + m_max as i32) as usize] +=
                    quad.weights[i] * (-data.du[i] * um + data.u[i] * dum);
            }
        }
    }
    if b.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numerical("non-finite multipole coefficient".into()));
    }
    Ok(MultipoleCoefficients { k, m_max, n_dev: geom.n_dev, b })
}

pub fn multipole_coefficients(
    geom: &CloakGeometry,
    quad: &BoundaryQuadrature,
    u_i: &dyn IncidentField,
    k: C64,
    m_max: usize,
) -> Result<MultipoleCoefficients> {
    let data = BoundaryData::sample(quad, u_i, k)?;
    multipole_coefficients_from_data(geom, quad, &data, k, m_max)
}

/// u_e truncated at `order` <= coeffs.m_max.
pub fn exterior_cloak_field_order(
    x: Point,
    coeffs: &MultipoleCoefficients,
    geom: &CloakGeometry,
    order: usize,
) -> Result<C64> {
    exterior_cloak_field_with(x, coeffs, geom, order, &DirectHankel(coeffs.k))
}

/// As [`exterior_cloak_field_order`] with H_0, H_1 taken from `h`.
pub fn exterior_cloak_field_with(
    x: Point,
    coeffs: &MultipoleCoefficients,
    geom: &CloakGeometry,
    order: usize,
    h01: &dyn Hankel01,
) -> Result<C64> {
    if order > coeffs.m_max {
        return Err(invalid("order exceeds the coefficient table"));
    }
    if coeffs.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let k = coeffs.k;
    let mut s = C64::new(0.0, 0.0);
    for j in 0..geom.n_dev {
        let d = sub(x, geom.device(j));
        let r = crate::norm(d);
        if r <= 1e-12 * geom.delta_c {
            return Err(Error::Singular("x coincides with a device"));
        }
        let psi = d[1].atan2(d[0]);
        let (h0, h1) = h01.h01(r)?;
        let h = hankel1_forward(order, k * r, h0, h1);
        s += coeffs.get(j, 0) * h[0];
        for m in 1..=order {
            let e = C64::from_polar(1.0, m as f64 * psi);
            s += h[m] * (coeffs.get(j, m as i32) * e + parity(m) * coeffs.get(j, -(m as i32)) / e);
        }
    }
    let v = QUARTER_I * s;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical("multipole sum overflowed".into()))
    }
}

/// u_e^(M) with the full coefficient table.
pub fn exterior_cloak_field(
    x: Point,
    coeffs: &MultipoleCoefficients,
    geom: &CloakGeometry,
) -> Result<C64> {
    exterior_cloak_field_order(x, coeffs, geom, coeffs.m_max)
}

/// Union of the disks R_j where the translated series diverge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRegion {
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
    /// Largest circle about the center of Omega avoiding every R_j.
    pub r_ci: f64,
    /// Smallest circle about the center of Omega containing every R_j.
    pub r_co: f64,
}

impl DivergenceRegion {
    pub fn contains(&self, x: Point) -> bool {
        self.centers.iter().zip(&self.radii).any(|(&c, &r)| dist(x, c) <= r)
    }
}

pub fn divergence_region(geom: &CloakGeometry, quad: &BoundaryQuadrature) -> DivergenceRegion {
    let centers = geom.devices();
    let mut radii = vec![0.0f64; geom.n_dev];
    for (y, &j) in quad.nodes.iter().zip(&quad.arc_index) {
        radii[j] = radii[j].max(dist(*y, centers[j]));
    }
    let mut r_ci = f64::INFINITY;
    let mut r_co = 0.0f64;
    for (c, r) in centers.iter().zip(&radii) {
        let d = dist(*c, geom.center);
        r_ci = r_ci.min(d - r);
        r_co = r_co.max(d + r);
    }
    DivergenceRegion { centers, radii, r_ci: r_ci.max(0.0), r_co }
}

/// Points of the two audit circles (radii r_co + 0.1 delta_c and
/// r_ci - 0.1 delta_c) closest to the devices: eight for four devices.
pub fn extremal_audit_points(geom: &CloakGeometry, region: &DivergenceRegion) -> Vec<Point> {
    let outer = region.r_co + 0.1 * geom.delta_c;
    let inner = region.r_ci - 0.1 * geom.delta_c;
    let mut pts = Vec::with_capacity(2 * geom.n_dev);
    for rad in [outer, inner] {
        if rad <= 0.0 {
            continue;
        }
        for j in 0..geom.n_dev {
            let (s, c) = geom.device_angle(j).sin_cos();
            pts.push([geom.center[0] + rad * c, geom.center[1] + rad * s]);
        }
    }
    pts
}

/// max over x, j and arc-j nodes of |y - x_j| / |x - x_j|.
pub fn cloak_ratio(region: &DivergenceRegion, x_eval: &[Point]) -> Result<f64> {
    let mut a: f64 = 0.0;
    for &x in x_eval {
        for (c, r) in region.centers.iter().zip(&region.radii) {
            let d = dist(x, *c);
            if d <= *r {
                return Err(Error::DivergenceRegion);
            }
            a = a.max(r / d);
        }
    }
    Ok(a)
}

/// Fitted model C a^(M+1) / (1 - a) for one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloakBound {
    pub k: C64,
    pub a: f64,
    pub c: f64,
    pub m_fit: usize,
    pub m_ref: usize,
}

impl CloakBound {
    pub fn predicted(&self, order: usize) -> f64 {
        self.c * crate::graf::geometric_tail(self.a, order)
    }
}

/// max over `x_eval` of |u_e^(order) - u_e^(m_ref)|.
pub fn truncation_error(
    x_eval: &[Point],
    coeffs: &MultipoleCoefficients,
    geom: &CloakGeometry,
    order: usize,
    m_ref: usize,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &x in x_eval {
        let e = exterior_cloak_field_order(x, coeffs, geom, order)?
            - exterior_cloak_field_order(x, coeffs, geom, m_ref)?;
        worst = worst.max(e.norm());
    }
    Ok(worst)
}

/// Per-wavenumber bound fits against the reference truncation `m_ref`.
pub fn cloak_error_bound(
    geom: &CloakGeometry,
    quad: &BoundaryQuadrature,
    u_i: &dyn IncidentField,
    x_eval: &[Point],
    k_grid: &[C64],
    m_fit: usize,
    m_ref: usize,
) -> Result<Vec<CloakBound>> {
    if m_fit >= m_ref {
        return Err(invalid("m_fit must be below m_ref"));
    }
    let region = divergence_region(geom, quad);
    let a = cloak_ratio(&region, x_eval)?;
    k_grid
        .par_iter()
        .map(|&k| {
            let coeffs = multipole_coefficients(geom, quad, u_i, k, m_ref)?;
            let err = truncation_error(x_eval, &coeffs, geom, m_fit, m_ref)?;
            let form = crate::graf::geometric_tail(a, m_fit);
            let c = if a == 0.0 { 0.0 } else { err / form };
            Ok(CloakBound { k, a, c, m_fit, m_ref })
        })
        .collect()
}

/// Polar grid on a closed disk; ring `n_rings` is the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskGrid {
    pub center: Point,
    pub radius: f64,
    pub n_rings: usize,
    pub n_theta: usize,
}

impl DiskGrid {
    /// Center first, then rings outward; returns (point, ring).
    pub fn points(&self) -> Vec<(Point, usize)> {
        let mut pts = vec![(self.center, 0)];
        for ring in 1..=self.n_rings {
            let r = self.radius * ring as f64 / self.n_rings as f64;
            for t in 0..self.n_theta {
                let (s, c) = (2.0 * PI * t as f64 / self.n_theta as f64).sin_cos();
                pts.push(([self.center[0] + r * c, self.center[1] + r * s], ring));
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxPrincipleAudit {
    pub argmax: Point,
    pub max_value: f64,
    pub boundary_attained: bool,
    /// |Im k| > |Re k|.
    pub applicable: bool,
}

/// Locate max |value| on the disk grid; ties resolve to the boundary.
pub fn max_principle_audit(grid: &DiskGrid, values: &[C64], k: C64) -> Result<MaxPrincipleAudit> {
    let pts = grid.points();
    if pts.len() != values.len() {
        return Err(invalid("value count does not match the grid"));
    }
    let mut best = 0usize;
    for (i, v) in values.iter().enumerate() {
        if v.norm() > values[best].norm() {
            best = i;
        }
    }
    let max_value = values[best].norm();
    let boundary_attained = pts
        .iter()
        .zip(values)
        .any(|((_, ring), v)| *ring == grid.n_rings && v.norm() >= max_value);
    Ok(MaxPrincipleAudit {
        argmax: pts[best].0,
        max_value,
        boundary_attained,
        applicable: crate::classify(k).max_principle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_disk(n_int: usize) -> (CloakGeometry, BoundaryQuadrature) {
        let g = CloakGeometry::standard([5.0, 5.0], 10.0 / 6.0, n_int);
        let q = quadrature(&g).unwrap();
        (g, q)
    }

    #[test]
    fn weights_cover_circumference() {
        let (g, q) = reference_disk(128);
        let total: f64 = q.weights.iter().sum();
        assert!((total - 2.0 * PI * g.delta_c).abs() < 1e-12 * total);
        for j in 0..4 {
            assert_eq!(q.arc_index.iter().filter(|&&a| a == j).count(), 32);
        }
        assert!((g.delta_d - 5.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(build_geometry([0.0, 0.0], 1.0, 2.0, 4, 0.0, 7).is_err());
        assert!(build_geometry([0.0, 0.0], 1.0, 2.0, 2, 0.0, 8).is_err());
        assert!(build_geometry([0.0, 0.0], 1.0, 0.5, 4, 0.0, 8).is_err());
    }

    #[test]
    fn nodes_own_their_arc() {
        let (g, q) = reference_disk(64);
        for (y, &j) in q.nodes.iter().zip(&q.arc_index) {
            let nearest = (0..4)
                .min_by(|&a, &b| dist(*y, g.device(a)).total_cmp(&dist(*y, g.device(b))))
                .unwrap();
            assert_eq!(nearest, j);
        }
    }

    #[test]
    fn region_radii_are_equal() {
        let (g, q) = reference_disk(128);
        let r = divergence_region(&g, &q);
        for w in r.radii.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-12);
        }
        assert!((r.r_co - (g.delta_d + r.radii[0])).abs() < 1e-12);
        assert!((r.r_ci - (g.delta_d - r.radii[0])).abs() < 1e-12);
        assert!(!r.contains(g.center));
        assert!(r.contains(g.device(2)));
    }

    #[test]
    fn zero_incident_gives_zero() {
        let (g, q) = reference_disk(64);
        let k = C64::new(10.0, 0.0);
        let v = interior_cloak_field([5.0, 5.2], &q, &ZeroField, k).unwrap();
        assert_eq!(v.value, C64::new(0.0, 0.0));
        let c = multipole_coefficients(&g, &q, &ZeroField, k, 5).unwrap();
        assert!(c.is_zero());
        assert_eq!(exterior_cloak_field([0.0, 0.0], &c, &g).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn near_boundary_raises_warning() {
        let (_, q) = reference_disk(64);
        let src = PointSource::new([2.0, 5.0]);
        let k = C64::new(1.0, 0.0);
        let x = [5.0 + 10.0 / 6.0 + 1e-3, 5.0];
        assert!(interior_cloak_field(x, &q, &src, k).unwrap().accuracy_warning);
        assert!(!interior_cloak_field([5.0, 5.0], &q, &src, k).unwrap().accuracy_warning);
    }

    #[test]
    fn audit_points_share_ratio() {
        let (g, q) = reference_disk(128);
        let r = divergence_region(&g, &q);
        let pts = extremal_audit_points(&g, &r);
        assert_eq!(pts.len(), 8);
        let ratios: Vec<f64> = pts.iter().map(|&p| cloak_ratio(&r, &[p]).unwrap()).collect();
        for w in ratios.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-12);
        }
        assert!(ratios[0] < 1.0);
    }

    #[test]
    fn zero_field_ties_resolve_to_boundary() {
        let grid = DiskGrid { center: [0.0, 0.0], radius: 1.0, n_rings: 4, n_theta: 8 };
        let vals = vec![C64::new(0.0, 0.0); grid.points().len()];
        let a = max_principle_audit(&grid, &vals, C64::new(0.0, 1.0)).unwrap();
        assert_eq!(a.argmax, [0.0, 0.0]);
        assert!(a.boundary_attained);
        assert!(a.applicable);
    }
}
