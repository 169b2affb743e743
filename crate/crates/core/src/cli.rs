//! Configuration-driven runner behind the `helmcloak` binary.
//!
//! Every subcommand reads an optional JSON config (unknown keys rejected),
//! writes CSV/JSON artifacts into `--out`, and always leaves a
//! `manifest.json` there. Exit codes: 0 ok, 2 config, 3 domain, 4 numerical.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cloak::{
    cloak_error_bound, divergence_region, exterior_cloak_field, extremal_audit_points,
    interior_cloak_field, max_principle_audit, multipole_coefficients, quadrature,
    truncation_error, CloakGeometry, DiskGrid, IncidentField, PointSource,
};
use crate::error::Error;
use crate::graf::{fit_bound_constant, theoretical_bounds, truncation_errors, SourceTranslation, WavenumberFamily};
use crate::heat::{default_u_max, safe_radius, simulate_comparison, simulate_scenario, sweep_point, Grid, HeatScenario, ScenarioFields, TimeFieldGrid};
use crate::scatter::{boundary_residual, choose_eta, scattered_field, CfieSystem, Kite};
use crate::specfun::{verify_lemma_bounds, CompactSet};
use crate::{Point, C64};

#[derive(Debug, Parser)]
#[command(name = "helmcloak", version, about = "Active exterior cloaking experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Reserved; nothing is random.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Lemma bounds and quick numerical checks.
    Selftest,
    /// Graf truncation errors against fitted bounds for K1..K4.
    GrafError,
    /// Incident, interior and exterior cloak fields on a grid.
    CloakField,
    /// Cloak truncation bounds and the maximum-principle audit.
    Bounds,
    /// Sound-soft scattering by a kite.
    ScatterField,
    /// Transient thermal scenario.
    HeatSim,
    /// Safe radii over a range of delta_C.
    SweepCircles,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Selftest => "selftest",
            Command::GrafError => "graf-error",
            Command::CloakField => "cloak-field",
            Command::Bounds => "bounds",
            Command::ScatterField => "scatter-field",
            Command::HeatSim => "heat-sim",
            Command::SweepCircles => "sweep-circles",
        }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { code: 2, kind: "config", message: message.into() }
    }
    fn io(e: std::io::Error, path: &Path) -> Self {
        CliError { code: 4, kind: "io", message: format!("{}: {e}", path.display()) }
    }
    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind, "code": self.code, "message": self.message } })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError { code: 4, kind: "numerical", message: e.to_string() }
        } else {
            CliError { code: 3, kind: "domain", message: e.to_string() }
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Shortest round-trip representation; exponent form away from unit scale.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn write(&mut self, name: &str, body: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(e, parent))?;
        }
        fs::write(&path, body).map_err(|e| CliError::io(e, &path))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json(&mut self, name: &str, v: &impl Serialize) -> CliResult<()> {
        let s = serde_json::to_string_pretty(v).expect("serializable");
        self.write(name, &(s + "\n"))
    }
}

fn complex_grid_csv(points: &[Point], values: &[C64]) -> String {
    let mut s = String::from("x,y,re,im\n");
    for (p, v) in points.iter().zip(values) {
        s += &format!("{},{},{},{}\n", fmt_num(p[0]), fmt_num(p[1]), fmt_num(v.re), fmt_num(v.im));
    }
    s
}

fn time_grid_csv(f: &TimeFieldGrid, p: usize) -> String {
    let mut s = String::from("x,y,value\n");
    for i in 0..f.grid.len() {
        let x = f.grid.point(i);
        s += &format!("{},{},{}\n", fmt_num(x[0]), fmt_num(x[1]), fmt_num(f.at(i, p)));
    }
    s
}

fn load<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> CliResult<(T, Value)> {
    let Some(path) = path else {
        let cfg = T::default();
        return Ok((cfg, Value::Null));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let cfg = serde_json::from_value(raw.clone())
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Ok((cfg, raw))
}

/// Evaluate, turning singular points into NaN.
fn soft(v: crate::Result<C64>) -> CliResult<C64> {
    match v {
        Ok(v) => Ok(v),
        Err(Error::Singular(_)) | Err(Error::DivergenceRegion) => Ok(C64::new(f64::NAN, f64::NAN)),
        Err(e) => Err(e.into()),
    }
}

// ------------------------------------------------------------ configs ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelftestConfig {
    pub n_max: u32,
    pub k1: CompactSet,
    pub k2: CompactSet,
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            n_max: 30,
            k1: CompactSet::Disk { radius: 10.0 },
            k2: CompactSet::AnnularSector {
                r_min: 0.5,
                r_max: 20.0,
                max_arg: std::f64::consts::PI * (1.0 - 1.0 / 16.0),
            },
            n_r: 24,
            n_theta: 48,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrafErrorConfig {
    pub x: Point,
    pub translation: SourceTranslation,
    pub samples_per_family: usize,
    pub m_fit: usize,
    pub m_max: usize,
}

impl Default for GrafErrorConfig {
    fn default() -> Self {
        GrafErrorConfig {
            x: [0.0, 0.43],
            translation: SourceTranslation { y: [0.0, 0.0], x_j: [0.0, 0.2], nu: Some([0.0, 1.0]) },
            samples_per_family: 8,
            m_fit: 4,
            m_max: 20,
        }
    }
}

fn default_geometry() -> CloakGeometry {
    CloakGeometry::standard([5.0, 5.0], 10.0 / 6.0, 128)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CloakFieldConfig {
    pub geometry: CloakGeometry,
    pub source: PointSource,
    pub k: C64,
    pub order: usize,
    pub grid: Grid,
}

impl Default for CloakFieldConfig {
    fn default() -> Self {
        CloakFieldConfig {
            geometry: default_geometry(),
            source: PointSource::new([2.0, 5.0]),
            k: C64::new(10.0, 0.0),
            order: 22,
            grid: Grid::square(0.0, 10.0, 100),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsConfig {
    pub geometry: CloakGeometry,
    pub source: PointSource,
    pub wavenumbers: Vec<C64>,
    pub m_fit: usize,
    pub m_ref: usize,
    pub orders: Vec<usize>,
    pub max_principle_k: Vec<C64>,
    pub audit_order: usize,
    pub n_rings: usize,
    pub n_theta: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            geometry: default_geometry(),
            source: PointSource::new([2.0, 5.0]),
            wavenumbers: WavenumberFamily::Dissipative.samples(8),
            m_fit: 3,
            m_ref: 60,
            orders: vec![6, 10, 14, 18, 22],
            max_principle_k: vec![C64::new(0.0, 0.5), C64::new(10.0, 0.5)],
            audit_order: 22,
            n_rings: 20,
            n_theta: 64,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterFieldConfig {
    pub kite: Kite,
    pub n_nodes: usize,
    pub k: C64,
    pub eta: Option<f64>,
    pub source: PointSource,
    pub grid: Grid,
}

impl Default for ScatterFieldConfig {
    fn default() -> Self {
        ScatterFieldConfig {
            kite: Kite { center: [5.0, 5.0], scale: 0.5 },
            n_nodes: 512,
            k: C64::new(10.0, 0.0),
            eta: None,
            source: PointSource::new([8.0, 5.0]),
            grid: Grid::square(0.0, 10.0, 100),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatSimConfig {
    pub scenario: HeatScenario,
    /// Also run the opposite toggle and write both.
    pub compare: bool,
    /// Write every n-th time step.
    pub output_every: usize,
    /// Also write one CSV per component with a time column.
    pub long_format: bool,
    /// Defaults to 100 max |incident| over Omega x [0, T].
    pub u_max: Option<f64>,
}

impl Default for HeatSimConfig {
    fn default() -> Self {
        HeatSimConfig {
            scenario: HeatScenario {
                medium: crate::heat::HeatMedium { sigma: 1.5, rho_c: 1.0 },
                source: PointSource::new([8.0, 5.0]),
                geometry: default_geometry(),
                order: 22,
                obstacle: Some(crate::heat::ObstacleConfig {
                    center: [5.0, 5.0],
                    scale: 0.3,
                    n_nodes: 128,
                    eta: None,
                }),
                cloak: true,
                t_final: 4.0,
                n_steps: 256,
                alpha: 0.0,
                grid: Grid::square(0.0, 10.0, 100),
                scatter_stride: 1,
            },
            compare: false,
            output_every: 1,
            long_format: false,
            u_max: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepCirclesConfig {
    pub center: Point,
    pub source: PointSource,
    pub sigma: f64,
    pub delta_c: Vec<f64>,
    pub t_final: f64,
    pub n_steps: usize,
    pub order: usize,
    pub n_int: usize,
    pub grid: Grid,
}

impl Default for SweepCirclesConfig {
    fn default() -> Self {
        SweepCirclesConfig {
            center: [10.0, 10.0],
            source: PointSource::new([10.0, 1.0]),
            sigma: 1.3,
            delta_c: (0..10).map(|i| 1.0 + 7.0 * i as f64 / 9.0).collect(),
            t_final: 1.0,
            n_steps: 64,
            order: 22,
            n_int: 128,
            grid: Grid::square(0.0, 20.0, 100),
        }
    }
}

// --------------------------------------------------------- commands ----

fn selftest(cfg: &SelftestConfig, out: &mut Output) -> CliResult<Value> {
    let report = verify_lemma_bounds(cfg.n_max, cfg.k1, cfg.k2, cfg.n_r, cfg.n_theta)
        .map_err(Error::from)?;
    let ln_test = {
        let n = 64;
        let f: Vec<f64> = (0..n)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                (4.0 * (t / 2.0).sin().powi(2)).ln()
            })
            .collect();
        crate::scatter::kapur_rokhlin_periodic(&f, 0).abs()
    };
    let summary = json!({
        "lemma": report,
        "kapur_rokhlin_log_integral_error": ln_test,
        "passed": report.passed && ln_test <= 1e-8,
    });
    out.json("selftest.json", &summary)?;
    Ok(summary)
}

fn graf_error(cfg: &GrafErrorConfig, out: &mut Output) -> CliResult<Value> {
    if cfg.m_max < cfg.m_fit || cfg.samples_per_family == 0 {
        return Err(Error::InvalidArgument("need m_max >= m_fit and samples".into()).into());
    }
    let st = &cfg.translation;
    let mut models = Vec::new();
    for (i, fam) in WavenumberFamily::ALL.iter().enumerate() {
        let ks = fam.samples(cfg.samples_per_family);
        let model = fit_bound_constant(&[cfg.x], &ks, st, cfg.m_fit)?;
        let mut csv = String::from("M,actual_monopole,bound_monopole,actual_dipole,bound_dipole\n");
        for m in 0..=cfg.m_max {
            let (mut am, mut ad) = (0.0f64, 0.0f64);
            for &k in &ks {
                let e = truncation_errors(cfg.x, st, k, m)?;
                am = am.max(e.monopole);
                if let Ok(d) = e.dipole {
                    ad = ad.max(d);
                }
            }
            let (bm, bd) = theoretical_bounds(&model, m)?;
            csv += &format!("{m},{},{},{},{}\n", fmt_num(am), fmt_num(bm), fmt_num(ad), fmt_num(bd));
        }
        out.write(&format!("graf_error_K{}.csv", i + 1), &csv)?;
        models.push(json!({ "family": format!("K{}", i + 1), "wavenumbers": ks, "model": model }));
    }
    let side = json!({ "x": cfg.x, "translation": st, "families": models });
    out.json("graf_error.json", &side)?;
    Ok(side)
}

fn cloak_field(cfg: &CloakFieldConfig, out: &mut Output) -> CliResult<Value> {
    cfg.geometry.validate()?;
    cfg.grid.validate()?;
    crate::check_wavenumber(cfg.k)?;
    let quad = quadrature(&cfg.geometry)?;
    let coeffs = multipole_coefficients(&cfg.geometry, &quad, &cfg.source, cfg.k, cfg.order)?;
    let region = divergence_region(&cfg.geometry, &quad);
    let points = cfg.grid.points();
    let mut inc = Vec::with_capacity(points.len());
    let mut int = Vec::with_capacity(points.len());
    let mut ext = Vec::with_capacity(points.len());
    let mut warnings = 0usize;
    for &x in &points {
        inc.push(soft(cfg.source.value(x, cfg.k))?);
        match interior_cloak_field(x, &quad, &cfg.source, cfg.k) {
            Ok(v) => {
                warnings += v.accuracy_warning as usize;
                int.push(v.value);
            }
            Err(e) => int.push(soft(Err(e))?),
        }
        ext.push(soft(exterior_cloak_field(x, &coeffs, &cfg.geometry))?);
    }
    out.write("incident.csv", &complex_grid_csv(&points, &inc))?;
    out.write("interior_cloak.csv", &complex_grid_csv(&points, &int))?;
    out.write("exterior_cloak.csv", &complex_grid_csv(&points, &ext))?;
    let side = json!({
        "geometry": cfg.geometry,
        "devices": cfg.geometry.devices(),
        "k": cfg.k,
        "M": cfg.order,
        "n_int": cfg.geometry.n_int,
        "grid": cfg.grid,
        "divergence_region": { "radii": region.radii, "r_ci": region.r_ci, "r_co": region.r_co },
        "near_boundary_points": warnings,
    });
    out.json("cloak_field.json", &side)?;
    Ok(side)
}

fn bounds(cfg: &BoundsConfig, out: &mut Output) -> CliResult<Value> {
    cfg.geometry.validate()?;
    let geom = &cfg.geometry;
    let quad = quadrature(geom)?;
    let region = divergence_region(geom, &quad);
    let audit = extremal_audit_points(geom, &region);
    let fits = cloak_error_bound(geom, &quad, &cfg.source, &audit, &cfg.wavenumbers, cfg.m_fit, cfg.m_ref)?;
    let mut csv = String::from("k_re,k_im,a,c,M,predicted,measured\n");
    for f in &fits {
        let coeffs = multipole_coefficients(geom, &quad, &cfg.source, f.k, cfg.m_ref)?;
        for &m in &cfg.orders {
            let measured = truncation_error(&audit, &coeffs, geom, m, cfg.m_ref)?;
            csv += &format!(
                "{},{},{},{},{m},{},{}\n",
                fmt_num(f.k.re),
                fmt_num(f.k.im),
                fmt_num(f.a),
                fmt_num(f.c),
                fmt_num(f.predicted(m)),
                fmt_num(measured)
            );
        }
    }
    out.write("bounds.csv", &csv)?;
    let disk = DiskGrid {
        center: geom.center,
        radius: region.r_ci - 0.1 * geom.delta_c,
        n_rings: cfg.n_rings,
        n_theta: cfg.n_theta,
    };
    let pts = disk.points();
    let mut audits = Vec::new();
    for &k in &cfg.max_principle_k {
        let coeffs = multipole_coefficients(geom, &quad, &cfg.source, k, cfg.m_ref)?;
        let values = pts
            .iter()
            .map(|(x, _)| -> CliResult<C64> {
                let e = crate::cloak::exterior_cloak_field_order(*x, &coeffs, geom, cfg.audit_order)?
                    - crate::cloak::exterior_cloak_field_order(*x, &coeffs, geom, cfg.m_ref)?;
                Ok(e)
            })
            .collect::<CliResult<Vec<_>>>()?;
        audits.push(json!({ "k": k, "audit": max_principle_audit(&disk, &values, k)? }));
    }
    let side = json!({
        "audit_points": audit,
        "fits": fits,
        "max_principle_disk": disk,
        "max_principle": audits,
    });
    out.json("bounds.json", &side)?;
    Ok(side)
}

fn scatter_cmd(cfg: &ScatterFieldConfig, out: &mut Output) -> CliResult<Value> {
    cfg.grid.validate()?;
    let obst = cfg.kite.discretize(cfg.n_nodes)?;
    let eta = cfg.eta.unwrap_or_else(|| choose_eta(cfg.k));
    let sys = CfieSystem::assemble(&obst, cfg.k, eta)?;
    let trace = obst
        .q
        .iter()
        .map(|&y| cfg.source.value(y, cfg.k))
        .collect::<crate::Result<Vec<_>>>()?;
    let density = sys.solve(&trace)?;
    let u_max = trace.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let residual = boundary_residual(&cfg.kite, &obst, &density, &|x| cfg.source.value(x, cfg.k))?;
    let points = cfg.grid.points();
    let mut us = Vec::with_capacity(points.len());
    let mut total = Vec::with_capacity(points.len());
    let mut warnings = 0usize;
    for &x in &points {
        let s = match scattered_field(x, &obst, &density) {
            Ok(v) => {
                warnings += v.accuracy_warning as usize;
                v.value
            }
            Err(e) => soft(Err(e))?,
        };
        us.push(s);
        total.push(soft(cfg.source.value(x, cfg.k))? + s);
    }
    out.write("scattered.csv", &complex_grid_csv(&points, &us))?;
    out.write("total.csv", &complex_grid_csv(&points, &total))?;
    let side = json!({
        "k": cfg.k,
        "eta": eta,
        "n_nodes": cfg.n_nodes,
        "kite": cfg.kite,
        "residual_norm": residual,
        "relative_residual": residual / u_max,
        "condition_estimate": sys.condition_estimate(),
        "near_boundary_points": warnings,
    });
    out.json("scatter_field.json", &side)?;
    Ok(side)
}

fn write_heat(run: &ScenarioFields, tag: &str, cfg: &HeatSimConfig, out: &mut Output) -> CliResult<()> {
    let comps: [(&str, &TimeFieldGrid); 4] = [
        ("incident", &run.incident),
        ("cloak", &run.cloak),
        ("scattered", &run.scattered),
        ("total", &run.total),
    ];
    let every = cfg.output_every.max(1);
    for (name, f) in comps {
        for p in (0..f.n_times()).filter(|p| p % every == 0 || p + 1 == f.n_times()) {
            out.write(&format!("{tag}/{name}_t{p:05}.csv"), &time_grid_csv(f, p))?;
        }
        if cfg.long_format {
            let mut s = String::from("t,x,y,value\n");
            for (p, &t) in f.times.iter().enumerate() {
                for i in 0..f.grid.len() {
                    let x = f.grid.point(i);
                    s += &format!("{},{},{},{}\n", fmt_num(t), fmt_num(x[0]), fmt_num(x[1]), fmt_num(f.at(i, p)));
                }
            }
            out.write(&format!("{tag}/{name}_long.csv"), &s)?;
        }
    }
    Ok(())
}

fn heat_sim(cfg: &HeatSimConfig, out: &mut Output) -> CliResult<Value> {
    cfg.scenario.validate()?;
    if let Some(u) = cfg.u_max {
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::InvalidArgument("u_max must be positive".into()).into());
        }
    }
    let runs = if cfg.compare {
        let (off, on) = simulate_comparison(&cfg.scenario)?;
        vec![off, on]
    } else {
        vec![simulate_scenario(&cfg.scenario)?]
    };
    let devices = cfg.scenario.geometry.devices();
    let mut summaries = Vec::new();
    for run in &runs {
        let tag = if run.cloaked { "cloaked" } else { "uncloaked" };
        write_heat(run, tag, cfg, out)?;
        let u_max = cfg.u_max.unwrap_or_else(|| default_u_max(&run.incident, &cfg.scenario.geometry));
        let radii = if run.cloaked && u_max > 0.0 {
            Some(safe_radius(&run.cloak, &devices, u_max)?)
        } else {
            None
        };
        summaries.push(json!({ "tag": tag, "u_max": u_max, "safe_radii": radii }));
    }
    let side = json!({
        "contour": runs[0].contour,
        "sigma": cfg.scenario.medium.sigma,
        "rho_c": cfg.scenario.medium.rho_c,
        "geometry": cfg.scenario.geometry,
        "devices": devices,
        "grid": cfg.scenario.grid,
        "times": runs[0].incident.times,
        "masked_points": runs[0].incident.mask.iter().filter(|m| **m).count(),
        "runs": summaries,
    });
    out.json("heat_sim.json", &side)?;
    Ok(side)
}

fn sweep_circles(cfg: &SweepCirclesConfig, out: &mut Output) -> CliResult<Value> {
    let mut csv = String::from("delta_c,device,radius,region_radius,ratio,saturated,u_max\n");
    let mut points = Vec::new();
    for &dc in &cfg.delta_c {
        let scenario = HeatScenario {
            medium: crate::heat::HeatMedium { sigma: cfg.sigma, rho_c: 1.0 },
            source: cfg.source,
            geometry: CloakGeometry::standard(cfg.center, dc, cfg.n_int),
            order: cfg.order,
            obstacle: None,
            cloak: true,
            t_final: cfg.t_final,
            n_steps: cfg.n_steps,
            alpha: 0.0,
            grid: cfg.grid,
            scatter_stride: 1,
        };
        let sp = sweep_point(&scenario)?;
        for (j, (r, rr)) in sp.radii.iter().zip(&sp.region_radii).enumerate() {
            csv += &format!(
                "{},{j},{},{},{},{},{}\n",
                fmt_num(dc),
                fmt_num(r.radius),
                fmt_num(*rr),
                fmt_num(r.radius / rr),
                r.saturated,
                fmt_num(sp.u_max)
            );
        }
        points.push(sp);
    }
    out.write("sweep_circles.csv", &csv)?;
    let side = json!({ "config": cfg, "points": points });
    out.json("sweep_circles.json", &side)?;
    Ok(side)
}

fn dispatch(cli: &Cli, out: &mut Output) -> CliResult<(Value, Value)> {
    macro_rules! go {
        ($t:ty, $f:expr) => {{
            let (cfg, raw): ($t, Value) = load(&cli.config)?;
            let echo = if raw.is_null() { serde_json::to_value(&cfg).expect("serializable") } else { raw };
            let r = $f(&cfg, out)?;
            Ok((echo, r))
        }};
    }
    match cli.command {
        Command::Selftest => go!(SelftestConfig, selftest),
        Command::GrafError => go!(GrafErrorConfig, graf_error),
        Command::CloakField => go!(CloakFieldConfig, cloak_field),
        Command::Bounds => go!(BoundsConfig, bounds),
        Command::ScatterField => go!(ScatterFieldConfig, scatter_cmd),
        Command::HeatSim => go!(HeatSimConfig, heat_sim),
        Command::SweepCircles => go!(SweepCirclesConfig, sweep_circles),
    }
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let start = Instant::now();
    let mut out = Output { dir: cli.out.clone(), files: Vec::new() };
    let result = (|| {
        if let Some(w) = cli.workers {
            if w == 0 {
                return Err(CliError::config("--workers must be at least 1"));
            }
            // a second call in the same process keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
        }
        fs::create_dir_all(&cli.out).map_err(|e| CliError::io(e, &cli.out))?;
        dispatch(&cli, &mut out)
    })();
    let elapsed = start.elapsed().as_secs_f64();
    let (code, status, config, summary) = match result {
        Ok((cfg, summary)) => (0, Value::String("ok".into()), cfg, summary),
        Err(e) => {
            eprintln!("{}", e.to_json());
            (e.code, e.to_json(), Value::Null, Value::Null)
        }
    };
    let manifest = json!({
        "command": cli.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config_path": cli.config,
        "config": config,
        "workers": cli.workers.unwrap_or_else(rayon::current_num_threads),
        "seed": cli.seed,
        "status": status,
        "elapsed_seconds": elapsed,
        "outputs": out.files,
        "summary": summary,
    });
    // the manifest is best effort when the output directory itself failed
    if fs::create_dir_all(&cli.out).is_ok() {
        let _ = fs::write(
            cli.out.join("manifest.json"),
            serde_json::to_string_pretty(&manifest).expect("serializable") + "\n",
        );
    }
    code
}
