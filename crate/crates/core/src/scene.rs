//! Scene documents: JSON with the data source, grid, optional λ-deformation
//! and gauge, output paths and tolerances.
//!
//! ```json
//! {
//!   "data": { "example": "catenoid", "params": { "mu": 0.8 } },
//!   "grid": { "chart": "log_polar", "log_r": [-5, 5], "theta": [0, 3.141592653589793], "nu": 100, "nv": 100 },
//!   "lambda": 2.0,
//!   "outputs": { "mesh": "catenoid.obj", "curves": "catenoid-curves.obj", "report": "catenoid.json" }
//! }
//! ```
//!
//! Explicit data replaces `example` by `g`, `omega`, `punctures` (each
//! `"inf"`, a real number or `[re, im]`) and `basepoint`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::frame::IntegratorOptions;
use crate::surface::Region;
use crate::weierstrass::{data_from_text, gauge_transform, lambda_deform, make_example, Example, WeierstrassData, WeierstrassError};
use crate::SpherePoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> SceneError {
    SceneError::Validation { field: field.into(), message: message.into() }
}

/// The document as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub data: DataConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeConfig>,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub punctures: Option<Vec<SpherePoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<SpherePoint>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_r: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nv: Option<usize>,
    /// Lattice size for singular-curve extraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    pub p: SpherePoint,
    pub q: SpherePoint,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<f64>,
}

/// A validated scene.
#[derive(Debug, Clone)]
pub struct SceneSpec {
    pub config: SceneConfig,
    pub example: Option<Example>,
    /// Data after the λ-deformation and then the gauge.
    pub data: WeierstrassData,
    pub region: Region,
    pub nu: usize,
    pub nv: usize,
    pub curve_resolution: usize,
    /// Carries the integration, classification and singular-set tolerances.
    pub options: IntegratorOptions,
    /// SHA-256 of the canonical form of `config`.
    pub hash: String,
}

/// Grid used when a scene gives none; the log-polar window is the printed
/// catenoid figure domain.
pub fn default_region(example: Option<Example>) -> Region {
    match example {
        Some(Example::Catenoid) => Region::LogPolar { log_r: [-5.0, 5.0], theta: [0.0, PI] },
        Some(Example::Enneper) => Region::Cartesian { x: [-1.3, 1.3], y: [-1.3, 1.3] },
        Some(Example::Helicoid) => Region::Cartesian { x: [-0.9, 0.9], y: [-PI, PI] },
        _ => Region::Cartesian { x: [-1.0, 1.0], y: [-1.0, 1.0] },
    }
}

pub const DEFAULT_RESOLUTION: usize = 100;
pub const DEFAULT_CURVE_RESOLUTION: usize = 400;

fn data_error(field: &str, e: WeierstrassError) -> SceneError {
    invalid(field, e.to_string())
}

fn finite_point(field: &str, p: &SpherePoint) -> Result<Complex64, SceneError> {
    p.finite().ok_or_else(|| invalid(field, "must be finite"))
}

fn build_data(c: &DataConfig) -> Result<(Option<Example>, WeierstrassData), SceneError> {
    match (&c.example, &c.g, &c.omega) {
        (Some(name), None, None) => {
            if c.punctures.is_some() || c.basepoint.is_some() {
                return Err(invalid("data", "`punctures` and `basepoint` are fixed by the example"));
            }
            let ex: Example = name.parse().map_err(|_| invalid("data.example", format!("unknown example `{name}`")))?;
            let names = ex.param_names();
            if let Some(k) = c.params.keys().find(|k| !names.contains(&k.as_str())) {
                return Err(invalid(format!("data.params.{k}"), format!("`{ex}` takes {names:?}")));
            }
            let params: Vec<f64> = names
                .iter()
                .zip(ex.default_params())
                .map(|(n, d)| c.params.get(*n).copied().unwrap_or(*d))
                .collect();
            let d = make_example(ex, &params).map_err(|e| data_error("data.params", e))?;
            Ok((Some(ex), d))
        }
        (None, Some(g), Some(omega)) => {
            let punctures = c.punctures.clone().ok_or_else(|| invalid("data.punctures", "required with explicit data"))?;
            let base = c.basepoint.as_ref().ok_or_else(|| invalid("data.basepoint", "required with explicit data"))?;
            let base = finite_point("data.basepoint", base)?;
            let d = data_from_text(g, omega, &c.params, punctures, base).map_err(|e| match e {
                WeierstrassError::Holo(h) => invalid("data.g/omega", h.to_string()),
                e => data_error("data", e),
            })?;
            Ok((None, d))
        }
        (Some(_), _, _) => Err(invalid("data", "give either `example` or `g` and `omega`, not both")),
        _ => Err(invalid("data", "needs `example`, or both `g` and `omega`")),
    }
}

fn interval(field: &str, v: Option<[f64; 2]>) -> Result<[f64; 2], SceneError> {
    let b = v.ok_or_else(|| invalid(field, "required for this chart"))?;
    if !(b[0].is_finite() && b[1].is_finite() && b[0] < b[1]) {
        return Err(invalid(field, "must be finite with lower < upper"));
    }
    Ok(b)
}

fn build_grid(g: &GridConfig, example: Option<Example>) -> Result<(Region, usize, usize, usize), SceneError> {
    let region = match g.chart.as_deref() {
        None => {
            if g.x.is_some() || g.y.is_some() || g.log_r.is_some() || g.theta.is_some() {
                return Err(invalid("grid.chart", "required when bounds are given"));
            }
            default_region(example)
        }
        Some("cartesian") => {
            if g.log_r.is_some() || g.theta.is_some() {
                return Err(invalid("grid", "cartesian charts take `x` and `y`"));
            }
            Region::Cartesian { x: interval("grid.x", g.x)?, y: interval("grid.y", g.y)? }
        }
        Some("log_polar") => {
            if g.x.is_some() || g.y.is_some() {
                return Err(invalid("grid", "log_polar charts take `log_r` and `theta`"));
            }
            Region::LogPolar { log_r: interval("grid.log_r", g.log_r)?, theta: interval("grid.theta", g.theta)? }
        }
        Some(other) => return Err(invalid("grid.chart", format!("unknown chart `{other}`"))),
    };
    let res = |field: &str, v: Option<usize>, d: usize| match v.unwrap_or(d) {
        n if n >= 2 => Ok(n),
        n => Err(invalid(field, format!("resolution must be at least 2, got {n}"))),
    };
    Ok((
        region,
        res("grid.nu", g.nu, DEFAULT_RESOLUTION)?,
        res("grid.nv", g.nv, DEFAULT_RESOLUTION)?,
        res("grid.curve_resolution", g.curve_resolution, DEFAULT_CURVE_RESOLUTION)?,
    ))
}

fn positive(field: &str, v: Option<f64>, default: f64) -> Result<f64, SceneError> {
    match v {
        None => Ok(default),
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(invalid(field, format!("must be positive, got {x}"))),
    }
}

fn hash_config(c: &SceneConfig) -> String {
    let canonical = serde_json::to_vec(c).expect("scene config serializes");
    hex::encode(Sha256::digest(&canonical))
}

/// Parses and validates a scene document.
pub fn load_scene(text: &str) -> Result<SceneSpec, SceneError> {
    let config: SceneConfig = serde_json::from_str(text)
        .map_err(|e| SceneError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    scene_from_config(config)
}

pub fn scene_from_config(config: SceneConfig) -> Result<SceneSpec, SceneError> {
    let (example, mut data) = build_data(&config.data)?;
    if let Some(l) = config.lambda {
        data = lambda_deform(&data, l).map_err(|e| data_error("lambda", e))?;
    }
    if let Some(gauge) = &config.gauge {
        let p = finite_point("gauge.p", &gauge.p)?;
        let q = finite_point("gauge.q", &gauge.q)?;
        data = gauge_transform(&data, p, q).map_err(|e| data_error("gauge", e))?;
    }
    let (region, nu, nv, curve_resolution) = build_grid(&config.grid.clone().unwrap_or_default(), example)?;
    let t = &config.tolerances;
    let base = IntegratorOptions::default();
    let options = IntegratorOptions {
        rtol: positive("tolerances.rtol", t.rtol, base.rtol)?,
        atol: positive("tolerances.atol", t.atol, base.atol)?,
        class_tol: positive("tolerances.class", t.class, base.class_tol)?,
        singular_tol: positive("tolerances.singular", t.singular, base.singular_tol)?,
        ..base
    };
    let hash = hash_config(&config);
    Ok(SceneSpec { config, example, data, region, nu, nv, curve_resolution, options, hash })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(e: SceneError) -> String {
        match e {
            SceneError::Validation { field, .. } => field,
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn minimal_catenoid_scene() {
        let s = load_scene(r#"{"data": {"example": "catenoid", "params": {"mu": 0.8}}}"#).unwrap();
        assert_eq!(s.data.punctures, vec![SpherePoint::Finite(Complex64::new(0.0, 0.0)), SpherePoint::Infinity]);
        assert_eq!(s.region, Region::LogPolar { log_r: [-5.0, 5.0], theta: [0.0, PI] });
        assert_eq!((s.nu, s.nv), (DEFAULT_RESOLUTION, DEFAULT_RESOLUTION));
        assert_eq!(s.hash.len(), 64);
    }

    #[test]
    fn lambda_scene_is_the_deformation() {
        let s = load_scene(r#"{"data": {"example": "catenoid"}, "lambda": 2}"#).unwrap();
        let d = lambda_deform(&make_example(Example::Catenoid, &[0.8]).unwrap(), 2.0).unwrap();
        let z = Complex64::new(0.7, 0.3);
        assert!((s.data.g.eval(z) - d.g.eval(z)).norm() < 1e-15);
        assert!((s.data.omega.eval(z) - d.omega.eval(z)).norm() < 1e-15);
    }

    #[test]
    fn resolution_one_is_rejected() {
        let e = load_scene(r#"{"data": {"example": "enneper"}, "grid": {"nu": 1}}"#).unwrap_err();
        assert_eq!(field_of(e), "grid.nu");
    }

    #[test]
    fn unknown_keys_and_syntax_carry_positions() {
        let e = load_scene("{\"data\": {\"example\": \"enneper\"},\n \"colour\": 1}").unwrap_err();
        assert!(matches!(e, SceneError::Parse { line: 2, .. }), "{e}");
        assert!(e.to_string().contains("colour"));
        let e = load_scene("{\"data\": ").unwrap_err();
        assert!(matches!(e, SceneError::Parse { line: 1, .. }));
    }

    #[test]
    fn validation_names_the_field() {
        let cases = [
            (r#"{"data": {"example": "torus"}}"#, "data.example"),
            (r#"{"data": {"example": "catenoid", "params": {"nu": 1}}}"#, "data.params.nu"),
            (r#"{"data": {"example": "catenoid", "params": {"mu": 1}}}"#, "data.params"),
            (r#"{"data": {"g": "z"}}"#, "data"),
            (r#"{"data": {"g": "z", "omega": "1", "punctures": ["inf"]}}"#, "data.basepoint"),
            (r#"{"data": {"g": "z +", "omega": "1", "punctures": ["inf"], "basepoint": 0}}"#, "data.g/omega"),
            (r#"{"data": {"example": "enneper"}, "tolerances": {"rtol": -1}}"#, "tolerances.rtol"),
            (r#"{"data": {"example": "enneper"}, "grid": {"chart": "polar"}}"#, "grid.chart"),
            (r#"{"data": {"example": "enneper"}, "grid": {"chart": "cartesian", "x": [1, 0], "y": [0, 1]}}"#, "grid.x"),
            (r#"{"data": {"example": "enneper"}, "gauge": {"p": [1, 0], "q": [1, 0]}}"#, "gauge"),
            (r#"{"data": {"example": "enneper"}, "lambda": 0}"#, "lambda"),
        ];
        for (text, field) in cases {
            assert_eq!(field_of(load_scene(text).unwrap_err()), field, "{text}");
        }
    }

    #[test]
    fn explicit_data_with_infinity() {
        let s = load_scene(
            r#"{"data": {"g": "z^mu", "omega": "(1 - mu^2)/(4*mu) * z^(-mu - 1)", "params": {"mu": 0.8},
                "punctures": [0, "inf"], "basepoint": [0.5, 0]},
               "grid": {"chart": "cartesian", "x": [0.2, 0.9], "y": [-0.3, 0.3], "nu": 3, "nv": 4}}"#,
        )
        .unwrap();
        assert!(s.example.is_none());
        assert_eq!(s.data.punctures[1], SpherePoint::Infinity);
        assert_eq!((s.nu, s.nv), (3, 4));
    }

    #[test]
    fn hash_ignores_layout() {
        let a = load_scene(r#"{"data": {"example": "enneper"}}"#).unwrap();
        let b = load_scene("{\n  \"data\" : { \"example\" : \"enneper\" }\n}").unwrap();
        let c = load_scene(r#"{"data": {"example": "enneper"}, "lambda": 2}"#).unwrap();
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, c.hash);
    }

    #[test]
    fn singular_tolerance_reaches_the_grid() {
        // Enneper node (0, 0) is z = 1.001i, where ||g| - 1| = 1e-3
        let text = |tol: f64| {
            format!(
                r#"{{"data": {{"example": "enneper"}}, "tolerances": {{"singular": {tol}}},
                    "grid": {{"chart": "cartesian", "x": [0.0, 1.0], "y": [1.001, 2.0], "nu": 2, "nv": 2}}}}"#
            )
        };
        for (tol, flagged) in [(1e-6, false), (2e-3, true)] {
            let s = load_scene(&text(tol)).unwrap();
            assert_eq!(s.options.singular_tol, tol);
            let g = crate::surface::sample_grid(&s.data, &s.region, 2, 2, &s.options);
            assert_eq!(g.sample(0, 0).unwrap().metric.singular, flagged);
        }
    }
}
