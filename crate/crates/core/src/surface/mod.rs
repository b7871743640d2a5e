//! Points of the face: `f = F e₃ F*` in 𝕊³₁, the dual `f̂ = F F*` in ℍ³, the
//! unit normal, the hollow-ball picture, grids and singular curves.

mod curves;
mod grid;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{integrate_frame, FrameError, FrameState, IntegratorOptions};
use crate::holo::{HoloError, PathSpec, Segment};
use crate::lorentz::{congruence, hermitian_part_to_vec, lorentz_inner, Mat2C, MinkowskiPoint, E3};
use crate::weierstrass::{metric_at, MetricSample, WeierstrassData, WeierstrassError, SINGULAR_TOL};

pub use curves::{singular_curves, SingularCurve, CURVE_TOL};
pub use grid::{mean_curvature_probe, sample_grid, NodeFailure, SampleGrid};

/// Samples with `||g| - 1|` at most this are kept but carry no normal.
pub const NEAR_SINGULAR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("the normal is undefined where |g| = 1 (z = {0})")]
    SingularNormal(Complex64),
    #[error("point is not on de Sitter space: <x,x> - 1 = {0:.3e}")]
    NotOnDeSitter(f64),
    #[error("curvature stencil unusable: {0}")]
    InsufficientStencil(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Data(#[from] WeierstrassError),
}

impl From<HoloError> for SurfaceError {
    fn from(e: HoloError) -> Self {
        SurfaceError::Frame(FrameError::Holo(e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub z: Complex64,
    pub f: MinkowskiPoint,
    pub fhat: MinkowskiPoint,
    /// `None` within [`NEAR_SINGULAR`] of the singular set.
    pub normal: Option<MinkowskiPoint>,
    pub metric: MetricSample,
    pub y: [f64; 3],
    /// `||g| - 1| ≤ NEAR_SINGULAR`.
    pub near_singular: bool,
    /// `|g|` at the sample.
    pub g_abs: f64,
}

impl SurfaceSample {
    pub fn normal(&self) -> Result<MinkowskiPoint, SurfaceError> {
        self.normal.ok_or(SurfaceError::SingularNormal(self.z))
    }
}

/// The unit normal `(|g|²-1)⁻¹ F [[|g|²+1, 2g], [2ḡ, |g|²+1]] F*`.
/// Future-pointing where `|g| > 1`, past-pointing where `|g| < 1`.
pub fn unit_normal(f: &Mat2C, g: Complex64) -> Option<MinkowskiPoint> {
    let g2 = g.norm_sqr();
    let gap = g2 - 1.0;
    if !(gap.abs() > 0.0) || !gap.is_finite() {
        return None;
    }
    let a = Complex64::new(g2 + 1.0, 0.0);
    let m = Mat2C::new(a, g * 2.0, g.conj() * 2.0, a);
    Some(hermitian_part_to_vec(&congruence(f, &m)) * (1.0 / gap))
}

pub fn immerse(s: &FrameState, d: &WeierstrassData) -> Result<SurfaceSample, SurfaceError> {
    immerse_with(s, d, SINGULAR_TOL)
}

/// [`immerse`] with the singular-set tolerance of the metric sample.
pub fn immerse_with(s: &FrameState, d: &WeierstrassData, singular_tol: f64) -> Result<SurfaceSample, SurfaceError> {
    let g = s.branch.eval(&d.g, s.z)?;
    let metric = metric_at(d, s.z, &s.branch, singular_tol)?;
    let f = hermitian_part_to_vec(&congruence(&s.f, &E3));
    // F F* is Hermitian positive; its trace is 2 x₀ > 0
    let fhat = hermitian_part_to_vec(&(s.f * s.f.adjoint()));
    let near = (g.norm() - 1.0).abs() <= NEAR_SINGULAR;
    let normal = if near { None } else { unit_normal(&s.f, g) };
    let y = hollow_ball_project(f)?;
    Ok(SurfaceSample { z: s.z, f, fhat, normal, metric, y, near_singular: near, g_abs: g.norm() })
}

/// `e^{arctan x₀} (x₁, x₂, x₃)/√(1 + x₀²)`, strictly inside the shell
/// `e^{-π} < |y|² < e^{π}`.
pub fn hollow_ball_project(x: MinkowskiPoint) -> Result<[f64; 3], SurfaceError> {
    let dev = lorentz_inner(x, x) - 1.0;
    if !x.is_finite() || !(dev.abs() <= 1e-6 * (1.0 + x.x0 * x.x0)) {
        return Err(SurfaceError::NotOnDeSitter(dev));
    }
    // on 𝕊³₁ the spatial norm equals √(1 + x₀²); using it keeps |y| exact
    let spatial = (x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3).sqrt();
    let mut r = x.x0.atan().exp();
    let (lo, hi) = ((-PI).exp(), PI.exp());
    while r * r >= hi {
        r = f64::from_bits(r.to_bits() - 1);
    }
    while r * r <= lo {
        r = f64::from_bits(r.to_bits() + 1);
    }
    let k = r / spatial;
    Ok([x.x1 * k, x.x2 * k, x.x3 * k])
}

/// `(∂f/∂x, ∂f/∂y)` from `∂f/∂z = F M e₃ F*`.
pub fn tangents(s: &FrameState, d: &WeierstrassData) -> Result<(MinkowskiPoint, MinkowskiPoint), SurfaceError> {
    let g = s.branch.eval(&d.g, s.z)?;
    let w = s.branch.eval(&d.omega, s.z)?;
    let m = Mat2C::new(g * w, -g * g * w, w, -g * w);
    let fz = s.f * m * E3 * s.f.adjoint();
    let fzb = fz.adjoint();
    let fx = hermitian_part_to_vec(&(fz + fzb));
    let fy = hermitian_part_to_vec(&((fz - fzb).scale(Complex64::new(0.0, 1.0))));
    Ok((fx, fy))
}

/// Central difference of `f` along `dir` with step `h`, integrating `F` to
/// both ends.
pub fn tangent_fd(
    d: &WeierstrassData,
    s: &FrameState,
    dir: Complex64,
    h: f64,
    opts: &IntegratorOptions,
) -> Result<MinkowskiPoint, SurfaceError> {
    let end = |sign: f64| -> Result<MinkowskiPoint, SurfaceError> {
        let path = PathSpec::new().line(s.z, s.z + dir * (sign * h));
        let (e, _) = integrate_frame(d, &path, s, opts)?;
        Ok(hermitian_part_to_vec(&congruence(&e.f, &E3)))
    };
    Ok((end(1.0)? - end(-1.0)?) * (0.5 / h))
}

/// Cover-coordinate rectangle of a grid. `LogPolar` charts `z = e^{u + iv}`
/// with `v` unbounded, so multivalued data is single-valued in the chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    Cartesian { x: [f64; 2], y: [f64; 2] },
    LogPolar { log_r: [f64; 2], theta: [f64; 2] },
}

impl Region {
    fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        match *self {
            Region::Cartesian { x, y } => (x, y),
            Region::LogPolar { log_r, theta } => (log_r, theta),
        }
    }

    pub fn is_valid(&self) -> bool {
        let (u, v) = self.bounds();
        u.iter().chain(v.iter()).all(|x| x.is_finite()) && u[0] <= u[1] && v[0] <= v[1]
    }

    /// Zero area.
    pub fn is_empty(&self) -> bool {
        let (u, v) = self.bounds();
        !(u[1] > u[0] && v[1] > v[0])
    }

    pub fn to_z(&self, c: [f64; 2]) -> Complex64 {
        match self {
            Region::Cartesian { .. } => Complex64::new(c[0], c[1]),
            Region::LogPolar { .. } => Complex64::from_polar(c[0].exp(), c[1]),
        }
    }

    /// `dz` per unit `du`; `dz/dv = i dz/du` in both charts.
    pub fn dz_du(&self, c: [f64; 2]) -> Complex64 {
        match self {
            Region::Cartesian { .. } => Complex64::new(1.0, 0.0),
            Region::LogPolar { .. } => self.to_z(c),
        }
    }

    /// Chart coordinates of node `(i, j)` on an `nu × nv` lattice.
    pub fn node(&self, i: usize, j: usize, nu: usize, nv: usize) -> [f64; 2] {
        let (u, v) = self.bounds();
        let at = |b: [f64; 2], k: usize, n: usize| {
            if n <= 1 {
                b[0]
            } else {
                b[0] + (b[1] - b[0]) * k as f64 / (n - 1) as f64
            }
        };
        [at(u, i, nu), at(v, j, nv)]
    }

    /// Lattice spacing `(Δu, Δv)`.
    pub fn spacing(&self, nu: usize, nv: usize) -> [f64; 2] {
        let (u, v) = self.bounds();
        let s = |b: [f64; 2], n: usize| if n <= 1 { 0.0 } else { (b[1] - b[0]) / (n - 1) as f64 };
        [s(u, nu), s(v, nv)]
    }

    /// Path between chart points differing in one coordinate, or a straight
    /// line for Cartesian charts.
    pub(crate) fn edge(&self, a: [f64; 2], b: [f64; 2]) -> PathSpec {
        let (za, zb) = (self.to_z(a), self.to_z(b));
        match self {
            Region::Cartesian { .. } => PathSpec::new().line(za, zb),
            Region::LogPolar { .. } => {
                let mut segs = Vec::new();
                if a[0] != b[0] {
                    segs.push(Segment::Line { from: za, to: Complex64::from_polar(b[0].exp(), a[1]) });
                }
                if a[1] != b[1] {
                    let radius = b[0].exp();
                    segs.push(Segment::Arc { center: Complex64::new(0.0, 0.0), radius, start_angle: a[1], end_angle: b[1] });
                }
                if segs.is_empty() {
                    segs.push(Segment::Line { from: za, to: zb });
                }
                PathSpec::from_segments(segs)
            }
        }
    }

    /// Path from a domain point to a chart point. For log-polar charts the
    /// start is placed on the principal sheet.
    pub(crate) fn path_from(&self, z0: Complex64, c: [f64; 2]) -> PathSpec {
        match self {
            Region::Cartesian { .. } => PathSpec::new().line(z0, self.to_z(c)),
            Region::LogPolar { .. } => self.edge([z0.norm().ln(), z0.arg()], c),
        }
    }
}
