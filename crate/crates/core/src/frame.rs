//! The holomorphic null lift `F` with `F⁻¹ dF = [[g, -g²], [1, -g]] w dz`,
//! integrated along paths by an embedded Dormand–Prince 5(4) pair.
//!
//! Along a segment `z(t)`, `t ∈ [0, 1]`, the ODE is `dF/dt = F · M(z) · ż`
//! with `M = w [[g, -g²], [1, -g]]`. `M` is nilpotent, so `det F` is
//! conserved exactly; numerical drift is repaired by `F ← F/√det F`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::holo::{BranchState, HoloError, HoloExpr, PathSpec, Segment};
use crate::lorentz::{classify_su11, su11_residual, LorentzError, Mat2C, Su11Class};
use crate::weierstrass::{WeierstrassData, SINGULAR_TOL};
use crate::SpherePoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("singularity on path near z = {0}")]
    SingularityOnPath(Complex64),
    #[error("step size underflow at z = {z} (h = {h:.3e})")]
    ToleranceNotMet { z: Complex64, h: f64 },
    #[error("path does not start at the frame point {0}")]
    PathMismatch(Complex64),
    #[error("monodromy is not in SU(1,1) (residual {residual:.3e})")]
    NotSU11 { residual: f64 },
    #[error("loop radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Holo(#[from] HoloError),
}

impl From<LorentzError> for FrameError {
    fn from(e: LorentzError) -> Self {
        match e {
            LorentzError::NotInGroup(r) | LorentzError::NotHermitian(r) => FrameError::NotSU11 { residual: r },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Minimum distance kept from finite punctures.
    pub clearance: f64,
    pub max_steps: usize,
    /// `|det F - 1|` above which the frame is renormalized.
    pub det_repair: f64,
    /// Tolerance of the SU(1,1) trace classification.
    pub class_tol: f64,
    /// Largest `su11_residual` accepted for a monodromy matrix.
    pub su11_tol: f64,
    /// `||g| - 1|` at or below which a sample counts as singular.
    pub singular_tol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-10,
            atol: 1e-12,
            clearance: 1e-6,
            max_steps: 2_000_000,
            det_repair: 1e-12,
            class_tol: 1e-9,
            su11_tol: 1e-6,
            singular_tol: SINGULAR_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub accepted: u64,
    pub rejected: u64,
    pub det_repairs: u64,
    /// Largest `|det F - 1|` seen before repair.
    pub max_det_drift: f64,
    /// Largest relative `|m11² + m12 m21|` of the coefficient matrix.
    pub max_null_residual: f64,
    pub arc_length: f64,
}

impl IntegrationStats {
    pub fn merge(&mut self, o: &IntegrationStats) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.det_repairs += o.det_repairs;
        self.max_det_drift = self.max_det_drift.max(o.max_det_drift);
        self.max_null_residual = self.max_null_residual.max(o.max_null_residual);
        self.arc_length += o.arc_length;
    }
}

/// A solution point of the frame ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameState {
    pub z: Complex64,
    pub branch: BranchState,
    pub f: Mat2C,
}

impl FrameState {
    /// `F = identity` at `z` on the principal branch.
    pub fn identity_at(d: &WeierstrassData, z: Complex64) -> Result<Self, FrameError> {
        Ok(FrameState { z, branch: d.branch_at(z)?, f: Mat2C::identity() })
    }

    /// The normalization `F(z₀) = e₀` at the basepoint.
    pub fn at_basepoint(d: &WeierstrassData) -> Result<Self, FrameError> {
        Self::identity_at(d, d.basepoint)
    }
}

/// Expressions evaluated at every stage.
struct Coeffs {
    g: HoloExpr,
    w: HoloExpr,
}

impl Coeffs {
    fn new(d: &WeierstrassData) -> Self {
        Coeffs { g: d.g.clone(), w: d.omega.clone() }
    }

    /// `M(z)`, with its relative null-condition residual.
    fn matrix(&self, branch: &BranchState, z: Complex64) -> Result<(Mat2C, f64), FrameError> {
        let g = branch.eval(&self.g, z)?;
        let w = branch.eval(&self.w, z)?;
        let m = Mat2C::new(g * w, -g * g * w, w, -g * w);
        if !m.is_finite() {
            return Err(FrameError::SingularityOnPath(z));
        }
        let num = (m.a11 * m.a11 + m.a12 * m.a21).norm();
        let den = m.a11.norm_sqr() + (m.a12 * m.a21).norm() + f64::MIN_POSITIVE;
        Ok((m, num / den))
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn lin(base: &Mat2C, terms: &[(f64, &Mat2C)], h: f64) -> Mat2C {
    let mut out = *base;
    for (c, k) in terms {
        if *c != 0.0 {
            out = out + k.scale(Complex64::new(h * c, 0.0));
        }
    }
    out
}

fn err_norm(e: &Mat2C, y0: &Mat2C, y1: &Mat2C, opts: &IntegratorOptions) -> f64 {
    let (e, a, b) = (e.entries(), y0.entries(), y1.entries());
    let mut s = 0.0;
    for k in 0..4 {
        for (ev, av, bv) in [(e[k].re, a[k].re, b[k].re), (e[k].im, a[k].im, b[k].im)] {
            let sc = opts.atol + opts.rtol * av.abs().max(bv.abs());
            s += (ev / sc).powi(2);
        }
    }
    (s / 8.0).sqrt()
}

fn repair(f: &mut Mat2C, stats: &mut IntegrationStats, opts: &IntegratorOptions) {
    let det = f.det();
    let drift = (det - 1.0).norm();
    stats.max_det_drift = stats.max_det_drift.max(drift);
    if drift > opts.det_repair {
        *f = f.scale(det.sqrt().inv());
        stats.det_repairs += 1;
    }
}

fn integrate_segment(
    co: &Coeffs,
    seg: &Segment,
    state: &mut FrameState,
    stats: &mut IntegrationStats,
    opts: &IntegratorOptions,
) -> Result<(), FrameError> {
    let rhs = |branch: &BranchState, t: f64, f: &Mat2C| -> Result<(Mat2C, f64), FrameError> {
        let z = seg.point(t);
        let (m, null) = co.matrix(branch, z)?;
        Ok((*f * m.scale(seg.velocity(t)), null))
    };
    let mut t = 0.0f64;
    let mut h = 0.02f64;
    let mut err_prev = 1e-4f64;
    let (mut k1, _) = rhs(&state.branch, 0.0, &state.f)?;
    let mut steps = 0usize;
    while t < 1.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(FrameError::ToleranceNotMet { z: seg.point(t), h });
        }
        let last = t + h >= 1.0;
        let step = if last { 1.0 - t } else { h };
        let y = state.f;
        let mut k = [k1, k1, k1, k1, k1, k1, k1];
        let mut null_max = 0.0f64;
        let mut staged = Ok(());
        for s in 1..7 {
            let terms: Vec<(f64, &Mat2C)> = (0..s).map(|j| (A[s][j], &k[j])).collect();
            let ys = lin(&y, &terms, step);
            match rhs(&state.branch, t + C[s] * step, &ys) {
                Ok((ks, nr)) => {
                    k[s] = ks;
                    null_max = null_max.max(nr);
                }
                Err(e) => {
                    staged = Err(e);
                    break;
                }
            }
        }
        if let Err(e) = staged {
            // a stage landed on a singularity or a bad branch; retry shorter
            h = step * 0.25;
            stats.rejected += 1;
            if h < 1e-14 {
                return Err(e);
            }
            continue;
        }
        let y5 = lin(&y, &[(A[6][0], &k[0]), (A[6][2], &k[2]), (A[6][3], &k[3]), (A[6][4], &k[4]), (A[6][5], &k[5])], step);
        let mut e = Mat2C::zero();
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                e = e + kj.scale(Complex64::new(step * E[j], 0.0));
            }
        }
        let err = err_norm(&e, &y, &y5, opts);
        if !err.is_finite() {
            h = step * 0.25;
            stats.rejected += 1;
            if h < 1e-14 {
                return Err(FrameError::SingularityOnPath(seg.point(t)));
            }
            continue;
        }
        if err <= 1.0 {
            let t_new = if last { 1.0 } else { t + step };
            let z_new = if last { seg.end() } else { seg.point(t_new) };
            match state.branch.advance(z_new) {
                Ok(()) => {}
                Err(HoloError::StepTooLarge(_)) => {
                    h = step * 0.5;
                    stats.rejected += 1;
                    continue;
                }
                Err(HoloError::SingularityOnPath(z)) => return Err(FrameError::SingularityOnPath(z)),
                Err(e) => return Err(e.into()),
            }
            stats.accepted += 1;
            stats.max_null_residual = stats.max_null_residual.max(null_max);
            t = t_new;
            state.z = z_new;
            state.f = y5;
            let repairs = stats.det_repairs;
            repair(&mut state.f, stats, opts);
            // FSAL: the last stage is the derivative at the new point unless repaired
            k1 = if stats.det_repairs != repairs { rhs(&state.branch, t, &state.f)?.0 } else { k[6] };
            let fac = 0.9 * err.max(1e-10).powf(-0.17) * err_prev.powf(0.04);
            h = step * fac.clamp(0.2, 10.0);
            err_prev = err.max(1e-4);
        } else {
            stats.rejected += 1;
            h = step * (0.9 * err.powf(-0.2)).max(0.2);
        }
        h = h.min(0.25);
        if h < 1e-14 {
            return Err(FrameError::ToleranceNotMet { z: seg.point(t), h });
        }
    }
    stats.arc_length += seg.length();
    Ok(())
}

/// Integrates from `start` along `path`.
pub fn integrate_frame(
    d: &WeierstrassData,
    path: &PathSpec,
    start: &FrameState,
    opts: &IntegratorOptions,
) -> Result<(FrameState, IntegrationStats), FrameError> {
    let mut stats = IntegrationStats::default();
    if path.is_empty() {
        return Ok((start.clone(), stats));
    }
    let p0 = path.start().unwrap();
    if (p0 - start.z).norm() > 1e-9 * p0.norm().max(1.0) {
        return Err(FrameError::PathMismatch(start.z));
    }
    path.validate(&d.finite_punctures(), opts.clearance).map_err(|e| match e {
        HoloError::SingularityOnPath(z) => FrameError::SingularityOnPath(z),
        e => FrameError::Holo(e),
    })?;
    let co = Coeffs::new(d);
    let mut state = start.clone();
    for seg in &path.segments {
        integrate_segment(&co, seg, &mut state, &mut stats, opts)?;
    }
    Ok((state, stats))
}

/// Φ for one loop, with its conjugacy class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub phi: Mat2C,
    pub classification: Su11Class,
    /// Sorted by argument in `[0, 2π)`.
    pub eigenvalues: [Complex64; 2],
    pub su11_residual: f64,
    pub stats: IntegrationStats,
}

fn finish(phi: Mat2C, stats: IntegrationStats, opts: &IntegratorOptions) -> Result<MonodromyResult, FrameError> {
    let residual = su11_residual(&phi);
    if residual > opts.su11_tol {
        return Err(FrameError::NotSU11 { residual });
    }
    let classification = classify_su11(&phi, opts.class_tol.max(4.0 * residual))?;
    Ok(MonodromyResult { phi, classification, eigenvalues: phi.eigenvalues(), su11_residual: residual, stats })
}

/// The loop used for `monodromy`: a circle about `p` (or `|z| = 1/radius`
/// traversed clockwise for ∞) starting on its positive real side.
pub fn puncture_loop(puncture: &SpherePoint, radius: f64) -> Result<PathSpec, FrameError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(FrameError::BadRadius(radius));
    }
    Ok(match puncture {
        SpherePoint::Finite(p) => PathSpec::circle(*p, radius, true),
        SpherePoint::Infinity => PathSpec::circle(Complex64::new(0.0, 0.0), 1.0 / radius, false),
    })
}

/// `Φ = F(start)⁻¹ F(after one loop)` around `puncture`, with `F(start) = e₀`
/// on the principal branch at the start point.
pub fn monodromy(
    d: &WeierstrassData,
    puncture: &SpherePoint,
    radius: f64,
    opts: &IntegratorOptions,
) -> Result<MonodromyResult, FrameError> {
    let path = puncture_loop(puncture, radius)?;
    let start = FrameState::identity_at(d, path.start().unwrap())?;
    let (end, stats) = integrate_frame(d, &path, &start, opts)?;
    finish(end.f, stats, opts)
}

/// Monodromy of a closed path starting at the basepoint,
/// normalized by `F(z₀) = e₀`.
pub fn monodromy_along(
    d: &WeierstrassData,
    path: &PathSpec,
    opts: &IntegratorOptions,
) -> Result<MonodromyResult, FrameError> {
    if !path.is_closed() {
        return Err(FrameError::Holo(HoloError::DiscontinuousPath(path.segments.len())));
    }
    let start = FrameState::at_basepoint(d)?;
    let (end, stats) = integrate_frame(d, path, &start, opts)?;
    finish(end.f, stats, opts)
}

/// `G = (g F11 + F12)/(g F21 + F22)`.
pub fn hyperbolic_gauss_at(s: &FrameState, d: &WeierstrassData) -> Result<SpherePoint, FrameError> {
    let g = s.branch.eval(&d.g, s.z)?;
    let f = &s.f;
    let num = g * f.a11 + f.a12;
    let den = g * f.a21 + f.a22;
    if den.norm() == 0.0 || !(num / den).is_finite() {
        return Ok(SpherePoint::Infinity);
    }
    Ok(SpherePoint::Finite(num / den))
}

/// `dG/dz = g' det F / (g F21 + F22)²`.
pub fn hyperbolic_gauss_derivative(s: &FrameState, d: &WeierstrassData) -> Result<Complex64, FrameError> {
    let g = s.branch.eval(&d.g, s.z)?;
    let dg = s.branch.eval(&d.dg(), s.z)?;
    let den = g * s.f.a21 + s.f.a22;
    Ok(dg * s.f.det() / (den * den))
}
