//! End classification and the Osserman-type inequality
//! `2 deg G ≥ −χ(M) + n`, with equality exactly when every end is regular
//! and embedded.
//!
//! Pseudometric orders use the length exponent: `ds² ~ |t|^{2m} |dt|²` has
//! order `m`. With that convention `dŝ^♯² · dσ̂^♯² = 4|Q|²` gives
//! `ordLift + ordSigma = ordQ`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{
    hyperbolic_gauss_at, hyperbolic_gauss_derivative, integrate_frame, monodromy, FrameError, FrameState,
    IntegratorOptions, MonodromyResult,
};
use crate::holo::{eval_continued, order_at, rational_degree, Degree, HoloError, HoloExpr, PathSpec, SLOPE_SPREAD};
use crate::lorentz::Mat2C;
use crate::weierstrass::{hopf_differential, WeierstrassData, GENUS};
use crate::SpherePoint;

/// Tolerance for order identities between exact orders.
pub const ORDER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EndError {
    #[error("Q vanishes identically near {0}: umbilic end")]
    UmbilicEnd(SpherePoint),
    #[error("the Hopf differential vanishes identically: umbilic surface")]
    UmbilicSurface,
    #[error("end {0} is irregular")]
    IrregularEnd(SpherePoint),
    #[error("order inequality violated: ordSigma - ordQ = {diff} < 2")]
    InequalityViolated { diff: f64 },
    #[error("the hyperbolic Gauss map is constant")]
    ConstantGauss,
    #[error("preimage counts disagree: {0:?}")]
    DegreeUndetermined(Vec<usize>),
    #[error("{0} is not a declared puncture")]
    UnknownPuncture(SpherePoint),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Holo(#[from] HoloError),
}

/// How the hyperbolic Gauss map `G` is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussKind {
    /// `Q ≡ 0`.
    Constant,
    /// `S(g) = 2Q`, so `S(G) = 0`.
    Mobius,
    /// Only point evaluations through the frame.
    Numeric,
}

#[derive(Debug, Clone)]
pub struct GaussMap {
    pub kind: GaussKind,
    /// Closed form for `Constant` and `Mobius`.
    pub expr: Option<HoloExpr>,
}

impl GaussMap {
    /// Point evaluations only, for cross-checks of the closed forms.
    pub fn numeric() -> Self {
        GaussMap { kind: GaussKind::Numeric, expr: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndAnalysis {
    pub puncture: SpherePoint,
    /// Order of `Q` as a quadratic differential.
    #[serde(with = "crate::undefined")]
    pub ord_q: Option<f64>,
    pub regular: bool,
    pub monodromy: MonodromyResult,
    #[serde(with = "crate::undefined")]
    pub embedded: Option<bool>,
    #[serde(with = "crate::undefined")]
    pub ord_lift: Option<f64>,
    #[serde(with = "crate::undefined")]
    pub ord_sigma: Option<f64>,
    /// `ordLift ≤ −2`.
    #[serde(with = "crate::undefined")]
    pub lift_complete: Option<bool>,
    pub umbilic: bool,
    /// `false` when some order came from regression.
    pub orders_exact: bool,
    pub warnings: Vec<String>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn umbilic(d: &WeierstrassData) -> Result<bool, EndError> {
    let q = hopf_differential(d);
    if q.is_zero() {
        return Ok(true);
    }
    let mut st = d.branch_at(d.basepoint)?;
    st.register(&q)?;
    let r = 0.5 * clear_radius(d, d.basepoint);
    for k in 0..8 {
        let z = d.basepoint + Complex64::from_polar(r * (0.3 + 0.08 * f64::from(k)), 0.7 * f64::from(k));
        let (v, _) = eval_continued(&q, &PathSpec::new().line(d.basepoint, z), &st)?;
        if v.norm() > 1e-14 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distance from `z` to the nearest finite puncture, capped at 1.
fn clear_radius(d: &WeierstrassData, z: Complex64) -> f64 {
    d.finite_punctures().iter().map(|p| (p - z).norm()).fold(1.0, f64::min)
}

/// Frame continued from the basepoint along a straight line.
fn frame_at(d: &WeierstrassData, z: Complex64, opts: &IntegratorOptions) -> Result<FrameState, EndError> {
    let start = FrameState::at_basepoint(d)?;
    Ok(integrate_frame(d, &PathSpec::new().line(d.basepoint, z), &start, opts)?.0)
}

fn g_value(d: &WeierstrassData, s: &FrameState) -> Result<Complex64, EndError> {
    match hyperbolic_gauss_at(s, d)? {
        SpherePoint::Finite(w) => Ok(w),
        SpherePoint::Infinity => Err(EndError::Frame(FrameError::SingularityOnPath(s.z))),
    }
}

/// The Möbius map sending `z1, z2, z3` to `0, 1, ∞`.
fn to_standard(z: [Complex64; 3]) -> Mat2C {
    Mat2C::new(z[1] - z[2], -z[0] * (z[1] - z[2]), z[1] - z[0], -z[2] * (z[1] - z[0]))
}

fn mobius_expr(m: &Mat2C) -> HoloExpr {
    let z = HoloExpr::var();
    let k = HoloExpr::constant;
    let num = k(m.a11).mul(&z).add(&k(m.a12));
    let scale = m.max_norm();
    if m.a21.norm() <= 1e-14 * scale {
        return num.div(&k(m.a22));
    }
    num.div(&k(m.a21).mul(&z).add(&k(m.a22)))
}

fn apply(m: &Mat2C, z: Complex64) -> Complex64 {
    (m.a11 * z + m.a12) / (m.a21 * z + m.a22)
}

/// Decides how `G` is known: constant when `Q ≡ 0`, Möbius when
/// `S(g) − 2q` vanishes at 16 sample points, numeric otherwise.
pub fn acquire_gauss(d: &WeierstrassData, opts: &IntegratorOptions) -> Result<GaussMap, EndError> {
    let z0 = d.basepoint;
    if umbilic(d)? {
        let g0 = d.branch_at(z0)?.value(&d.g)?;
        return Ok(GaussMap { kind: GaussKind::Constant, expr: Some(HoloExpr::constant(g0)) });
    }
    let residual = d.g.schwarzian()?.sub(&HoloExpr::real(2.0).mul(&hopf_differential(d)));
    let mut st = d.branch_at(z0)?;
    st.register(&residual)?;
    let two_q = HoloExpr::real(2.0).mul(&hopf_differential(d));
    st.register(&two_q)?;
    let r = 0.5 * clear_radius(d, z0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mobius = true;
    for _ in 0..16 {
        let z = z0 + Complex64::from_polar(r * rng.gen_range(0.1..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let path = PathSpec::new().line(z0, z);
        let (res, _) = eval_continued(&residual, &path, &st)?;
        let (q2, _) = eval_continued(&two_q, &path, &st)?;
        if res.norm() > 1e-8 * q2.norm().max(1e-300) {
            mobius = false;
            break;
        }
    }
    if !mobius {
        return Ok(GaussMap::numeric());
    }
    let pts: Vec<Complex64> = [0.0, 0.25, 0.5, 0.75].iter().map(|a| z0 + Complex64::from_polar(0.5 * r, a * std::f64::consts::TAU)).collect();
    let vals = pts.iter().map(|z| g_value(d, &frame_at(d, *z, opts)?)).collect::<Result<Vec<_>, _>>()?;
    let mz = to_standard([pts[0], pts[1], pts[2]]);
    let mw = to_standard([vals[0], vals[1], vals[2]]);
    let m = mw.inverse() * mz;
    let check = apply(&m, pts[3]);
    if (check - vals[3]).norm() > 1e-7 * vals[3].norm().max(1.0) {
        return Ok(GaussMap::numeric());
    }
    Ok(GaussMap { kind: GaussKind::Mobius, expr: Some(mobius_expr(&(m.scale(c(1.0 / m.max_norm(), 0.0))))) })
}

/// `ordSigma − ordQ = 2` (embedded) versus `> 2`; `< 2` contradicts the
/// order inequality and is an error.
pub fn embedded_by_orders(ord_sigma: f64, ord_q: f64) -> Result<bool, EndError> {
    embedded_within(ord_sigma, ord_q, ORDER_TOL)
}

fn embedded_within(ord_sigma: f64, ord_q: f64, tol: f64) -> Result<bool, EndError> {
    let diff = ord_sigma - ord_q;
    if diff < 2.0 - tol {
        return Err(EndError::InequalityViolated { diff });
    }
    Ok((diff - 2.0).abs() <= tol)
}

/// Exact orders within 1e-9 of an integer are rounding noise of the series
/// coefficients.
fn snap(x: f64) -> f64 {
    if (x - x.round()).abs() <= 1e-9 {
        x.round()
    } else {
        x
    }
}

/// Order of `Q = q dz²` at `p`.
fn quadratic_order(q: &HoloExpr, p: &SpherePoint) -> Result<(f64, bool), EndError> {
    let o = order_at(q, p)?;
    let w = if p.is_infinity() { -4.0 } else { 0.0 };
    let order = if o.exact { snap(o.order) } else { o.order };
    Ok((order + w, o.exact))
}

/// Order of `dσ̂^♯² = 4 dG dḠ/(1+|G|²)²`, inverting `G` when `G(p) = ∞`.
fn sigma_order(g: &HoloExpr, p: &SpherePoint) -> Result<f64, EndError> {
    let og = snap(order_at(g, p)?.order);
    let dg = g.differentiate();
    if dg.is_zero() {
        return Err(EndError::ConstantGauss);
    }
    let w = if p.is_infinity() { -2.0 } else { 0.0 };
    let odg = snap(order_at(&dg, p)?.order);
    // in t: G(p) = ∞ iff ord_t G < 0
    let pole = og < -ORDER_TOL;
    // d(1/G) = −G′/G²
    Ok(if pole { odg - 2.0 * og + w } else { odg + w })
}

/// Order of the lift metric `(1+|G|²)² |Q/dG|²`; equals `ordQ − ordSigma`.
pub fn lift_metric_order(g: &HoloExpr, q: &HoloExpr, p: &SpherePoint) -> Result<f64, EndError> {
    if q.is_zero() {
        return Err(EndError::UmbilicEnd(*p));
    }
    let (oq, _) = quadratic_order(q, p)?;
    Ok(oq - sigma_order(g, p)?)
}

/// Regression of the spherical length density of `G` along four rays.
fn numeric_sigma_order(d: &WeierstrassData, p: &SpherePoint, opts: &IntegratorOptions) -> Result<f64, EndError> {
    let radii: Vec<f64> = (0..4).map(|k| 0.05 / f64::from(1 << k)).collect();
    let mut slopes = Vec::new();
    for ray in 0..4 {
        let dir = Complex64::from_polar(1.0, 0.1 + f64::from(ray) * FRAC_PI_2);
        let at = |t: f64| match p {
            SpherePoint::Finite(p) => p + dir * t,
            SpherePoint::Infinity => (dir * t).inv(),
        };
        let mut s = frame_at(d, at(radii[0]), opts)?;
        let mut logs = Vec::new();
        for (k, r) in radii.iter().enumerate() {
            if k > 0 {
                s = integrate_frame(d, &PathSpec::new().line(s.z, at(*r)), &s, opts)?.0;
            }
            let gv = g_value(d, &s)?;
            let dg = hyperbolic_gauss_derivative(&s, d)?;
            // |dz| = |z|²|dt| at ∞
            let jac = if p.is_infinity() { s.z.norm_sqr() } else { 1.0 };
            logs.push((2.0 * dg.norm() / (1.0 + gv.norm_sqr()) * jac).ln());
        }
        for k in 0..3 {
            slopes.push((logs[k] - logs[k + 1]) / std::f64::consts::LN_2);
        }
    }
    let (min, max) = slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(*s), b.max(*s)));
    if !(max - min <= SLOPE_SPREAD) {
        return Err(EndError::Holo(HoloError::InconsistentOrder { point: *p, min, max }));
    }
    Ok(slopes.iter().sum::<f64>() / slopes.len() as f64)
}

/// Loop radius keeping the circle away from the other punctures.
pub fn loop_radius(d: &WeierstrassData, p: &SpherePoint) -> f64 {
    let fin = d.finite_punctures();
    match p {
        SpherePoint::Finite(p) => {
            let others = fin.iter().filter(|q| *q != p).map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min);
            (0.4 * others).min(0.5)
        }
        SpherePoint::Infinity => {
            let reach = fin.iter().map(|q| q.norm()).fold(1.0, f64::max);
            1.0 / (2.0 * reach)
        }
    }
}

fn end_monodromy(d: &WeierstrassData, p: &SpherePoint, opts: &IntegratorOptions) -> Result<MonodromyResult, EndError> {
    Ok(monodromy(d, p, loop_radius(d, p), opts)?)
}

fn umbilic_end(d: &WeierstrassData, p: &SpherePoint, opts: &IntegratorOptions) -> Result<EndAnalysis, EndError> {
    Ok(EndAnalysis {
        puncture: *p,
        ord_q: None,
        regular: true,
        monodromy: end_monodromy(d, p, opts)?,
        embedded: None,
        ord_lift: None,
        ord_sigma: None,
        lift_complete: None,
        umbilic: true,
        orders_exact: true,
        warnings: Vec::new(),
    })
}

/// Orders, regularity, monodromy class and embeddedness of one end.
pub fn analyze_end(
    d: &WeierstrassData,
    puncture: &SpherePoint,
    gauss: &GaussMap,
    opts: &IntegratorOptions,
) -> Result<EndAnalysis, EndError> {
    if !d.punctures.contains(puncture) {
        return Err(EndError::UnknownPuncture(*puncture));
    }
    if gauss.kind == GaussKind::Constant || umbilic(d)? {
        return Err(EndError::UmbilicEnd(*puncture));
    }
    let q = hopf_differential(d);
    let mut warnings = Vec::new();
    let (ord_q, q_exact) = quadratic_order(&q, puncture)?;
    if !q_exact {
        warnings.push(format!("ordQ at {puncture} estimated by regression"));
    }
    if (ord_q - ord_q.round()).abs() > ORDER_TOL {
        warnings.push(format!("ordQ = {ord_q} at {puncture} is not an integer"));
    }
    let regular = ord_q >= -2.0 - ORDER_TOL;
    let mono = end_monodromy(d, puncture, opts)?;
    let mut a = EndAnalysis {
        puncture: *puncture,
        ord_q: Some(ord_q),
        regular,
        monodromy: mono,
        embedded: None,
        ord_lift: None,
        ord_sigma: None,
        lift_complete: None,
        umbilic: false,
        orders_exact: q_exact,
        warnings,
    };
    if !regular {
        return Ok(a);
    }
    let sigma = match &gauss.expr {
        Some(g) => sigma_order(g, puncture).map(|s| (s, true)),
        None => numeric_sigma_order(d, puncture, opts).map(|s| (s, false)),
    };
    let (ord_sigma, sigma_exact) = match sigma {
        Ok(s) => s,
        Err(e) => {
            a.warnings.push(format!("ordSigma undefined: {e}"));
            return Ok(a);
        }
    };
    a.orders_exact &= sigma_exact;
    let ord_lift = ord_q - ord_sigma;
    debug_assert!((ord_lift + ord_sigma - ord_q).abs() <= 1e-12);
    a.ord_sigma = Some(ord_sigma);
    a.ord_lift = Some(ord_lift);
    a.lift_complete = Some(ord_lift <= -2.0 + ORDER_TOL);
    if mono.classification.is_elliptic_type() {
        let tol = if a.orders_exact { ORDER_TOL } else { SLOPE_SPREAD };
        a.embedded = Some(embedded_within(ord_sigma, ord_q, tol)?);
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeEstimate {
    pub degree: Degree,
    /// Numeric preimage count rather than a closed form.
    pub heuristic: bool,
    pub counts: Vec<usize>,
}

fn any_irregular(d: &WeierstrassData) -> Result<bool, EndError> {
    let q = hopf_differential(d);
    for p in &d.punctures {
        if quadratic_order(&q, p)?.0 < -2.0 - ORDER_TOL {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Newton iteration for `G(z) = target` continued from a seed.
fn newton_root(d: &WeierstrassData, seed: Complex64, target: Complex64, opts: &IntegratorOptions) -> Option<Complex64> {
    let fin = d.finite_punctures();
    let mut s = frame_at(d, seed, opts).ok()?;
    for _ in 0..60 {
        let gv = g_value(d, &s).ok()?;
        let miss = gv - target;
        if miss.norm() <= 1e-10 * target.norm().max(1.0) {
            return Some(s.z);
        }
        let dg = hyperbolic_gauss_derivative(&s, d).ok()?;
        let mut step = -miss / dg;
        let cap = 0.5 * s.z.norm().max(1.0);
        if !(step.norm() <= cap) {
            if !step.norm().is_finite() {
                return None;
            }
            step *= cap / step.norm();
        }
        let next = s.z + step;
        if fin.iter().any(|p| (p - next).norm() < 1e-6) || next.norm() > 1e8 {
            return None;
        }
        s = integrate_frame(d, &PathSpec::new().line(s.z, next), &s, opts).ok()?.0;
    }
    None
}

/// Number of distinct preimages of three random targets from 40 seeds each.
fn numeric_degree(d: &WeierstrassData, opts: &IntegratorOptions) -> Result<DegreeEstimate, EndError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde9);
    let reach = d.finite_punctures().iter().map(|p| p.norm()).fold(d.basepoint.norm().max(1.0), f64::max);
    let mut counts = Vec::new();
    for _ in 0..3 {
        let target = Complex64::from_polar(rng.gen_range(0.2f64.ln()..5f64.ln()).exp(), rng.gen_range(0.0..std::f64::consts::TAU));
        let seeds: Vec<Complex64> = (0..40)
            .map(|_| Complex64::from_polar(3.0 * reach * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let found: Vec<Complex64> = seeds.par_iter().filter_map(|z| newton_root(d, *z, target, opts)).collect();
        let mut roots: Vec<Complex64> = Vec::new();
        for z in found {
            if roots.iter().all(|r| (r - z).norm() > 1e-6 * z.norm().max(1.0)) {
                roots.push(z);
            }
        }
        counts.push(roots.len());
    }
    if counts.iter().any(|k| *k != counts[0]) || counts[0] == 0 {
        return Err(EndError::DegreeUndetermined(counts));
    }
    Ok(DegreeEstimate { degree: Degree::Finite(counts[0] as u32), heuristic: true, counts })
}

/// Mapping degree of `G`; `∞` as soon as one end is irregular.
pub fn gauss_degree(d: &WeierstrassData, gauss: &GaussMap, opts: &IntegratorOptions) -> Result<DegreeEstimate, EndError> {
    if gauss.kind != GaussKind::Constant && any_irregular(d)? {
        return Ok(DegreeEstimate { degree: Degree::Infinite, heuristic: false, counts: Vec::new() });
    }
    match (&gauss.kind, &gauss.expr) {
        (GaussKind::Constant, _) => Ok(DegreeEstimate { degree: Degree::Finite(0), heuristic: false, counts: Vec::new() }),
        (_, Some(g)) => Ok(DegreeEstimate { degree: rational_degree(g), heuristic: false, counts: Vec::new() }),
        (_, None) => numeric_degree(d, opts),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OssermanReport {
    pub genus: u32,
    pub n: usize,
    pub chi_m: i64,
    pub deg_g: Degree,
    pub degree_heuristic: bool,
    pub gauss: GaussKind,
    /// `2 deg G`.
    pub lhs: Degree,
    /// `−χ(M) + n`.
    pub rhs: i64,
    #[serde(with = "crate::undefined")]
    pub holds: Option<bool>,
    #[serde(with = "crate::undefined")]
    pub equality: Option<bool>,
    pub umbilic: bool,
    /// Equality agrees with "all ends regular and embedded" and the
    /// inequality holds.
    pub consistent: bool,
    pub inconsistencies: Vec<String>,
    pub per_end: Vec<EndAnalysis>,
}

impl OssermanReport {
    /// One-line verdict, e.g. `2·1 ≥ 2 : EQUALITY (all ends regular, embedded)`.
    pub fn verdict(&self) -> String {
        if self.umbilic {
            return "umbilic surface (Q ≡ 0): Osserman arithmetic skipped".into();
        }
        let lhs = match self.deg_g {
            Degree::Finite(k) => format!("2·{k}"),
            Degree::Infinite => "2·∞".into(),
        };
        let tail = match (self.holds, self.equality) {
            (Some(true), Some(true)) => "EQUALITY (all ends regular, embedded)".to_string(),
            (Some(true), _) => {
                let irregular = self.per_end.iter().filter(|e| !e.regular).count();
                let unembedded = self.per_end.iter().filter(|e| e.regular && e.embedded != Some(true)).count();
                format!("STRICT ({irregular} irregular, {unembedded} regular but not embedded)")
            }
            _ => "VIOLATED".to_string(),
        };
        let note = if self.consistent { "" } else { " [INCONSISTENT]" };
        format!("{lhs} ≥ {} : {tail}{note}", self.rhs)
    }
}

/// Per-end analyses, `deg G`, and the inequality with its equality case
/// cross-checked against the ends.
pub fn osserman_check(d: &WeierstrassData, opts: &IntegratorOptions) -> Result<OssermanReport, EndError> {
    let n = d.punctures.len();
    let chi_m = 2 - 2 * i64::from(GENUS) - n as i64;
    let rhs = -chi_m + n as i64;
    let gauss = acquire_gauss(d, opts)?;
    if gauss.kind == GaussKind::Constant {
        let per_end = d.punctures.par_iter().map(|p| umbilic_end(d, p, opts)).collect::<Result<Vec<_>, _>>()?;
        return Ok(OssermanReport {
            genus: GENUS,
            n,
            chi_m,
            deg_g: Degree::Finite(0),
            degree_heuristic: false,
            gauss: gauss.kind,
            lhs: Degree::Finite(0),
            rhs,
            holds: None,
            equality: None,
            umbilic: true,
            consistent: true,
            inconsistencies: Vec::new(),
            per_end,
        });
    }
    let per_end = d.punctures.par_iter().map(|p| analyze_end(d, p, &gauss, opts)).collect::<Result<Vec<_>, _>>()?;
    let deg = gauss_degree(d, &gauss, opts)?;
    let lhs = match deg.degree {
        Degree::Finite(k) => Degree::Finite(2 * k),
        Degree::Infinite => Degree::Infinite,
    };
    let (holds, equality) = match lhs {
        Degree::Finite(l) => (i64::from(l) >= rhs, i64::from(l) == rhs),
        Degree::Infinite => (true, false),
    };
    let all_good = per_end.iter().all(|e| e.regular && e.embedded == Some(true));
    let mut inconsistencies = Vec::new();
    if !holds {
        inconsistencies.push(format!("2 deg G = {lhs} < {rhs}"));
    }
    if equality && !all_good {
        inconsistencies.push("equality holds but some end is irregular or not embedded".into());
    }
    if all_good && !equality {
        inconsistencies.push("all ends regular and embedded but equality fails".into());
    }
    Ok(OssermanReport {
        genus: GENUS,
        n,
        chi_m,
        deg_g: deg.degree,
        degree_heuristic: deg.heuristic,
        gauss: gauss.kind,
        lhs,
        rhs,
        holds: Some(holds),
        equality: Some(equality),
        umbilic: false,
        consistent: inconsistencies.is_empty(),
        inconsistencies,
        per_end,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::holo::parse_expr;
    use crate::lorentz::Su11Class;
    use crate::weierstrass::{gauge_transform, lambda_deform, make_example, Example};

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    fn origin() -> SpherePoint {
        SpherePoint::Finite(c(0.0, 0.0))
    }

    #[test]
    fn embedded_by_orders_examples() {
        assert_eq!(embedded_by_orders(0.0, -2.0), Ok(true));
        assert_eq!(embedded_by_orders(1.0, -2.0), Ok(false));
        assert!(matches!(embedded_by_orders(0.0, -1.0), Err(EndError::InequalityViolated { .. })));
    }

    #[test]
    fn catenoid_end_at_zero() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let g = acquire_gauss(&d, &opts()).unwrap();
        assert_eq!(g.kind, GaussKind::Mobius);
        assert_eq!(rational_degree(g.expr.as_ref().unwrap()), Degree::Finite(1));
        for p in [origin(), SpherePoint::Infinity] {
            let a = analyze_end(&d, &p, &g, &opts()).unwrap();
            assert_eq!(a.ord_q, Some(-2.0));
            assert!(a.regular && !a.umbilic && a.orders_exact);
            assert!(matches!(a.monodromy.classification, Su11Class::Elliptic { .. }));
            assert!(a.ord_sigma.unwrap().abs() < 1e-12);
            assert!((a.ord_lift.unwrap() + 2.0).abs() < 1e-12);
            assert_eq!(a.embedded, Some(true));
            assert_eq!(a.lift_complete, Some(true));
        }
    }

    #[test]
    fn enneper_end_is_irregular() {
        let d = make_example(Example::Enneper, &[]).unwrap();
        let g = acquire_gauss(&d, &opts()).unwrap();
        assert_eq!(g.kind, GaussKind::Numeric);
        let a = analyze_end(&d, &SpherePoint::Infinity, &g, &opts()).unwrap();
        assert_eq!(a.ord_q, Some(-4.0));
        assert!(!a.regular);
        assert_eq!(a.embedded, None);
        assert_eq!(a.ord_sigma, None);
        assert_eq!(gauss_degree(&d, &g, &opts()).unwrap().degree, Degree::Infinite);
    }

    #[test]
    fn horosphere_is_umbilic() {
        let d = make_example(Example::Horosphere, &[]).unwrap();
        let g = acquire_gauss(&d, &opts()).unwrap();
        assert_eq!(g.kind, GaussKind::Constant);
        assert!(matches!(analyze_end(&d, &SpherePoint::Infinity, &g, &opts()), Err(EndError::UmbilicEnd(_))));
        let d0 = make_example(Example::Horosphere, &[0.0, 1.0]).unwrap();
        let g0 = acquire_gauss(&d0, &opts()).unwrap();
        assert_eq!(g0.expr.as_ref().unwrap().as_const(), Some(c(0.0, 0.0)));
        assert_eq!(gauss_degree(&d0, &g0, &opts()).unwrap().degree, Degree::Finite(0));
    }

    #[test]
    fn undeclared_puncture_is_rejected() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let g = acquire_gauss(&d, &opts()).unwrap();
        let p = SpherePoint::Finite(c(1.0, 1.0));
        assert_eq!(analyze_end(&d, &p, &g, &opts()).unwrap_err(), EndError::UnknownPuncture(p));
    }

    #[test]
    fn lift_metric_examples() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let g = acquire_gauss(&d, &opts()).unwrap();
        let q = hopf_differential(&d);
        let o = lift_metric_order(g.expr.as_ref().unwrap(), &q, &origin()).unwrap();
        assert!((o + 2.0).abs() < 1e-12 && o <= -2.0 + ORDER_TOL);
        // synthetic regular data: incomplete lift
        let o = lift_metric_order(&parse_expr("(2*z + 1)/(z + 3)").unwrap(), &parse_expr("1/z").unwrap(), &origin()).unwrap();
        assert!((o + 1.0).abs() < 1e-12 && o > -2.0);
        assert!(matches!(
            lift_metric_order(&parse_expr("z").unwrap(), &HoloExpr::real(0.0), &origin()),
            Err(EndError::UmbilicEnd(_))
        ));
        assert_eq!(lift_metric_order(&HoloExpr::real(2.0), &parse_expr("1/z^2").unwrap(), &origin()), Err(EndError::ConstantGauss));
    }

    #[test]
    fn sigma_order_inverts_at_poles() {
        // G = 1/z at 0 is an unbranched pole, G = z² at 0 is branched
        assert!(sigma_order(&parse_expr("1/z").unwrap(), &origin()).unwrap().abs() < 1e-12);
        assert!((sigma_order(&parse_expr("z^2").unwrap(), &origin()).unwrap() - 1.0).abs() < 1e-12);
        assert!(sigma_order(&parse_expr("(z + 1)/(z - 2)").unwrap(), &SpherePoint::Infinity).unwrap().abs() < 1e-12);
        assert!((sigma_order(&parse_expr("z^3").unwrap(), &SpherePoint::Infinity).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn osserman_examples() {
        for mu in [0.8, 1.2] {
            let d = make_example(Example::Catenoid, &[mu]).unwrap();
            let r = osserman_check(&d, &opts()).unwrap();
            assert_eq!((r.n, r.chi_m, r.deg_g, r.lhs, r.rhs), (2, 0, Degree::Finite(1), Degree::Finite(2), 2));
            assert_eq!((r.holds, r.equality, r.consistent), (Some(true), Some(true), true));
            assert!(r.per_end.iter().all(|e| e.regular && e.embedded == Some(true)));
            assert_eq!(r.verdict(), "2·1 ≥ 2 : EQUALITY (all ends regular, embedded)");
        }
        let d = make_example(Example::Enneper, &[]).unwrap();
        let r = osserman_check(&d, &opts()).unwrap();
        assert_eq!((r.n, r.chi_m, r.deg_g), (1, 1, Degree::Infinite));
        assert_eq!((r.holds, r.equality, r.consistent), (Some(true), Some(false), true));
        let d = make_example(Example::Horosphere, &[]).unwrap();
        let r = osserman_check(&d, &opts()).unwrap();
        assert!(r.umbilic && r.holds.is_none() && r.deg_g == Degree::Finite(0));
        assert!(r.per_end.iter().all(|e| e.umbilic && e.ord_q.is_none()));
    }

    #[test]
    fn helicoid_report() {
        let d = make_example(Example::Helicoid, &[]).unwrap();
        let r = osserman_check(&d, &opts()).unwrap();
        assert_eq!(r.deg_g, Degree::Infinite);
        assert_eq!((r.holds, r.equality, r.consistent), (Some(true), Some(false), true));
    }

    #[test]
    fn catenoid_ends_are_elliptic_with_the_expected_angle() {
        for mu in [0.3, 0.8, 1.2, 2.5] {
            let d = make_example(Example::Catenoid, &[mu]).unwrap();
            let m = end_monodromy(&d, &origin(), &opts()).unwrap();
            let Su11Class::Elliptic { theta } = m.classification else { panic!("{mu}: {:?}", m.classification) };
            let want = (mu * PI).rem_euclid(PI);
            let got = [theta, -theta].map(|t| t.rem_euclid(PI));
            let dist = |a: f64| (a - want).abs().min(PI - (a - want).abs());
            assert!(dist(got[0]) < 1e-6 || dist(got[1]) < 1e-6, "μ = {mu}: θ = {theta}");
        }
    }

    type Key = (Degree, Option<bool>, Option<bool>, Vec<(bool, Option<bool>, bool)>, Vec<[f64; 2]>);

    /// Booleans and degrees exactly, orders separately for a 1e-9 comparison.
    fn report_key(r: &OssermanReport) -> Key {
        let flags = r.per_end.iter().map(|e| (e.regular, e.embedded, e.umbilic)).collect();
        let orders = r.per_end.iter().map(|e| [e.ord_q.unwrap(), e.ord_sigma.unwrap()]).collect();
        (r.deg_g, r.holds, r.equality, flags, orders)
    }

    fn same(a: &Key, b: &Key) -> bool {
        (&a.0, &a.1, &a.2, &a.3) == (&b.0, &b.1, &b.2, &b.3)
            && a.4.iter().zip(&b.4).all(|(x, y)| (x[0] - y[0]).abs() <= 1e-9 && (x[1] - y[1]).abs() <= 1e-9)
    }

    #[test]
    fn report_is_invariant_under_lambda_and_gauge() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let base = report_key(&osserman_check(&d, &opts()).unwrap());
        for lambda in [0.5, 2.0, 3.0] {
            let dl = lambda_deform(&d, lambda).unwrap();
            let r = osserman_check(&dl, &opts()).unwrap();
            assert!(same(&report_key(&r), &base), "λ = {lambda}: {:?}", report_key(&r));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let q = Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..2.0 * PI));
            let p = Complex64::from_polar((1.0 + q.norm_sqr()).sqrt(), rng.gen_range(0.0..2.0 * PI));
            let Ok(dg) = gauge_transform(&d, p, q) else { continue };
            let r = osserman_check(&dg, &opts()).unwrap();
            assert!(same(&report_key(&r), &base), "{:?} {:?}", report_key(&r), r.per_end.iter().map(|e| e.orders_exact).collect::<Vec<_>>());
        }
    }

    #[test]
    fn numeric_routes_agree_with_closed_forms() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let deg = gauss_degree(&d, &GaussMap::numeric(), &opts()).unwrap();
        assert_eq!(deg.degree, Degree::Finite(1));
        assert!(deg.heuristic);
        let a = analyze_end(&d, &origin(), &GaussMap::numeric(), &opts()).unwrap();
        assert!(a.ord_sigma.unwrap().abs() < SLOPE_SPREAD);
        assert_eq!(a.embedded, Some(true));
        assert!(!a.orders_exact);
    }

    #[test]
    fn report_serializes_undefined_markers() {
        let d = make_example(Example::Enneper, &[]).unwrap();
        let r = osserman_check(&d, &opts()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"embedded\":\"undefined\""));
        assert!(text.contains("\"deg_g\":\"inf\""));
        let back: OssermanReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
