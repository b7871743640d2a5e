//! Weierstrass data `(g, ω = w dz)` on a genus-zero domain and the quantities
//! read off from it pointwise: `ds²`, `dŝ²`, curvatures and the Hopf
//! differential `Q = ω dg`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::holo::{self, leading_behavior, BranchState, HoloError, HoloExpr};
use crate::SpherePoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeierstrassError {
    #[error("bad parameters for `{example}`: {reason}")]
    BadParams { example: String, reason: String },
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("ω has a pole at z = {0}")]
    PoleOfOmega(Complex64),
    #[error("gauge parameters violate |p|² - |q|² = 1 (deviation {0:.3e})")]
    NotSU11Params(f64),
    #[error("λ must be nonzero")]
    ZeroLambda,
    #[error("|g| has no determined limit at {0}")]
    UndeterminedLimit(SpherePoint),
    #[error(transparent)]
    Holo(#[from] HoloError),
}

/// Built-in example families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Horosphere,
    Enneper,
    Helicoid,
    Catenoid,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::Horosphere, Example::Enneper, Example::Helicoid, Example::Catenoid];

    pub fn name(self) -> &'static str {
        match self {
            Example::Horosphere => "horosphere",
            Example::Enneper => "enneper",
            Example::Helicoid => "helicoid",
            Example::Catenoid => "catenoid",
        }
    }

    /// Parameter names in the order `make_example` expects them.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Example::Horosphere => &["c1", "c2"],
            Example::Enneper | Example::Helicoid => &["c"],
            Example::Catenoid => &["mu"],
        }
    }

    pub fn default_params(self) -> &'static [f64] {
        match self {
            Example::Horosphere => &[1.2, 1.0],
            Example::Enneper | Example::Helicoid => &[1.0],
            Example::Catenoid => &[0.8],
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Example::Horosphere => "(g, ω) = (c1, c2 dz) on ℂ; totally umbilic, no singularities",
            Example::Enneper => "(g, ω) = (z, c dz) on ℂ; singular on |z| = 1, irregular end at ∞",
            Example::Helicoid => "(g, ω) = (e^z, i c e^(-z) dz) on ℂ; singular on Re z = 0",
            Example::Catenoid => "(g, ω) = (z^μ, (1-μ²)/(4μ) z^(-μ-1) dz) on ℂ∖{0}; two embedded elliptic ends",
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = WeierstrassError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Example::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| WeierstrassError::UnknownExample(s.to_string()))
    }
}

/// Weierstrass data on the sphere minus `punctures`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassData {
    pub g: HoloExpr,
    /// Coefficient `w(z)` of `ω = w dz`.
    pub omega: HoloExpr,
    pub punctures: Vec<SpherePoint>,
    pub basepoint: Complex64,
    /// Non-fatal validation findings.
    pub warnings: Vec<String>,
}

/// Genus of every supported domain.
pub const GENUS: u32 = 0;

/// Pointwise metric data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub z: Complex64,
    /// Conformal factor of `ds²` against `|dz|²`.
    pub ds2: f64,
    pub dshat2: f64,
    /// Gaussian curvature of `ds²`; `None` on the singular set.
    pub k: Option<f64>,
    pub khat: f64,
    /// Coefficient of `Q = q dz²`.
    pub q: Complex64,
    pub singular: bool,
}

/// Default tolerance on `||g| - 1|` for the singular flag.
pub const SINGULAR_TOL: f64 = 1e-6;

fn finite(c: Complex64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

impl WeierstrassData {
    /// Validates and builds data. Orders at the punctures are checked for the
    /// local normal form when they are exact; violations become warnings.
    pub fn new(
        g: HoloExpr,
        omega: HoloExpr,
        punctures: Vec<SpherePoint>,
        basepoint: Complex64,
    ) -> Result<Self, WeierstrassError> {
        if omega.is_zero() {
            return Err(WeierstrassError::InvalidData("ω is identically zero".into()));
        }
        for p in &punctures {
            if let SpherePoint::Finite(p) = p {
                if (p - basepoint).norm() < 1e-9 {
                    return Err(WeierstrassError::InvalidData(format!("basepoint {basepoint} is a puncture")));
                }
            }
        }
        let mut d = WeierstrassData { g, omega, punctures, basepoint, warnings: Vec::new() };
        let st = d.branch_at(basepoint)?;
        let gv = st.value(&d.g)?;
        let wv = st.value(&d.omega)?;
        if !finite(gv) {
            return Err(WeierstrassError::InvalidData(format!("g has a pole at the basepoint {basepoint}")));
        }
        if !finite(wv) {
            return Err(WeierstrassError::PoleOfOmega(basepoint));
        }
        if wv.norm() == 0.0 {
            return Err(WeierstrassError::InvalidData(format!("dŝ² degenerates at the basepoint {basepoint}")));
        }
        if (gv.norm() - 1.0).abs() <= SINGULAR_TOL {
            return Err(WeierstrassError::InvalidData(format!("|g| = 1 at the basepoint {basepoint}")));
        }
        d.warnings = d.normal_form_warnings();
        Ok(d)
    }

    fn normal_form_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for p in &self.punctures {
            let (Ok(Some(lg)), Ok(Some(lw))) = (leading_behavior(&self.g, p), leading_behavior(&self.omega, p)) else {
                continue;
            };
            let mu = lg.order;
            let nu = lw.order + if p.is_infinity() { -2.0 } else { 0.0 };
            let s = mu + nu;
            if (s - s.round()).abs() > 1e-9 {
                out.push(format!("orders at {p}: ord g + ord ω = {s} is not an integer"));
            }
        }
        out
    }

    /// Every expression whose branch must be tracked along paths.
    pub fn tracked_exprs(&self) -> Vec<HoloExpr> {
        vec![self.g.clone(), self.omega.clone(), self.dg(), self.hopf()]
    }

    /// Branch state on the principal branch at `z`.
    pub fn branch_at(&self, z: Complex64) -> Result<BranchState, HoloError> {
        let exprs = self.tracked_exprs();
        let refs: Vec<&HoloExpr> = exprs.iter().collect();
        BranchState::new(z, &refs)
    }

    pub fn dg(&self) -> HoloExpr {
        self.g.differentiate()
    }

    /// Coefficient `q = w g'` of the Hopf differential.
    pub fn hopf(&self) -> HoloExpr {
        hopf_differential(self)
    }

    pub fn finite_punctures(&self) -> Vec<Complex64> {
        self.punctures.iter().filter_map(|p| p.finite()).collect()
    }

    pub fn has_infinity(&self) -> bool {
        self.punctures.iter().any(SpherePoint::is_infinity)
    }
}

fn bad(example: Example, reason: impl Into<String>) -> WeierstrassError {
    WeierstrassError::BadParams { example: example.name().into(), reason: reason.into() }
}

/// Built-in data. An empty `params` selects the family defaults.
pub fn make_example(example: Example, params: &[f64]) -> Result<WeierstrassData, WeierstrassError> {
    let params = if params.is_empty() { example.default_params() } else { params };
    let want = example.param_names().len();
    if params.len() != want {
        return Err(bad(example, format!("expected {want} parameter(s), got {}", params.len())));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(bad(example, "parameters must be finite"));
    }
    let z = HoloExpr::var;
    let c = HoloExpr::real;
    let inf = vec![SpherePoint::Infinity];
    match example {
        Example::Horosphere => {
            let (c1, c2) = (params[0], params[1]);
            if c2 == 0.0 {
                return Err(bad(example, "c2 must be nonzero"));
            }
            // the basepoint would be singular
            if (c1.abs() - 1.0).abs() <= SINGULAR_TOL {
                return Err(bad(example, "|c1| = 1 makes the whole surface singular"));
            }
            WeierstrassData::new(c(c1), c(c2), inf, Complex64::new(0.0, 0.0))
        }
        Example::Enneper => {
            let k = params[0];
            if k == 0.0 {
                return Err(bad(example, "c must be nonzero"));
            }
            WeierstrassData::new(z(), c(k), inf, Complex64::new(0.0, 0.0))
        }
        Example::Helicoid => {
            let k = params[0];
            if k == 0.0 {
                return Err(bad(example, "c must be nonzero"));
            }
            let omega = HoloExpr::constant(Complex64::new(0.0, k)).mul(&z().neg().exp());
            WeierstrassData::new(z().exp(), omega, inf, Complex64::new(-0.5, 0.0))
        }
        Example::Catenoid => {
            let mu = params[0];
            if !(mu > 0.0) || (mu - 1.0).abs() < 1e-12 {
                return Err(bad(example, "μ must be positive and different from 1"));
            }
            let k = (1.0 - mu * mu) / (4.0 * mu);
            let omega = c(k).mul(&z().powf(-(mu + 1.0)));
            let punctures = vec![SpherePoint::Finite(Complex64::new(0.0, 0.0)), SpherePoint::Infinity];
            WeierstrassData::new(z().powf(mu), omega, punctures, catenoid_basepoint())
        }
    }
}

/// Basepoint of the catenoid data, inside the unit disk where `|g| < 1`.
pub fn catenoid_basepoint() -> Complex64 {
    Complex64::new(0.5, 0.0)
}

pub fn hopf_differential(d: &WeierstrassData) -> HoloExpr {
    d.omega.mul(&d.g.differentiate())
}

/// Metric quantities at `z`, evaluated on the branch carried by `branch`.
pub fn metric_at(
    d: &WeierstrassData,
    z: Complex64,
    branch: &BranchState,
    tol: f64,
) -> Result<MetricSample, WeierstrassError> {
    let g = branch.eval(&d.g, z)?;
    let w = branch.eval(&d.omega, z)?;
    if !finite(w) {
        return Err(WeierstrassError::PoleOfOmega(z));
    }
    let dg = branch.eval(&d.dg(), z)?;
    let g2 = g.norm_sqr();
    let w2 = w.norm_sqr();
    let dg2 = dg.norm_sqr();
    let ds2 = (1.0 - g2).powi(2) * w2;
    let dshat2 = (1.0 + g2).powi(2) * w2;
    let singular = (g.norm() - 1.0).abs() <= tol;
    let k = (!singular).then(|| 4.0 * dg2 / ((1.0 - g2).powi(4) * w2));
    let khat = -4.0 * dg2 / ((1.0 + g2).powi(4) * w2);
    Ok(MetricSample { z, ds2, dshat2, k, khat, q: w * dg, singular })
}

/// SU(1,1) gauge `ĝ = (p g + q)/(q̄ g + p̄)`, `ŵ = (q̄ g + p̄)² w`.
pub fn gauge_transform(d: &WeierstrassData, p: Complex64, q: Complex64) -> Result<WeierstrassData, WeierstrassError> {
    let dev = (p.norm_sqr() - q.norm_sqr() - 1.0).abs();
    if dev > 1e-12 {
        return Err(WeierstrassError::NotSU11Params(dev));
    }
    let pc = HoloExpr::constant(p);
    let qc = HoloExpr::constant(q);
    let den = HoloExpr::constant(q.conj()).mul(&d.g).add(&HoloExpr::constant(p.conj()));
    let g = pc.mul(&d.g).add(&qc).div(&den);
    let omega = den.powi(2).mul(&d.omega);
    WeierstrassData::new(g, omega, d.punctures.clone(), d.basepoint)
}

/// `(λ g, λ⁻¹ w)`.
pub fn lambda_deform(d: &WeierstrassData, lambda: f64) -> Result<WeierstrassData, WeierstrassError> {
    if lambda == 0.0 {
        return Err(WeierstrassError::ZeroLambda);
    }
    let g = HoloExpr::real(lambda).mul(&d.g);
    let omega = HoloExpr::real(1.0 / lambda).mul(&d.omega);
    WeierstrassData::new(g, omega, d.punctures.clone(), d.basepoint)
}

/// `λ_j = 1/lim|g|` at a puncture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaBound {
    /// `|g| → ∞`.
    Zero,
    Finite(f64),
    /// `|g| → 0`.
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcludedLambda {
    pub puncture: SpherePoint,
    pub lambda: LambdaBound,
}

/// Per puncture, the `λ` at which `|λ g|` tends to 1 there.
pub fn excluded_lambdas(d: &WeierstrassData) -> Result<Vec<ExcludedLambda>, WeierstrassError> {
    d.punctures
        .iter()
        .map(|p| {
            let lead = match leading_behavior(&d.g, p) {
                Ok(Some(l)) => l,
                Ok(None) => return Err(WeierstrassError::UndeterminedLimit(*p)),
                Err(HoloError::ZeroExpression) => {
                    return Ok(ExcludedLambda { puncture: *p, lambda: LambdaBound::Infinity })
                }
                Err(e) => return Err(e.into()),
            };
            let lambda = if lead.order > 0.0 {
                LambdaBound::Infinity
            } else if lead.order < 0.0 {
                LambdaBound::Zero
            } else {
                LambdaBound::Finite(1.0 / lead.coeff.norm())
            };
            Ok(ExcludedLambda { puncture: *p, lambda })
        })
        .collect()
}

/// Whether `λ` avoids every excluded value (up to sign).
pub fn lambda_admissible(bounds: &[ExcludedLambda], lambda: f64) -> bool {
    lambda != 0.0
        && bounds.iter().all(|b| match b.lambda {
            LambdaBound::Finite(l) => (lambda.abs() - l).abs() > 1e-12 * l,
            _ => true,
        })
}

/// Parses `g` and `w` from text with named parameters.
pub fn data_from_text(
    g: &str,
    omega: &str,
    params: &std::collections::BTreeMap<String, f64>,
    punctures: Vec<SpherePoint>,
    basepoint: Complex64,
) -> Result<WeierstrassData, WeierstrassError> {
    let g = holo::parse_expr_with(g, params)?;
    let omega = holo::parse_expr_with(omega, params)?;
    WeierstrassData::new(g, omega, punctures, basepoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::order_at;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn metric(d: &WeierstrassData, z: Complex64) -> MetricSample {
        let b = d.branch_at(z).unwrap();
        metric_at(d, z, &b, SINGULAR_TOL).unwrap()
    }

    #[test]
    fn catalogue_matches_printed_data() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let p = c(1.3, 0.4);
        assert!((d.g.eval(p) - p.powf(0.8)).norm() < 1e-14);
        let want = p.powf(-1.8) * (0.36 / 3.2);
        assert!((d.omega.eval(p) - want).norm() < 1e-14);
        assert_eq!(d.punctures.len(), 2);
        assert!(d.warnings.is_empty(), "{:?}", d.warnings);

        let h = make_example(Example::Horosphere, &[1.2, 1.0]).unwrap();
        assert_eq!(h.g.as_const(), Some(c(1.2, 0.0)));
        assert_eq!(h.omega.as_const(), Some(c(1.0, 0.0)));
        let e = make_example(Example::Enneper, &[1.0]).unwrap();
        assert_eq!(e.g, HoloExpr::var());
        assert_eq!(e.omega.as_const(), Some(c(1.0, 0.0)));
    }

    #[test]
    fn bad_params() {
        assert!(matches!(make_example(Example::Catenoid, &[1.0]), Err(WeierstrassError::BadParams { .. })));
        assert!(matches!(make_example(Example::Catenoid, &[-0.5]), Err(WeierstrassError::BadParams { .. })));
        assert!(matches!(make_example(Example::Enneper, &[0.0]), Err(WeierstrassError::BadParams { .. })));
        assert!(matches!(make_example(Example::Horosphere, &[0.3, 0.0]), Err(WeierstrassError::BadParams { .. })));
        assert!("trinoid".parse::<Example>().is_err());
    }

    #[test]
    fn hopf_examples() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let q = d.hopf();
        let p = c(0.7, -0.3);
        assert!((q.eval(p) - p.powi(-2) * 0.09).norm() < 1e-14);
        let o0 = order_at(&q, &SpherePoint::Finite(c(0.0, 0.0))).unwrap();
        let oi = order_at(&q, &SpherePoint::Infinity).unwrap();
        assert!((o0.order + 2.0).abs() < 1e-12);
        // weight -4 of a quadratic differential at ∞
        assert!(((oi.order - 4.0) + 2.0).abs() < 1e-12);
        assert!(make_example(Example::Horosphere, &[]).unwrap().hopf().is_zero());
        let e = make_example(Example::Enneper, &[1.0]).unwrap().hopf();
        assert_eq!(e.as_const(), Some(c(1.0, 0.0)));
        assert_eq!(order_at(&e, &SpherePoint::Infinity).unwrap().order - 4.0, -4.0);
    }

    #[test]
    fn metric_examples() {
        let e = make_example(Example::Enneper, &[1.0]).unwrap();
        let m = metric(&e, c(0.5, 0.0));
        assert!((m.ds2 - 0.5625).abs() < 1e-15 && !m.singular);
        let on = metric(&e, Complex64::from_polar(1.0, 0.7));
        assert!(on.ds2 < 1e-28 && on.singular && on.k.is_none());
        let h = make_example(Example::Helicoid, &[1.0]).unwrap();
        for (x, y) in [(0.3, 1.0), (-0.7, 2.5), (1.1, -0.4)] {
            let m = metric(&h, c(x, y));
            let want = 4.0 * f64::sinh(x).powi(2);
            assert!((m.ds2 - want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn curvature_identities() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let m = metric(&d, c(0.3, 0.2));
        let g2 = c(0.3, 0.2).powf(0.8).norm_sqr();
        let dg2 = (c(0.3, 0.2).powf(-0.2) * 0.8).norm_sqr();
        assert!(((-m.khat) * m.dshat2 - 4.0 * dg2 / (1.0 + g2).powi(2)).abs() < 1e-12);
        assert!(m.k.unwrap() > 0.0 && m.khat < 0.0);
    }

    #[test]
    fn dshat_positive_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ex in Example::ALL {
            let d = make_example(ex, &[]).unwrap();
            for _ in 0..250 {
                let z = Complex64::from_polar(rng.gen_range(0.05..5.0), rng.gen_range(-3.0..3.0));
                assert!(metric(&d, z).dshat2 > 0.0, "{ex} at {z}");
            }
        }
    }

    #[test]
    fn gauge_examples() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let same = gauge_transform(&d, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let p = c(0.9, 0.8);
        assert!((same.g.eval(p) - d.g.eval(p)).norm() < 1e-15);
        assert!((same.omega.eval(p) - d.omega.eval(p)).norm() < 1e-15);

        let t = gauge_transform(&d, c(2f64.sqrt(), 0.0), c(1.0, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let z = c(rng.gen_range(0.2..3.0), rng.gen_range(-1.0..1.0));
            let (a, b) = (t.hopf().eval(z), d.hopf().eval(z));
            assert!((a - b).norm() <= 1e-12 * b.norm());
            let gh = (z.powf(0.8) * 2f64.sqrt() + 1.0) / (z.powf(0.8) + 2f64.sqrt());
            assert!((t.g.eval(z) - gh).norm() < 1e-14);
        }
        assert!(matches!(gauge_transform(&d, c(1.0, 0.0), c(0.5, 0.0)), Err(WeierstrassError::NotSU11Params(_))));
    }

    #[test]
    fn gauge_preserves_unit_circle() {
        let d = make_example(Example::Enneper, &[1.0]).unwrap();
        let (p, q) = (c(1.25, 0.0), c(0.0, 0.75));
        let t = gauge_transform(&d, p, q).unwrap();
        for k in 0..12 {
            let z = Complex64::from_polar(1.0, 0.5 * f64::from(k));
            assert!((t.g.eval(z).norm() - 1.0).abs() < 1e-13);
            let off = z * 1.1;
            assert!((t.g.eval(off).norm() - 1.0).abs() > 1e-3);
        }
    }

    #[test]
    fn lambda_examples() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let same = lambda_deform(&d, 1.0).unwrap();
        assert_eq!(same.g.eval(c(1.1, 0.1)), d.g.eval(c(1.1, 0.1)));
        let two = lambda_deform(&d, 2.0).unwrap();
        let z = c(1.4, -0.6);
        assert!((two.g.eval(z) - z.powf(0.8) * 2.0).norm() < 1e-14);
        assert!((two.omega.eval(z) - z.powf(-1.8) * (0.36 / 6.4)).norm() < 1e-14);
        assert!((two.hopf().eval(z) - d.hopf().eval(z)).norm() < 1e-14);
        let neg = lambda_deform(&d, -1.0).unwrap();
        let (m0, m1) = (metric(&d, z), metric(&neg, z));
        assert!((m0.ds2 - m1.ds2).abs() < 1e-14 && (m0.dshat2 - m1.dshat2).abs() < 1e-14);
        assert!((m0.q - m1.q).norm() < 1e-14);
        assert_eq!(lambda_deform(&d, 0.0), Err(WeierstrassError::ZeroLambda));
    }

    #[test]
    fn excluded_lambda_examples() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let ex = excluded_lambdas(&d).unwrap();
        assert_eq!(ex[0].lambda, LambdaBound::Infinity);
        assert_eq!(ex[1].lambda, LambdaBound::Zero);
        assert!(lambda_admissible(&ex, 0.37));
        let h = make_example(Example::Horosphere, &[1.2, 1.0]).unwrap();
        let ex = excluded_lambdas(&h).unwrap();
        assert_eq!(ex[0].lambda, LambdaBound::Finite(1.0 / 1.2));
        assert!(!lambda_admissible(&ex, -1.0 / 1.2));
        let e = make_example(Example::Enneper, &[1.0]).unwrap();
        assert_eq!(excluded_lambdas(&e).unwrap()[0].lambda, LambdaBound::Zero);
        let hel = make_example(Example::Helicoid, &[1.0]).unwrap();
        assert!(matches!(excluded_lambdas(&hel), Err(WeierstrassError::UndeterminedLimit(_))));
    }

    #[test]
    fn non_integer_order_sum_warns() {
        let d = data_from_text("z^0.8", "z^(-1.5)", &Default::default(), vec![SpherePoint::Finite(c(0.0, 0.0))], c(0.5, 0.0)).unwrap();
        assert_eq!(d.warnings.len(), 1);
    }

    #[test]
    fn basepoint_validation() {
        let z0 = vec![SpherePoint::Finite(c(0.0, 0.0))];
        let none = Default::default();
        assert!(data_from_text("z", "1", &none, z0.clone(), c(0.0, 0.0)).is_err());
        assert!(data_from_text("z", "1", &none, vec![], c(1.0, 0.0)).is_err());
        assert!(matches!(data_from_text("z", "1/(z-2)", &none, vec![], c(2.0, 0.0)), Err(WeierstrassError::PoleOfOmega(_))));
    }
}
