//! Generalized local series `Σ c_k t^{e_k}` with real exponents about a point
//! of the sphere.
//!
//! `t = z − p` at a finite point and `t = 1/z` at infinity. A series is exact
//! for every exponent below `prec` and says nothing at or above it. Every
//! operation keeps at most [`WINDOW`] of exponent range past its leading term;
//! cancellation of leading terms shrinks what is left.

use num_complex::Complex64;

use super::{HoloExpr, Node};
use crate::SpherePoint;

/// Exponent range tracked past the leading term.
pub(crate) const WINDOW: f64 = 8.0;
const MAX_TERMS: usize = 96;
/// Largest power of the tail used in `(1 + u)^r`, `exp` and `log`.
const MAX_POWER: usize = 64;
const CANCEL_TOL: f64 = 1e-12;
const EXP_TOL: f64 = 1e-12;

type Terms = Vec<(f64, Complex64)>;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Series {
    /// Ascending exponents; the first coefficient is nonzero.
    pub terms: Terms,
    pub prec: f64,
}

impl Series {
    pub fn lead(&self) -> (f64, Complex64) {
        self.terms[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Local {
    /// Identically zero through the whole window.
    Zero,
    Series(Series),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SeriesFail {
    /// Essential singularity (exp of a pole).
    Essential,
    /// Known terms ran out or the shape is outside the engine (log of a zero).
    Unresolved,
}

type R = Result<Local, SeriesFail>;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn same_exponent(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXP_TOL * a.abs().max(1.0)
}

/// Sorts, merges equal exponents and drops terms that cancelled against
/// their contributions. Each raw entry carries the magnitude it came from.
fn merge(mut raw: Vec<(f64, Complex64, f64)>) -> Terms {
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, Complex64, f64)> = Vec::with_capacity(raw.len());
    for (e, c, s) in raw {
        match out.last_mut() {
            Some(last) if same_exponent(last.0, e) => {
                last.1 += c;
                last.2 += s;
            }
            _ => out.push((e, c, s)),
        }
    }
    out.into_iter().filter(|(_, c, s)| c.norm() > CANCEL_TOL * s).map(|(e, c, _)| (e, c)).collect()
}

/// Applies the window and term cap. `base` is the lowest exponent the
/// inputs could produce; cancelling everything up to `base + WINDOW` counts
/// as an exact zero.
fn finish(raw: Vec<(f64, Complex64, f64)>, prec: f64, base: f64) -> R {
    let mut terms = merge(raw);
    terms.retain(|(e, _)| *e < prec);
    let Some(&(lead, _)) = terms.first() else {
        return if prec >= base + WINDOW { Ok(Local::Zero) } else { Err(SeriesFail::Unresolved) };
    };
    let mut prec = prec.min(lead + WINDOW);
    terms.retain(|(e, _)| *e < prec);
    if terms.len() > MAX_TERMS {
        prec = terms[MAX_TERMS].0;
        terms.truncate(MAX_TERMS);
    }
    Ok(Local::Series(Series { terms, prec }))
}

fn exact(terms: Terms) -> Local {
    Local::Series(Series { terms, prec: f64::INFINITY })
}

fn raw_of(t: &Terms) -> Vec<(f64, Complex64, f64)> {
    t.iter().map(|(e, c)| (*e, *c, c.norm())).collect()
}

fn add(a: &Local, b: &Local) -> R {
    let (sa, sb) = match (a, b) {
        (Local::Zero, x) | (x, Local::Zero) => return Ok(x.clone()),
        (Local::Series(sa), Local::Series(sb)) => (sa, sb),
    };
    let mut raw = raw_of(&sa.terms);
    raw.extend(raw_of(&sb.terms));
    finish(raw, sa.prec.min(sb.prec), sa.lead().0.min(sb.lead().0))
}

fn neg(a: &Local) -> Local {
    match a {
        Local::Zero => Local::Zero,
        Local::Series(s) => Local::Series(Series {
            terms: s.terms.iter().map(|(e, c)| (*e, -c)).collect(),
            prec: s.prec,
        }),
    }
}

/// Products of terms with exponent below `cutoff`.
fn product(a: &Terms, b: &Terms, cutoff: f64) -> Vec<(f64, Complex64, f64)> {
    let mut out = Vec::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea + eb;
            if e < cutoff {
                let c = ca * cb;
                out.push((e, c, c.norm()));
            }
        }
    }
    out
}

fn mul(a: &Local, b: &Local) -> R {
    let (sa, sb) = match (a, b) {
        (Local::Zero, _) | (_, Local::Zero) => return Ok(Local::Zero),
        (Local::Series(sa), Local::Series(sb)) => (sa, sb),
    };
    let (la, lb) = (sa.lead().0, sb.lead().0);
    let prec = (la + sb.prec).min(lb + sa.prec).min(la + lb + WINDOW);
    finish(product(&sa.terms, &sb.terms, prec), prec, la + lb)
}

/// `Σ_{n ≥ 0} w_n u^n` for a tail `u` with positive exponents, exact below
/// `cutoff`. Returns the raw terms and the precision actually reached.
fn power_sum(u: &Terms, cutoff: f64, w: impl Fn(usize) -> Complex64) -> (Vec<(f64, Complex64, f64)>, f64) {
    let mut raw = vec![(0.0, w(0), w(0).norm())];
    let Some(&(delta, _)) = u.first() else { return (raw, cutoff) };
    let cutoff = cutoff.min(delta * MAX_POWER as f64);
    let mut un: Terms = vec![(0.0, one())];
    for n in 1..=MAX_POWER {
        un = merge(product(&un, u, cutoff));
        if un.is_empty() {
            break;
        }
        let wn = w(n);
        raw.extend(un.iter().map(|(e, c)| (*e, c * wn, (c * wn).norm())));
    }
    (raw, cutoff)
}

/// Splits `s` as `c0 t^l (1 + u)`, with `u` exact below the returned bound.
fn factor(s: &Series) -> (f64, Complex64, Terms, f64) {
    let (l, c0) = s.lead();
    let u = s.terms[1..].iter().map(|(e, c)| (e - l, c / c0)).collect();
    (l, c0, u, s.prec - l)
}

fn binomial(r: f64, n: usize) -> Complex64 {
    let mut b = 1.0;
    for k in 0..n {
        b *= (r - k as f64) / (k + 1) as f64;
    }
    Complex64::new(b, 0.0)
}

fn pow_lead(c0: Complex64, r: f64) -> Complex64 {
    if r.fract() == 0.0 && r.abs() <= i32::MAX as f64 {
        c0.powi(r as i32)
    } else {
        Complex64::from_polar(c0.norm().powf(r), r * c0.arg())
    }
}

fn pow(a: &Local, r: f64) -> R {
    match a {
        Local::Zero if r > 0.0 => Ok(Local::Zero),
        Local::Zero => Err(SeriesFail::Unresolved),
        Local::Series(s) => {
            let (l, c0, u, pu) = factor(s);
            let (raw, reached) = power_sum(&u, pu.min(WINDOW), |n| binomial(r, n));
            let k = pow_lead(c0, r);
            let raw = raw.into_iter().map(|(e, c, m)| (l * r + e, c * k, m * k.norm())).collect();
            finish(raw, l * r + reached, l * r)
        }
    }
}

fn exp(a: &Local) -> R {
    let s = match a {
        Local::Zero => return Ok(exact(vec![(0.0, one())])),
        Local::Series(s) => s,
    };
    let (l, c) = s.lead();
    if l < 0.0 && !same_exponent(l, 0.0) {
        return Err(SeriesFail::Essential);
    }
    let (a0, u): (Complex64, Terms) = if same_exponent(l, 0.0) { (c, s.terms[1..].to_vec()) } else { (czero(), s.terms.clone()) };
    let mut fact = 1.0;
    let weights: Vec<f64> = (0..=MAX_POWER)
        .map(|n| {
            if n > 0 {
                fact *= n as f64;
            }
            1.0 / fact
        })
        .collect();
    let (raw, reached) = power_sum(&u, s.prec.min(WINDOW), |n| Complex64::new(weights[n], 0.0));
    let k = a0.exp();
    finish(raw.into_iter().map(|(e, c, m)| (e, c * k, m * k.norm())).collect(), reached, 0.0)
}

fn log(a: &Local) -> R {
    let s = match a {
        Local::Zero => return Err(SeriesFail::Unresolved),
        Local::Series(s) => s,
    };
    let (l, c0, u, pu) = factor(s);
    if !same_exponent(l, 0.0) {
        return Err(SeriesFail::Unresolved);
    }
    // ln(1 + u) = Σ (−1)^{n+1} u^n / n; the constant slot carries ln c0
    let (mut raw, reached) = power_sum(&u, pu.min(WINDOW), |n| {
        if n == 0 {
            czero()
        } else {
            Complex64::new(if n % 2 == 1 { 1.0 } else { -1.0 } / n as f64, 0.0)
        }
    });
    let ln0 = c0.ln();
    raw.push((0.0, ln0, ln0.norm()));
    finish(raw, reached, 0.0)
}

fn variable(p: &SpherePoint) -> Local {
    match p {
        SpherePoint::Infinity => exact(vec![(-1.0, one())]),
        SpherePoint::Finite(p) if *p == czero() => exact(vec![(1.0, one())]),
        SpherePoint::Finite(p) => exact(vec![(0.0, *p), (1.0, one())]),
    }
}

/// Local expansion of `e` about `p`.
pub(crate) fn expand(e: &HoloExpr, p: &SpherePoint) -> R {
    match e.node() {
        Node::Const(c) if *c == czero() => Ok(Local::Zero),
        Node::Const(c) => Ok(exact(vec![(0.0, *c)])),
        Node::Var => Ok(variable(p)),
        Node::Add(a, b) => add(&expand(a, p)?, &expand(b, p)?),
        Node::Sub(a, b) => add(&expand(a, p)?, &neg(&expand(b, p)?)),
        Node::Mul(a, b) => mul(&expand(a, p)?, &expand(b, p)?),
        Node::Div(a, b) => mul(&expand(a, p)?, &pow(&expand(b, p)?, -1.0)?),
        Node::Neg(a) => Ok(neg(&expand(a, p)?)),
        Node::Pow(a, r) => pow(&expand(a, p)?, *r),
        Node::IntPow(a, n) => pow(&expand(a, p)?, f64::from(*n)),
        Node::Exp(a) => exp(&expand(a, p)?),
        Node::Log(a) => log(&expand(a, p)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::parse_expr;

    fn local(src: &str, p: SpherePoint) -> Local {
        expand(&parse_expr(src).unwrap(), &p).unwrap()
    }

    fn lead_of(src: &str, p: SpherePoint) -> (f64, Complex64) {
        match local(src, p) {
            Local::Series(s) => s.lead(),
            Local::Zero => panic!("zero"),
        }
    }

    fn at0() -> SpherePoint {
        SpherePoint::Finite(czero())
    }

    #[test]
    fn leading_terms() {
        assert_eq!(lead_of("z^(-2)", at0()).0, -2.0);
        let (l, c) = lead_of("3*z^0.8 * (1 + z)", at0());
        assert!((l - 0.8).abs() < 1e-15 && (c - 3.0).norm() < 1e-15);
        let (l, c) = lead_of("(z^2 + 1)/(2*z^5 - z)", SpherePoint::Infinity);
        assert!((l - 3.0).abs() < 1e-15 && (c - 0.5).norm() < 1e-15);
        // cancellation of the constant term
        let (l, c) = lead_of("exp(z) - 1", at0());
        assert!((l - 1.0).abs() < 1e-15 && (c - 1.0).norm() < 1e-15);
        let (l, c) = lead_of("log(1 + z)", at0());
        assert!((l - 1.0).abs() < 1e-15 && (c - 1.0).norm() < 1e-15);
    }

    #[test]
    fn mixed_real_exponents() {
        let (l, c) = lead_of("z^1.7 + 2*z^0.5", at0());
        assert!((l - 0.5).abs() < 1e-15 && (c - 2.0).norm() < 1e-15);
        // (1 + z^½)² − 1 − 2 z^½ = z
        let (l, c) = lead_of("(1 + z^0.5)^2 - 1 - 2*z^0.5", at0());
        assert!((l - 1.0).abs() < 1e-12 && (c - 1.0).norm() < 1e-12);
        assert_eq!(local("(z^0.3)^2 - z^0.6", at0()), Local::Zero);
    }

    #[test]
    fn derivative_of_a_mobius_image_of_a_real_power() {
        // d/dz (a z^μ + b)/(c z^μ + d) = (ad − bc) μ z^{μ−1} / (c z^μ + d)²; at ∞
        // the leading terms of the quotient rule cancel
        let (a, b, cc, d, mu) = (1.5, 0.4, 0.7, 0.9, 2.477);
        let g = parse_expr(&format!("({a}*z^{mu} + {b})/({cc}*z^{mu} + {d})")).unwrap();
        let (l, c) = match expand(&g.differentiate(), &SpherePoint::Infinity).unwrap() {
            Local::Series(s) => s.lead(),
            Local::Zero => panic!("zero"),
        };
        assert!((l - (mu + 1.0)).abs() < 1e-12, "{l}");
        let want = (a * d - b * cc) * mu / (cc * cc);
        assert!((c.re - want).abs() < 1e-10 && c.im.abs() < 1e-10, "{c}");
    }

    #[test]
    fn essential_and_zero() {
        let e = parse_expr("exp(z)").unwrap();
        assert_eq!(expand(&e, &SpherePoint::Infinity), Err(SeriesFail::Essential));
        let e = parse_expr("z*z - z^2").unwrap();
        assert_eq!(expand(&e, &at0()), Ok(Local::Zero));
    }

    #[test]
    fn binomial_series() {
        // (1 + t)^0.5 = 1 + t/2 − t²/8 + t³/16
        let Local::Series(s) = local("(1 + z)^0.5", at0()) else { panic!() };
        let expect = [1.0, 0.5, -0.125, 0.0625];
        for ((e, x), (k, y)) in s.terms.iter().zip(expect.iter().enumerate()) {
            assert!(*e == k as f64 && (x.re - y).abs() < 1e-15 && x.im == 0.0);
        }
        assert_eq!(s.prec, WINDOW);
    }
}
