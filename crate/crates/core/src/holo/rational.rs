//! Rational normal forms `P/Q` with approximate polynomial GCD.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{HoloExpr, Node};

/// Tolerance of the approximate GCD, relative to coefficient scale.
pub const GCD_TOL: f64 = 1e-10;

/// Polynomial with ascending coefficients; no trailing zeros except for the zero polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(Vec<Complex64>);

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Poly {
    pub fn new(mut c: Vec<Complex64>) -> Self {
        while c.len() > 1 && *c.last().unwrap() == czero() {
            c.pop();
        }
        if c.is_empty() {
            c.push(czero());
        }
        Poly(c)
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly::new(vec![czero(), Complex64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.len() == 1 && self.0[0] == czero()
    }

    /// Degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn lead(&self) -> Complex64 {
        *self.0.last().unwrap()
    }

    pub fn scale(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(czero(), |acc, c| acc * z + c)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Poly::constant(Complex64::new(1.0, 0.0)), |acc, _| &acc * self)
    }

    /// Zeroes coefficients below `tol · scale` and drops them from the top.
    fn cleaned(&self, tol: f64) -> Self {
        let s = self.scale();
        Poly::new(self.0.iter().map(|c| if c.norm() <= tol * s { czero() } else { *c }).collect())
    }

    fn monic(&self) -> Self {
        self.scaled(self.lead().inv())
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.0.clone();
        let dd = d.degree();
        if self.degree() < dd {
            return (Poly::constant(czero()), self.clone());
        }
        let mut q = vec![czero(); self.degree() - dd + 1];
        let inv = d.lead().inv();
        for k in (0..q.len()).rev() {
            let c = r[k + dd] * inv;
            q[k] = c;
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] -= c * dc;
            }
        }
        r.truncate(dd.max(1));
        (Poly::new(q), Poly::new(r))
    }

    fn unit(&self) -> Self {
        self.scaled(Complex64::new(1.0 / self.scale(), 0.0))
    }

    /// Monic approximate GCD by the Euclidean algorithm on max-norm-normalized
    /// operands; a remainder below `tol` relative to the quotient scale counts as zero.
    pub fn approx_gcd(&self, other: &Poly, tol: f64) -> Poly {
        let one = Poly::constant(Complex64::new(1.0, 0.0));
        let (mut a, mut b) = (self.cleaned(tol), other.cleaned(tol));
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        if b.is_zero() {
            return if a.is_zero() { one } else { a.monic() };
        }
        loop {
            if b.degree() == 0 {
                return one;
            }
            let (a_u, b_u) = (a.unit(), b.unit());
            let (q, r) = a_u.div_rem(&b_u);
            if r.scale() <= tol * q.scale().max(1.0) {
                return b_u.monic();
            }
            a = b_u;
            b = r.cleaned(tol);
        }
    }

    /// `self / d` when the remainder is negligible.
    fn exact_div(&self, d: &Poly, tol: f64) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        (r.scale() <= tol * self.scale().max(f64::MIN_POSITIVE)).then_some(q)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|k| self.0.get(k).copied().unwrap_or(czero()) + o.0.get(k).copied().unwrap_or(czero())).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = vec![czero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// `num / den` in lowest terms (up to [`GCD_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    fn from_parts(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(RationalFn { num, den })
    }

    /// Normal form of `e`, or `None` if `e` is not rational in `z`.
    pub fn from_expr(e: &HoloExpr) -> Option<Self> {
        let r = Self::build(e)?;
        Some(r.reduced(GCD_TOL))
    }

    fn build(e: &HoloExpr) -> Option<Self> {
        let one = || Poly::constant(Complex64::new(1.0, 0.0));
        match e.node() {
            Node::Const(c) => Self::from_parts(Poly::constant(*c), one()),
            Node::Var => Self::from_parts(Poly::x(), one()),
            Node::Add(a, b) => {
                let (a, b) = (Self::build(a)?, Self::build(b)?);
                Self::from_parts(&(&a.num * &b.den) + &(&b.num * &a.den), &a.den * &b.den)
            }
            Node::Sub(a, b) => {
                let (a, b) = (Self::build(a)?, Self::build(b)?);
                Self::from_parts(&(&a.num * &b.den) - &(&b.num * &a.den), &a.den * &b.den)
            }
            Node::Mul(a, b) => {
                let (a, b) = (Self::build(a)?, Self::build(b)?);
                Self::from_parts(&a.num * &b.num, &a.den * &b.den)
            }
            Node::Div(a, b) => {
                let (a, b) = (Self::build(a)?, Self::build(b)?);
                Self::from_parts(&a.num * &b.den, &a.den * &b.num)
            }
            Node::Neg(a) => {
                let a = Self::build(a)?;
                Self::from_parts(-&a.num, a.den)
            }
            Node::IntPow(a, n) => {
                let a = Self::build(a)?;
                let k = n.unsigned_abs();
                if *n >= 0 {
                    Self::from_parts(a.num.powi(k), a.den.powi(k))
                } else {
                    Self::from_parts(a.den.powi(k), a.num.powi(k))
                }
            }
            Node::Pow(..) | Node::Exp(_) | Node::Log(_) => None,
        }
    }

    /// Cancels the approximate GCD and normalizes the denominator to be monic.
    /// A candidate GCD that does not divide both parts is discarded.
    pub fn reduced(&self, tol: f64) -> Self {
        if self.num.cleaned(tol).is_zero() {
            return RationalFn { num: Poly::constant(czero()), den: Poly::constant(Complex64::new(1.0, 0.0)) };
        }
        let g = self.num.approx_gcd(&self.den, tol);
        let (num, den) = match (self.num.exact_div(&g, tol), self.den.exact_div(&g, tol)) {
            (Some(n), Some(d)) if self.agrees_with(&n, &d, tol) => (n, d),
            _ => (self.num.clone(), self.den.clone()),
        };
        let s = den.lead().inv();
        RationalFn { num: num.scaled(s), den: den.scaled(s) }
    }

    /// Whether `n/d` matches `self` by cross-multiplication at fixed probe points.
    fn agrees_with(&self, n: &Poly, d: &Poly, tol: f64) -> bool {
        (0..7).all(|k| {
            let z = Complex64::from_polar(0.6 + 0.25 * f64::from(k), 0.9 * f64::from(k) + 0.3);
            let l = n.eval(z) * self.den.eval(z);
            let r = self.num.eval(z) * d.eval(z);
            (l - r).norm() <= tol * (l.norm() + r.norm())
        })
    }

    pub fn degree(&self) -> usize {
        if self.num.is_zero() {
            0
        } else {
            self.num.degree().max(self.den.degree())
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `a/b ≈ c/d` by comparing `ad − cb` against the scale of the products.
    pub fn approx_eq(&self, other: &RationalFn, tol: f64) -> bool {
        let l = &self.num * &other.den;
        let r = &other.num * &self.den;
        let diff = &l - &r;
        diff.scale() <= tol * l.scale().max(r.scale()).max(f64::MIN_POSITIVE)
    }
}

/// Mapping degree of a meromorphic function on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Finite(u32),
    Infinite,
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::Infinite => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::Infinite => write!(f, "∞"),
        }
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Degree::Finite(d) => s.serialize_u32(*d),
            Degree::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Degree::Finite(n)),
            Raw::S(s) if s == "inf" => Ok(Degree::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("invalid degree `{s}`"))),
        }
    }
}

/// `max(deg P, deg Q)` of the reduced fraction; `Infinite` when `e` is not rational.
pub fn rational_degree(e: &HoloExpr) -> Degree {
    match RationalFn::from_expr(e) {
        Some(r) => Degree::Finite(r.degree() as u32),
        None => Degree::Infinite,
    }
}
