//! Meromorphic expressions in one complex variable `z`.
//!
//! Expressions are immutable trees behind an [`Arc`]; every constructor folds
//! constants and collapses trivial identities so that structurally equal
//! inputs build structurally equal trees. Non-integer powers and logarithms are
//! multivalued; their branch is chosen by a [`BranchState`] (see [`branch`]).

mod branch;
mod order;
mod parse;
mod rational;
mod series;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

pub use branch::{eval_continued, BranchState, PathSpec, Segment};
pub use order::{leading_behavior, order_at, LocalLeading, OrderEstimate, SLOPE_SPREAD};
pub use parse::{parse_expr, parse_expr_with};
pub use rational::{rational_degree, Degree, Poly, RationalFn};

use crate::SpherePoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HoloError {
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("singularity on path near z = {0}")]
    SingularityOnPath(Complex64),
    #[error("expression is constant")]
    ConstantExpression,
    #[error("expression is identically zero")]
    ZeroExpression,
    #[error("inconsistent order estimates at {point}: slopes span [{min:.4}, {max:.4}]")]
    InconsistentOrder { point: SpherePoint, min: f64, max: f64 },
    #[error("branch of `{0}` is not tracked by this state")]
    UntrackedBranch(String),
    #[error("branch step too large (argument jump {0:.3})")]
    StepTooLarge(f64),
    #[error("path is not continuous at segment {0}")]
    DiscontinuousPath(usize),
}

/// Node of an expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var,
    Add(HoloExpr, HoloExpr),
    Sub(HoloExpr, HoloExpr),
    Mul(HoloExpr, HoloExpr),
    Div(HoloExpr, HoloExpr),
    Neg(HoloExpr),
    /// Real, non-integer exponent (multivalued).
    Pow(HoloExpr, f64),
    IntPow(HoloExpr, i32),
    Exp(HoloExpr),
    /// Multivalued logarithm.
    Log(HoloExpr),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    hash: u64,
}

/// Shared, immutable expression.
#[derive(Debug, Clone)]
pub struct HoloExpr(Arc<Inner>);

impl PartialEq for HoloExpr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.node == other.0.node)
    }
}

impl Hash for HoloExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

fn mix(h: u64, v: u64) -> u64 {
    // FNV-style combine; only needs to be deterministic and well spread.
    (h ^ v).wrapping_mul(0x0000_0100_0000_01b3).rotate_left(29)
}

fn complex_bits(c: Complex64) -> u64 {
    // -0.0 and 0.0 must hash alike since they compare equal.
    let n = |x: f64| if x == 0.0 { 0u64 } else { x.to_bits() };
    mix(n(c.re), n(c.im))
}

fn node_hash(node: &Node) -> u64 {
    let seed = 0xcbf2_9ce4_8422_2325u64;
    match node {
        Node::Const(c) => mix(mix(seed, 1), complex_bits(*c)),
        Node::Var => mix(seed, 2),
        Node::Add(a, b) => mix(mix(mix(seed, 3), a.0.hash), b.0.hash),
        Node::Sub(a, b) => mix(mix(mix(seed, 4), a.0.hash), b.0.hash),
        Node::Mul(a, b) => mix(mix(mix(seed, 5), a.0.hash), b.0.hash),
        Node::Div(a, b) => mix(mix(mix(seed, 6), a.0.hash), b.0.hash),
        Node::Neg(a) => mix(mix(seed, 7), a.0.hash),
        Node::Pow(a, r) => mix(mix(mix(seed, 8), a.0.hash), r.to_bits()),
        Node::IntPow(a, n) => mix(mix(mix(seed, 9), a.0.hash), *n as u64),
        Node::Exp(a) => mix(mix(seed, 10), a.0.hash),
        Node::Log(a) => mix(mix(seed, 11), a.0.hash),
    }
}

fn is_integer(r: f64) -> bool {
    r.fract() == 0.0 && r.abs() < i32::MAX as f64
}

impl HoloExpr {
    fn from_node(node: Node) -> Self {
        let hash = node_hash(&node);
        HoloExpr(Arc::new(Inner { node, hash }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub(crate) fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn var() -> Self {
        Self::from_node(Node::Var)
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::from_node(Node::Const(c.into()))
    }

    pub fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_const() == Some(Complex64::new(1.0, 0.0))
    }

    pub fn add(&self, rhs: &HoloExpr) -> HoloExpr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            _ if self.is_zero() => rhs.clone(),
            _ if rhs.is_zero() => self.clone(),
            _ => match rhs.node() {
                Node::Neg(inner) => self.sub(inner),
                _ => Self::from_node(Node::Add(self.clone(), rhs.clone())),
            },
        }
    }

    pub fn sub(&self, rhs: &HoloExpr) -> HoloExpr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a - b),
            _ if rhs.is_zero() => self.clone(),
            _ if self.is_zero() => rhs.neg(),
            _ => match rhs.node() {
                Node::Neg(inner) => self.add(inner),
                _ => Self::from_node(Node::Sub(self.clone(), rhs.clone())),
            },
        }
    }

    pub fn mul(&self, rhs: &HoloExpr) -> HoloExpr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            _ if self.is_zero() || rhs.is_zero() => Self::zero(),
            _ if self.is_one() => rhs.clone(),
            _ if rhs.is_one() => self.clone(),
            (None, Some(_)) => rhs.mul(self),
            (Some(a), None) => match rhs.node() {
                // c·(d·x) → (cd)·x
                Node::Mul(l, r) if l.as_const().is_some() => {
                    Self::constant(a * l.as_const().unwrap()).mul(r)
                }
                _ if a == Complex64::new(-1.0, 0.0) => rhs.neg(),
                _ => Self::from_node(Node::Mul(self.clone(), rhs.clone())),
            },
            _ => Self::from_node(Node::Mul(self.clone(), rhs.clone())),
        }
    }

    pub fn div(&self, rhs: &HoloExpr) -> HoloExpr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != Complex64::new(0.0, 0.0) => Self::constant(a / b),
            _ if self.is_zero() => Self::zero(),
            _ if rhs.is_one() => self.clone(),
            (None, Some(b)) if b != Complex64::new(0.0, 0.0) => Self::constant(b.inv()).mul(self),
            _ => Self::from_node(Node::Div(self.clone(), rhs.clone())),
        }
    }

    pub fn neg(&self) -> HoloExpr {
        match self.node() {
            Node::Const(c) => Self::constant(-*c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::from_node(Node::Neg(self.clone())),
        }
    }

    /// Real power; integer exponents become [`Node::IntPow`].
    pub fn powf(&self, r: f64) -> HoloExpr {
        if is_integer(r) {
            return self.powi(r as i32);
        }
        match self.node() {
            // (x^n)^r with integer n is genuinely multivalued in a different way
            // than x^(nr), so only constants fold.
            Node::Const(c) => Self::constant(c.powf(r)),
            _ => Self::from_node(Node::Pow(self.clone(), r)),
        }
    }

    pub fn powi(&self, n: i32) -> HoloExpr {
        match (n, self.node()) {
            (0, _) => Self::one(),
            (1, _) => self.clone(),
            (_, Node::Const(c)) => Self::constant(c.powi(n)),
            (_, Node::IntPow(base, m)) => base.powi(m * n),
            _ => Self::from_node(Node::IntPow(self.clone(), n)),
        }
    }

    pub fn exp(&self) -> HoloExpr {
        match self.node() {
            Node::Const(c) => Self::constant(c.exp()),
            _ => Self::from_node(Node::Exp(self.clone())),
        }
    }

    pub fn ln(&self) -> HoloExpr {
        match self.node() {
            Node::Const(c) => Self::constant(c.ln()),
            _ => Self::from_node(Node::Log(self.clone())),
        }
    }

    /// Rebuilds the tree through the folding constructors.
    pub fn simplify(&self) -> HoloExpr {
        match self.node() {
            Node::Const(_) | Node::Var => self.clone(),
            Node::Add(a, b) => a.simplify().add(&b.simplify()),
            Node::Sub(a, b) => a.simplify().sub(&b.simplify()),
            Node::Mul(a, b) => a.simplify().mul(&b.simplify()),
            Node::Div(a, b) => a.simplify().div(&b.simplify()),
            Node::Neg(a) => a.simplify().neg(),
            Node::Pow(a, r) => a.simplify().powf(*r),
            Node::IntPow(a, n) => a.simplify().powi(*n),
            Node::Exp(a) => a.simplify().exp(),
            Node::Log(a) => a.simplify().ln(),
        }
    }

    /// Replaces `z` by `inner`.
    pub fn compose(&self, inner: &HoloExpr) -> HoloExpr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var => inner.clone(),
            Node::Add(a, b) => a.compose(inner).add(&b.compose(inner)),
            Node::Sub(a, b) => a.compose(inner).sub(&b.compose(inner)),
            Node::Mul(a, b) => a.compose(inner).mul(&b.compose(inner)),
            Node::Div(a, b) => a.compose(inner).div(&b.compose(inner)),
            Node::Neg(a) => a.compose(inner).neg(),
            Node::Pow(a, r) => a.compose(inner).powf(*r),
            Node::IntPow(a, n) => a.compose(inner).powi(*n),
            Node::Exp(a) => a.compose(inner).exp(),
            Node::Log(a) => a.compose(inner).ln(),
        }
    }

    /// Exact symbolic derivative `d/dz`.
    pub fn differentiate(&self) -> HoloExpr {
        match self.node() {
            Node::Const(_) => Self::zero(),
            Node::Var => Self::one(),
            Node::Add(a, b) => a.differentiate().add(&b.differentiate()),
            Node::Sub(a, b) => a.differentiate().sub(&b.differentiate()),
            Node::Mul(a, b) => a.differentiate().mul(b).add(&a.mul(&b.differentiate())),
            Node::Div(a, b) => {
                let num = a.differentiate().mul(b).sub(&a.mul(&b.differentiate()));
                num.div(&b.powi(2))
            }
            Node::Neg(a) => a.differentiate().neg(),
            Node::Pow(a, r) => Self::real(*r).mul(&a.powf(r - 1.0)).mul(&a.differentiate()),
            Node::IntPow(a, n) => {
                Self::real(f64::from(*n)).mul(&a.powi(n - 1)).mul(&a.differentiate())
            }
            Node::Exp(a) => self.mul(&a.differentiate()),
            Node::Log(a) => a.differentiate().div(a),
        }
    }

    /// `S_z(e) = (e''/e')' - ½ (e''/e')²`.
    pub fn schwarzian(&self) -> Result<HoloExpr, HoloError> {
        let d1 = self.differentiate();
        if d1.is_zero() || self.as_const().is_some() {
            return Err(HoloError::ConstantExpression);
        }
        let ratio = d1.differentiate().div(&d1);
        Ok(ratio.differentiate().sub(&Self::real(0.5).mul(&ratio.powi(2))))
    }

    /// Evaluates on the principal branch of every multivalued node.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self.node() {
            Node::Const(c) => *c,
            Node::Var => z,
            Node::Add(a, b) => a.eval(z) + b.eval(z),
            Node::Sub(a, b) => a.eval(z) - b.eval(z),
            Node::Mul(a, b) => a.eval(z) * b.eval(z),
            Node::Div(a, b) => a.eval(z) / b.eval(z),
            Node::Neg(a) => -a.eval(z),
            Node::Pow(a, r) => {
                let b = a.eval(z);
                Complex64::from_polar(b.norm().powf(*r), r * b.arg())
            }
            Node::IntPow(a, n) => a.eval(z).powi(*n),
            Node::Exp(a) => a.eval(z).exp(),
            Node::Log(a) => a.eval(z).ln(),
        }
    }

    /// Whether the expression contains multivalued nodes.
    pub fn is_multivalued(&self) -> bool {
        let mut found = false;
        self.visit(&mut |n| {
            if matches!(n.node(), Node::Pow(..) | Node::Log(_)) {
                found = true;
            }
        });
        found
    }

    /// Post-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&HoloExpr)) {
        match self.node() {
            Node::Const(_) | Node::Var => {}
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::IntPow(a, _) | Node::Exp(a) | Node::Log(a) => {
                a.visit(f)
            }
        }
        f(self);
    }

    /// Bases of non-integer powers and logarithms, inner first, deduplicated.
    pub fn multivalued_bases(&self) -> Vec<HoloExpr> {
        let mut out: Vec<HoloExpr> = Vec::new();
        self.visit(&mut |n| {
            if let Node::Pow(b, _) | Node::Log(b) = n.node() {
                if !out.contains(b) {
                    out.push(b.clone());
                }
            }
        });
        out
    }

    /// Denominators and multivalued bases: subexpressions whose zeros are
    /// singularities of the whole expression.
    pub(crate) fn singular_subexprs(&self) -> Vec<HoloExpr> {
        let mut out: Vec<HoloExpr> = Vec::new();
        self.visit(&mut |n| {
            let s = match n.node() {
                Node::Div(_, d) => Some(d),
                Node::Pow(b, r) if *r < 0.0 => Some(b),
                Node::IntPow(b, k) if *k < 0 => Some(b),
                Node::Pow(b, _) | Node::Log(b) => Some(b),
                _ => None,
            };
            if let Some(s) = s {
                if s.as_const().is_none() && !out.contains(s) {
                    out.push(s.clone());
                }
            }
        });
        out
    }
}

fn fmt_f64(x: f64) -> String {
    if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
        format!("({x:?})")
    } else {
        format!("{x:?}")
    }
}

impl fmt::Display for HoloExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", fmt_f64(c.re))
                } else {
                    write!(f, "({} + {}*i)", fmt_f64(c.re), fmt_f64(c.im))
                }
            }
            Node::Var => write!(f, "z"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Pow(a, r) => write!(f, "({a}^{})", fmt_f64(*r)),
            Node::IntPow(a, n) => {
                if *n < 0 {
                    write!(f, "({a}^({n}))")
                } else {
                    write!(f, "({a}^{n})")
                }
            }
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Log(a) => write!(f, "log({a})"),
        }
    }
}
