//! Lorentz 4-space as 2×2 Hermitian matrices.
//!
//! A point `(x0, x1, x2, x3)` of ℝ⁴₁ is identified with
//! `x0 e0 + x1 e1 + x2 e2 + x3 e3`, where
//!
//! ```text
//! e0 = [[1, 0], [0, 1]]    e1 = [[0, 1], [1, 0]]
//! e2 = [[0, i], [-i, 0]]   e3 = [[1, 0], [0, -1]]
//! ```
//!
//! Under this identification `⟨X, X⟩ = -det X`, de Sitter space is the set of
//! Hermitian matrices with determinant `-1`, and `SL(2,ℂ)` acts by `X ↦ F X F*`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LorentzError {
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not in SU(1,1) (residual {0:.3e})")]
    NotInGroup(f64),
}

/// A complex 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2C {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Mat2C {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub const fn identity() -> Self {
        E0
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    /// General inverse; callers are responsible for a nonzero determinant.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        Self::new(self.a22 / det, -self.a12 / det, -self.a21 / det, self.a11 / det)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Eigenvalues from the characteristic polynomial, sorted by argument in `[0, 2π)`.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let half_tr = self.trace() * 0.5;
        let disc = (half_tr * half_tr - self.det()).sqrt();
        let mut ev = [half_tr + disc, half_tr - disc];
        ev.sort_by(|a, b| arg_2pi(*a).total_cmp(&arg_2pi(*b)));
        ev
    }
}

/// Argument normalized to `[0, 2π)`.
pub fn arg_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, r: Mat2C) -> Mat2C {
        Mat2C::new(self.a11 + r.a11, self.a12 + r.a12, self.a21 + r.a21, self.a22 + r.a22)
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, r: Mat2C) -> Mat2C {
        Mat2C::new(self.a11 - r.a11, self.a12 - r.a12, self.a21 - r.a21, self.a22 - r.a22)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        self.scale(-ONE)
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, r: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a11 * r.a11 + self.a12 * r.a21,
            self.a11 * r.a12 + self.a12 * r.a22,
            self.a21 * r.a11 + self.a22 * r.a21,
            self.a21 * r.a12 + self.a22 * r.a22,
        )
    }
}

impl fmt::Display for Mat2C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |z: Complex64| format!("{:+.12e}{:+.12e}i", z.re, z.im);
        write!(f, "[[{}, {}], [{}, {}]]", c(self.a11), c(self.a12), c(self.a21), c(self.a22))
    }
}

pub const E0: Mat2C = Mat2C::new(ONE, ZERO, ZERO, ONE);
pub const E1: Mat2C = Mat2C::new(ZERO, ONE, ONE, ZERO);
pub const E2: Mat2C = Mat2C::new(ZERO, I, Complex64::new(0.0, -1.0), ZERO);
pub const E3: Mat2C = Mat2C::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0));

/// A point of ℝ⁴₁ in ambient coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiPoint {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MinkowskiPoint {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

impl Sub for MinkowskiPoint {
    type Output = MinkowskiPoint;
    fn sub(self, r: Self) -> Self {
        Self::new(self.x0 - r.x0, self.x1 - r.x1, self.x2 - r.x2, self.x3 - r.x3)
    }
}

impl Add for MinkowskiPoint {
    type Output = MinkowskiPoint;
    fn add(self, r: Self) -> Self {
        Self::new(self.x0 + r.x0, self.x1 + r.x1, self.x2 + r.x2, self.x3 + r.x3)
    }
}

impl Mul<f64> for MinkowskiPoint {
    type Output = MinkowskiPoint;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

/// `Σ x_k e_k`.
pub fn vec_to_matrix(v: MinkowskiPoint) -> Mat2C {
    Mat2C::new(
        Complex64::new(v.x0 + v.x3, 0.0),
        Complex64::new(v.x1, v.x2),
        Complex64::new(v.x1, -v.x2),
        Complex64::new(v.x0 - v.x3, 0.0),
    )
}

/// Deviation from self-adjointness in the max-norm.
pub fn hermitian_residual(x: &Mat2C) -> f64 {
    (*x - x.adjoint()).max_norm()
}

/// Inverse of [`vec_to_matrix`] with the default tolerance `1e-9` (relative to the entries).
pub fn matrix_to_vec(x: &Mat2C) -> Result<MinkowskiPoint, LorentzError> {
    matrix_to_vec_tol(x, 1e-9)
}

pub fn matrix_to_vec_tol(x: &Mat2C, tol: f64) -> Result<MinkowskiPoint, LorentzError> {
    let dev = hermitian_residual(x);
    if dev > tol * x.max_norm().max(1.0) {
        return Err(LorentzError::NotHermitian(dev));
    }
    Ok(hermitian_part_to_vec(x))
}

/// Reads off coordinates of the Hermitian part without checking.
pub(crate) fn hermitian_part_to_vec(x: &Mat2C) -> MinkowskiPoint {
    let off = (x.a12 + x.a21.conj()) * 0.5;
    MinkowskiPoint::new(
        0.5 * (x.a11.re + x.a22.re),
        off.re,
        off.im,
        0.5 * (x.a11.re - x.a22.re),
    )
}

/// `-x0 y0 + x1 y1 + x2 y2 + x3 y3`.
pub fn lorentz_inner(x: MinkowskiPoint, y: MinkowskiPoint) -> f64 {
    -x.x0 * y.x0 + x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3
}

/// The same inner product evaluated as `-½ trace(X e2 Yᵀ e2)`.
pub fn lorentz_inner_matrix(x: &Mat2C, y: &Mat2C) -> f64 {
    (-(*x * E2 * y.transpose() * E2).trace() * 0.5).re
}

/// `F X F*`.
pub fn congruence(f: &Mat2C, x: &Mat2C) -> Mat2C {
    *f * *x * f.adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    SL2C,
    SU11,
    SU2,
    Hermitian,
}

/// Distance of `m` from SU(1,1): max of `|det m - 1|` and `‖m e3 m* - e3‖`.
pub fn su11_residual(m: &Mat2C) -> f64 {
    let det_dev = (m.det() - ONE).norm();
    det_dev.max((congruence(m, &E3) - E3).max_norm())
}

pub fn check_membership(m: &Mat2C, group: Group, tol: f64) -> bool {
    let sl2 = || (m.det() - ONE).norm() <= tol;
    match group {
        Group::SL2C => sl2(),
        Group::SU11 => sl2() && (congruence(m, &E3) - E3).max_norm() <= tol,
        Group::SU2 => sl2() && (*m * m.adjoint() - E0).max_norm() <= tol,
        Group::Hermitian => hermitian_residual(m) <= tol,
    }
}

/// Conjugacy class of an SU(1,1) element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Su11Class {
    /// Conjugate to `diag(e^{iθ}, e^{-iθ})`, `θ ∈ (0, 2π) \ {π}`.
    Elliptic { theta: f64 },
    /// Conjugate to `sign · [[cosh s, sinh s], [sinh s, cosh s]]`, `s > 0`.
    Hyperbolic { s: f64, sign: i8 },
    /// Conjugate to `sign · [[1+i, 1], [1, 1-i]]`.
    Parabolic { sign: i8 },
    /// `sign · identity`.
    CenterPM { sign: i8 },
}

impl Su11Class {
    pub fn tag(&self) -> &'static str {
        match self {
            Su11Class::Elliptic { .. } => "elliptic",
            Su11Class::Hyperbolic { .. } => "hyperbolic",
            Su11Class::Parabolic { .. } => "parabolic",
            Su11Class::CenterPM { .. } => "center",
        }
    }

    /// Diagonalizable with unit-circle eigenvalues (`±identity` included).
    pub fn is_elliptic_type(&self) -> bool {
        matches!(self, Su11Class::Elliptic { .. } | Su11Class::CenterPM { .. })
    }
}

/// Classifies by the real trace. Near-parabolic traces within `tol` of `±2`
/// resolve to `Parabolic` unless the matrix is `±identity` within `tol`.
pub fn classify_su11(m: &Mat2C, tol: f64) -> Result<Su11Class, LorentzError> {
    let res = su11_residual(m);
    if res > tol {
        return Err(LorentzError::NotInGroup(res));
    }
    let t = m.trace().re;
    let sign: i8 = if t >= 0.0 { 1 } else { -1 };
    if t.abs() < 2.0 - tol {
        let base = (t / 2.0).acos();
        // Im(a11) cannot vanish on an elliptic SU(1,1) class and fixes the rotation sense.
        let theta = if m.a11.im >= 0.0 { base } else { 2.0 * PI - base };
        Ok(Su11Class::Elliptic { theta })
    } else if t.abs() > 2.0 + tol {
        Ok(Su11Class::Hyperbolic { s: (t.abs() / 2.0).acosh(), sign })
    } else if (*m - E0.scale(f64::from(sign).into())).max_norm() <= tol {
        Ok(Su11Class::CenterPM { sign })
    } else {
        Ok(Su11Class::Parabolic { sign })
    }
}

/// The SU(1,1) element `[[p̄, -q], [-q̄, p]]`; requires `|p|² - |q|² = 1`.
pub fn su11_from_params(p: Complex64, q: Complex64) -> Mat2C {
    Mat2C::new(p.conj(), -q, -q.conj(), p)
}
