//! Spacelike CMC-1 faces in de Sitter 3-space from Weierstrass data.
//!
//! The pipeline runs bottom-up: [`lorentz`] fixes the Hermitian model of
//! ℝ⁴₁, [`holo`] evaluates meromorphic data along paths, [`weierstrass`] holds
//! the data `(g, ω)`, [`frame`] integrates the null lift `F`, [`surface`]
//! turns frames into points of 𝕊³₁, [`ends`] classifies punctures, and
//! [`scene`] / [`export`] connect everything to files.

// `!(x > 0.0)` is how NaN gets rejected along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ends;
pub mod export;
pub mod frame;
pub mod holo;
pub mod lorentz;
pub mod scene;
pub mod surface;
pub mod weierstrass;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use holo::{HoloError, HoloExpr};
pub use lorentz::{MinkowskiPoint, Mat2C, Su11Class};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "inf"),
            SpherePoint::Finite(z) if z.im == 0.0 => write!(f, "{}", z.re),
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

impl FromStr for SpherePoint {
    type Err = String;

    /// Accepts `inf`, a real number, or `re,im`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(SpherePoint::Infinity);
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| format!("invalid point `{s}`"));
        match parts.as_slice() {
            [re] => Ok(SpherePoint::Finite(Complex64::new(num(re)?, 0.0))),
            [re, im] => Ok(SpherePoint::Finite(Complex64::new(num(re)?, num(im)?))),
            _ => Err(format!("invalid point `{s}`")),
        }
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Infinity => s.serialize_str("inf"),
            SpherePoint::Finite(z) => [z.re, z.im].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Real(x) => Ok(SpherePoint::Finite(Complex64::new(x, 0.0))),
            Raw::Pair([re, im]) => Ok(SpherePoint::Finite(Complex64::new(re, im))),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Serde adapter writing `None` as the string `"undefined"`.
pub mod undefined {
    use serde::de::{self, Deserializer};
    use serde::{Deserialize, Serialize, Serializer};

    pub const MARKER: &str = "undefined";

    pub fn serialize<T: Serialize, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => x.serialize(s),
            None => s.serialize_str(MARKER),
        }
    }

    pub fn deserialize<'de, T: Deserialize<'de>, D: Deserializer<'de>>(d: D) -> Result<Option<T>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either<T> {
            Marker(String),
            Value(T),
        }
        match Either::<T>::deserialize(d)? {
            Either::Value(x) => Ok(Some(x)),
            Either::Marker(m) if m == MARKER => Ok(None),
            Either::Marker(m) => Err(de::Error::custom(format!("expected a value or \"{MARKER}\", got \"{m}\""))),
        }
    }
}
