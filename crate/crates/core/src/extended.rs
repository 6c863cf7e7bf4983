//! Points of the Riemann sphere and the chordal metric on it.
//!
//! The chordal metric is only used as a measuring instrument for orbits that
//! pass close to infinity. All stability bounds elsewhere in the crate are
//! Euclidean.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

/// Finite points with modulus above this value are treated as infinity.
pub const OVERFLOW_MODULUS: f64 = 1e150;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

pub use ExtendedComplex::Infinity;

impl ExtendedComplex {
    /// Wraps `z`, snapping non-finite or overflowing values to infinity.
    pub fn new(z: Complex64) -> Self {
        if !z.re.is_finite() || !z.im.is_finite() || z.norm() > OVERFLOW_MODULUS {
            Infinity
        } else {
            ExtendedComplex::Finite(z)
        }
    }

    pub fn finite(re: f64, im: f64) -> Self {
        Self::new(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Self::finite(re, 0.0)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match *self {
            ExtendedComplex::Finite(z) => Some(z),
            Infinity => None,
        }
    }

    /// `1/z` as a map of the sphere (`0 <-> inf`).
    pub fn recip(&self) -> Self {
        match *self {
            Infinity => ExtendedComplex::Finite(Complex64::new(0.0, 0.0)),
            ExtendedComplex::Finite(z) if z.re == 0.0 && z.im == 0.0 => Infinity,
            ExtendedComplex::Finite(z) => Self::new(z.inv()),
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        Self::new(z)
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedComplex::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Infinity => f.write_str("inf"),
        }
    }
}

/// Chordal distance on the sphere of diameter 2; values lie in `[0, 2]`.
pub fn chordal_distance(p: ExtendedComplex, q: ExtendedComplex) -> f64 {
    match (p, q) {
        (Infinity, Infinity) => 0.0,
        (ExtendedComplex::Finite(z), Infinity) | (Infinity, ExtendedComplex::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (ExtendedComplex::Finite(z), ExtendedComplex::Finite(w)) => {
            let d = 2.0 * (z - w).norm()
                / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt());
            d.min(2.0)
        }
    }
}

pub fn approx_eq(p: ExtendedComplex, q: ExtendedComplex, tol: f64) -> bool {
    chordal_distance(p, q) <= tol
}

/// Serializes a complex number as `[re, im]`.
pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl Serialize for ExtendedComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedComplex::Finite(z) => {
                let mut t = serializer.serialize_tuple(2)?;
                t.serialize_element(&z.re)?;
                t.serialize_element(&z.im)?;
                t.end()
            }
            Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = ExtendedComplex;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a pair [re, im] or the string \"inf\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                if v == "inf" {
                    Ok(Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let re: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(ExtendedComplex::finite(re, im))
            }
        }

        deserializer.deserialize_any(PointVisitor)
    }
}
