//! Unimodular Möbius maps `z -> (az + b)/(cz + d)` and their classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HusError, Result};
use crate::extended::{ExtendedComplex, Infinity};

/// Below this `|ad - bc|` the coefficients describe a constant map.
pub const DEGENERATE_DET: f64 = 1e-14;
/// Absolute tolerance on `Im(a + d)` for the trace to count as real.
pub const TRACE_TOL: f64 = 1e-9;
/// Maps with `||tr| - 2| <= HYP_MARGIN` are rejected as nearly parabolic.
pub const HYP_MARGIN: f64 = 1e-6;
/// Distance to the pole below which the derivative is refused.
pub const POLE_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A Möbius map with `ad - bc = 1`.
///
/// When the trace is real it is stored with nonnegative real part, so a
/// hyperbolic map always has `tr > 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapClass {
    HyperbolicRealTrace,
    NonHyperbolic,
    DegenerateConstant,
}

/// Principal square root, with `sqrt(-x) = +i sqrt(x)` on the cut.
fn principal_sqrt(z: Complex64) -> Complex64 {
    let z = if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    };
    z.sqrt()
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };

    /// Divides raw coefficients by the principal square root of the
    /// determinant, then applies the trace sign convention.
    pub fn normalize(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() > DEGENERATE_DET) {
            return Err(HusError::DegenerateMap {
                det_abs: det.norm(),
            });
        }
        let s = principal_sqrt(det);
        let mut m = MobiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        };
        let tr = m.trace();
        if tr.im.abs() <= TRACE_TOL && tr.re < 0.0 {
            m = MobiusMap {
                a: -m.a,
                b: -m.b,
                c: -m.c,
                d: -m.d,
            };
        }
        Ok(m)
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::normalize(
            Complex64::new(a, 0.0),
            Complex64::new(b, 0.0),
            Complex64::new(c, 0.0),
            Complex64::new(d, 0.0),
        )
    }

    /// `(2z + 1)/(z + 1)`, whose fixed points are the golden ratio and its conjugate.
    pub fn golden() -> Self {
        Self::from_real(2.0, 1.0, 1.0, 1.0).expect("golden map is non-degenerate")
    }

    /// The Pielou logistic map `Az/(Cz + 1)`.
    pub fn pielou(big_a: f64, big_c: f64) -> Result<Self> {
        if !(big_a > 1.0) || !(big_c > 0.0) {
            return Err(HusError::InvalidParameter(format!(
                "pielou map needs A > 1 and C > 0, got A = {big_a}, C = {big_c}"
            )));
        }
        Self::from_real(big_a, 0.0, big_c, 1.0)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn is_linear(&self) -> bool {
        self.c == ZERO
    }

    /// `-d/c`, the preimage of infinity; `None` for linear maps.
    pub fn pole(&self) -> Option<Complex64> {
        (!self.is_linear()).then(|| -self.d / self.c)
    }

    pub fn apply(&self, z: ExtendedComplex) -> ExtendedComplex {
        match z {
            Infinity => {
                if self.is_linear() {
                    Infinity
                } else {
                    ExtendedComplex::new(self.a / self.c)
                }
            }
            ExtendedComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den == ZERO {
                    Infinity
                } else {
                    ExtendedComplex::new((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Applies the map to a finite point.
    pub fn apply_finite(&self, z: Complex64) -> ExtendedComplex {
        self.apply(ExtendedComplex::Finite(z))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        MobiusMap::normalize(a, b, c, d).expect("product of unimodular maps is unimodular")
    }

    /// Adjugate `(d, -b, -c, a)`.
    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `g'(z) = 1/(cz + d)^2`.
    pub fn derivative(&self, z: ExtendedComplex) -> Result<Complex64> {
        let z = z.as_finite().ok_or(HusError::UnsupportedAtInfinity)?;
        let den = self.c * z + self.d;
        if den.norm() <= POLE_TOL * self.c.norm().max(1.0) {
            return Err(HusError::PoleAtPoint);
        }
        Ok((den * den).inv())
    }

    pub fn classify(&self) -> MapClass {
        let tr = self.trace();
        if tr.im.abs() <= TRACE_TOL && tr.re.abs() > 2.0 + HYP_MARGIN {
            MapClass::HyperbolicRealTrace
        } else {
            MapClass::NonHyperbolic
        }
    }

    /// Largest coefficient difference to `other`, allowing the global sign flip.
    pub fn coefficient_distance(&self, other: &MobiusMap) -> f64 {
        let diff = |s: f64| {
            self.coefficients()
                .iter()
                .zip(other.coefficients().iter())
                .map(|(x, y)| (x - y * s).norm())
                .fold(0.0, f64::max)
        };
        diff(1.0).min(diff(-1.0))
    }
}

/// Classifies raw, possibly degenerate, coefficients.
pub fn classify_raw(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> MapClass {
    match MobiusMap::normalize(a, b, c, d) {
        Ok(m) => m.classify(),
        Err(_) => MapClass::DegenerateConstant,
    }
}

/// Map file contents: raw coefficients as `[re, im]` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub d: [f64; 2],
}

impl MapFile {
    pub fn raw(&self) -> [Complex64; 4] {
        let z = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        [z(self.a), z(self.b), z(self.c), z(self.d)]
    }

    pub fn to_map(&self) -> Result<MobiusMap> {
        let [a, b, c, d] = self.raw();
        MobiusMap::normalize(a, b, c, d)
    }

    pub fn from_map(m: &MobiusMap) -> Self {
        let p = |z: Complex64| [z.re, z.im];
        MapFile {
            a: p(m.a),
            b: p(m.b),
            c: p(m.c),
            d: p(m.d),
        }
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| HusError::Parse(e.to_string()))
    }
}

/// Resolves a preset name: `golden`, `pielou` (A = 4, C = 1) or `pielou:A,C`.
pub fn preset(name: &str) -> Result<MobiusMap> {
    let name = name.trim();
    if name == "golden" {
        return Ok(MobiusMap::golden());
    }
    if name == "pielou" {
        return MobiusMap::pielou(4.0, 1.0);
    }
    if let Some(params) = name.strip_prefix("pielou:") {
        let parts: Vec<&str> = params.split(',').collect();
        if parts.len() == 2 {
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| HusError::Parse(format!("pielou parameter `{s}`: {e}")))
            };
            return MobiusMap::pielou(parse(parts[0])?, parse(parts[1])?);
        }
    }
    Err(HusError::Parse(format!("unknown preset `{name}`")))
}
