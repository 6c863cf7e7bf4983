//! Fixed points, multiplier and the conjugation to a dilation for
//! hyperbolic maps, together with closed forms for images under the
//! conjugator `h(z) = (z - beta)/(z - alpha)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HusError, Result};
use crate::extended::{complex_pair, ExtendedComplex};
use crate::mobius::{MapClass, MobiusMap};

/// Relative separation of the fixed points below which the map is refused.
pub const FIXED_POINT_SEPARATION: f64 = 1e-8;
/// Coefficient tolerance for the conjugation check.
pub const CONJUGATION_TOL: f64 = 1e-9;

/// Derived data of a hyperbolic map with `c != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicProfile {
    g: MobiusMap,
    alpha: Complex64,
    beta: Complex64,
    k: f64,
    tau: f64,
    h: MobiusMap,
    h_inv: MobiusMap,
}

/// A point `t alpha + (1 - t) beta` of the line through the fixed points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisPoint {
    pub t: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceIdentities {
    /// `|alpha - beta|/(k - 1)`, the radius of `∂S(1/√k)`.
    pub radius_sqrtk: f64,
    /// `√k |alpha - beta|/(k - 1)`, equal to `1/|c|`.
    pub inv_c_abs: f64,
}

/// Residuals of the defining identities of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileResiduals {
    pub fixed_alpha: f64,
    pub fixed_beta: f64,
    pub multiplier_beta: f64,
    pub multiplier_alpha: f64,
    pub product_identity: f64,
    pub trace_identity: f64,
}

impl ProfileResiduals {
    pub fn max(&self) -> f64 {
        [
            self.fixed_alpha,
            self.fixed_beta,
            self.multiplier_beta,
            self.multiplier_alpha,
            self.product_identity,
            self.trace_identity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl HyperbolicProfile {
    pub fn new(g: &MobiusMap) -> Result<Self> {
        if g.classify() != MapClass::HyperbolicRealTrace {
            return Err(HusError::NotHyperbolic);
        }
        if g.is_linear() {
            return Err(HusError::LinearMap);
        }
        let (c, d) = (g.c(), g.d());
        let tr = g.trace().re;
        let disc = (tr * tr - 4.0).sqrt();
        // c*alpha + d = (tr + disc)/2 and (c*alpha + d)(c*beta + d) = 1.
        let lambda = 0.5 * (tr + disc);
        let mut alpha = (Complex64::new(lambda, 0.0) - d) / c;
        let mut beta = (Complex64::new(1.0 / lambda, 0.0) - d) / c;
        let sep = (alpha - beta).norm();
        if sep < FIXED_POINT_SEPARATION * 1f64.max(alpha.norm()).max(beta.norm()) {
            return Err(HusError::NotHyperbolic);
        }
        let attracting = |z: Complex64| {
            g.derivative(ExtendedComplex::Finite(z))
                .map(|v| v.norm() < 1.0)
                .unwrap_or(false)
        };
        if !attracting(alpha) && attracting(beta) {
            std::mem::swap(&mut alpha, &mut beta);
        }
        let cb = c * beta + d;
        let k = (cb * cb).inv().re;
        let one = Complex64::new(1.0, 0.0);
        let h = MobiusMap::normalize(one, -beta, one, -alpha)?;
        Ok(HyperbolicProfile {
            g: *g,
            alpha,
            beta,
            k,
            tau: tr - 2.0,
            h,
            h_inv: h.inverse(),
        })
    }

    pub fn map(&self) -> &MobiusMap {
        &self.g
    }
    /// Attracting fixed point.
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }
    /// Repelling fixed point.
    pub fn beta(&self) -> Complex64 {
        self.beta
    }
    /// Multiplier `k = g'(beta) > 1`.
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn sqrt_k(&self) -> f64 {
        self.k.sqrt()
    }
    /// `tr(g) - 2`.
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn trace(&self) -> f64 {
        self.tau + 2.0
    }
    pub fn pole(&self) -> Complex64 {
        -self.g.d() / self.g.c()
    }
    pub fn c_abs(&self) -> f64 {
        self.g.c().norm()
    }
    /// `|alpha - beta|`.
    pub fn separation(&self) -> f64 {
        (self.alpha - self.beta).norm()
    }
    /// Normalized conjugator.
    pub fn h(&self) -> &MobiusMap {
        &self.h
    }
    pub fn h_inv(&self) -> &MobiusMap {
        &self.h_inv
    }

    /// `h(z) = (z - beta)/(z - alpha)` evaluated literally.
    pub fn h_raw(&self, z: ExtendedComplex) -> ExtendedComplex {
        match z {
            ExtendedComplex::Infinity => ExtendedComplex::real(1.0),
            ExtendedComplex::Finite(z) => {
                let den = z - self.alpha;
                if den.norm() == 0.0 {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::new((z - self.beta) / den)
                }
            }
        }
    }

    /// `h^{-1}(w) = (alpha w - beta)/(w - 1)` evaluated literally.
    pub fn h_inv_raw(&self, w: ExtendedComplex) -> ExtendedComplex {
        match w {
            ExtendedComplex::Infinity => ExtendedComplex::Finite(self.alpha),
            ExtendedComplex::Finite(w) => {
                let den = w - 1.0;
                if den.norm() == 0.0 {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::new((self.alpha * w - self.beta) / den)
                }
            }
        }
    }

    /// `|h'(z)| = |alpha - beta|/|z - alpha|^2`.
    pub fn h_derivative_abs(&self, z: Complex64) -> f64 {
        self.separation() / (z - self.alpha).norm_sqr()
    }

    pub fn residuals(&self) -> ProfileResiduals {
        use crate::extended::chordal_distance;
        let g = &self.g;
        let fin = ExtendedComplex::Finite;
        let deriv = |z| g.derivative(fin(z)).unwrap_or(Complex64::new(f64::INFINITY, 0.0));
        let (c, d) = (g.c(), g.d());
        let sk = self.sqrt_k();
        ProfileResiduals {
            fixed_alpha: chordal_distance(g.apply(fin(self.alpha)), fin(self.alpha)),
            fixed_beta: chordal_distance(g.apply(fin(self.beta)), fin(self.beta)),
            multiplier_beta: (deriv(self.beta) - self.k).norm() / self.k,
            multiplier_alpha: (deriv(self.alpha) - 1.0 / self.k).norm(),
            product_identity: ((c * self.alpha + d) * (c * self.beta + d) - 1.0).norm(),
            trace_identity: (Complex64::new(sk + 1.0 / sk, 0.0) - g.trace()).norm(),
        }
    }

    /// The multiplier, after confirming `h ∘ g ∘ h^{-1} = diag(√k, 1/√k)`.
    pub fn to_dilation(&self) -> Result<f64> {
        let residual = self.conjugation_residual();
        if residual > CONJUGATION_TOL {
            return Err(HusError::ConjugationMismatch { residual });
        }
        Ok(self.k)
    }

    pub fn conjugation_residual(&self) -> f64 {
        let conj = self.h.compose(&self.g.compose(&self.h_inv));
        let sk = self.sqrt_k();
        let dilation = MobiusMap::from_real(sk, 0.0, 0.0, 1.0 / sk).expect("k > 0");
        conj.coefficient_distance(&dilation)
    }

    pub fn axis_point(&self, t: f64) -> AxisPoint {
        AxisPoint {
            t,
            value: self.alpha * t + self.beta * (1.0 - t),
        }
    }

    /// Parameter of the pole on the axis, `-1/(k - 1)`.
    pub fn pole_axis_parameter(&self) -> f64 {
        -1.0 / (self.k - 1.0)
    }

    /// `h(p_t) = t/(t - 1)`.
    pub fn h_of_axis_point(&self, t: f64) -> Result<f64> {
        if t == 1.0 {
            return Err(HusError::MapsToInfinity);
        }
        Ok(t / (t - 1.0))
    }

    /// `-p_t - 2d/c`, the reflection of `p_t` through the pole.
    pub fn mirror_point(&self, t: f64) -> Complex64 {
        -self.axis_point(t).value - self.g.d() * 2.0 / self.g.c()
    }

    /// `h(-p_t - 2d/c) = (tk - t + 2)/(tk - t + k + 1)`.
    pub fn h_of_mirror_point(&self, t: f64) -> Result<f64> {
        let k = self.k;
        let den = t * k - t + k + 1.0;
        if den.abs() <= 1e-12 * (t.abs() * (k + 1.0) + k + 1.0) {
            return Err(HusError::MapsToInfinity);
        }
        Ok((t * k - t + 2.0) / den)
    }

    /// `h(-d/c) = 1/k`.
    pub fn h_of_pole(&self) -> f64 {
        1.0 / self.k
    }

    pub fn distance_identities(&self) -> DistanceIdentities {
        let sep = self.separation();
        DistanceIdentities {
            radius_sqrtk: sep / (self.k - 1.0),
            inv_c_abs: self.sqrt_k() * sep / (self.k - 1.0),
        }
    }

    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            alpha: complex_pair(self.alpha),
            beta: complex_pair(self.beta),
            k: self.k,
            tau: self.tau,
            pole: complex_pair(self.pole()),
        }
    }
}

/// JSON form of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSummary {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub k: f64,
    pub tau: f64,
    pub pole: [f64; 2],
}

/// Distance of `z` from the line through `p` and `q`, scaled by
/// `max(1, |z - p|, |q - p|)`.
pub fn collinearity_residual(p: Complex64, q: Complex64, z: Complex64) -> f64 {
    let dir = q - p;
    let off = z - p;
    let dist = (off * dir.conj()).im.abs() / dir.norm();
    dist / 1f64.max(off.norm()).max(dir.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::chordal_distance;

    fn golden() -> HyperbolicProfile {
        HyperbolicProfile::new(&MobiusMap::golden()).unwrap()
    }

    const S5: f64 = 2.236_067_977_499_79;

    #[test]
    fn golden_profile() {
        let p = golden();
        assert!((p.alpha() - Complex64::new((1.0 + S5) / 2.0, 0.0)).norm() < 1e-12);
        assert!((p.beta() - Complex64::new((1.0 - S5) / 2.0, 0.0)).norm() < 1e-12);
        assert!((p.k() - 6.854_101_966_249_685).abs() < 1e-12);
        assert!((p.tau() - 1.0).abs() < 1e-15);
        // alpha + beta = (a - d)/c, alpha beta = -b/c.
        assert!((p.alpha() + p.beta() - 1.0).norm() < 1e-12);
        assert!((p.alpha() * p.beta() + 1.0).norm() < 1e-12);
        assert!(p.residuals().max() < 1e-12);
    }

    #[test]
    fn pielou_profile() {
        let p = HyperbolicProfile::new(&MobiusMap::pielou(4.0, 1.0).unwrap()).unwrap();
        assert!((p.alpha() - 3.0).norm() < 1e-12);
        assert!(p.beta().norm() < 1e-12);
        assert!((p.k() - 4.0).abs() < 1e-12);
        assert!((p.pole() + 1.0).norm() < 1e-12);
        assert!((p.h_raw(ExtendedComplex::real(-1.0)).as_finite().unwrap() - 0.25).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hyperbolic_and_linear() {
        let elliptic = MobiusMap::from_real(1.0, 1.0, -1.0, 0.0).unwrap();
        assert_eq!(HyperbolicProfile::new(&elliptic), Err(HusError::NotHyperbolic));
        let linear = MobiusMap::from_real(2.0, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(HyperbolicProfile::new(&linear), Err(HusError::LinearMap));
    }

    #[test]
    fn dilation_examples() {
        let p = golden();
        assert!((p.to_dilation().unwrap() - p.k()).abs() < 1e-15);
        let z = ExtendedComplex::real(0.0);
        let lhs = p.h_raw(p.map().apply(z)).as_finite().unwrap();
        let rhs = p.h_raw(z).as_finite().unwrap() * p.k();
        assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn axis_examples() {
        let p = golden();
        assert_eq!(p.axis_point(0.0).value, p.beta());
        assert_eq!(p.axis_point(1.0).value, p.alpha());
        let pole_t = p.pole_axis_parameter();
        assert!((p.axis_point(pole_t).value - p.pole()).norm() < 1e-12);
    }

    #[test]
    fn h_on_axis_examples() {
        let p = golden();
        assert_eq!(p.h_of_axis_point(0.0).unwrap(), 0.0);
        assert_eq!(p.h_of_axis_point(0.5).unwrap(), -1.0);
        assert_eq!(p.h_of_axis_point(2.0).unwrap(), 2.0);
        assert_eq!(p.h_of_axis_point(1.0), Err(HusError::MapsToInfinity));
        for t in [-3.0, -0.4, 0.0, 0.3, 0.5, 2.0, 7.5] {
            let literal = p.h_raw(ExtendedComplex::Finite(p.axis_point(t).value));
            let formula = ExtendedComplex::real(p.h_of_axis_point(t).unwrap());
            assert!(chordal_distance(literal, formula) < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn h_on_mirror_examples() {
        let p = golden();
        let k = p.k();
        assert!((p.h_of_mirror_point(0.0).unwrap() - 2.0 / (k + 1.0)).abs() < 1e-15);
        assert!((p.h_of_mirror_point(0.5).unwrap() - (k + 3.0) / (3.0 * k + 1.0)).abs() < 1e-15);
        assert!((p.h_of_mirror_point(0.0).unwrap() - 0.254_644).abs() < 1e-6);
        let bad = -(k + 1.0) / (k - 1.0);
        assert_eq!(p.h_of_mirror_point(bad), Err(HusError::MapsToInfinity));
        for t in [-3.0, 0.0, 0.5, 1.0, 4.0] {
            let literal = p.h_raw(ExtendedComplex::Finite(p.mirror_point(t)));
            let formula = ExtendedComplex::real(p.h_of_mirror_point(t).unwrap());
            assert!(chordal_distance(literal, formula) < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn pole_image() {
        let p = golden();
        assert!((p.h_of_pole() - 0.145_898).abs() < 1e-6);
        let literal = p.h_raw(ExtendedComplex::Finite(p.pole())).as_finite().unwrap();
        assert!((literal - p.h_of_pole()).norm() < 1e-12);
        let normalized = p.h().apply_finite(p.pole()).as_finite().unwrap();
        assert!((normalized - p.h_of_pole()).norm() < 1e-12);
    }

    #[test]
    fn distance_examples() {
        let p = golden();
        let ids = p.distance_identities();
        assert!((ids.inv_c_abs - 1.0).abs() < 1e-12);
        assert!((ids.radius_sqrtk - 0.381_966_011_250_105).abs() < 1e-12);
        let cb = p.map().c() * p.beta() + p.map().d();
        assert!((ids.radius_sqrtk - (cb / p.map().c()).norm()).abs() < 1e-12);
        assert!((ids.inv_c_abs / ids.radius_sqrtk - p.sqrt_k()).abs() < 1e-12);
    }

    #[test]
    fn summary_json() {
        let s = serde_json::to_value(golden().summary()).unwrap();
        assert!(s["alpha"].is_array() && s["pole"].is_array());
        assert_eq!(s["tau"], serde_json::json!(1.0));
    }
}
