//! Membership-testable regions: the disks `S(r)` and `T(r)`, images of the
//! concentric circles around the pole under `h`, the avoided region of the
//! dilation and its pull-back, the disk `D_ε̃` and the escape region `E_f`.

mod export;

pub use export::{export_regions, PieceExport, RegionExport};

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HusError, Result};
use crate::extended::{complex_pair, ExtendedComplex};
use crate::hyperbolic::HyperbolicProfile;
use crate::mobius::MobiusMap;

/// Which side of a circle a [`DiskSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Interior,
    Exterior,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Coordinates of the original map `g`.
    Z,
    /// Coordinates of the dilation `f(w) = kw`.
    W,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSpec {
    pub center: Complex64,
    pub radius: f64,
    pub sense: Sense,
}

/// Relative tolerance for [`Sense::Boundary`] membership.
pub const BOUNDARY_TOL: f64 = 1e-9;

impl DiskSpec {
    pub fn new(center: Complex64, radius: f64, sense: Sense) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(HusError::InvalidParameter(format!(
                "disk radius must be finite and positive, got {radius}"
            )));
        }
        Ok(DiskSpec {
            center,
            radius,
            sense,
        })
    }

    pub fn circle(center: Complex64, radius: f64) -> Self {
        DiskSpec {
            center,
            radius,
            sense: Sense::Boundary,
        }
    }

    pub fn with_sense(self, sense: Sense) -> Self {
        DiskSpec { sense, ..self }
    }

    /// Open interior, open exterior, or the circle itself (within
    /// [`BOUNDARY_TOL`] relative to the radius).
    pub fn contains(&self, z: Complex64) -> bool {
        let r = (z - self.center).norm();
        match self.sense {
            Sense::Interior => r < self.radius,
            Sense::Exterior => r > self.radius,
            Sense::Boundary => (r - self.radius).abs() <= BOUNDARY_TOL * self.radius.max(1.0),
        }
    }

    pub fn closed_contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn boundary_residual(&self, z: Complex64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }
}

/// `n` equally spaced points `center + radius e^{2πij/n}`.
pub fn sample_boundary(spec: &DiskSpec, n: usize) -> Vec<Complex64> {
    assert!(n >= 3, "need at least three boundary samples");
    (0..n)
        .map(|j| spec.center + Complex64::from_polar(spec.radius, TAU * j as f64 / n as f64))
        .collect()
}

/// Center and radius of the circle through three points.
pub fn circumcircle(p: Complex64, q: Complex64, r: Complex64) -> Option<(Complex64, f64)> {
    let (b, c) = (q - p, r - p);
    let den = 2.0 * (b.re * c.im - b.im * c.re);
    if den == 0.0 || !den.is_finite() {
        return None;
    }
    let (b2, c2) = (b.norm_sqr(), c.norm_sqr());
    let ux = (c.im * b2 - b.im * c2) / den;
    let uy = (b.re * c2 - c.re * b2) / den;
    let u = Complex64::new(ux, uy);
    Some((p + u, u.norm()))
}

/// Image of a circle under `m`, from the images of three boundary points.
pub fn circle_image(m: &MobiusMap, spec: &DiskSpec) -> Result<DiskSpec> {
    let pts = sample_boundary(&DiskSpec::circle(spec.center, spec.radius), 3);
    let mut img = [Complex64::new(0.0, 0.0); 3];
    for (slot, z) in img.iter_mut().zip(pts) {
        *slot = m.apply_finite(z).as_finite().ok_or(HusError::ImageIsLine)?;
    }
    let (center, radius) = circumcircle(img[0], img[1], img[2]).ok_or(HusError::ImageIsLine)?;
    Ok(DiskSpec::circle(center, radius))
}

/// `S(r) = { z : |z + d/c| > r/|c| }`; infinity is not a member.
pub fn s_contains(p: &HyperbolicProfile, r: f64, z: ExtendedComplex) -> bool {
    z.as_finite()
        .is_some_and(|z| (z - p.pole()).norm() > r / p.c_abs())
}

/// `T(r) = { z : |z - a/c| < 1/(r|c|) }`.
pub fn t_contains(p: &HyperbolicProfile, r: f64, z: ExtendedComplex) -> bool {
    z.as_finite()
        .is_some_and(|z| (z - t_center(p)).norm() < 1.0 / (r * p.c_abs()))
}

/// `a/c = g(∞)`.
pub fn t_center(p: &HyperbolicProfile) -> Complex64 {
    p.map().a() / p.map().c()
}

pub fn s_disk(p: &HyperbolicProfile, r: f64) -> DiskSpec {
    DiskSpec {
        center: p.pole(),
        radius: r / p.c_abs(),
        sense: Sense::Exterior,
    }
}

pub fn t_disk(p: &HyperbolicProfile, r: f64) -> DiskSpec {
    DiskSpec {
        center: t_center(p),
        radius: 1.0 / (r * p.c_abs()),
        sense: Sense::Interior,
    }
}

/// `|tr|/|c| - 1/(r|c|) - r/|c|`: positive iff the closure of `T(r)` lies in `S(r)`.
pub fn closure_nesting_margin(p: &HyperbolicProfile, r: f64) -> Result<f64> {
    let tr = p.trace();
    if !(r > 0.0) || r + 1.0 / r >= tr {
        return Err(HusError::HypothesisViolated(format!(
            "r + 1/r = {} must be below the trace {tr}",
            r + 1.0 / r
        )));
    }
    Ok((tr - 1.0 / r - r) / p.c_abs())
}

/// `h(∂S(1/√k))`: center and radius `1/(k + 1)` in the w-plane.
pub fn image_circle_sqrtk(p: &HyperbolicProfile) -> DiskSpec {
    let rho = 1.0 / (p.k() + 1.0);
    DiskSpec::circle(Complex64::new(rho, 0.0), rho)
}

/// `(k + 3)/(3k + 1)`, the image of the far axis point of `∂S(1 + τ/2)`.
pub fn tau_half_far_point(k: f64) -> f64 {
    (k + 3.0) / (3.0 * k + 1.0)
}

/// `h(∂S(1 + τ/2))`, the circle through `-1` and `(k + 3)/(3k + 1)`.
pub fn image_circle_tau_half(p: &HyperbolicProfile) -> DiskSpec {
    let y = tau_half_far_point(p.k());
    DiskSpec::circle(Complex64::new(0.5 * (y - 1.0), 0.0), 0.5 * (y + 1.0))
}

/// Closed disk `Ĉ \ S(1 + τ/2)` in the z-plane.
pub fn inner_disk(p: &HyperbolicProfile) -> DiskSpec {
    DiskSpec {
        center: p.pole(),
        radius: (1.0 + 0.5 * p.tau()) / p.c_abs(),
        sense: Sense::Interior,
    }
}

/// `(1 - 1/k)^2`, the largest admissible perturbation of the dilation.
pub fn avoided_delta_limit(k: f64) -> f64 {
    let q = 1.0 - 1.0 / k;
    q * q
}

/// The avoided region `R^{t1}_1 ∪ R^{t2}_2 ∪ R^{t3}_3` of `w -> kw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AvoidedRegionW {
    k: f64,
    delta: f64,
    t1: f64,
    t2: f64,
    t3: f64,
}

/// One of the three closed pieces of [`AvoidedRegionW`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AvoidedPiece {
    /// Left half disk around 0.
    LeftHalfDisk,
    /// Strip over the segment `[0, 1/k]`.
    Strip,
    /// Right half disk around `1/k`.
    RightHalfDisk,
}

impl AvoidedRegionW {
    pub fn new(k: f64, delta: f64, t1: f64, t2: f64, t3: f64) -> Result<Self> {
        if !(k > 1.0) {
            return Err(HusError::InvalidParameter(format!("multiplier k = {k} must exceed 1")));
        }
        let limit = avoided_delta_limit(k);
        if !(delta > 0.0) || delta >= limit {
            return Err(HusError::DeltaTooLarge { delta, limit });
        }
        if [t1, t2, t3].iter().any(|t| !(*t >= 1.0) || !t.is_finite()) {
            return Err(HusError::InvalidParameter(format!(
                "piece widths must be at least 1, got ({t1}, {t2}, {t3})"
            )));
        }
        Ok(AvoidedRegionW {
            k,
            delta,
            t1,
            t2,
            t3,
        })
    }

    /// `R^k_1 ∪ R^1_2 ∪ R^1_3`, the avoided region used for `R_g(∞)`.
    pub fn standard(k: f64, delta: f64) -> Result<Self> {
        Self::new(k, delta, k, 1.0, 1.0)
    }

    /// The same width `t` on all three pieces.
    pub fn uniform(k: f64, delta: f64, t: f64) -> Result<Self> {
        Self::new(k, delta, t, t, t)
    }

    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn widths(&self) -> [f64; 3] {
        [self.t1, self.t2, self.t3]
    }

    /// `t δ/(k - 1)` for a piece.
    pub fn half_width(&self, piece: AvoidedPiece) -> f64 {
        let t = match piece {
            AvoidedPiece::LeftHalfDisk => self.t1,
            AvoidedPiece::Strip => self.t2,
            AvoidedPiece::RightHalfDisk => self.t3,
        };
        t * self.delta / (self.k - 1.0)
    }

    pub fn piece_contains(&self, piece: AvoidedPiece, w: Complex64) -> bool {
        let r = self.half_width(piece);
        let kinv = 1.0 / self.k;
        match piece {
            AvoidedPiece::LeftHalfDisk => w.norm() <= r && w.re <= 0.0,
            AvoidedPiece::Strip => w.im.abs() <= r && w.re >= 0.0 && w.re <= kinv,
            AvoidedPiece::RightHalfDisk => (w - kinv).norm() <= r && w.re >= kinv,
        }
    }

    pub fn piece_of(&self, w: Complex64) -> Option<AvoidedPiece> {
        [
            AvoidedPiece::LeftHalfDisk,
            AvoidedPiece::Strip,
            AvoidedPiece::RightHalfDisk,
        ]
        .into_iter()
        .find(|&piece| self.piece_contains(piece, w))
    }

    pub fn contains(&self, w: Complex64) -> bool {
        self.piece_of(w).is_some()
    }

    /// Nearest point of a piece to `w`.
    pub fn piece_nearest(&self, piece: AvoidedPiece, w: Complex64) -> Complex64 {
        let r = self.half_width(piece);
        let kinv = 1.0 / self.k;
        // Half disk `{|u| <= r, s Re u >= 0}` around `center`.
        let half_disk = |center: f64, s: f64| {
            let u = w - center;
            let q = if s * u.re >= 0.0 {
                if u.norm() <= r {
                    u
                } else {
                    u * (r / u.norm())
                }
            } else {
                Complex64::new(0.0, u.im.clamp(-r, r))
            };
            q + center
        };
        match piece {
            AvoidedPiece::LeftHalfDisk => half_disk(0.0, -1.0),
            AvoidedPiece::RightHalfDisk => half_disk(kinv, 1.0),
            AvoidedPiece::Strip => Complex64::new(w.re.clamp(0.0, kinv), w.im.clamp(-r, r)),
        }
    }

    /// Nearest point of the region to `w` and its distance.
    pub fn nearest(&self, w: Complex64) -> (Complex64, f64) {
        [
            AvoidedPiece::LeftHalfDisk,
            AvoidedPiece::Strip,
            AvoidedPiece::RightHalfDisk,
        ]
        .into_iter()
        .map(|piece| {
            let q = self.piece_nearest(piece, w);
            (q, (q - w).norm())
        })
        .fold((w, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best })
    }

    /// Closed boundary polyline of a piece with roughly `n` vertices.
    pub fn piece_outline(&self, piece: AvoidedPiece, n: usize) -> Vec<Complex64> {
        let n = n.max(3);
        let r = self.half_width(piece);
        let kinv = 1.0 / self.k;
        let arc = |center: f64, from: f64, m: usize| -> Vec<Complex64> {
            (0..=m)
                .map(|j| {
                    let th = from + std::f64::consts::PI * j as f64 / m as f64;
                    Complex64::new(center, 0.0) + Complex64::from_polar(r, th)
                })
                .collect()
        };
        let m = n.saturating_sub(1).max(2);
        match piece {
            AvoidedPiece::LeftHalfDisk => arc(0.0, 0.5 * std::f64::consts::PI, m)
                .into_iter()
                .map(|w| Complex64::new(w.re.min(0.0), w.im))
                .collect(),
            AvoidedPiece::RightHalfDisk => arc(kinv, -0.5 * std::f64::consts::PI, m)
                .into_iter()
                .map(|w| Complex64::new(w.re.max(kinv), w.im))
                .collect(),
            AvoidedPiece::Strip => {
                let per_side = (n / 4).max(1);
                let corners = [
                    Complex64::new(0.0, -r),
                    Complex64::new(kinv, -r),
                    Complex64::new(kinv, r),
                    Complex64::new(0.0, r),
                ];
                let mut out = Vec::with_capacity(4 * per_side + 1);
                for i in 0..4 {
                    let (a, b) = (corners[i], corners[(i + 1) % 4]);
                    for j in 0..per_side {
                        out.push(a + (b - a) * (j as f64 / per_side as f64));
                    }
                }
                out.push(corners[0]);
                out
            }
        }
    }
}

/// Membership in the w-plane avoided region.
pub fn avoided_w_contains(region: &AvoidedRegionW, w: Complex64) -> bool {
    region.contains(w)
}

/// Membership in `h^{-1}(region)`; `alpha` (sent to infinity) is never a member.
pub fn avoided_z_contains(p: &HyperbolicProfile, region: &AvoidedRegionW, z: ExtendedComplex) -> bool {
    match p.h_raw(z) {
        ExtendedComplex::Finite(w) => region.contains(w),
        ExtendedComplex::Infinity => false,
    }
}

/// `(k - 1)^2/k`, the largest δ for which `ε̃` is defined.
pub fn epsilon_tilde_delta_limit(k: f64) -> f64 {
    (k - 1.0) * (k - 1.0) / k
}

/// `ε̃ = k^2 δ |alpha - beta|/(k - 1)^3`, radius of the disk `D_ε̃` around the pole.
pub fn epsilon_tilde(p: &HyperbolicProfile, delta: f64) -> Result<f64> {
    let k = p.k();
    let limit = epsilon_tilde_delta_limit(k);
    if !(delta > 0.0) || delta >= limit {
        return Err(HusError::DeltaTooLarge { delta, limit });
    }
    Ok(k * k * delta * p.separation() / (k - 1.0).powi(3))
}

/// `k δ/(k - 1)`, the radius of the ball removed from `E_f`.
pub fn escape_inner_radius(k: f64, delta: f64) -> f64 {
    k * delta / (k - 1.0)
}

/// `E_f`: inside the closed disk bounded by `h(∂S(1 + τ/2))` and outside `B(0, kδ/(k - 1))`.
pub fn escape_region_w_contains(p: &HyperbolicProfile, delta: f64, w: Complex64) -> bool {
    image_circle_tau_half(p).closed_contains(w) && w.norm() > escape_inner_radius(p.k(), delta)
}

/// `h^{-1}(E_f)`.
pub fn escape_region_z_contains(p: &HyperbolicProfile, delta: f64, z: ExtendedComplex) -> bool {
    let in_disk = z.as_finite().is_some_and(|z| inner_disk(p).closed_contains(z));
    in_disk
        && p
            .h_raw(z)
            .as_finite()
            .is_some_and(|w| w.norm() > escape_inner_radius(p.k(), delta))
}

/// Outcome of testing a batch of sample points against a region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub id: String,
    pub samples: usize,
    pub members: usize,
    pub witnesses: Vec<[f64; 2]>,
}

impl RegionReport {
    pub const MAX_WITNESSES: usize = 10;

    /// Counts members among `points`, keeping the first few as witnesses.
    pub fn survey<I, F>(id: impl Into<String>, points: I, mut member: F) -> Self
    where
        I: IntoIterator<Item = Complex64>,
        F: FnMut(Complex64) -> bool,
    {
        let mut report = RegionReport {
            id: id.into(),
            samples: 0,
            members: 0,
            witnesses: Vec::new(),
        };
        for z in points {
            report.samples += 1;
            if member(z) {
                report.members += 1;
                if report.witnesses.len() < Self::MAX_WITNESSES {
                    report.witnesses.push(complex_pair(z));
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn golden() -> HyperbolicProfile {
        HyperbolicProfile::new(&MobiusMap::golden()).unwrap()
    }

    fn pt(re: f64, im: f64) -> ExtendedComplex {
        ExtendedComplex::finite(re, im)
    }

    #[test]
    fn s_and_t_examples() {
        let p = golden();
        assert!(s_contains(&p, 2.0, pt(2.0, 0.0)));
        for r in [0.1, 1.0, 5.0] {
            assert!(!s_contains(&p, r, ExtendedComplex::Finite(p.pole())));
        }
        assert!(!s_contains(&p, 2.0, ExtendedComplex::Infinity));
        assert!(t_contains(&p, 2.0, pt(2.1, 0.0)));
        assert!(t_contains(&p, 2.0, pt(2.0, 0.0)));
        assert!(!t_contains(&p, 2.0, pt(3.0, 0.0)));
        assert!(!t_contains(&p, 2.0, ExtendedComplex::Infinity));
    }

    #[test]
    fn boundaries_are_strict() {
        let p = golden();
        // |z + 1| = 2 exactly.
        assert!(!s_contains(&p, 2.0, pt(1.0, 0.0)));
        // |z - 2| = 1/2 exactly.
        assert!(!t_contains(&p, 2.0, pt(2.5, 0.0)));
    }

    #[test]
    fn nesting_examples() {
        let p = golden();
        assert!((closure_nesting_margin(&p, 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((closure_nesting_margin(&p, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // r + 1/r = 3 at r = (3 + √5)/2.
        let edge = 0.5 * (3.0 + 5f64.sqrt());
        assert!(closure_nesting_margin(&p, edge * (1.0 - 1e-9)).unwrap() < 1e-8);
        assert!(matches!(
            closure_nesting_margin(&p, edge * 1.01),
            Err(HusError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn image_circle_examples() {
        let p = golden();
        let k = p.k();
        let sq = image_circle_sqrtk(&p);
        assert!((sq.center.re - 0.127_322).abs() < 1e-6 && (sq.radius - 0.127_322).abs() < 1e-6);
        assert!(sq.contains(Complex64::new(0.0, 0.0)));
        assert!(sq.contains(Complex64::new(2.0 / (k + 1.0), 0.0)));

        let th = image_circle_tau_half(&p);
        assert!((th.center.re + 0.271_497).abs() < 1e-6);
        assert!((th.radius - 0.728_503).abs() < 1e-6);
        assert!(th.contains(Complex64::new(-1.0, 0.0)));
        for k in [1.0001, 1.5, 3.0, 10.0, 1e4] {
            let y = tau_half_far_point(k);
            assert!(0.5 * (y + 1.0) + 0.5 * (1.0 - y) <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn closed_forms_agree_with_three_point_images() {
        let p = golden();
        let sq_z = DiskSpec::circle(p.pole(), 1.0 / (p.sqrt_k() * p.c_abs()));
        let th_z = DiskSpec::circle(p.pole(), (1.0 + 0.5 * p.tau()) / p.c_abs());
        for (z_circle, closed) in [(sq_z, image_circle_sqrtk(&p)), (th_z, image_circle_tau_half(&p))] {
            let img = circle_image(p.h(), &z_circle).unwrap();
            assert!((img.center - closed.center).norm() < 1e-9);
            assert!((img.radius - closed.radius).abs() < 1e-9);
            for z in sample_boundary(&z_circle, 64) {
                let w = p.h_raw(ExtendedComplex::Finite(z)).as_finite().unwrap();
                assert!(closed.boundary_residual(w) < 1e-9);
            }
        }
        // Pulling the w-circle back lands on ∂S(1/√k).
        for w in sample_boundary(&image_circle_sqrtk(&p), 64) {
            let z = p.h_inv().apply_finite(w);
            if let Some(z) = z.as_finite() {
                assert!(sq_z.boundary_residual(z) < 1e-9);
            }
        }
    }

    #[test]
    fn sample_boundary_examples() {
        let unit = DiskSpec::circle(Complex64::new(0.0, 0.0), 1.0);
        let pts = sample_boundary(&unit, 4);
        let expect = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (z, (re, im)) in pts.iter().zip(expect) {
            assert!((z - Complex64::new(re, im)).norm() < 1e-15);
        }
        let spec = DiskSpec::circle(Complex64::new(0.3, -2.0), 0.7);
        for z in sample_boundary(&spec, 37) {
            assert!(spec.boundary_residual(z) <= 1e-12);
        }
    }

    #[test]
    fn circle_image_detects_lines() {
        let p = golden();
        // ∂S(1/√k) passes through... nothing singular for h; but a circle through alpha does.
        let through_alpha = DiskSpec::circle(p.alpha() - 1.0, 1.0);
        assert_eq!(circle_image(p.h(), &through_alpha), Err(HusError::ImageIsLine));
        assert!(circumcircle(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0)
        )
        .is_none());
    }

    #[test]
    fn avoided_w_examples() {
        let k = golden().k();
        let delta = 0.01;
        let r = AvoidedRegionW::standard(k, delta).unwrap();
        assert!(r.contains(Complex64::new(1.0 / (2.0 * k), 0.0)));
        assert!(!r.contains(Complex64::new(1.0, 0.0)));
        assert!(1.0 / k + delta / (k - 1.0) < 1.0);
        assert!(r.contains(Complex64::new(-0.0117, 0.0)));
        assert_eq!(r.piece_of(Complex64::new(-0.0117, 0.0)), Some(AvoidedPiece::LeftHalfDisk));
        assert!((r.half_width(AvoidedPiece::LeftHalfDisk) - 0.011_708).abs() < 1e-6);
        assert!(!r.contains(Complex64::new(-0.0118, 0.0)));
    }

    #[test]
    fn avoided_region_validation() {
        let k = 4.0;
        assert!(matches!(
            AvoidedRegionW::standard(k, 0.6),
            Err(HusError::DeltaTooLarge { .. })
        ));
        assert!(AvoidedRegionW::standard(k, 0.5).is_ok());
        assert!(AvoidedRegionW::new(k, 0.1, 0.5, 1.0, 1.0).is_err());
        assert!(AvoidedRegionW::new(1.0, 0.1, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn pieces_are_closed() {
        let r = AvoidedRegionW::uniform(5.0, 0.1, 1.0).unwrap();
        let hw = r.half_width(AvoidedPiece::Strip);
        for w in [
            Complex64::new(0.0, hw),
            Complex64::new(0.2, -hw),
            Complex64::new(0.2 + hw, 0.0),
            Complex64::new(-hw, 0.0),
        ] {
            assert!(r.contains(w), "{w}");
        }
        let mut rng = SplitMix64::new(3);
        for _ in 0..2000 {
            let w = Complex64::new(rng.uniform(-0.1, 0.4), rng.uniform(-0.1, 0.1));
            let jiggle = Complex64::new(1e-15, -1e-15);
            if r.contains(w) && r.contains(w + jiggle * 1e3) {
                assert!(r.contains(w + jiggle));
            }
        }
    }

    #[test]
    fn outlines_lie_on_piece_boundaries() {
        let r = AvoidedRegionW::standard(6.0, 0.05).unwrap();
        for piece in [AvoidedPiece::LeftHalfDisk, AvoidedPiece::Strip, AvoidedPiece::RightHalfDisk] {
            let outline = r.piece_outline(piece, 16);
            assert!(outline.len() >= 3);
            for w in outline {
                let shrunk = Complex64::new(w.re, w.im * (1.0 - 1e-12));
                let toward = match piece {
                    AvoidedPiece::RightHalfDisk => Complex64::new(1.0 / r.k(), 0.0),
                    _ => Complex64::new(0.0, 0.0),
                };
                let w_in = toward + (shrunk - toward) * (1.0 - 1e-12);
                assert!(r.piece_contains(piece, w_in), "{piece:?} {w}");
            }
        }
    }

    #[test]
    fn standard_widths_admit_an_entry() {
        // Just right of the imaginary axis, just above the strip.
        let (k, delta) = (golden().k(), 0.01);
        let r = AvoidedRegionW::standard(k, delta).unwrap();
        let s = delta / (k - 1.0);
        let w0 = Complex64::new(1e-9, s * (1.0 + 1e-9));
        assert!(!r.contains(w0));
        let eta = Complex64::new(-2.0 * k * 1e-9, -2.0 * k * s * 1e-9);
        assert!(eta.norm() < delta);
        assert!(r.contains(k * w0 + eta));

        let uniform = AvoidedRegionW::uniform(k, delta, 1.0).unwrap();
        assert!(!uniform.contains(w0));
        for j in 0..360 {
            let eta = Complex64::from_polar(delta, TAU * j as f64 / 360.0);
            assert!(!uniform.contains(k * w0 + eta));
        }
    }

    #[test]
    fn nearest_point_matches_brute_force() {
        let r = AvoidedRegionW::standard(4.0, 0.2).unwrap();
        let mut rng = SplitMix64::new(21);
        let grid: Vec<Complex64> = (0..=400)
            .flat_map(|i| (0..=400).map(move |j| Complex64::new(-0.3 + 0.002 * i as f64, -0.4 + 0.002 * j as f64)))
            .filter(|&w| r.contains(w))
            .collect();
        for _ in 0..200 {
            let w = Complex64::new(rng.uniform(-0.6, 0.9), rng.uniform(-0.6, 0.6));
            let (q, d) = r.nearest(w);
            assert!(r.contains(q) || (q - w).norm() < 1e-12 || {
                let nudged = q + (w - q) * -1e-12;
                r.contains(nudged)
            });
            let brute = grid.iter().map(|g| (g - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(d <= brute + 1e-12, "{w}: {d} vs {brute}");
            assert!(brute <= d + 0.003, "{w}: {d} vs {brute}");
            if r.contains(w) {
                assert_eq!(d, 0.0);
            }
        }
    }

    #[test]
    fn avoided_z_examples() {
        let p = golden();
        let r = AvoidedRegionW::standard(p.k(), 0.01).unwrap();
        assert!(avoided_z_contains(&p, &r, ExtendedComplex::Finite(p.pole())));
        assert!(avoided_z_contains(&p, &r, ExtendedComplex::Finite(p.beta())));
        assert!(!avoided_z_contains(&p, &r, ExtendedComplex::Finite(p.alpha())));
    }

    #[test]
    fn epsilon_tilde_examples() {
        let p = golden();
        let e = epsilon_tilde(&p, 0.01).unwrap();
        assert!((e - 0.005_236).abs() < 1e-6);
        let e2 = epsilon_tilde(&p, 0.005).unwrap();
        assert!((e - 2.0 * e2).abs() < 1e-15);
        let k = p.k();
        for delta in [1e-4, 1e-2, 0.5, 2.0] {
            let et = epsilon_tilde(&p, delta).unwrap();
            let first = k * k * delta * p.separation() / ((k - 1.0) * ((k - 1.0).powi(2) - k * delta));
            assert!(et < first);
        }
        assert!(matches!(epsilon_tilde(&p, 6.0), Err(HusError::DeltaTooLarge { .. })));
    }

    #[test]
    fn shrunken_d_eps_tilde_lies_in_avoided_region() {
        let p = golden();
        let delta = 0.01;
        let r = AvoidedRegionW::standard(p.k(), delta).unwrap();
        let e = epsilon_tilde(&p, delta).unwrap();
        let disk = DiskSpec::circle(p.pole(), 0.999 * e);
        for z in sample_boundary(&disk, 32) {
            assert!(avoided_z_contains(&p, &r, ExtendedComplex::Finite(z)));
        }
    }

    #[test]
    fn escape_region_examples() {
        let p = golden();
        let delta = 0.01;
        assert!(!escape_region_w_contains(&p, delta, Complex64::new(0.0, 0.0)));
        assert!(escape_region_w_contains(&p, delta, Complex64::new(0.3, 0.0)));
        assert!(!escape_region_w_contains(&p, delta, Complex64::new(1.1, 0.0)));
        // Consistency of the two frames.
        let mut rng = SplitMix64::new(11);
        for _ in 0..500 {
            let z = rng.in_disk(p.pole(), 2.0);
            let w = p.h_raw(ExtendedComplex::Finite(z)).as_finite().unwrap();
            let near_edge = (inner_disk(&p).boundary_residual(z) < 1e-9)
                || (w.norm() - escape_inner_radius(p.k(), delta)).abs() < 1e-9;
            if !near_edge {
                assert_eq!(
                    escape_region_z_contains(&p, delta, ExtendedComplex::Finite(z)),
                    escape_region_w_contains(&p, delta, w)
                );
            }
        }
    }

    #[test]
    fn remark_disk_contains_unit_disk() {
        let p = golden();
        assert!((p.trace() / 2.0) / p.c_abs() > 1.0 / p.c_abs());
    }

    #[test]
    fn survey_counts() {
        let pts = (0..20).map(|i| Complex64::new(i as f64, 0.0));
        let rep = RegionReport::survey("half", pts, |z| z.re >= 5.0);
        assert_eq!(rep.samples, 20);
        assert_eq!(rep.members, 15);
        assert_eq!(rep.witnesses.len(), RegionReport::MAX_WITNESSES);
    }
}
