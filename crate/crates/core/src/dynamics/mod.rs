//! Perturbed orbits of `g`, their shadowing orbits, and the stability bounds
//! evaluated along them.

mod bounds;
mod dilation;

pub use bounds::*;
pub use dilation::*;

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HusError, Result};
use crate::extended::ExtendedComplex;
use crate::hyperbolic::HyperbolicProfile;
use crate::mobius::MobiusMap;
use crate::regions::{self, AvoidedRegionW};
use crate::rng::{mix64, SplitMix64};

/// Points this close to the pole (relative to `max(1, |pole|)`) are mapped to infinity.
pub const NEAR_POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    None,
    UniformDisk,
    BoundaryAdversarial,
    RadialOutward,
}

impl FromStr for ModelKind {
    type Err = HusError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ModelKind::None),
            "uniform" => Ok(ModelKind::UniformDisk),
            "boundary" => Ok(ModelKind::BoundaryAdversarial),
            "outward" => Ok(ModelKind::RadialOutward),
            other => Err(HusError::Parse(format!("unknown perturbation model `{other}`"))),
        }
    }
}

/// A sampler of perturbations `η` with `|η| <= eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationModel {
    pub kind: ModelKind,
    pub eps: f64,
    pub seed: u64,
}

impl PerturbationModel {
    pub fn new(kind: ModelKind, eps: f64, seed: u64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(HusError::InvalidParameter(format!(
                "perturbation size must be finite and nonnegative, got {eps}"
            )));
        }
        Ok(PerturbationModel { kind, eps, seed })
    }

    pub fn none() -> Self {
        PerturbationModel {
            kind: ModelKind::None,
            eps: 0.0,
            seed: 0,
        }
    }

    /// Perturbation for `step`. `outward` is the direction used by
    /// [`ModelKind::RadialOutward`]; a zero direction falls back to `+1`.
    pub fn draw(&self, step: u64, outward: Complex64) -> Complex64 {
        let mut rng = SplitMix64::keyed(self.seed, step);
        match self.kind {
            ModelKind::None => Complex64::new(0.0, 0.0),
            ModelKind::UniformDisk => rng.in_disk(Complex64::new(0.0, 0.0), self.eps),
            ModelKind::BoundaryAdversarial => Complex64::from_polar(self.eps, rng.angle()),
            ModelKind::RadialOutward => {
                let n = outward.norm();
                if n > 0.0 && n.is_finite() {
                    outward * (self.eps / n)
                } else {
                    Complex64::new(self.eps, 0.0)
                }
            }
        }
    }
}

/// Seed of trial `trial` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    mix64(seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ mix64(trial))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionTag {
    /// In `S(1 + t)`.
    S,
    /// Outside `S(1 + t)` and outside the avoided region.
    Exterior,
    /// In the avoided region `R_g(∞)`, or at infinity.
    Avoided,
    /// Back in `S(1 + t)` after an earlier visit outside it.
    Escaped,
}

/// Classifies orbit points against `S(1 + t)` and `R_g(∞)`.
#[derive(Debug, Clone)]
pub struct RegionTagger<'a> {
    profile: &'a HyperbolicProfile,
    t: f64,
    avoided: Option<AvoidedRegionW>,
}

impl<'a> RegionTagger<'a> {
    /// `delta` selects the avoided region; `None` or an inadmissible value skips it.
    pub fn new(profile: &'a HyperbolicProfile, t: f64, delta: Option<f64>) -> Self {
        let avoided = delta.and_then(|d| AvoidedRegionW::standard(profile.k(), d).ok());
        RegionTagger {
            profile,
            t,
            avoided,
        }
    }

    pub fn tag_point(&self, z: ExtendedComplex) -> RegionTag {
        if z.is_infinite() {
            RegionTag::Avoided
        } else if regions::s_contains(self.profile, 1.0 + self.t, z) {
            RegionTag::S
        } else if self
            .avoided
            .is_some_and(|r| regions::avoided_z_contains(self.profile, &r, z))
        {
            RegionTag::Avoided
        } else {
            RegionTag::Exterior
        }
    }

    pub fn tag_orbit(&self, points: &[ExtendedComplex]) -> Vec<RegionTag> {
        let mut left = false;
        points
            .iter()
            .map(|&z| match self.tag_point(z) {
                RegionTag::S if left => RegionTag::Escaped,
                RegionTag::S => RegionTag::S,
                other => {
                    left = true;
                    other
                }
            })
            .collect()
    }
}

/// A (possibly perturbed) orbit with optional shadow, deviations and bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub points: Vec<ExtendedComplex>,
    /// `etas[i] = a_{i+1} - g(a_i)`.
    pub etas: Vec<Complex64>,
    pub eta_abs: Vec<f64>,
    pub shadow: Option<Vec<ExtendedComplex>>,
    pub deviations: Vec<f64>,
    pub bounds: Vec<f64>,
    pub regions: Vec<RegionTag>,
    /// Index of the first point at infinity, when the orbit was truncated there.
    pub infinity_at: Option<usize>,
}

impl OrbitRecord {
    fn from_points(points: Vec<ExtendedComplex>, etas: Vec<Complex64>) -> Self {
        let eta_abs = etas.iter().map(|e| e.norm()).collect();
        OrbitRecord {
            points,
            etas,
            eta_abs,
            shadow: None,
            deviations: Vec::new(),
            bounds: Vec::new(),
            regions: Vec::new(),
            infinity_at: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_truncated(&self) -> bool {
        self.infinity_at.is_some()
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }

    /// Largest `deviation - bound` over the recorded steps (negative when every bound holds).
    pub fn worst_excess(&self) -> f64 {
        self.deviations
            .iter()
            .zip(&self.bounds)
            .map(|(d, b)| d - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn tag(&mut self, tagger: &RegionTagger<'_>) {
        self.regions = tagger.tag_orbit(&self.points);
    }

    /// One JSON object per step.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.points.iter().enumerate() {
            let line = StepLine {
                i,
                a: *a,
                eta_abs: if i == 0 { 0.0 } else { self.eta_abs[i - 1] },
                b: self.shadow.as_ref().and_then(|s| s.get(i).copied()),
                dev: self.deviations.get(i).copied(),
                bound: self.bounds.get(i).copied(),
                region: self.regions.get(i).copied(),
            };
            let _ = writeln!(out, "{}", serde_json::to_string(&line).expect("step line"));
        }
        out
    }
}

#[derive(Serialize)]
struct StepLine {
    i: usize,
    a: ExtendedComplex,
    eta_abs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<ExtendedComplex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    region: Option<RegionTag>,
}

/// `b_{i+1} = g(b_i)` for `n` steps, passing through infinity.
pub fn exact_orbit(g: &MobiusMap, z0: ExtendedComplex, n: usize) -> OrbitRecord {
    let mut points = Vec::with_capacity(n + 1);
    points.push(z0);
    for i in 0..n {
        points.push(g.apply(points[i]));
    }
    OrbitRecord::from_points(points, vec![Complex64::new(0.0, 0.0); n])
}

fn near_pole(g: &MobiusMap, z: Complex64) -> bool {
    g.pole()
        .is_some_and(|p| (z - p).norm() <= NEAR_POLE_TOL * p.norm().max(1.0))
}

/// `a_{i+1} = g(a_i) + η_i`, truncated (and flagged) at the first point at infinity.
pub fn perturbed_orbit(
    g: &MobiusMap,
    z0: ExtendedComplex,
    n: usize,
    model: &PerturbationModel,
) -> OrbitRecord {
    let attractor = HyperbolicProfile::new(g).ok().map(|p| p.alpha());
    let mut points = Vec::with_capacity(n + 1);
    let mut etas = Vec::with_capacity(n);
    points.push(z0);
    if z0.is_infinite() {
        let mut rec = OrbitRecord::from_points(points, etas);
        rec.infinity_at = Some(0);
        return rec;
    }
    for i in 0..n {
        let a = points[i].as_finite().expect("finite orbit point");
        let image = if near_pole(g, a) {
            ExtendedComplex::Infinity
        } else {
            g.apply_finite(a)
        };
        match image {
            ExtendedComplex::Infinity => {
                points.push(ExtendedComplex::Infinity);
                etas.push(Complex64::new(0.0, 0.0));
                let mut rec = OrbitRecord::from_points(points, etas);
                rec.infinity_at = Some(i + 1);
                return rec;
            }
            ExtendedComplex::Finite(w) => {
                let outward = attractor.map_or(w, |alpha| w - alpha);
                let eta = model.draw(i as u64, outward);
                let next = ExtendedComplex::new(w + eta);
                points.push(next);
                etas.push(eta);
                if next.is_infinite() {
                    let mut rec = OrbitRecord::from_points(points, etas);
                    rec.infinity_at = Some(i + 1);
                    return rec;
                }
            }
        }
    }
    OrbitRecord::from_points(points, etas)
}

/// Which bound is attached to each step of a shadowed orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundRegime {
    /// Contraction bound `shadow_bound(K, eps, 0, i)`, valid inside `S(1 + t)`.
    Contraction { k_contraction: f64 },
    /// Growth up to the escape time, contraction afterwards.
    Combined(BoundSet),
}

impl BoundRegime {
    pub fn bound(&self, eps: f64, i: usize) -> f64 {
        match *self {
            BoundRegime::Contraction { k_contraction } => shadow_bound(k_contraction, eps, 0.0, i),
            BoundRegime::Combined(set) => combined_bound(&set, eps, i),
        }
    }
}

/// Attaches the exact orbit with `b_0 = a_0`, per-step deviations and bounds.
///
/// `eps` is the perturbation size the bound is evaluated at.
pub fn shadow_orbit(g: &MobiusMap, rec: &OrbitRecord, regime: BoundRegime, eps: f64) -> OrbitRecord {
    let mut out = rec.clone();
    let n = rec.points.len();
    let mut shadow = Vec::with_capacity(n);
    if let Some(&a0) = rec.points.first() {
        shadow.push(a0);
        for i in 1..n {
            shadow.push(g.apply(shadow[i - 1]));
        }
    }
    out.deviations = rec
        .points
        .iter()
        .zip(&shadow)
        .map(|(a, b)| match (a, b) {
            (ExtendedComplex::Finite(a), ExtendedComplex::Finite(b)) => (a - b).norm(),
            (ExtendedComplex::Infinity, ExtendedComplex::Infinity) => 0.0,
            _ => f64::INFINITY,
        })
        .collect();
    out.bounds = (0..n).map(|i| regime.bound(eps, i)).collect();
    out.shadow = Some(shadow);
    out
}
