use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HusError, Result};
use crate::extended::ExtendedComplex;
use crate::hyperbolic::HyperbolicProfile;
use crate::regions::{self, AvoidedRegionW};
use crate::rng::SplitMix64;

/// `K = 1/(1 + t)^2`, the sup of `|g'|` on `S(1 + t)`.
pub fn contraction_constant(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(HusError::InvalidParameter(format!("t must be positive, got {t}")));
    }
    Ok(1.0 / ((1.0 + t) * (1.0 + t)))
}

/// `t/(|c|(1 + t))`: perturbations below this keep orbits inside `S(1 + t)`.
pub fn confinement_eps_cap(p: &HyperbolicProfile, t: f64) -> f64 {
    t / (p.c_abs() * (1.0 + t))
}

/// `K^i d0 + (1 - K^i)/(1 - K) eps`.
pub fn shadow_bound(k_contraction: f64, eps: f64, d0: f64, i: usize) -> f64 {
    let ki = k_contraction.powi(i.min(i32::MAX as usize) as i32);
    ki * d0 + (1.0 - ki) / (1.0 - k_contraction) * eps
}

/// `min(0.01, (1 - 1/k)^2/2)`, a δ that passes every gate.
pub fn default_delta(k: f64) -> f64 {
    0.01f64.min(0.5 * regions::avoided_delta_limit(k))
}

/// `M = 2(k - 1)^4/(k^3 δ^2)`.
pub fn expansion_constant(p: &HyperbolicProfile, delta: f64) -> Result<f64> {
    let k = p.k();
    let num = 2.0 * (k - 1.0).powi(4) / k.powi(3);
    if !(delta > 0.0) {
        return Err(HusError::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let m = num / (delta * delta);
    if m <= 1.0 {
        return Err(HusError::DeltaTooLarge {
            delta,
            limit: num.sqrt(),
        });
    }
    Ok(m)
}

/// Sampled sup of `|g'|` on `∂D_ε̃` and on random points of the disk
/// `|z + d/c| <= 2/|c|` outside `R_g(∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeSample {
    pub on_d_eps_tilde: f64,
    pub outside_avoided: f64,
    pub samples: usize,
}

impl DerivativeSample {
    pub fn sup(&self) -> f64 {
        self.on_d_eps_tilde.max(self.outside_avoided)
    }
}

pub fn sample_derivative_outside_avoided(
    p: &HyperbolicProfile,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<DerivativeSample> {
    let region = AvoidedRegionW::standard(p.k(), delta)?;
    let et = regions::epsilon_tilde(p, delta)?;
    let g = p.map();
    let deriv = |z: Complex64| {
        g.derivative(ExtendedComplex::Finite(z))
            .map(|v| v.norm())
            .unwrap_or(f64::INFINITY)
    };
    let ring = regions::DiskSpec::circle(p.pole(), et);
    let on_ring = regions::sample_boundary(&ring, samples.max(3))
        .into_iter()
        .map(deriv)
        .fold(0.0, f64::max);
    let mut rng = SplitMix64::keyed(seed, 0);
    let mut outside = 0.0f64;
    let mut taken = 0;
    for _ in 0..samples {
        let z = rng.in_disk(p.pole(), 2.0 / p.c_abs());
        if !regions::avoided_z_contains(p, &region, ExtendedComplex::Finite(z)) {
            outside = outside.max(deriv(z));
            taken += 1;
        }
    }
    Ok(DerivativeSample {
        on_d_eps_tilde: on_ring,
        outside_avoided: outside,
        samples: samples.max(3) + taken,
    })
}

/// Escape-time bounds for the δ-perturbed dilation started in `E_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeTime {
    /// Smallest integer strictly above `expression`.
    pub n: u32,
    pub expression: f64,
    /// Simplified bound from `log(2/δ + 1)/log k`.
    pub n0: u32,
    pub expression0: f64,
}

fn strictly_above(x: f64) -> u32 {
    (x.floor() + 1.0).max(1.0) as u32
}

pub fn escape_time_bound(p: &HyperbolicProfile, delta: f64) -> Result<EscapeTime> {
    let k = p.k();
    let limit = regions::avoided_delta_limit(k);
    if !(delta > 0.0) || delta >= limit {
        return Err(HusError::DeltaTooLarge { delta, limit });
    }
    let y = regions::tau_half_far_point(k);
    let expression = ((y + 1.0) / delta + 1.0).ln() / k.ln();
    let expression0 = (2.0 / delta + 1.0).ln() / k.ln();
    Ok(EscapeTime {
        n: strictly_above(expression),
        expression,
        n0: strictly_above(expression0),
        expression0,
    })
}

/// `ε = δ/(2Ĥ)` with `Ĥ` the sampled sup of `|h'|` near `Ĉ \ S(1 + τ/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferEpsilon {
    pub eps: f64,
    pub h_sup: f64,
    pub samples: usize,
    pub note: &'static str,
}

pub const TRANSFER_BOUNDARY_SAMPLES: usize = 512;
pub const TRANSFER_INTERIOR_RADII: usize = 16;
pub const TRANSFER_INTERIOR_ANGLES: usize = 32;

pub fn transfer_epsilon(p: &HyperbolicProfile, delta: f64) -> TransferEpsilon {
    let k = p.k();
    let et = k * k * delta * p.separation() / (k - 1.0).powi(3);
    let radius = (1.0 + 0.5 * p.tau()) / p.c_abs() + 0.5 * et;
    let center = p.pole();
    let mut h_sup = 0.0f64;
    let mut track = |z: Complex64| {
        let dist = (z - p.alpha()).norm();
        let v = if dist > 0.0 {
            p.separation() / (dist * dist)
        } else {
            f64::INFINITY
        };
        h_sup = h_sup.max(v);
    };
    let n = TRANSFER_BOUNDARY_SAMPLES;
    for j in 0..n {
        track(center + Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / n as f64));
    }
    for i in 0..TRANSFER_INTERIOR_RADII {
        let r = radius * i as f64 / TRANSFER_INTERIOR_RADII as f64;
        for j in 0..TRANSFER_INTERIOR_ANGLES {
            let th = std::f64::consts::TAU * (j as f64 + 0.5) / TRANSFER_INTERIOR_ANGLES as f64;
            track(center + Complex64::from_polar(r, th));
        }
    }
    if (p.alpha() - center).norm() <= radius {
        h_sup = f64::INFINITY;
    }
    TransferEpsilon {
        eps: if h_sup.is_finite() { delta / (2.0 * h_sup) } else { 0.0 },
        h_sup,
        samples: n + TRANSFER_INTERIOR_RADII * TRANSFER_INTERIOR_ANGLES,
        note: "sup of |h'| is sampled, not certified",
    }
}

/// Constants of the combined stability bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSet {
    pub k_contraction: f64,
    pub m: f64,
    pub n: u32,
    /// `(M^N - 1)/(M - 1)`.
    pub growth_coefficient: f64,
    /// `1/(1 - K)`.
    pub contraction_coefficient: f64,
}

/// `(M^i - 1)/(M - 1)`.
pub fn growth_factor(m: f64, i: usize) -> f64 {
    (m.powi(i.min(i32::MAX as usize) as i32) - 1.0) / (m - 1.0)
}

impl BoundSet {
    pub fn new(k_contraction: f64, m: f64, n: u32) -> Result<Self> {
        if !(k_contraction > 0.0 && k_contraction < 1.0) || !(m > 1.0) || n < 1 {
            return Err(HusError::InvalidParameter(format!(
                "need 0 < K < 1, M > 1, N >= 1; got K = {k_contraction}, M = {m}, N = {n}"
            )));
        }
        Ok(BoundSet {
            k_contraction,
            m,
            n,
            growth_coefficient: growth_factor(m, n as usize),
            contraction_coefficient: 1.0 / (1.0 - k_contraction),
        })
    }

    /// `K = 1/(1 + τ/2)^2`, `M` and `N` at the given δ.
    pub fn for_profile(p: &HyperbolicProfile, delta: f64) -> Result<Self> {
        let k_contraction = contraction_constant(0.5 * p.tau())?;
        let m = expansion_constant(p, delta)?;
        let n = escape_time_bound(p, delta)?.n;
        Self::new(k_contraction, m, n)
    }
}

/// Growth bound up to step `N`, growth plus contraction afterwards.
pub fn combined_bound(b: &BoundSet, eps: f64, i: usize) -> f64 {
    let n = b.n as usize;
    if i <= n {
        growth_factor(b.m, i) * eps
    } else {
        let tail = 1.0 - b.k_contraction.powi((i - n).min(i32::MAX as usize) as i32);
        (b.growth_coefficient + tail / (1.0 - b.k_contraction)) * eps
    }
}
