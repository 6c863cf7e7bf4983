use num_complex::Complex64;

use super::{ModelKind, PerturbationModel};
use crate::hyperbolic::HyperbolicProfile;
use crate::regions::{self, AvoidedRegionW};

/// `w_{i+1} = k w_i + η_i` for `n` steps.
///
/// [`ModelKind::RadialOutward`] pushes toward the origin, away from the
/// attractor at infinity.
pub fn dilation_orbit(k: f64, w0: Complex64, n: usize, model: &PerturbationModel) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(w0);
    for i in 0..n {
        let image = k * out[i];
        let outward = match model.kind {
            ModelKind::RadialOutward => -image,
            _ => image,
        };
        out.push(image + model.draw(i as u64, outward));
    }
    out
}

/// Dilation orbit whose perturbation of size `delta` always points at the
/// nearest point of `region`.
pub fn greedy_orbit(region: &AvoidedRegionW, w0: Complex64, n: usize) -> Vec<Complex64> {
    let (k, delta) = (region.k(), region.delta());
    let mut out = Vec::with_capacity(n + 1);
    out.push(w0);
    for i in 0..n {
        let image = k * out[i];
        let (q, dist) = region.nearest(image);
        let eta = if dist <= delta {
            q - image
        } else {
            (q - image) * (delta / dist)
        };
        out.push(image + eta);
    }
    out
}

/// Smallest distance from `k w_i` to `region` over the orbit, in units of `delta`.
///
/// Values above 1 mean no perturbation of size `delta` could have entered.
pub fn closest_approach(region: &AvoidedRegionW, orbit: &[Complex64]) -> f64 {
    orbit
        .iter()
        .filter(|w| !region.contains(**w))
        .map(|&w| region.nearest(region.k() * w).1 / region.delta())
        .fold(f64::INFINITY, f64::min)
}

/// Indices `i >= 1` at which the orbit enters `region` from outside.
pub fn avoided_entries(region: &AvoidedRegionW, orbit: &[Complex64]) -> Vec<usize> {
    orbit
        .windows(2)
        .enumerate()
        .filter(|(_, w)| !region.contains(w[0]) && region.contains(w[1]))
        .map(|(i, _)| i + 1)
        .collect()
}

/// Closure of `E_f`: the closed image disk minus the open ball `B(0, kδ/(k - 1))`.
pub fn in_escape_closure(p: &HyperbolicProfile, delta: f64, w: Complex64) -> bool {
    regions::image_circle_tau_half(p).closed_contains(w)
        && w.norm() >= regions::escape_inner_radius(p.k(), delta)
}

/// First index at which the orbit lies outside the closure of `E_f`.
pub fn escape_step(p: &HyperbolicProfile, delta: f64, orbit: &[Complex64]) -> Option<usize> {
    orbit.iter().position(|&w| !in_escape_closure(p, delta, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::MobiusMap;
    use crate::rng::SplitMix64;

    fn golden() -> HyperbolicProfile {
        HyperbolicProfile::new(&MobiusMap::golden()).unwrap()
    }

    #[test]
    fn dilation_without_noise() {
        let m = PerturbationModel::none();
        let orbit = dilation_orbit(2.0, Complex64::new(1.0, 1.0), 3, &m);
        assert_eq!(orbit[3], Complex64::new(8.0, 8.0));
    }

    #[test]
    fn radial_model_pushes_toward_origin() {
        let m = PerturbationModel::new(ModelKind::RadialOutward, 0.1, 0).unwrap();
        let orbit = dilation_orbit(2.0, Complex64::new(1.0, 0.0), 1, &m);
        assert!((orbit[1] - Complex64::new(1.9, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn greedy_orbit_enters_standard_region() {
        let (k, delta) = (golden().k(), 0.01);
        let r = AvoidedRegionW::standard(k, delta).unwrap();
        let s = delta / (k - 1.0);
        let w0 = Complex64::new(1e-9, s * (1.0 + 1e-9));
        assert_eq!(avoided_entries(&r, &greedy_orbit(&r, w0, 3)), vec![1]);
        assert!(closest_approach(&r, &[w0]) < 1.0);
    }

    #[test]
    fn golden_escape_within_three_steps() {
        let p = golden();
        let delta = 0.01;
        let disk = regions::image_circle_tau_half(&p);
        let mut rng = SplitMix64::new(8);
        let mut trials = 0;
        while trials < 200 {
            let w0 = rng.in_disk(disk.center, disk.radius);
            if !regions::escape_region_w_contains(&p, delta, w0) {
                continue;
            }
            trials += 1;
            for kind in [ModelKind::BoundaryAdversarial, ModelKind::RadialOutward] {
                let m = PerturbationModel::new(kind, delta, trials).unwrap();
                let orbit = dilation_orbit(p.k(), w0, 3, &m);
                let step = escape_step(&p, delta, &orbit).expect("escapes");
                assert!(step <= 3);
            }
        }
    }

    #[test]
    fn uniform_region_has_no_entries() {
        let p = golden();
        let k = p.k();
        let delta = 0.5 * regions::avoided_delta_limit(k);
        let r = AvoidedRegionW::uniform(k, delta, 1.0).unwrap();
        let mut rng = SplitMix64::new(2);
        for seed in 0..300 {
            let w0 = rng.in_disk(Complex64::new(0.5 / k, 0.0), 0.3);
            if r.contains(w0) {
                continue;
            }
            for kind in [ModelKind::BoundaryAdversarial, ModelKind::RadialOutward] {
                let m = PerturbationModel::new(kind, delta, seed).unwrap();
                assert!(avoided_entries(&r, &dilation_orbit(k, w0, 20, &m)).is_empty());
            }
            assert!(avoided_entries(&r, &greedy_orbit(&r, w0, 20)).is_empty());
        }
    }
}
