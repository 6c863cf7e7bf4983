use hus_core::dynamics::{
    combined_bound, default_delta, exact_orbit, perturbed_orbit, shadow_bound, shadow_orbit, BoundRegime,
};
use hus_core::hyperbolic::collinearity_residual;
use hus_core::regions::{self, sample_boundary, AvoidedPiece};
use hus_core::verify::random_hyperbolic_map;
use hus_core::{
    chordal_distance, AvoidedRegionW, BoundSet, Complex64, DiskSpec, ExtendedComplex, HyperbolicProfile, ModelKind,
    PerturbationModel,
};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn profile(seed: u64) -> HyperbolicProfile {
    HyperbolicProfile::new(&random_hyperbolic_map(seed)).expect("random draws are hyperbolic")
}

fn fin(z: Complex64) -> ExtendedComplex {
    ExtendedComplex::Finite(z)
}

fn polar(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn profile_identities_hold(seed in any::<u64>()) {
        let p = profile(seed);
        prop_assert!(p.residuals().max() <= 1e-9);
        prop_assert!(p.conjugation_residual() <= 1e-9);
        prop_assert!(p.k() > 1.0);
    }

    #[test]
    fn axis_is_invariant_and_maps_to_reals(seed in any::<u64>(), t in -5.0f64..5.0) {
        prop_assume!((t - 1.0).abs() > 1e-3);
        let p = profile(seed);
        let z = p.axis_point(t).value;
        let gz = p.map().apply(fin(z));
        if let Some(gz) = gz.as_finite() {
            prop_assert!(collinearity_residual(p.alpha(), p.beta(), gz) <= 1e-9);
        }
        let w = p.h_raw(fin(z)).as_finite().unwrap();
        prop_assert!(w.im.abs() <= 1e-9 * w.norm().max(1.0));
        let closed = p.h_of_axis_point(t).unwrap();
        prop_assert!((w.re - closed).abs() <= 1e-9 * closed.abs().max(1.0));
    }

    #[test]
    fn forward_and_backward_iteration_converge(seed in any::<u64>(), r in 0.0f64..5.0, theta in 0.0f64..TAU) {
        let p = profile(seed);
        let g = p.map();
        let n = ((1e-8f64).ln() / (1.0 / p.k()).ln()).ceil() as usize + 20;
        for (map, target, avoid) in [(*g, p.alpha(), p.beta()), (g.inverse(), p.beta(), p.alpha())] {
            let z0 = fin(avoid + polar(r, theta));
            prop_assume!(chordal_distance(z0, fin(avoid)) > 0.1);
            let mut z = z0;
            for _ in 0..n {
                z = map.apply(z);
            }
            prop_assert!(chordal_distance(z, fin(target)) <= 1e-6);
        }
    }

    #[test]
    fn s_maps_into_t(seed in any::<u64>(), r in 0.2f64..4.0, stretch in 1.0001f64..20.0, theta in 0.0f64..TAU) {
        let p = profile(seed);
        let z = p.pole() + polar(stretch * r / p.c_abs(), theta);
        prop_assert!(regions::s_contains(&p, r, fin(z)));
        let gz = p.map().apply(fin(z));
        prop_assert!(regions::t_contains(&p, r, gz));
        prop_assert!(gz != fin(regions::t_center(&p)));

        let on = p.pole() + polar(r / p.c_abs(), theta);
        let image = p.map().apply(fin(on)).as_finite().unwrap();
        let expected = 1.0 / (r * p.c_abs());
        prop_assert!(((image - regions::t_center(&p)).norm() - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn closed_t_nests_inside_s(seed in any::<u64>(), u in 0.0f64..1.0) {
        let p = profile(seed);
        let tr = p.trace();
        // Admissible r satisfy r + 1/r < trace.
        let lo = (tr - (tr * tr - 4.0).sqrt()) / 2.0;
        let hi = (tr + (tr * tr - 4.0).sqrt()) / 2.0;
        let r = lo * (hi / lo).powf(0.01 + 0.98 * u);
        prop_assert!(regions::closure_nesting_margin(&p, r).unwrap() > 0.0);
        for z in sample_boundary(&regions::t_disk(&p, r), 32) {
            prop_assert!(regions::s_contains(&p, r, fin(z)));
        }
    }

    #[test]
    fn avoided_pieces_are_closed(k in 1.5f64..30.0, frac in 0.05f64..0.95, x in -0.5f64..1.5, y in -0.5f64..0.5) {
        let delta = frac * regions::avoided_delta_limit(k);
        let region = AvoidedRegionW::standard(k, delta).unwrap();
        let w = Complex64::new(x * (1.0 / k + delta), y * delta);
        let (_, dist) = region.nearest(w);
        prop_assert_eq!(region.contains(w), dist == 0.0);
        if dist > 1e-12 {
            for nudge in [Complex64::new(1e-15, 0.0), Complex64::new(0.0, 1e-15)] {
                prop_assert!(!region.contains(w + nudge));
                prop_assert!(!region.contains(w - nudge));
            }
        }
        let left = region.half_width(AvoidedPiece::LeftHalfDisk);
        let strip = region.half_width(AvoidedPiece::Strip);
        let right = region.half_width(AvoidedPiece::RightHalfDisk);
        let on_boundary = [
            Complex64::new(-left, 0.0),
            Complex64::new(0.0, left),
            Complex64::new(x.clamp(0.0, 1.0) / k, strip),
            Complex64::new(x.clamp(0.0, 1.0) / k, -strip),
            Complex64::new(1.0 / k, right),
            Complex64::new(1.0 / k, -right),
        ];
        for z in on_boundary {
            prop_assert!(region.contains(z), "boundary point {} not a member", z);
        }
    }

    #[test]
    fn shrunken_d_eps_tilde_is_avoided(seed in any::<u64>()) {
        let p = profile(seed);
        let delta = default_delta(p.k());
        let et = regions::epsilon_tilde(&p, delta).unwrap();
        let region = AvoidedRegionW::standard(p.k(), delta).unwrap();
        for z in sample_boundary(&DiskSpec::circle(p.pole(), 0.999 * et), 32) {
            prop_assert!(regions::avoided_z_contains(&p, &region, fin(z)));
        }
    }

    #[test]
    fn unperturbed_orbit_is_exact(seed in any::<u64>(), r in 0.1f64..4.0, theta in 0.0f64..TAU) {
        let p = profile(seed);
        let z0 = fin(p.alpha() + polar(r, theta));
        let exact = exact_orbit(p.map(), z0, 50);
        let rec = perturbed_orbit(p.map(), z0, 50, &PerturbationModel::none());
        prop_assert_eq!(&rec.points, &exact.points);
        if !rec.is_truncated() {
            let sh = shadow_orbit(p.map(), &rec, BoundRegime::Contraction { k_contraction: 0.5 }, 0.0);
            prop_assert_eq!(sh.max_deviation(), 0.0);
        }
    }

    #[test]
    fn shadow_starts_at_zero_and_stays_under_contraction_bound(seed in any::<u64>(), u in 0.0f64..1.0, model_seed in any::<u64>()) {
        let p = profile(seed);
        let t = p.tau() * (1.0 - u);
        let cap = t / (p.c_abs() * (1.0 + t));
        let eps = 0.9 * cap;
        let z0 = fin(p.pole() + polar(2.0 * (1.0 + t) / p.c_abs(), u * TAU));
        let model = PerturbationModel::new(ModelKind::BoundaryAdversarial, eps, model_seed).unwrap();
        let rec = perturbed_orbit(p.map(), z0, 200, &model);
        prop_assert!(!rec.is_truncated());
        let k_contraction = 1.0 / ((1.0 + t) * (1.0 + t));
        let sh = shadow_orbit(p.map(), &rec, BoundRegime::Contraction { k_contraction }, eps);
        prop_assert_eq!(sh.deviations[0], 0.0);
        for (i, dev) in sh.deviations.iter().enumerate() {
            prop_assert!(*dev <= shadow_bound(k_contraction, eps, 0.0, i) * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn combined_bound_is_monotone_and_continuous(m in 1.5f64..1e5, n in 1u32..6, kc in 0.01f64..0.9, eps in 1e-9f64..1.0) {
        let set = BoundSet::new(kc, m, n).unwrap();
        let mut prev = 0.0;
        for i in 0..40 {
            let b = combined_bound(&set, eps, i);
            prop_assert!(b >= prev);
            prev = b;
        }
        prop_assert_eq!(combined_bound(&set, eps, 0), 0.0);
        let at_n = combined_bound(&set, eps, n as usize);
        let geometric = (m.powi(n as i32) - 1.0) / (m - 1.0) * eps;
        prop_assert!((at_n - geometric).abs() <= 1e-12 * geometric.max(1.0));
        let limit = (set.growth_coefficient + 1.0 / (1.0 - kc)) * eps;
        prop_assert!(combined_bound(&set, eps, 10_000) <= limit * (1.0 + 1e-12));
    }
}

#[test]
fn d_eps_tilde_overshoots_for_large_delta() {
    // Containment is first-order tight; at half the admissible δ the image bulges out.
    let p = HyperbolicProfile::new(&hus_core::MobiusMap::golden()).unwrap();
    let delta = 0.5 * regions::avoided_delta_limit(p.k());
    let et = regions::epsilon_tilde(&p, delta).unwrap();
    let region = AvoidedRegionW::standard(p.k(), delta).unwrap();
    let outside = |s: f64| {
        sample_boundary(&DiskSpec::circle(p.pole(), s * et), 720)
            .into_iter()
            .filter(|z| !regions::avoided_z_contains(&p, &region, fin(*z)))
            .count()
    };
    assert!(outside(0.999) > 0);
    assert_eq!(outside(0.99), 0);
}
