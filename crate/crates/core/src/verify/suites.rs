use num_complex::Complex64;

use super::{oracle_circle_image, SuiteConfig, SuiteId, TrialOutcome};
use crate::dynamics::{
    avoided_entries, closest_approach, confinement_eps_cap, contraction_constant,
    default_delta, dilation_orbit, escape_step, escape_time_bound, greedy_orbit,
    perturbed_orbit, sample_derivative_outside_avoided, shadow_orbit, transfer_epsilon,
    BoundRegime, BoundSet, ModelKind, PerturbationModel,
};
use crate::extended::{chordal_distance, ExtendedComplex};
use crate::hyperbolic::{collinearity_residual, HyperbolicProfile};
use crate::mobius::MobiusMap;
use crate::regions::{self, AvoidedRegionW, DiskSpec};
use crate::rng::SplitMix64;

const IDENTITY_TOL: f64 = 1e-9;

pub(crate) fn run_trial(id: SuiteId, g: &MobiusMap, seed: u64, cfg: &SuiteConfig) -> TrialOutcome {
    let p = match HyperbolicProfile::new(g) {
        Ok(p) => p,
        Err(e) => return TrialOutcome::fail(f64::INFINITY, format!("profile: {e}")),
    };
    let mut rng = SplitMix64::keyed(seed, 1);
    match id {
        SuiteId::FixedPoints => fixed_points(&p, cfg),
        SuiteId::Conjugation => conjugation(&p, &mut rng, cfg),
        SuiteId::RegionMapping => region_mapping(&p, &mut rng, cfg),
        SuiteId::Nesting => nesting(&p, &mut rng, cfg),
        SuiteId::CircleImages => circle_images(&p, cfg),
        SuiteId::AxisFormulas => axis_formulas(&p, &mut rng, cfg),
        SuiteId::Confinement => confinement(&p, &mut rng, seed, cfg, false),
        SuiteId::Shadowing => confinement(&p, &mut rng, seed, cfg, true),
        SuiteId::AvoidedInvariance => avoided_invariance(&p, &mut rng, seed, cfg),
        SuiteId::Escape => escape(&p, &mut rng, seed, cfg),
        SuiteId::GrowthBound => growth_bound(&p, &mut rng, seed, cfg),
        SuiteId::MeanValue => mean_value(&p, &mut rng, cfg),
        SuiteId::Convergence => convergence(&p, &mut rng, cfg),
    }
}

fn fin(z: Complex64) -> ExtendedComplex {
    ExtendedComplex::Finite(z)
}

fn fixed_points(p: &HyperbolicProfile, cfg: &SuiteConfig) -> TrialOutcome {
    let r = p.residuals();
    let attracting = p
        .map()
        .derivative(fin(p.alpha()))
        .map(|v| v.norm() < 1.0)
        .unwrap_or(false);
    if !attracting || !(p.k() > 1.0) {
        return TrialOutcome::fail(r.max(), format!("alpha not attracting (k = {})", p.k()));
    }
    TrialOutcome::check(r.max(), cfg.tol(IDENTITY_TOL), || format!("{r:?}"))
}

fn conjugation(p: &HyperbolicProfile, rng: &mut SplitMix64, cfg: &SuiteConfig) -> TrialOutcome {
    let mut worst = p.conjugation_residual();
    let (g, h) = (p.map(), p.h());
    for _ in 0..8 {
        let z = fin(rng.in_disk(Complex64::new(0.0, 0.0), 5.0));
        let lhs = h.apply(g.apply(z));
        let rhs = match h.apply(z) {
            ExtendedComplex::Finite(w) => ExtendedComplex::new(p.k() * w),
            ExtendedComplex::Infinity => ExtendedComplex::Infinity,
        };
        worst = worst.max(chordal_distance(lhs, rhs));
    }
    TrialOutcome::check(worst, cfg.tol(IDENTITY_TOL), || {
        format!("conjugation residual {worst:e}")
    })
}

fn region_mapping(p: &HyperbolicProfile, rng: &mut SplitMix64, cfg: &SuiteConfig) -> TrialOutcome {
    let r = rng.uniform(0.2, 3.0);
    let (pole, c_abs) = (p.pole(), p.c_abs());
    let t_center = regions::t_center(p);
    let big_r = 1.0 / (r * c_abs);
    let mut worst = 0.0f64;
    let mut bad = None;
    for _ in 0..8 {
        let rho = r / c_abs * (1.0 + 1e-6 + 10.0 * rng.next_f64().powi(2));
        let z = pole + Complex64::from_polar(rho, rng.angle());
        debug_assert!(regions::s_contains(p, r, fin(z)));
        match p.map().apply(fin(z)) {
            ExtendedComplex::Finite(w) => {
                let excess = ((w - t_center).norm() - big_r) / big_r;
                worst = worst.max(excess.max(0.0));
                if !regions::t_contains(p, r, fin(w)) || w == t_center {
                    bad = Some(format!("g({z}) = {w} not in T({r})"));
                }
            }
            ExtendedComplex::Infinity => bad = Some(format!("g({z}) = inf")),
        }
    }
    for _ in 0..8 {
        let z = pole + Complex64::from_polar(r / c_abs, rng.angle());
        if let ExtendedComplex::Finite(w) = p.map().apply(fin(z)) {
            worst = worst.max(((w - t_center).norm() - big_r).abs() / big_r.max(1.0));
        } else {
            worst = f64::INFINITY;
        }
    }
    match bad {
        Some(note) => TrialOutcome::fail(worst, note),
        None => TrialOutcome::check(worst, cfg.tol(IDENTITY_TOL), || format!("r = {r}")),
    }
}

fn nesting(p: &HyperbolicProfile, rng: &mut SplitMix64, cfg: &SuiteConfig) -> TrialOutcome {
    let tr = p.trace();
    let disc = (tr * tr - 4.0).sqrt();
    let (lo, hi) = ((0.5 * (tr - disc)).ln(), (0.5 * (tr + disc)).ln());
    let span = hi - lo;
    let r = rng.uniform(lo + 0.01 * span, hi - 0.01 * span).exp();
    let margin = match regions::closure_nesting_margin(p, r) {
        Ok(m) => m,
        Err(e) => return TrialOutcome::fail(f64::INFINITY, format!("r = {r}: {e}")),
    };
    // Also check the remark that `|z + d/c| < (tr/2)/|c|` contains `Ĉ \ S(1)`.
    if !(0.5 * tr / p.c_abs() > 1.0 / p.c_abs()) {
        return TrialOutcome::fail(f64::INFINITY, "half-trace disk too small".into());
    }
    let t_disk = regions::t_disk(p, r);
    let closed = DiskSpec::circle(t_disk.center, t_disk.radius);
    let mut points = regions::sample_boundary(&closed, 64);
    points.extend((0..64).map(|_| rng.in_disk(t_disk.center, t_disk.radius)));
    let s_radius = r / p.c_abs();
    let mut worst = (-margin).max(0.0);
    let mut outside = 0;
    for z in points {
        worst = worst.max((s_radius - (z - p.pole()).norm()).max(0.0) / s_radius);
        if !regions::s_contains(p, r, fin(z)) {
            outside += 1;
        }
    }
    if margin <= 0.0 || outside > 0 {
        return TrialOutcome::fail(worst, format!("r = {r}: margin {margin}, {outside} points outside S(r)"));
    }
    TrialOutcome::check(worst, cfg.tol(IDENTITY_TOL), || format!("r = {r}"))
}

fn circle_images(p: &HyperbolicProfile, cfg: &SuiteConfig) -> TrialOutcome {
    let cases = [
        (
            DiskSpec::circle(p.pole(), 1.0 / (p.sqrt_k() * p.c_abs())),
            regions::image_circle_sqrtk(p),
        ),
        (
            DiskSpec::circle(p.pole(), (1.0 + 0.5 * p.tau()) / p.c_abs()),
            regions::image_circle_tau_half(p),
        ),
    ];
    let mut worst = 0.0f64;
    for (z_circle, closed) in cases {
        match oracle_circle_image(p.h(), &z_circle, 64) {
            Ok(o) => {
                worst = worst
                    .max((o.disk.center - closed.center).norm())
                    .max((o.disk.radius - closed.radius).abs())
                    .max(o.residual);
            }
            Err(e) => return TrialOutcome::fail(f64::INFINITY, format!("oracle: {e}")),
        }
        for z in regions::sample_boundary(&z_circle, 64) {
            match p.h_raw(fin(z)) {
                ExtendedComplex::Finite(w) => worst = worst.max(closed.boundary_residual(w)),
                ExtendedComplex::Infinity => worst = f64::INFINITY,
            }
        }
    }
    TrialOutcome::check(worst, cfg.tol(IDENTITY_TOL), || format!("circle residual {worst:e}"))
}

fn axis_formulas(p: &HyperbolicProfile, rng: &mut SplitMix64, cfg: &SuiteConfig) -> TrialOutcome {
    let k = p.k();
    let mut worst = chordal_distance(p.h_raw(fin(p.pole())), ExtendedComplex::real(p.h_of_pole()));
    let pole_point = p.axis_point(p.pole_axis_parameter()).value;
    worst = worst.max((pole_point - p.pole()).norm() / p.pole().norm().max(1.0));
    let ids = p.distance_identities();
    let d = p.map().d();
    let c = p.map().c();
    worst = worst
        .max((ids.radius_sqrtk - ((c * p.beta() + d) / c).norm()).abs() / ids.radius_sqrtk)
        .max((ids.inv_c_abs - 1.0 / p.c_abs()).abs() * p.c_abs());
    let mut taken = 0;
    while taken < 6 {
        let t = rng.uniform(-5.0, 5.0);
        if (t - 1.0).abs() < 0.05 || (t * k - t + k + 1.0).abs() < 0.05 * (k + 1.0) {
            continue;
        }
        taken += 1;
        let pt = p.axis_point(t);
        worst = worst.max(collinearity_residual(p.alpha(), p.beta(), pt.value));
        let literal = p.h_raw(fin(pt.value));
        let formula = p.h_of_axis_point(t).map(ExtendedComplex::real);
        match formula {
            Ok(f) => worst = worst.max(chordal_distance(literal, f)),
            Err(_) => worst = f64::INFINITY,
        }
        if let ExtendedComplex::Finite(w) = literal {
            worst = worst.max(w.im.abs());
        }
        let mirror = p.h_raw(fin(p.mirror_point(t)));
        match p.h_of_mirror_point(t) {
            Ok(f) => worst = worst.max(chordal_distance(mirror, ExtendedComplex::real(f))),
            Err(_) => worst = f64::INFINITY,
        }
        if let ExtendedComplex::Finite(gz) = p.map().apply(fin(pt.value)) {
            worst = worst.max(collinearity_residual(p.alpha(), p.beta(), gz));
        }
    }
    TrialOutcome::check(worst, cfg.tol(IDENTITY_TOL), || format!("axis residual {worst:e}"))
}

fn confinement(
    p: &HyperbolicProfile,
    rng: &mut SplitMix64,
    seed: u64,
    cfg: &SuiteConfig,
    shadowing: bool,
) -> TrialOutcome {
    let t = p.tau() * (1.0 - rng.next_f64());
    let cap = confinement_eps_cap(p, t);
    let overdrive = cfg.violate_hypothesis && !shadowing;
    let (eps, kind) = if overdrive {
        (3.0 * cap, ModelKind::RadialOutward)
    } else {
        (0.9 * cap, ModelKind::BoundaryAdversarial)
    };
    let s_radius = (1.0 + t) / p.c_abs();
    let a0 = p.pole() + Complex64::from_polar(s_radius * (1.0 + 1e-3 + 3.0 * rng.next_f64()), rng.angle());
    let model = PerturbationModel::new(kind, eps, seed).expect("valid eps");
    let n = cfg.steps.unwrap_or(1000);
    let rec = perturbed_orbit(p.map(), fin(a0), n, &model);
    if rec.is_truncated() {
        return TrialOutcome::fail(f64::INFINITY, format!("orbit from {a0} reached infinity"));
    }
    if !shadowing {
        let mut worst = 0.0f64;
        let mut exits = 0;
        for &a in &rec.points {
            let z = a.as_finite().expect("finite");
            worst = worst.max((s_radius - (z - p.pole()).norm()).max(0.0) / s_radius);
            if !regions::s_contains(p, 1.0 + t, a) {
                exits += 1;
            }
        }
        return if exits > 0 {
            TrialOutcome::fail(worst, format!("{exits} exits from S(1 + {t}), a0 = {a0}, eps = {eps}"))
        } else {
            TrialOutcome::check(worst, 0.0, String::new)
        };
    }
    let k_contraction = contraction_constant(t).expect("t > 0");
    let sh = shadow_orbit(p.map(), &rec, BoundRegime::Contraction { k_contraction }, eps);
    let limit = eps / (1.0 - k_contraction) + cfg.tol(1e-12);
    let excess = sh.worst_excess().max(sh.max_deviation() - limit + cfg.tol(1e-12));
    TrialOutcome::check(excess.max(0.0), cfg.tol(1e-12), || {
        format!("max deviation {} vs {}, t = {t}, a0 = {a0}", sh.max_deviation(), limit)
    })
}

fn avoided_invariance(p: &HyperbolicProfile, rng: &mut SplitMix64, seed: u64, cfg: &SuiteConfig) -> TrialOutcome {
    let k = p.k();
    let delta = cfg.delta.unwrap_or(0.5 * regions::avoided_delta_limit(k));
    let t = rng.uniform(1.0, k);
    let region = match AvoidedRegionW::uniform(k, delta, t) {
        Ok(r) => r,
        Err(e) => return TrialOutcome::fail(f64::INFINITY, format!("region: {e}")),
    };
    let reach = 0.5 / k + 4.0 * t * delta / (k - 1.0);
    let want_inside = cfg.violate_hypothesis;
    let mut w0 = None;
    for _ in 0..10_000 {
        let w = rng.in_disk(Complex64::new(0.5 / k, 0.0), reach);
        if region.contains(w) == want_inside {
            w0 = Some(w);
            break;
        }
    }
    let Some(w0) = w0 else {
        return TrialOutcome::fail(f64::INFINITY, "no start point found".into());
    };
    let n = cfg.steps.unwrap_or(100);
    let orbit = match seed % 3 {
        0 => dilation_orbit(k, w0, n, &PerturbationModel::new(ModelKind::BoundaryAdversarial, delta, seed).unwrap()),
        1 => dilation_orbit(k, w0, n, &PerturbationModel::new(ModelKind::RadialOutward, delta, seed).unwrap()),
        _ => greedy_orbit(&region, w0, n),
    };
    if want_inside {
        let inside = orbit[1..].iter().filter(|w| region.contains(**w)).count();
        return if inside > 0 {
            TrialOutcome::fail(inside as f64, format!("{inside} points in R^{t} from w0 = {w0}"))
        } else {
            TrialOutcome::check(0.0, 0.0, String::new)
        };
    }
    let entries = avoided_entries(&region, &orbit);
    let residual = (1.0 - closest_approach(&region, &orbit)).max(0.0);
    if !entries.is_empty() {
        return TrialOutcome::fail(residual, format!("entries at {entries:?}, t = {t}, w0 = {w0}"));
    }
    TrialOutcome::check(residual, cfg.tol(IDENTITY_TOL), || {
        format!("a delta-step could enter R^{t}: approach {}, w0 = {w0}", 1.0 - residual)
    })
}

fn escape(p: &HyperbolicProfile, rng: &mut SplitMix64, seed: u64, cfg: &SuiteConfig) -> TrialOutcome {
    let delta = cfg.delta.unwrap_or_else(|| default_delta(p.k()));
    let bound = match escape_time_bound(p, delta) {
        Ok(b) => b,
        Err(e) => return TrialOutcome::fail(f64::INFINITY, format!("{e}")),
    };
    let disk = regions::image_circle_tau_half(p);
    let mut w0 = None;
    for _ in 0..10_000 {
        let w = rng.in_disk(disk.center, disk.radius);
        if regions::escape_region_w_contains(p, delta, w) {
            w0 = Some(w);
            break;
        }
    }
    let Some(w0) = w0 else {
        return TrialOutcome::fail(f64::INFINITY, "no start point in E_f".into());
    };
    let kind = if seed.is_multiple_of(2) {
        ModelKind::BoundaryAdversarial
    } else {
        ModelKind::RadialOutward
    };
    let model = PerturbationModel::new(kind, delta, seed).unwrap();
    let n = bound.n as usize;
    let orbit = dilation_orbit(p.k(), w0, n, &model);
    match escape_step(p, delta, &orbit) {
        Some(step) if step <= n => TrialOutcome::check(0.0, 0.0, String::new),
        other => TrialOutcome::fail(1.0, format!("w0 = {w0}: escape step {other:?} > N = {n}")),
    }
}

fn growth_bound(p: &HyperbolicProfile, rng: &mut SplitMix64, seed: u64, cfg: &SuiteConfig) -> TrialOutcome {
    let delta = cfg.delta.unwrap_or_else(|| default_delta(p.k()));
    let set = match BoundSet::for_profile(p, delta) {
        Ok(s) => s,
        Err(e) => return TrialOutcome::fail(f64::INFINITY, format!("{e}")),
    };
    let sample = match sample_derivative_outside_avoided(p, delta, 64, seed) {
        Ok(s) => s,
        Err(e) => return TrialOutcome::fail(f64::INFINITY, format!("{e}")),
    };
    let derivative_excess = (2.0 * sample.sup() / set.m - 1.0).max(0.0);
    if derivative_excess > cfg.tol(1e-6) {
        return TrialOutcome::fail(derivative_excess, format!("2 sup|g'| = {} > M = {}", 2.0 * sample.sup(), set.m));
    }
    let region = AvoidedRegionW::standard(p.k(), delta).expect("gated by BoundSet");
    let inner = regions::inner_disk(p);
    let mut a0 = None;
    for _ in 0..10_000 {
        let z = rng.in_disk(inner.center, inner.radius);
        if !regions::avoided_z_contains(p, &region, fin(z)) {
            a0 = Some(z);
            break;
        }
    }
    let Some(a0) = a0 else {
        return TrialOutcome::fail(f64::INFINITY, "no start point outside R_g".into());
    };
    let eps = transfer_epsilon(p, delta).eps;
    let model = PerturbationModel::new(ModelKind::BoundaryAdversarial, eps, seed).unwrap();
    let rec = perturbed_orbit(p.map(), fin(a0), cfg.steps.unwrap_or(1000), &model);
    if rec.is_truncated() {
        return TrialOutcome::fail(f64::INFINITY, format!("orbit from {a0} reached infinity"));
    }
    let sh = shadow_orbit(p.map(), &rec, BoundRegime::Combined(set), eps);
    let excess = sh
        .deviations
        .iter()
        .zip(&sh.bounds)
        .map(|(d, b)| ((d - b) / b.max(eps)).max(0.0))
        .fold(0.0, f64::max);
    TrialOutcome::check(excess.max(derivative_excess), cfg.tol(1e-9), || {
        format!("deviation exceeds combined bound, a0 = {a0}, eps = {eps}")
    })
}

fn mean_value(p: &HyperbolicProfile, rng: &mut SplitMix64, cfg: &SuiteConfig) -> TrialOutcome {
    let g = p.map();
    let offset = (0.05 + 3.0 * rng.next_f64()) / p.c_abs();
    let center = p.pole() + Complex64::from_polar(offset, rng.angle());
    let radius = offset * rng.uniform(0.05, 0.95);
    let disk = DiskSpec::circle(center, radius);
    let deriv = |z: Complex64| g.derivative(fin(z)).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    let mut sup = regions::sample_boundary(&disk, 256)
        .into_iter()
        .map(deriv)
        .fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for _ in 0..16 {
        let (u, v) = (rng.in_disk(center, radius), rng.in_disk(center, radius));
        sup = sup.max(deriv(u)).max(deriv(v));
        let (gu, gv) = (g.apply_finite(u).as_finite(), g.apply_finite(v).as_finite());
        if let (Some(gu), Some(gv)) = (gu, gv) {
            if u != v {
                worst = worst.max((gu - gv).norm() / (u - v).norm());
            }
        }
    }
    let excess = (worst / (2.0 * sup) - 1.0).max(0.0);
    TrialOutcome::check(excess, cfg.tol(1e-6), || {
        format!("difference quotient {worst} vs 2 sup {}", 2.0 * sup)
    })
}

fn convergence(p: &HyperbolicProfile, rng: &mut SplitMix64, cfg: &SuiteConfig) -> TrialOutcome {
    let n = ((1e-8f64).ln() / (1.0 / p.k()).ln()).ceil() as usize + 20;
    let g = p.map();
    let g_inv = g.inverse();
    let scale = 10.0 * p.alpha().norm().max(p.beta().norm()).max(1.0);
    let mut worst = 0.0f64;
    for (map, target, avoid) in [(g, p.alpha(), p.beta()), (&g_inv, p.beta(), p.alpha())] {
        let mut taken = 0;
        while taken < 4 {
            let z = fin(rng.in_disk(Complex64::new(0.0, 0.0), scale));
            if chordal_distance(z, fin(avoid)) <= 0.1 {
                continue;
            }
            taken += 1;
            let mut w = z;
            for _ in 0..n {
                w = map.apply(w);
            }
            worst = worst.max(chordal_distance(w, fin(target)));
        }
    }
    TrialOutcome::check(worst, cfg.tol(1e-6), || format!("{n} iterations leave chordal gap {worst:e}"))
}
