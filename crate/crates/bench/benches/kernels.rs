use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hus_core::dynamics::{dilation_orbit, perturbed_orbit, shadow_orbit, BoundRegime};
use hus_core::verify::{oracle_circle_image, random_hyperbolic_map, run_suite};
use hus_core::{
    AvoidedRegionW, DiskSpec, ExtendedComplex, HyperbolicProfile, MobiusMap, ModelKind, PerturbationModel, SuiteId,
};
use num_complex::Complex64;

fn profile(c: &mut Criterion) {
    let maps: Vec<MobiusMap> = (0..64).map(random_hyperbolic_map).collect();
    c.bench_function("profile/new_64_maps", |b| {
        b.iter(|| {
            for g in &maps {
                black_box(HyperbolicProfile::new(black_box(g)).unwrap());
            }
        })
    });
}

fn orbits(c: &mut Criterion) {
    let g = MobiusMap::golden();
    let z0 = ExtendedComplex::real(2.0);
    let model = PerturbationModel::new(ModelKind::BoundaryAdversarial, 0.004, 1).unwrap();
    c.bench_function("orbit/perturbed_1000", |b| {
        b.iter(|| black_box(perturbed_orbit(&g, black_box(z0), 1000, &model)))
    });
    let rec = perturbed_orbit(&g, z0, 1000, &model);
    let regime = BoundRegime::Contraction { k_contraction: 0.25 };
    c.bench_function("orbit/shadow_1000", |b| {
        b.iter(|| black_box(shadow_orbit(&g, black_box(&rec), regime, 0.004)))
    });

    let k = 6.854101966249687;
    let dil = PerturbationModel::new(ModelKind::RadialOutward, 0.1, 2).unwrap();
    c.bench_function("dilation/orbit_100", |b| {
        b.iter(|| black_box(dilation_orbit(k, Complex64::new(0.05, 0.2), 100, &dil)))
    });
}

fn regions(c: &mut Criterion) {
    let p = HyperbolicProfile::new(&MobiusMap::golden()).unwrap();
    let circle = DiskSpec::circle(p.pole(), (1.0 + 0.5 * p.tau()) / p.c_abs());
    c.bench_function("regions/oracle_circle_image_64", |b| {
        b.iter(|| black_box(oracle_circle_image(p.h(), black_box(&circle), 64).unwrap()))
    });
    let region = AvoidedRegionW::standard(p.k(), 0.01).unwrap();
    let points: Vec<Complex64> = (0..256)
        .map(|i| Complex64::from_polar(0.3 * (i as f64 / 256.0), i as f64))
        .collect();
    c.bench_function("regions/avoided_nearest_256", |b| {
        b.iter(|| {
            for w in &points {
                black_box(region.nearest(black_box(*w)));
            }
        })
    });
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for id in [SuiteId::Conjugation, SuiteId::Shadowing, SuiteId::GrowthBound] {
        group.bench_function(id.name(), |b| {
            b.iter_batched(|| id, |id| black_box(run_suite(id, 64, 1).unwrap()), BatchSize::SmallInput)
        });
    }
    group.finish();
}

criterion_group!(benches, profile, orbits, regions, suites);
criterion_main!(benches);
