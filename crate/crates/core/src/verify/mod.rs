//! Seeded property suites with machine-readable reports.
//!
//! Trials run in parallel. Every trial derives its randomness from
//! `(seed, trial)` alone and results are folded in trial order, so a report
//! does not depend on the number of worker threads.

mod oracle;
mod suites;

pub use oracle::{oracle_circle_image, OracleCircle};

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::trial_seed;
use crate::error::{HusError, Result};
use crate::mobius::MobiusMap;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SuiteId {
    FixedPoints,
    Conjugation,
    RegionMapping,
    Nesting,
    CircleImages,
    AxisFormulas,
    Confinement,
    Shadowing,
    AvoidedInvariance,
    Escape,
    GrowthBound,
    MeanValue,
    Convergence,
}

impl SuiteId {
    pub const ALL: [SuiteId; 13] = [
        SuiteId::FixedPoints,
        SuiteId::Conjugation,
        SuiteId::RegionMapping,
        SuiteId::Nesting,
        SuiteId::CircleImages,
        SuiteId::AxisFormulas,
        SuiteId::Confinement,
        SuiteId::Shadowing,
        SuiteId::AvoidedInvariance,
        SuiteId::Escape,
        SuiteId::GrowthBound,
        SuiteId::MeanValue,
        SuiteId::Convergence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteId::FixedPoints => "FixedPoints",
            SuiteId::Conjugation => "Conjugation",
            SuiteId::RegionMapping => "RegionMapping",
            SuiteId::Nesting => "Nesting",
            SuiteId::CircleImages => "CircleImages",
            SuiteId::AxisFormulas => "AxisFormulas",
            SuiteId::Confinement => "Confinement",
            SuiteId::Shadowing => "Shadowing",
            SuiteId::AvoidedInvariance => "AvoidedInvariance",
            SuiteId::Escape => "Escape",
            SuiteId::GrowthBound => "GrowthBound",
            SuiteId::MeanValue => "MeanValue",
            SuiteId::Convergence => "Convergence",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = HusError;

    /// Case-insensitive; `_` and `-` are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .flat_map(char::to_lowercase)
            .collect();
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name().to_lowercase() == key)
            .ok_or_else(|| HusError::UnknownSuite(s.to_string()))
    }
}

/// Optional overrides for a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Use this map in every trial instead of random draws.
    pub map: Option<MobiusMap>,
    /// Draw maps from a pool of this many random maps (trial `i` uses map `i % pool`).
    pub map_pool: Option<u64>,
    pub delta: Option<f64>,
    /// Orbit length for the dynamical suites.
    pub steps: Option<usize>,
    /// Multiplies every residual tolerance.
    pub tolerance_scale: f64,
    /// Run the hypothesis-violating variant (Confinement and AvoidedInvariance only).
    pub violate_hypothesis: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            map: None,
            map_pool: None,
            delta: None,
            steps: None,
            tolerance_scale: 1.0,
            violate_hypothesis: false,
        }
    }
}

impl SuiteConfig {
    pub fn with_map(map: MobiusMap) -> Self {
        SuiteConfig {
            map: Some(map),
            ..Self::default()
        }
    }

    fn tol(&self, base: f64) -> f64 {
        base * self.tolerance_scale
    }

    fn map_for(&self, seed: u64, trial: u64) -> MobiusMap {
        if let Some(m) = self.map {
            return m;
        }
        let index = match self.map_pool {
            Some(pool) if pool > 0 => trial % pool,
            _ => trial,
        };
        random_hyperbolic_map(trial_seed(seed ^ 0x6d61_7073, index))
    }
}

/// A failing (or worst) trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub trial: u64,
    pub trial_seed: u64,
    pub residual: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteId,
    pub trials: u64,
    pub failures: u64,
    pub worst_residual: f64,
    pub witnesses: Vec<Witness>,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    pub const MAX_WITNESSES: usize = 10;

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Result of one trial.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TrialOutcome {
    pub residual: f64,
    pub failed: bool,
    pub note: String,
}

impl TrialOutcome {
    pub fn check(residual: f64, tol: f64, note: impl FnOnce() -> String) -> Self {
        let failed = !(residual <= tol);
        TrialOutcome {
            residual,
            failed,
            note: if failed { note() } else { String::new() },
        }
    }

    pub fn fail(residual: f64, note: String) -> Self {
        TrialOutcome {
            residual,
            failed: true,
            note,
        }
    }
}

/// Random map with real trace in `[2.1, 6]`, `0.2 <= |c| <= 2` and `|a| <= 3`.
pub fn random_hyperbolic_map(seed: u64) -> MobiusMap {
    let mut rng = SplitMix64::keyed(seed, 0);
    let trace = rng.uniform(2.1, 6.0);
    let c_abs = rng.uniform(0.04, 4.0).sqrt();
    let c = Complex64::from_polar(c_abs, rng.angle());
    let a = rng.in_disk(Complex64::new(0.0, 0.0), 3.0);
    let d = Complex64::new(trace, 0.0) - a;
    let b = (a * d - 1.0) / c;
    MobiusMap::normalize(a, b, c, d).expect("determinant is one by construction")
}

pub fn run_suite(id: SuiteId, trials: u64, seed: u64) -> Result<SuiteReport> {
    run_suite_with(id, trials, seed, &SuiteConfig::default())
}

pub fn run_suite_with(id: SuiteId, trials: u64, seed: u64, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if trials == 0 {
        return Err(HusError::InvalidParameter("trials must be at least 1".into()));
    }
    if let Some(delta) = cfg.delta {
        if !(delta > 0.0) {
            return Err(HusError::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
    }
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let ts = trial_seed(seed, trial);
            let map = cfg.map_for(seed, trial);
            suites::run_trial(id, &map, ts, cfg)
        })
        .collect();
    let mut report = SuiteReport {
        suite: id,
        trials,
        failures: 0,
        worst_residual: 0.0,
        witnesses: Vec::new(),
        seed,
        wall_time: Duration::ZERO,
    };
    for (trial, out) in (0..trials).zip(outcomes) {
        if out.residual.is_nan() || out.residual > report.worst_residual {
            report.worst_residual = if out.residual.is_nan() { f64::INFINITY } else { out.residual };
        }
        if out.failed {
            report.failures += 1;
            if report.witnesses.len() < SuiteReport::MAX_WITNESSES {
                report.witnesses.push(Witness {
                    trial,
                    trial_seed: trial_seed(seed, trial),
                    residual: out.residual,
                    note: out.note,
                });
            }
        }
    }
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Runs every suite in [`SuiteId::ALL`] order.
pub fn run_all(trials: u64, seed: u64, cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    SuiteId::ALL
        .iter()
        .map(|&id| run_suite_with(id, trials, seed, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::MapClass;

    #[test]
    fn suite_names_round_trip() {
        for id in SuiteId::ALL {
            assert_eq!(id.name().parse::<SuiteId>().unwrap(), id);
        }
        assert_eq!("avoided_invariance".parse::<SuiteId>().unwrap(), SuiteId::AvoidedInvariance);
        assert_eq!("growth-bound".parse::<SuiteId>().unwrap(), SuiteId::GrowthBound);
        assert!(matches!("Bogus".parse::<SuiteId>(), Err(HusError::UnknownSuite(_))));
    }

    #[test]
    fn random_maps_are_hyperbolic() {
        for seed in 0..1000 {
            let g = random_hyperbolic_map(seed);
            assert_eq!(g.classify(), MapClass::HyperbolicRealTrace);
            assert!((g.determinant() - 1.0).norm() <= 1e-12);
            assert!(g.c().norm() >= 0.2 - 1e-12 && g.c().norm() <= 2.0 + 1e-12);
        }
        assert_eq!(random_hyperbolic_map(5), random_hyperbolic_map(5));
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_suite(SuiteId::Nesting, 0, 1).is_err());
    }

    #[test]
    fn every_suite_passes_small_runs() {
        for id in SuiteId::ALL {
            let rep = run_suite(id, 40, 3).unwrap();
            assert!(rep.passed(), "{id}: {:?}", rep.witnesses);
            assert!(rep.worst_residual >= 0.0);
        }
    }

    #[test]
    fn report_json_shape() {
        let rep = run_suite(SuiteId::Conjugation, 5, 7).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["failures", "seed", "suite", "trials", "witnesses", "worst_residual"]);
        assert_eq!(v["suite"], "Conjugation");
    }

    #[test]
    fn conjugation_example() {
        let rep = run_suite(SuiteId::Conjugation, 1000, 7).unwrap();
        assert_eq!(rep.failures, 0);
        assert!(rep.worst_residual <= 1e-8);
    }

    #[test]
    fn golden_escape_example() {
        let cfg = SuiteConfig {
            delta: Some(0.01),
            ..SuiteConfig::with_map(MobiusMap::golden())
        };
        let rep = run_suite_with(SuiteId::Escape, 10, 1, &cfg).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn reports_do_not_depend_on_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_suite(SuiteId::Shadowing, 30, 11).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn overdriven_confinement_exits() {
        let cfg = SuiteConfig {
            violate_hypothesis: true,
            ..SuiteConfig::default()
        };
        let rep = run_suite_with(SuiteId::Confinement, 1000, 1, &cfg).unwrap();
        assert!(rep.failures > 0);
    }

    #[test]
    fn avoided_invariance_from_inside_enters() {
        let cfg = SuiteConfig {
            violate_hypothesis: true,
            ..SuiteConfig::default()
        };
        let rep = run_suite_with(SuiteId::AvoidedInvariance, 100, 1, &cfg).unwrap();
        assert!(rep.failures > 0);
    }
}
