use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hus_core::dynamics::{
    self, confinement_eps_cap, contraction_constant, default_delta, escape_time_bound,
    expansion_constant, perturbed_orbit, shadow_orbit, transfer_epsilon, BoundRegime,
};
use hus_core::regions::{self, export_regions};
use hus_core::verify::{run_suite_with, SuiteConfig, SuiteId, SuiteReport};
use hus_core::{
    ExtendedComplex, HusError, HyperbolicProfile, MapClass, MapFile, MobiusMap, ModelKind,
    PerturbationModel, RegionTag,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{Command, MapSource, Model, Regime, EXIT_INFINITY, EXIT_NOT_HYPERBOLIC, EXIT_VERIFY};

const TOLERANCE_ENV: &str = "MOEBIUS_HUS_TOLERANCE_SCALE";
/// Rounding allowance when counting bound violations in the orbit summary.
const BOUND_SLACK: f64 = 1e-12;

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Classify { src } => classify(&src),
        Command::Regions {
            src,
            r,
            delta,
            samples,
            out,
        } => {
            let p = load_profile(&src)?;
            let delta = delta.unwrap_or_else(|| default_delta(p.k()));
            let entries = export_regions(&p, r, delta, samples)?;
            let doc = json!({
                "profile": p.summary(),
                "r": r,
                "delta": delta,
                "regions": entries,
            });
            emit(out.as_deref(), &pretty(&doc))?;
            Ok(0)
        }
        Command::Orbit {
            src,
            z0,
            eps,
            steps,
            model,
            seed,
            t,
            delta,
            regime,
            batch,
            out,
        } => {
            let p = load_profile(&src)?;
            let opts = OrbitOpts {
                z0: parse_point(&z0)?,
                eps,
                steps,
                kind: model_kind(model),
                t: t.unwrap_or(p.tau()),
                delta: delta.unwrap_or_else(|| default_delta(p.k())),
                regime,
            };
            orbit(&p, &opts, seed, batch, out.as_deref())
        }
        Command::Bounds { src, t, delta } => {
            let p = load_profile(&src)?;
            let t = t.unwrap_or(p.tau());
            let delta = delta.unwrap_or_else(|| default_delta(p.k()));
            let doc = bounds(&p, t, delta)?;
            println!("{}", pretty(&doc));
            Ok(0)
        }
        Command::Verify {
            src,
            suite,
            trials,
            seed,
            delta,
            steps,
            out,
        } => {
            let ids = if suite.eq_ignore_ascii_case("all") {
                SuiteId::ALL.to_vec()
            } else {
                vec![suite.parse::<SuiteId>()?]
            };
            let cfg = SuiteConfig {
                map: if src.map.is_some() || src.preset.is_some() {
                    Some(load_map(&src)?)
                } else {
                    None
                },
                delta,
                steps,
                tolerance_scale: tolerance_scale()?,
                ..SuiteConfig::default()
            };
            let reports = ids
                .iter()
                .map(|&id| run_suite_with(id, trials, seed, &cfg))
                .collect::<hus_core::Result<Vec<SuiteReport>>>()?;
            let failures: u64 = reports.iter().map(|r| r.failures).sum();
            let doc = json!({
                "seed": seed,
                "trials": trials,
                "failures": failures,
                "suites": reports,
            });
            emit(out.as_deref(), &pretty(&doc))?;
            for r in &reports {
                eprintln!(
                    "{:<18} {:>4} failures  worst {:.3e}  {:.2?}",
                    r.suite.name(),
                    r.failures,
                    r.worst_residual,
                    r.wall_time
                );
            }
            Ok(if failures > 0 { EXIT_VERIFY } else { 0 })
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut body = text.to_string();
            if !body.ends_with('\n') {
                body.push('\n');
            }
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{}", text.trim_end_matches('\n'))?;
            Ok(())
        }
    }
}

fn tolerance_scale() -> Result<f64> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(v) => {
            let s: f64 = v
                .trim()
                .parse()
                .with_context(|| format!("{TOLERANCE_ENV}={v} is not a number"))?;
            if s.is_nan() || s <= 0.0 || !s.is_finite() {
                bail!("{TOLERANCE_ENV} must be positive, got {s}");
            }
            Ok(s)
        }
        Err(_) => Ok(1.0),
    }
}

fn load_map(src: &MapSource) -> Result<MobiusMap> {
    match (&src.map, &src.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(MapFile::parse(&text)?.to_map()?)
        }
        (None, Some(name)) => Ok(hus_core::preset(name)?),
        (None, None) => bail!("one of --map or --preset is required"),
    }
}

fn load_profile(src: &MapSource) -> Result<HyperbolicProfile> {
    let g = load_map(src)?;
    Ok(HyperbolicProfile::new(&g)?)
}

fn classify(src: &MapSource) -> Result<u8> {
    let g = load_map(src)?;
    let class = g.classify();
    let coefficients: Vec<[f64; 2]> = g.coefficients().iter().map(|z| [z.re, z.im]).collect();
    let mut doc = json!({
        "class": format!("{class:?}"),
        "coefficients": coefficients,
        "trace": [g.trace().re, g.trace().im],
    });
    let code = match (class, HyperbolicProfile::new(&g)) {
        (MapClass::HyperbolicRealTrace, Ok(p)) => {
            doc["profile"] = serde_json::to_value(p.summary())?;
            0
        }
        (_, Err(e)) => {
            doc["reason"] = Value::String(e.to_string());
            EXIT_NOT_HYPERBOLIC
        }
        _ => EXIT_NOT_HYPERBOLIC,
    };
    println!("{}", pretty(&doc));
    Ok(code)
}

fn parse_point(s: &str) -> Result<ExtendedComplex> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(ExtendedComplex::Infinity);
    }
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|e| HusError::Parse(format!("point component `{t}`: {e}")).into())
    };
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(HusError::Parse(format!("point `{s}` is not `re,im`, `re` or `inf`")).into()),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(HusError::Parse(format!("point `{s}` is not finite")).into());
    }
    Ok(ExtendedComplex::new(z))
}

fn model_kind(m: Model) -> ModelKind {
    match m {
        Model::None => ModelKind::None,
        Model::Uniform => ModelKind::UniformDisk,
        Model::Boundary => ModelKind::BoundaryAdversarial,
        Model::Outward => ModelKind::RadialOutward,
    }
}

struct OrbitOpts {
    z0: ExtendedComplex,
    eps: f64,
    steps: usize,
    kind: ModelKind,
    t: f64,
    delta: f64,
    regime: Regime,
}

struct OrbitRun {
    lines: String,
    summary: Value,
    hit_infinity: bool,
}

fn orbit_run(p: &HyperbolicProfile, o: &OrbitOpts, seed: u64) -> Result<OrbitRun> {
    let model = PerturbationModel::new(o.kind, o.eps, seed)?;
    let rec = perturbed_orbit(p.map(), o.z0, o.steps, &model);
    let in_s = regions::s_contains(p, 1.0 + o.t, o.z0);
    let regime = match o.regime {
        Regime::Contraction => BoundRegime::Contraction {
            k_contraction: contraction_constant(o.t)?,
        },
        Regime::Auto if in_s => BoundRegime::Contraction {
            k_contraction: contraction_constant(o.t)?,
        },
        _ => BoundRegime::Combined(dynamics::BoundSet::for_profile(p, o.delta)?),
    };
    let mut rec = shadow_orbit(p.map(), &rec, regime, o.eps);
    rec.tag(&dynamics::RegionTagger::new(p, o.t, Some(o.delta)));
    let exits = rec
        .regions
        .iter()
        .filter(|t| !matches!(t, RegionTag::S | RegionTag::Escaped))
        .count();
    let (regime_name, limit) = match regime {
        BoundRegime::Contraction { k_contraction } => ("contraction", o.eps / (1.0 - k_contraction)),
        BoundRegime::Combined(set) => (
            "combined",
            (set.growth_coefficient + set.contraction_coefficient) * o.eps,
        ),
    };
    let summary = json!({
        "summary": {
            "seed": seed,
            "steps": rec.len().saturating_sub(1),
            "regime": regime_name,
            "eps": o.eps,
            "eps_cap": confinement_eps_cap(p, o.t),
            "t": o.t,
            "max_dev": rec.max_deviation(),
            "bound_limit": limit,
            "bound_violations": rec
                .deviations
                .iter()
                .zip(&rec.bounds)
                .filter(|(d, b)| **d > **b * (1.0 + BOUND_SLACK) + BOUND_SLACK)
                .count(),
            "points_outside_s": exits,
            "infinity_at": rec.infinity_at,
        }
    });
    Ok(OrbitRun {
        lines: rec.to_json_lines(),
        summary,
        hit_infinity: rec.is_truncated(),
    })
}

fn orbit(p: &HyperbolicProfile, o: &OrbitOpts, seed: u64, batch: Option<u64>, out: Option<&Path>) -> Result<u8> {
    let runs: Vec<OrbitRun> = match batch {
        None => vec![orbit_run(p, o, seed)?],
        Some(0) => bail!(HusError::InvalidParameter("--batch must be at least 1".into())),
        Some(n) => (0..n)
            .into_par_iter()
            .map(|i| orbit_run(p, o, seed.wrapping_add(i)))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut body = String::new();
    for run in &runs {
        if batch.is_some() {
            body.push_str(&serde_json::to_string(&json!({"seed": run.summary["summary"]["seed"]}))?);
            body.push('\n');
        }
        body.push_str(&run.lines);
    }
    let summaries: Vec<String> = runs
        .iter()
        .map(|r| serde_json::to_string(&r.summary).expect("summary"))
        .collect();
    match out {
        Some(path) => {
            fs::write(path, &body).with_context(|| format!("writing {}", path.display()))?;
            for s in &summaries {
                println!("{s}");
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            for s in &summaries {
                writeln!(stdout, "{s}")?;
            }
        }
    }
    Ok(if runs.iter().any(|r| r.hit_infinity) { EXIT_INFINITY } else { 0 })
}

fn bound_values(p: &HyperbolicProfile, delta: f64) -> Result<Value> {
    let escape = escape_time_bound(p, delta)?;
    let m = expansion_constant(p, delta)?;
    let et = regions::epsilon_tilde(p, delta)?;
    Ok(json!({
        "delta": delta,
        "epsilon_tilde": et,
        "M": m,
        "N": escape.n,
        "N_expression": escape.expression,
        "N0": escape.n0,
        "N0_expression": escape.expression0,
    }))
}

fn bounds(p: &HyperbolicProfile, t: f64, delta: f64) -> Result<Value> {
    let k_t = contraction_constant(t)?;
    let values = bound_values(p, delta)?;
    let set = dynamics::BoundSet::for_profile(p, delta)?;
    let transfer = transfer_epsilon(p, delta);
    let doubled = match bound_values(p, 2.0 * delta) {
        Ok(v) => {
            let ratio = |key: &str| v[key].as_f64().unwrap() / values[key].as_f64().unwrap();
            let diff = json!({
                "epsilon_tilde_ratio": ratio("epsilon_tilde"),
                "M_ratio": ratio("M"),
                "N_change": v["N"].as_i64().unwrap() - values["N"].as_i64().unwrap(),
            });
            let mut v = v;
            v["diff"] = diff;
            v
        }
        Err(e) => json!({ "delta": 2.0 * delta, "gated": e.to_string() }),
    };
    Ok(json!({
        "profile": p.summary(),
        "t": t,
        "K": k_t,
        "eps_cap": confinement_eps_cap(p, t),
        "values": values,
        "transfer_epsilon": transfer,
        "bound_set": set,
        "H": {
            "growth_coefficient": set.growth_coefficient,
            "contraction_coefficient": set.contraction_coefficient,
        },
        "at_double_delta": doubled,
    }))
}
