//! The batch commands.

use std::fs;

use anyhow::{Context, Result};
use serde::Serialize;

use presslab_core::dimension::bowen_root;
use presslab_core::lift::check_lift_inequalities;
use presslab_core::localent::{local_amalgamated_entropy, marginal_bound_check, parse_measure, NamedMeasure};
use presslab_core::potential::random_potential;
use presslab_core::pressure::{
    estimate_many, estimates_to_csv, estimates_to_json, FrozenCover, trajectory_shift_check,
    verify_inequality_chain, CSV_HEADER,
};
use presslab_core::systems::parse_system;
use presslab_core::{extrapolate, Exec, Extrapolation, Point, PressureEstimate, PressureKind, Region, WordRule};

use crate::config::{parse_depths, parse_floats, ConfigFile};
use crate::run::{core_error, Format, RunConfig};

fn emit(run: &RunConfig, text: &str) -> Result<()> {
    match &run.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn grid_estimates(run: &RunConfig) -> Result<Vec<PressureEstimate>> {
    let mut out = Vec::new();
    for &eps in &run.radii {
        for &n in &run.depths {
            out.extend(estimate_many(&run.system, &run.phi, &run.kinds, n, eps, &Region::Whole, &run.estimate)?);
        }
    }
    Ok(out)
}

pub fn estimate(run: &RunConfig) -> Result<bool> {
    let est = grid_estimates(run)?;
    let text = match run.format {
        Format::Csv => estimates_to_csv(&est)?,
        Format::Json => estimates_to_json(&est)? + "\n",
    };
    emit(run, &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct SweepReport<'a> {
    schema_version: u32,
    estimates: &'a [PressureEstimate],
    extrapolations: &'a [Extrapolation],
}

pub fn sweep(run: &RunConfig) -> Result<bool> {
    let est = grid_estimates(run)?;
    let mut extra = Vec::new();
    for kind in &run.kinds {
        let seq: Vec<PressureEstimate> = est.iter().filter(|e| &e.kind == kind).cloned().collect();
        extra.push(extrapolate(&seq)?);
    }
    let text = match run.format {
        Format::Csv => {
            let mut s = estimates_to_csv(&est)?;
            for x in &extra {
                s.push_str(&format!(
                    "{},{},{},{},{},,extrapolated,{}\n",
                    x.kind.label(),
                    x.depths.last().copied().unwrap_or(0),
                    x.epsilon,
                    x.lower(),
                    x.upper(),
                    run.estimate.seed
                ));
            }
            debug_assert!(s.starts_with(CSV_HEADER));
            s
        }
        Format::Json => {
            serde_json::to_string_pretty(&SweepReport { schema_version: 1, estimates: &est, extrapolations: &extra })? + "\n"
        }
    };
    emit(run, &text)?;
    Ok(extra.iter().all(|x| x.converged))
}

#[derive(Debug, Serialize)]
struct CheckLine {
    name: String,
    passed: bool,
    margin: f64,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    schema_version: u32,
    passed: bool,
    tolerance: f64,
    checks: &'a [CheckLine],
}

/// Runs the configured checks; a check passes when its margin is at least
/// `-tolerance`.
pub fn verify(run: &RunConfig, file: &ConfigFile, tolerance: f64) -> Result<bool> {
    let checks_e = file.get("verify", "checks");
    let names: Vec<String> = match checks_e {
        Some(e) => e.value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => vec!["chain".into(), "shift".into(), "lift".into()],
    };
    let mut lines = Vec::new();
    let mut push = |name: String, margin: f64, detail: String| {
        lines.push(CheckLine { passed: margin >= -tolerance, name, margin, detail });
    };
    let (n_main, eps_main) = (*run.depths.last().expect("nonempty"), run.radii[0]);
    for name in &names {
        match name.as_str() {
            "chain" => {
                for &eps in &run.radii {
                    for &n in &run.depths {
                        let r = verify_inequality_chain(&run.system, &run.phi, n, eps, &run.estimate)?;
                        for c in &r.comparisons {
                            let margin = if c.exact {
                                c.right_bounds.1 - c.left_bounds.1 + 1e-12 * c.right_bounds.1.abs().max(1.0)
                            } else {
                                c.right_bounds.1 - c.left_bounds.0
                            };
                            push(format!("chain n={n} eps={eps}: {} <= {}", c.left, c.right), margin, String::new());
                        }
                    }
                }
            }
            "shift" => {
                let rule = if run.system.m() >= 2 { WordRule::Periodic(vec![0, 1]) } else { WordRule::Constant(0) };
                let r = trajectory_shift_check(&run.system, &run.phi, &rule, n_main, eps_main, &run.estimate)?;
                push(format!("shift {rule}"), r.bound - r.difference, format!("difference {:.6}", r.difference));
            }
            "lift" => {
                let r = check_lift_inequalities(&run.system, &run.phi, n_main, eps_main, &run.estimate)?;
                push(
                    "lift sandwich".into(),
                    r.lower_margin.min(r.upper_margin),
                    format!("lift [{:.4}, {:.4}]", r.lift.lower, r.lift.upper),
                );
            }
            "lipschitz" => {
                let pairs: usize = file.get("verify", "lipschitz_pairs").map(|e| e.parse("a count")).transpose()?.unwrap_or(10);
                let n: usize = file.get("verify", "lipschitz_n").map(|e| e.parse("a depth")).transpose()?.unwrap_or(3);
                let frozen = FrozenCover::new(&run.system, &run.phi, &PressureKind::Amalgamated, n, eps_main, &run.estimate)?;
                let (m, d) = (run.system.m(), run.system.domain());
                let seed = run.estimate.seed;
                for i in 0..pairs as u64 {
                    let phi = random_potential(seed.wrapping_add(2 * i), 0.3, m, d);
                    let psi = random_potential(seed.wrapping_add(2 * i + 1), 0.3, m, d);
                    let r = frozen.compare(&phi, &psi)?;
                    push(format!("lipschitz pair {i}"), r.bound + 1e-9 - r.difference, format!("difference {:.6}", r.difference));
                }
                let shift = 0.37;
                let r = frozen.compare(&run.phi, &run.phi.shifted(shift))?;
                push("lipschitz constant shift".into(), 1e-9 - (r.difference - shift).abs(), String::new());
            }
            "marginal" => {
                let me = file.require("verify", "measure")?;
                let product = match parse_measure(&me.value, run.system.domain()).map_err(|e| core_error(me, e))? {
                    NamedMeasure::Product(p) => p,
                    NamedMeasure::Base(_) => return Err(me.error("the marginal check needs a product measure").into()),
                };
                let count: usize = file.get("verify", "points").map(|e| e.parse("a count")).transpose()?.unwrap_or(50);
                let pts = product.base.sample(run.system.domain(), count, run.estimate.seed);
                let r = marginal_bound_check(&product, &run.system, &pts, eps_main, &run.depths, &run.estimate.pool, Exec::Parallel)?;
                for (i, p) in r.points.iter().enumerate() {
                    let e = &p.estimate;
                    let margin = (r.bound + p.tolerance - e.h_lower_local).min(e.h_lower_local - e.h_exhaustive_local);
                    push(format!("marginal point {i}"), margin, format!("h+ {:.4} bound {:.4}", e.h_exhaustive_local, r.bound));
                }
            }
            "separation" => {
                let e = file.require("verify", "separation")?;
                let specs: Vec<&str> = e.value.split(';').map(str::trim).collect();
                if specs.len() != 2 {
                    return Err(e.error("expected two systems separated by `;`").into());
                }
                let gap_needed: f64 = file.get("verify", "separation_gap").map(|g| g.parse("a number")).transpose()?.unwrap_or(0.15);
                let mut iv = Vec::new();
                for s in &specs {
                    let sys = parse_system(s).map_err(|err| core_error(e, err))?;
                    let mut seq = Vec::new();
                    for &n in &run.depths {
                        seq.extend(estimate_many(&sys, &presslab_core::MultiPotential::zero(sys.m()), &[PressureKind::ExhaustiveUpper], n, eps_main, &Region::Whole, &run.estimate)?);
                    }
                    iv.push(extrapolate(&seq)?);
                }
                let gap = (iv[0].value - iv[1].value).abs();
                let disjoint = iv[0].upper() < iv[1].lower() || iv[1].upper() < iv[0].lower();
                let margin = (gap - gap_needed).min(if disjoint { 0.0 } else { -1.0 });
                let yes = margin >= -tolerance;
                push(
                    "separation".into(),
                    margin,
                    format!("h+ {:.4} vs {:.4}; distinguishable: {}", iv[0].value, iv[1].value, if yes { "yes" } else { "no" }),
                );
            }
            other => {
                let e = checks_e.expect("names come from the entry");
                return Err(e.error(format!("unknown check `{other}`")).into());
            }
        }
    }
    let passed = lines.iter().all(|l| l.passed);
    for l in &lines {
        let tag = if l.passed { "PASS" } else { "FAIL" };
        eprintln!("{tag} {} (margin {:.6}) {}", l.name, l.margin, l.detail);
    }
    let text = serde_json::to_string_pretty(&VerifyReport { schema_version: 1, passed, tolerance, checks: &lines })? + "\n";
    emit(run, &text)?;
    Ok(passed)
}

pub fn dimension(run: &RunConfig, file: &ConfigFile) -> Result<bool> {
    let bracket = match file.get("dimension", "bracket") {
        Some(e) => match parse_floats(e)?.as_slice() {
            [a, b] => (*a, *b),
            _ => return Err(e.error("expected `low, high`").into()),
        },
        None => (0.0, 2.0),
    };
    let n = *run.depths.last().expect("nonempty");
    let r = bowen_root(&run.system, n, run.radii[0], bracket, &run.estimate)?;
    #[derive(Serialize)]
    struct Out<'a> {
        schema_version: u32,
        result: &'a presslab_core::dimension::DimensionResult,
    }
    emit(run, &(serde_json::to_string_pretty(&Out { schema_version: 1, result: &r })? + "\n"))?;
    Ok(r.per_map_roots.iter().all(|&t| r.t_ua <= t + 0.02))
}

pub fn localent(run: &RunConfig, file: &ConfigFile) -> Result<bool> {
    let me = file.require("localent", "measure")?;
    let domain = run.system.domain();
    let measure = parse_measure(&me.value, domain).map_err(|e| core_error(me, e))?;
    let base = match &measure {
        NamedMeasure::Base(b) => b.clone(),
        NamedMeasure::Product(p) => p.base.clone(),
    };
    let depths = match file.get("localent", "n") {
        Some(e) => parse_depths(e)?,
        None => run.depths.clone(),
    };
    let points: Vec<Point> = match file.get("localent", "points") {
        Some(e) if e.value.contains(';') || e.value.contains('.') => e
            .value
            .split(';')
            .map(|p| {
                let v = parse_floats(&crate::config::Entry { value: p.into(), line: e.line, column: e.column })?;
                match v.as_slice() {
                    [x] => Ok(Point::on_line(*x)),
                    [x, y] => Ok(Point::new(*x, *y)),
                    _ => Err(e.error(format!("bad point `{p}`"))),
                }
            })
            .collect::<Result<_, _>>()?,
        Some(e) => base.sample(domain, e.parse("a count")?, run.estimate.seed),
        None => base.sample(domain, 10, run.estimate.seed),
    };
    let eps = run.radii[0];
    let text = match &measure {
        NamedMeasure::Product(p) => {
            let r = marginal_bound_check(p, &run.system, &points, eps, &depths, &run.estimate.pool, Exec::Parallel)?;
            serde_json::to_string_pretty(&serde_json::json!({ "schema_version": 1, "marginal": r }))?
        }
        NamedMeasure::Base(b) => {
            let est = points
                .iter()
                .map(|&x| local_amalgamated_entropy(b, &run.system, x, eps, &depths, &run.estimate.pool))
                .collect::<presslab_core::Result<Vec<_>>>()?;
            serde_json::to_string_pretty(&serde_json::json!({ "schema_version": 1, "local": est }))?
        }
    };
    emit(run, &(text + "\n"))?;
    Ok(true)
}
