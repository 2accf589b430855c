//! Structural properties shared by the property suite and the acceptance run.

#![allow(dead_code)]

use presslab_core::ball::BallKind;
use presslab_core::{
    ball_contains, consecutive_sum, dn_distance, estimate_pressure, orbit, vitali_disjointify, BallSpec, Domain,
    EstimateConfig, MultiPotential, Point, PressureKind, Region, SemigroupSystem, Word,
};

pub type Check = Result<(), String>;

/// A point of the domain from two numbers in `[0, 1)`.
pub fn point_in(domain: Domain, u: f64, v: f64) -> Point {
    match domain {
        Domain::Torus2 => Point::new(u, v),
        _ => Point::on_line(u),
    }
}

/// A point near `c`, offset by at most `r` along each axis and kept in the domain.
pub fn near(domain: Domain, c: Point, r: f64, u: f64, v: f64) -> Point {
    let (dx, dy) = ((2.0 * u - 1.0) * r, (2.0 * v - 1.0) * r);
    match domain {
        Domain::Torus2 => Point::new((c.x + dx).rem_euclid(1.0), (c.y + dy).rem_euclid(1.0)),
        Domain::Circle => Point::on_line((c.x + dx).rem_euclid(1.0)),
        _ => Point::on_line((c.x + dx).clamp(0.0, 1.0 - 1e-12)),
    }
}

/// Condensed ⊆ trajectory ⊆ exhaustive, and deeper or smaller balls are contained in shallower or larger ones.
pub fn ball_nesting(system: &SemigroupSystem, x: Point, z: Point, word: &Word, eps: f64) -> Check {
    let n = word.len();
    let has = |kind: BallKind, r: f64| ball_contains(system, &BallSpec::new(kind, x, r).unwrap(), z).unwrap();
    let cond = has(BallKind::Condensed(n), eps);
    let traj = has(BallKind::Trajectory(word.clone()), eps);
    let exh = has(BallKind::Exhaustive(n), eps);
    if cond && !traj {
        return Err(format!("condensed ball not inside the trajectory ball at {z:?}"));
    }
    if traj && !exh {
        return Err(format!("trajectory ball not inside the exhaustive ball at {z:?}"));
    }
    if n > 1 && traj && !has(BallKind::Trajectory(word.prefix(n - 1).unwrap()), eps) {
        return Err("deeper trajectory ball escapes its prefix ball".into());
    }
    if traj && !has(BallKind::Trajectory(word.clone()), 1.5 * eps) {
        return Err("ball escapes its enlargement".into());
    }
    Ok(())
}

/// `S_{uv} φ(x) = S_u φ(x) + S_v φ(f_u x)`.
pub fn concatenation_additivity(system: &SemigroupSystem, phi: &MultiPotential, x: Point, u: &Word, v: &Word) -> Check {
    let m = system.m();
    let uv = Word::new([u.symbols(), v.symbols()].concat(), m).unwrap();
    let fx = *orbit(system, x, u).last().unwrap();
    let whole = consecutive_sum(system, phi, x, &uv);
    let split = consecutive_sum(system, phi, x, u) + consecutive_sum(system, phi, fx, v);
    if (whole - split).abs() > 1e-12 * whole.abs().max(1.0) {
        return Err(format!("sum {whole} differs from split sum {split}"));
    }
    Ok(())
}

/// The kept balls are disjoint, and every input ball lies in the `3ε` enlargement of a kept ball.
pub fn vitali(system: &SemigroupSystem, balls: &[BallSpec], probes: &[Point]) -> Check {
    let kept = vitali_disjointify(system, balls).map_err(|e| e.to_string())?;
    if kept.is_empty() {
        return Err("no ball kept".into());
    }
    let eps = balls[0].radius;
    let word_of = |b: &BallSpec| match &b.kind {
        BallKind::Trajectory(w) => w.clone(),
        _ => unreachable!(),
    };
    for z in probes {
        let inside = kept.iter().filter(|b| ball_contains(system, b, *z).unwrap()).count();
        if inside > 1 {
            return Err(format!("{z:?} lies in {inside} kept balls"));
        }
    }
    for b in balls {
        let w = word_of(b);
        // Kept balls are chosen shallow-first, so a covering one is never deeper.
        let cover = kept.iter().find(|k| {
            let kw = word_of(k);
            kw.len() <= w.len() && (*k == b || dn_distance(system, k.center, b.center, &kw) < 2.0 * eps)
        });
        let Some(k) = cover else {
            return Err(format!("ball at {:?} of depth {} is not covered", b.center, w.len()));
        };
        let enlarged = BallSpec::trajectory(word_of(k), k.center, 3.0 * eps).unwrap();
        for z in probes.iter().filter(|z| ball_contains(system, b, **z).unwrap()) {
            if !ball_contains(system, &enlarged, *z).unwrap() {
                return Err(format!("{z:?} escapes the 3ε enlargement"));
            }
        }
    }
    Ok(())
}

/// The packing lower bound never exceeds the cover upper bound.
pub fn packing_below_cover(system: &SemigroupSystem, phi: &MultiPotential, kind: &PressureKind, n: usize, eps: f64) -> Check {
    let e = estimate_pressure(system, phi, kind, n, eps, &Region::Whole, &EstimateConfig::generic())
        .map_err(|e| e.to_string())?;
    if e.lower > e.upper + 1e-12 {
        return Err(format!("{}: packing {} above cover {}", kind.label(), e.lower, e.upper));
    }
    Ok(())
}

/// Relabeling generators, potentials and pools leaves every symmetric estimate unchanged.
pub fn permutation_equivariance(system: &SemigroupSystem, phi: &MultiPotential, perm: &[usize], n: usize, eps: f64) -> Check {
    let ps = system.permuted(perm).unwrap();
    let pp = phi.permuted(perm);
    let base = EstimateConfig::generic();
    let mut relabeled = base.clone();
    relabeled.pool.relabel = Some(perm.to_vec());
    for kind in [PressureKind::Amalgamated, PressureKind::CondensedUpper, PressureKind::ExhaustiveUpper] {
        let a = estimate_pressure(system, phi, &kind, n, eps, &Region::Whole, &base).map_err(|e| e.to_string())?;
        let b = estimate_pressure(&ps, &pp, &kind, n, eps, &Region::Whole, &relabeled).map_err(|e| e.to_string())?;
        if (a.upper - b.upper).abs() > 1e-9 || (a.lower - b.lower).abs() > 1e-9 {
            return Err(format!("{}: [{}, {}] vs [{}, {}]", kind.label(), a.lower, a.upper, b.lower, b.upper));
        }
    }
    Ok(())
}

/// Two runs with one seed give identical estimates.
pub fn determinism(system: &SemigroupSystem, phi: &MultiPotential, n: usize, eps: f64, seed: u64) -> Check {
    let cfg = EstimateConfig { method: presslab_core::MethodChoice::Generic, ..EstimateConfig::with_seed(seed) };
    let run = || presslab_core::estimate_many(system, phi, &PressureKind::all(), n, eps, &Region::Whole, &cfg);
    let (a, b) = (run().map_err(|e| e.to_string())?, run().map_err(|e| e.to_string())?);
    if a != b {
        return Err("estimates differ between identical runs".into());
    }
    Ok(())
}

/// Largest depth up to `n` whose generic grid fits the default caps.
pub fn fitting_depth(system: &SemigroupSystem, n: usize, eps: f64) -> usize {
    let cfg = EstimateConfig::generic();
    let phi = MultiPotential::zero(system.m());
    (1..=n)
        .rev()
        .find(|&k| {
            !matches!(
                estimate_pressure(system, &phi, &PressureKind::CondensedUpper, k, eps, &Region::Whole, &cfg),
                Err(presslab_core::Error::Infeasible(ref msg)) if msg.contains("grid spacing")
            )
        })
        .unwrap_or(1)
}
