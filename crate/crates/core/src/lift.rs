//! The skew product `F(ω, x) = (σω, f_{ω₀}(x))` on words times the base and
//! its lifted potential `Φ⁺(ω, x) = φ_{ω₀}(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::MultiPotential;
use crate::pressure::{estimate_many, EstimateConfig, PressureEstimate, PressureKind, Region};
use crate::system::{Point, SemigroupSystem};

/// A finite prefix of a one-sided word together with a base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftPoint {
    /// Zero-based symbols still to be consumed.
    pub word_prefix: Vec<usize>,
    pub base: Point,
}

impl LiftPoint {
    pub fn new(word_prefix: Vec<usize>, base: Point) -> Self {
        LiftPoint { word_prefix, base }
    }
}

pub fn skew_apply(system: &SemigroupSystem, p: &LiftPoint) -> Result<LiftPoint> {
    let (&j, rest) = p.word_prefix.split_first().ok_or(Error::ExhaustedPrefix)?;
    if j >= system.m() {
        return Err(Error::InvalidWord(format!("symbol {} out of range", j + 1)));
    }
    Ok(LiftPoint { word_prefix: rest.to_vec(), base: system.apply(j, p.base) })
}

pub fn lifted_potential(phi: &MultiPotential, p: &LiftPoint) -> Result<f64> {
    let &j = p.word_prefix.first().ok_or(Error::ExhaustedPrefix)?;
    Ok(phi.eval(j, p.base))
}

/// `Σ_{k<n} Φ⁺(F^k p)`.
pub fn lifted_sum(system: &SemigroupSystem, phi: &MultiPotential, p: &LiftPoint, n: usize) -> Result<f64> {
    let mut q = p.clone();
    let mut sum = 0.0;
    for _ in 0..n {
        sum += lifted_potential(phi, &q)?;
        q = skew_apply(system, &q)?;
    }
    Ok(sum)
}

/// Pressure of `Φ⁺` under `F`. Bowen balls upstairs are products of a
/// depth-`n` cylinder with the base ball along its word, so the cover cost is
/// the sum over words of the base costs: the free estimate plus `log m`.
pub fn lift_pressure_estimate(
    system: &SemigroupSystem,
    phi: &MultiPotential,
    n: usize,
    eps: f64,
    config: &EstimateConfig,
) -> Result<PressureEstimate> {
    crate::pressure::estimate_pressure(system, phi, &PressureKind::Lift, n, eps, &Region::Whole, config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub lift: PressureEstimate,
    pub amalgamated: PressureEstimate,
    pub condensed_upper: PressureEstimate,
    pub log_m: f64,
    /// `lift.upper − (amalgamated.lower + log m)`.
    pub lower_margin: f64,
    /// `condensed_upper.upper + log m − lift.lower`.
    pub upper_margin: f64,
    pub holds: bool,
}

/// Checks `P^A + log m ≤ P(Φ⁺, F) ≤ P_u + log m` within interval widths.
pub fn check_lift_inequalities(
    system: &SemigroupSystem,
    phi: &MultiPotential,
    n: usize,
    eps: f64,
    config: &EstimateConfig,
) -> Result<LiftReport> {
    let kinds = [PressureKind::Lift, PressureKind::Amalgamated, PressureKind::CondensedUpper];
    let mut e = estimate_many(system, phi, &kinds, n, eps, &Region::Whole, config)?.into_iter();
    let (lift, amalgamated, condensed_upper) = (e.next().expect("3"), e.next().expect("3"), e.next().expect("3"));
    let log_m = (system.m() as f64).ln();
    let lower_margin = lift.upper - (amalgamated.lower + log_m);
    let upper_margin = condensed_upper.upper + log_m - lift.lower;
    Ok(LiftReport {
        holds: lower_margin >= 0.0 && upper_margin >= 0.0,
        lift,
        amalgamated,
        condensed_upper,
        log_m,
        lower_margin,
        upper_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Component, Observable};
    use crate::systems::parse_system;

    #[test]
    fn skew_step_on_doubling() {
        let s = parse_system("circle:2").unwrap();
        let q = skew_apply(&s, &LiftPoint::new(vec![0], Point::on_line(0.3))).unwrap();
        assert!(q.word_prefix.is_empty());
        assert!((q.base.x - 0.6).abs() < 1e-15);
        assert_eq!(skew_apply(&s, &q), Err(Error::ExhaustedPrefix));
    }

    #[test]
    fn lifted_sum_matches_consecutive_sum() {
        let s = parse_system("circle:2|2").unwrap();
        let x = Component::new(Observable::Coordinate { axis: 0 });
        let phi = MultiPotential::new(vec![x.clone(), x]).unwrap();
        let p = LiftPoint::new(vec![0, 0], Point::on_line(0.3));
        assert!((lifted_sum(&s, &phi, &p, 2).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn single_map_lift_is_base_pressure() {
        let s = parse_system("circle:2").unwrap();
        let cfg = EstimateConfig::default();
        let phi = MultiPotential::zero(1);
        let l = lift_pressure_estimate(&s, &phi, 10, 0.125, &cfg).unwrap();
        let t = crate::pressure::estimate_pressure(
            &s,
            &phi,
            &PressureKind::Trajectory(crate::word::WordRule::Constant(0)),
            10,
            0.125,
            &Region::Whole,
            &cfg,
        )
        .unwrap();
        assert!((l.upper - t.upper).abs() < 1e-12 && (l.lower - t.lower).abs() < 1e-12);
    }

    #[test]
    fn golden_sandwich() {
        let s = parse_system("diag:2,3|3,2").unwrap();
        let r = check_lift_inequalities(&s, &MultiPotential::zero(2), 10, 0.25, &EstimateConfig::default()).unwrap();
        assert!(r.holds, "{r:?}");
    }
}
