//! Unstable multi-potentials of conformal expanding systems and the root of
//! the amalgamated pressure equation `t ↦ P^A(tΦ^u)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Component, MultiPotential};
use crate::pressure::{estimate_pressure, EstimateConfig, PressureKind, Region};
use crate::system::SemigroupSystem;
use crate::word::WordRule;

/// `log |Df_j|` for each generator, constant for the supported systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionField {
    pub log_expansion: Vec<f64>,
}

impl ExpansionField {
    /// Rejects generators that are not conformal or not expanding.
    pub fn of(system: &SemigroupSystem) -> Result<Self> {
        let log_expansion = system
            .generators()
            .iter()
            .enumerate()
            .map(|(j, g)| match g.uniform_expansion() {
                Some(l) if l > 1.0 => Ok(l.ln()),
                Some(l) => Err(Error::InvalidSystem(format!("generator {} has expansion {l} ≤ 1", j + 1))),
                None => Err(Error::InvalidSystem(format!("generator {} is not conformal", j + 1))),
            })
            .collect::<Result<_>>()?;
        Ok(ExpansionField { log_expansion })
    }
}

/// `Φ^u = (−log|Df_1|, …, −log|Df_m|)`.
pub fn unstable_multipotential(system: &SemigroupSystem) -> Result<MultiPotential> {
    let field = ExpansionField::of(system)?;
    MultiPotential::new(field.log_expansion.iter().map(|l| Component::constant(-l)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionResult {
    pub t_ua: f64,
    pub per_map_roots: Vec<f64>,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `(t, midpoint of the estimate)` for every evaluation of the main root.
    pub evaluations: Vec<(f64, f64)>,
}

/// Bisection on the midpoint of the `kind` estimate of `tΦ^u` until the
/// bracket is narrower than `tol`. A bracket without a sign change is
/// widened once on each side.
pub fn pressure_root(
    system: &SemigroupSystem,
    kind: &PressureKind,
    n: usize,
    eps: f64,
    bracket: (f64, f64),
    tol: f64,
    config: &EstimateConfig,
) -> Result<(f64, (f64, f64), usize, Vec<(f64, f64)>)> {
    let phi = unstable_multipotential(system)?;
    let mut evals = Vec::new();
    let mut p = |t: f64| -> Result<f64> {
        let e = estimate_pressure(system, &phi.scaled(t), kind, n, eps, &Region::Whole, config)?;
        evals.push((t, e.midpoint()));
        Ok(e.midpoint())
    };
    let (mut a, mut b) = bracket;
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty bracket [{a}, {b}]")));
    }
    if !(p(a)? > 0.0 && p(b)? < 0.0) {
        let w = b - a;
        a -= w;
        b += w;
        if !(p(a)? > 0.0 && p(b)? < 0.0) {
            return Err(Error::NoSignChange(a, b));
        }
    }
    let mut iterations = 0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if p(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    let mut sorted = evals.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    if sorted.windows(2).any(|w| w[1].0 > w[0].0 && !(w[1].1 < w[0].1)) {
        return Err(Error::Infeasible("pressure estimates are not strictly decreasing in t".into()));
    }
    Ok((0.5 * (a + b), (a, b), iterations, evals))
}

/// Root of the amalgamated pressure of `tΦ^u`, with the roots of each
/// single generator along its constant word.
pub fn bowen_root(
    system: &SemigroupSystem,
    n: usize,
    eps: f64,
    bracket: (f64, f64),
    config: &EstimateConfig,
) -> Result<DimensionResult> {
    const TOL: f64 = 1e-3;
    let (t_ua, br, iterations, evaluations) =
        pressure_root(system, &PressureKind::Amalgamated, n, eps, bracket, TOL, config)?;
    let per_map_roots = (0..system.m())
        .map(|j| {
            let kind = PressureKind::Trajectory(WordRule::Constant(j));
            pressure_root(system, &kind, n, eps, bracket, TOL, config).map(|r| r.0)
        })
        .collect::<Result<_>>()?;
    Ok(DimensionResult { t_ua, per_map_roots, bracket: br, iterations, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::parse_system;

    #[test]
    fn unstable_potential_values() {
        let s = parse_system("cantor:3,3|5,5").unwrap();
        let phi = unstable_multipotential(&s).unwrap();
        assert_eq!(phi.constant_values().unwrap(), vec![-(3f64.ln()), -(5f64.ln())]);
        assert!(unstable_multipotential(&parse_system("diag:2,3").unwrap()).is_err());
    }

    #[test]
    fn ternary_cantor_root() {
        let s = parse_system("cantor:3,3").unwrap();
        let r = bowen_root(&s, 128, 0.125, (0.0, 1.0), &EstimateConfig::default()).unwrap();
        assert!((r.t_ua - 2f64.ln() / 3f64.ln()).abs() < 0.02, "{r:?}");
        assert!(r.bracket.0 <= r.t_ua && r.t_ua <= r.bracket.1);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let s = parse_system("cantor:3,3").unwrap();
        let e = pressure_root(&s, &PressureKind::Amalgamated, 32, 0.125, (5.0, 6.0), 1e-3, &EstimateConfig::default());
        assert!(matches!(e, Err(Error::NoSignChange(..))));
    }
}
