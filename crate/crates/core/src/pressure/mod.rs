//! Finite-scale pressure estimators.
//!
//! An estimate at depth `n` and radius `ε` is the interval
//! `[lower, upper]` where `upper = (1/n) log` of the cost of an explicit cover
//! and `lower` comes from a separated set or a volume argument, shifted down
//! by `d · log(1/(2ε)) / n` (`d` the domain dimension) so that the interval
//! also contains the `ε → 0` limit for box-like balls.

mod analytic;
mod checks;
mod extrapolate;
mod grid;
mod packing;
mod report;
mod session;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::potential::MultiPotential;
use crate::system::{Domain, SemigroupSystem};
use crate::word::{WordPool, WordRule};

pub use analytic::analytic_log_bounds;
pub(crate) use analytic::ln_ball_volume;
pub use checks::{
    lipschitz_check, trajectory_shift_check, FrozenCover, verify_inequality_chain, ChainReport, Comparison, LipschitzReport,
    ShiftReport,
};
pub use extrapolate::{extrapolate, Extrapolation};
pub use grid::{CoverAtom, CoverSolution};
pub use report::{estimates_to_csv, estimates_to_json, CSV_HEADER};
pub use session::Session;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PressureKind {
    Amalgamated,
    CondensedLower,
    CondensedUpper,
    ExhaustiveLower,
    ExhaustiveUpper,
    Trajectory(WordRule),
    Free,
    /// Classical pressure of the lifted potential under the skew product.
    Lift,
}

impl PressureKind {
    /// Every kind, with the trajectory kind along the constant word of the
    /// first generator.
    pub fn all() -> Vec<PressureKind> {
        vec![
            PressureKind::ExhaustiveLower,
            PressureKind::ExhaustiveUpper,
            PressureKind::Amalgamated,
            PressureKind::Free,
            PressureKind::CondensedLower,
            PressureKind::CondensedUpper,
            PressureKind::Trajectory(WordRule::Constant(0)),
        ]
    }

    pub fn label(&self) -> String {
        match self {
            PressureKind::Amalgamated => "amalgamated".into(),
            PressureKind::CondensedLower => "condensed_lower".into(),
            PressureKind::CondensedUpper => "condensed_upper".into(),
            PressureKind::ExhaustiveLower => "exhaustive_lower".into(),
            PressureKind::ExhaustiveUpper => "exhaustive_upper".into(),
            PressureKind::Trajectory(r) => {
                let join = |b: &[usize]| b.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join(",");
                match r {
                    WordRule::Constant(j) => format!("trajectory:const:{}", j + 1),
                    WordRule::Periodic(b) => format!("trajectory:periodic:{}", join(b)),
                    WordRule::Explicit(b) => format!("trajectory:explicit:{}", join(b)),
                }
            }
            PressureKind::Free => "free".into(),
            PressureKind::Lift => "lift".into(),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> PressureKind {
        match self {
            PressureKind::Trajectory(r) => PressureKind::Trajectory(r.permuted(perm)),
            k => k.clone(),
        }
    }
}

impl fmt::Display for PressureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PressureKind {
    type Err = Error;

    /// Accepts the labels above; trajectories are written
    /// `trajectory:const:j`, `trajectory:periodic:1,2` or
    /// `trajectory:explicit:1,2,2,…` with one-based symbols.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "amalgamated" => PressureKind::Amalgamated,
            "condensed_lower" => PressureKind::CondensedLower,
            "condensed_upper" | "condensed" => PressureKind::CondensedUpper,
            "exhaustive_lower" => PressureKind::ExhaustiveLower,
            "exhaustive_upper" | "exhaustive" => PressureKind::ExhaustiveUpper,
            "free" => PressureKind::Free,
            "lift" => PressureKind::Lift,
            _ => {
                let rest = s
                    .strip_prefix("trajectory:")
                    .ok_or_else(|| Error::Parse(format!("unknown pressure kind `{s}`")))?;
                let (tag, body) = rest.split_once(':').ok_or_else(|| Error::Parse(format!("bad trajectory `{s}`")))?;
                let syms = body
                    .split(',')
                    .map(|t| match t.trim().parse::<usize>() {
                        Ok(v) if v >= 1 => Ok(v - 1),
                        _ => Err(Error::Parse(format!("bad symbol `{t}` in `{s}`"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                match tag {
                    "const" if syms.len() == 1 => PressureKind::Trajectory(WordRule::Constant(syms[0])),
                    "periodic" => PressureKind::Trajectory(WordRule::Periodic(syms)),
                    "explicit" => PressureKind::Trajectory(WordRule::Explicit(syms)),
                    _ => return Err(Error::Parse(format!("bad trajectory `{s}`"))),
                }
            }
        })
    }
}

/// The set being covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub enum Region {
    /// The whole domain; for interval systems, the depth-`n` core `Λ_n`.
    #[default]
    Whole,
    /// `[x0, x1) × [y0, y1)` on the torus.
    TorusBox { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Sequences starting with the given digits on a full shift.
    Cylinder { digits: Vec<u32> },
}

impl Region {
    pub fn validate(&self, domain: Domain) -> Result<()> {
        match (self, domain) {
            (Region::Whole, _) => Ok(()),
            (Region::TorusBox { x0, x1, y0, y1 }, Domain::Torus2) => {
                let ok = |a: f64, b: f64| (0.0..1.0).contains(&a) && a < b && b <= 1.0;
                if ok(*x0, *x1) && ok(*y0, *y1) {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("empty or out-of-range torus box".into()))
                }
            }
            (Region::Cylinder { digits }, Domain::FullShift { symbols }) => {
                if digits.iter().all(|&d| d < symbols) {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("cylinder digit out of range".into()))
                }
            }
            _ => Err(Error::InvalidArgument("region does not match the domain".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    AnalyticBox,
    GenericGrid,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::AnalyticBox => "analytic_box",
            Method::GenericGrid => "generic_grid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum MethodChoice {
    /// Analytic when available, generic otherwise.
    #[default]
    Auto,
    Analytic,
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub method: MethodChoice,
    pub pool: WordPool,
    #[serde(skip)]
    pub exec: Exec,
    /// Seed for sampled words beyond the enumeration cap.
    pub seed: u64,
    /// Number of sampled words for free pressure beyond the enumeration cap.
    pub free_samples: usize,
    /// Grid points per axis on one-dimensional domains.
    pub max_grid_1d: usize,
    /// Total grid points on the torus.
    pub max_grid_2d: usize,
    /// Upper limit on candidate atoms of a single cover problem.
    pub max_atoms: usize,
    /// Upper limit on intervals and cylinders of interval systems.
    pub interval_cap: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            method: MethodChoice::Auto,
            pool: WordPool::default(),
            exec: Exec::default(),
            seed: 0,
            free_samples: 256,
            max_grid_1d: 1 << 14,
            max_grid_2d: 1 << 16,
            max_atoms: 1 << 21,
            interval_cap: 1_000_000,
        }
    }
}

impl EstimateConfig {
    pub fn with_seed(seed: u64) -> Self {
        EstimateConfig { seed, pool: WordPool::with_seed(seed), ..Default::default() }
    }

    pub fn analytic() -> Self {
        EstimateConfig { method: MethodChoice::Analytic, ..Default::default() }
    }

    pub fn generic() -> Self {
        EstimateConfig { method: MethodChoice::Generic, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureEstimate {
    pub kind: PressureKind,
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
    pub epsilon: f64,
    pub method: Method,
    /// Number of balls in the cover behind `upper` (a real number because
    /// analytic counts can exceed every integer type).
    pub cover_size: f64,
    pub seed: u64,
    /// Set when words were sampled rather than enumerated.
    pub stochastic: bool,
}

impl PressureEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Lower and upper bounds on `log` of the minimal cover cost, before
/// normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBounds {
    pub lower: f64,
    pub upper: f64,
    pub cover_size: f64,
    pub stochastic: bool,
}

/// `log Σ exp(v)`, `-∞` for an empty input.
pub(crate) fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let mut sorted: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    sorted.sort_by(f64::total_cmp);
    max + sorted.iter().sum::<f64>().ln()
}

pub(crate) fn widening(domain: Domain, n: usize, eps: f64) -> f64 {
    domain.dimension() as f64 * (1.0 / (2.0 * eps)).ln().max(0.0) / n as f64
}

pub(crate) fn finish(
    kind: &PressureKind,
    domain: Domain,
    n: usize,
    eps: f64,
    method: Method,
    seed: u64,
    b: LogBounds,
) -> Result<PressureEstimate> {
    if !(b.lower <= b.upper + 1e-9 * b.upper.abs().max(1.0)) || !b.upper.is_finite() || b.lower.is_nan() {
        return Err(Error::BoundInversion { lower: b.lower, upper: b.upper, context: kind.label() });
    }
    let nf = n as f64;
    let upper = b.upper / nf;
    let lower = (b.lower / nf - widening(domain, n, eps)).min(upper);
    Ok(PressureEstimate {
        kind: kind.clone(),
        lower,
        upper,
        n,
        epsilon: eps,
        method,
        cover_size: b.cover_size,
        seed,
        stochastic: b.stochastic,
    })
}

pub(crate) fn check_inputs(system: &SemigroupSystem, phi: &MultiPotential, n: usize, eps: f64) -> Result<()> {
    phi.check_arity(system.m())?;
    if n == 0 {
        return Err(Error::InvalidArgument("depth n must be at least 1".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    Ok(())
}

/// Estimates one pressure kind at depth `n` and radius `ε`.
pub fn estimate_pressure(
    system: &SemigroupSystem,
    phi: &MultiPotential,
    kind: &PressureKind,
    n: usize,
    eps: f64,
    region: &Region,
    config: &EstimateConfig,
) -> Result<PressureEstimate> {
    check_inputs(system, phi, n, eps)?;
    region.validate(system.domain())?;
    estimate_shared(&mut None, system, phi, kind, n, eps, region, config)
}

/// A single ball covers everything once `ε` exceeds the diameter; the
/// cost is then bracketed by the extreme values of its weight.
fn whole_space_ball(
    system: &SemigroupSystem,
    phi: &MultiPotential,
    kind: &PressureKind,
    n: usize,
    eps: f64,
    seed: u64,
) -> Result<PressureEstimate> {
    let r = phi.ranges();
    let nf = n as f64;
    let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64)) -> f64| r.iter().map(pick).fold(init, f);
    let (lo, hi) = match kind {
        PressureKind::Trajectory(rule) => {
            let w = rule.prefix(n, system.m())?;
            (w.symbols().iter().map(|&j| r[j].0).sum(), w.symbols().iter().map(|&j| r[j].1).sum())
        }
        PressureKind::Free => {
            let mean = |pick: fn(&(f64, f64)) -> f64| nf * (log_sum_exp(r.iter().map(pick)) - (r.len() as f64).ln());
            (mean(|x| x.0), mean(|x| x.1))
        }
        PressureKind::CondensedUpper | PressureKind::ExhaustiveUpper => {
            (nf * fold(f64::max, f64::NEG_INFINITY, |x| x.0), nf * fold(f64::max, f64::NEG_INFINITY, |x| x.1))
        }
        _ => (nf * fold(f64::min, f64::INFINITY, |x| x.0), nf * fold(f64::min, f64::INFINITY, |x| x.1)),
    };
    Ok(PressureEstimate {
        kind: kind.clone(),
        lower: lo / nf,
        upper: hi / nf,
        n,
        epsilon: eps,
        method: Method::AnalyticBox,
        cover_size: 1.0,
        seed,
        stochastic: false,
    })
}

/// One estimate, creating the shared generic session on first need.
#[allow(clippy::too_many_arguments)]
pub(crate) fn estimate_shared(
    session: &mut Option<Session>,
    system: &SemigroupSystem,
    phi: &MultiPotential,
    kind: &PressureKind,
    n: usize,
    eps: f64,
    region: &Region,
    config: &EstimateConfig,
) -> Result<PressureEstimate> {
    if *kind == PressureKind::Lift {
        let mut e = estimate_shared(session, system, phi, &PressureKind::Free, n, eps, region, config)?;
        let ln_m = (system.m() as f64).ln();
        e.kind = PressureKind::Lift;
        e.lower += ln_m;
        e.upper += ln_m;
        e.cover_size *= (system.m() as f64).powi(n as i32);
        return Ok(e);
    }
    if eps > system.domain().diameter() {
        return whole_space_ball(system, phi, kind, n, eps, config.seed);
    }
    if config.method != MethodChoice::Generic {
        match analytic_log_bounds(system, phi, kind, n, eps, region, config) {
            Ok(b) => return finish(kind, system.domain(), n, eps, Method::AnalyticBox, config.seed, b),
            Err(Error::AnalyticUnavailable(_)) if config.method == MethodChoice::Auto => {}
            Err(e) => return Err(e),
        }
    }
    if session.is_none() {
        *session = Some(Session::new(system, phi, n, eps, region, config)?);
    }
    session.as_ref().expect("session").estimate(kind)
}

/// Estimates several kinds on shared covers.
pub fn estimate_many(
    system: &SemigroupSystem,
    phi: &MultiPotential,
    kinds: &[PressureKind],
    n: usize,
    eps: f64,
    region: &Region,
    config: &EstimateConfig,
) -> Result<Vec<PressureEstimate>> {
    check_inputs(system, phi, n, eps)?;
    region.validate(system.domain())?;
    let mut session: Option<Session> = None;
    let mut out = Vec::with_capacity(kinds.len());
    for kind in kinds {
        out.push(estimate_shared(&mut session, system, phi, kind, n, eps, region, config)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_labels_round_trip() {
        for k in PressureKind::all() {
            assert_eq!(k.label().parse::<PressureKind>().unwrap(), k);
        }
        let t: PressureKind = "trajectory:periodic:1,2".parse().unwrap();
        assert_eq!(t, PressureKind::Trajectory(WordRule::Periodic(vec![0, 1])));
        assert!("trajectory:const:0".parse::<PressureKind>().is_err());
        assert!("nope".parse::<PressureKind>().is_err());
    }

    #[test]
    fn region_validation() {
        assert!(Region::TorusBox { x0: 0.0, x1: 0.5, y0: 0.2, y1: 0.4 }.validate(Domain::Torus2).is_ok());
        assert!(Region::TorusBox { x0: 0.5, x1: 0.5, y0: 0.2, y1: 0.4 }.validate(Domain::Torus2).is_err());
        assert!(Region::Cylinder { digits: vec![0, 1] }.validate(Domain::FullShift { symbols: 2 }).is_ok());
        assert!(Region::Cylinder { digits: vec![2] }.validate(Domain::FullShift { symbols: 2 }).is_err());
        assert!(Region::Cylinder { digits: vec![] }.validate(Domain::Circle).is_err());
    }
}
