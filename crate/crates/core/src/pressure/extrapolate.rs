//! Limits of finite-depth estimates.

use serde::{Deserialize, Serialize};

use super::{PressureEstimate, PressureKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub kind: PressureKind,
    /// Smallest radius in the input.
    pub epsilon: f64,
    pub value: f64,
    pub error_bar: f64,
    /// `false` when interval widths grow along the depth sequence.
    pub converged: bool,
    pub depths: Vec<usize>,
}

impl Extrapolation {
    pub fn lower(&self) -> f64 {
        self.value - self.error_bar
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_bar
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower() <= v && v <= self.upper()
    }
}

/// One-step Richardson extrapolation of the midpoints in `1/n`, run per
/// radius; the result at the smallest radius is reported, with the spread
/// to the next radius folded into the error bar.
pub fn extrapolate(estimates: &[PressureEstimate]) -> Result<Extrapolation> {
    let first = estimates.first().ok_or_else(|| Error::InvalidArgument("no estimates".into()))?;
    if estimates.iter().any(|e| e.kind != first.kind) {
        return Err(Error::InvalidArgument("estimates of different kinds".into()));
    }
    let mut radii: Vec<f64> = estimates.iter().map(|e| e.epsilon).collect();
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    let mut per_radius = Vec::new();
    for &eps in &radii {
        let mut seq: Vec<&PressureEstimate> = estimates.iter().filter(|e| e.epsilon == eps).collect();
        seq.sort_by_key(|e| e.n);
        seq.dedup_by_key(|e| e.n);
        if seq.len() >= 3 {
            per_radius.push((eps, richardson(&seq)));
        }
    }
    let Some(&(eps, (value, err, converged, ref depths))) = per_radius.last() else {
        return Err(Error::InvalidArgument("extrapolation needs at least 3 depths at one radius".into()));
    };
    let error_bar = match per_radius.len() {
        1 => err,
        k => err.max((value - per_radius[k - 2].1 .0).abs()),
    };
    Ok(Extrapolation { kind: first.kind.clone(), epsilon: eps, value, error_bar, converged, depths: depths.clone() })
}

fn richardson(seq: &[&PressureEstimate]) -> (f64, f64, bool, Vec<usize>) {
    let r: Vec<f64> = seq
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (na, nb) = (a.n as f64, b.n as f64);
            (nb * b.midpoint() - na * a.midpoint()) / (nb - na)
        })
        .collect();
    let k = r.len();
    let last = seq[seq.len() - 1];
    let error_bar = last.width().max((r[k - 1] - r[k - 2]).abs());
    let tol = 1e-12;
    let converged = seq.windows(2).all(|w| w[1].width() <= w[0].width() + tol);
    (r[k - 1], error_bar, converged, seq.iter().map(|e| e.n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pressure::Method;

    fn est(n: usize, eps: f64, lo: f64, hi: f64) -> PressureEstimate {
        PressureEstimate {
            kind: PressureKind::Amalgamated,
            lower: lo,
            upper: hi,
            n,
            epsilon: eps,
            method: Method::AnalyticBox,
            cover_size: 1.0,
            seed: 0,
            stochastic: false,
        }
    }

    #[test]
    fn constant_sequence() {
        let s: Vec<_> = (4..8).map(|n| est(n, 0.25, 0.9, 1.1)).collect();
        let x = extrapolate(&s).unwrap();
        assert!((x.value - 1.0).abs() < 1e-12);
        assert!((x.error_bar - 0.2).abs() < 1e-12);
        assert!(x.converged);
    }

    #[test]
    fn removes_one_over_n_bias() {
        let s: Vec<_> = (4..9).map(|n| {
            let v = 2.0 + 3.0 / n as f64;
            est(n, 0.25, v - 0.01, v + 0.01)
        }).collect();
        assert!((extrapolate(&s).unwrap().value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_and_growing() {
        assert!(extrapolate(&[est(1, 0.25, 0.0, 1.0), est(2, 0.25, 0.0, 1.0)]).is_err());
        let s = vec![est(1, 0.25, 0.0, 1.0), est(2, 0.25, 0.0, 2.0), est(3, 0.25, 0.0, 3.0)];
        assert!(!extrapolate(&s).unwrap().converged);
    }
}
