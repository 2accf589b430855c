//! Piecewise affine expanding interval maps and their Cantor cores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{Domain, Generator, SemigroupSystem};

/// An expanding map of `[0,1]` made of increasing affine branches, each
/// mapping its sub-interval onto `[0,1]`. Branches are placed with equal gaps,
/// the first starting at 0 and the last ending at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    starts: Vec<f64>,
    slopes: Vec<f64>,
}

impl AffineMap {
    pub fn new(slopes: &[f64]) -> Result<Self> {
        if slopes.is_empty() {
            return Err(Error::InvalidSystem("interval map without branches".into()));
        }
        if slopes.iter().any(|&s| !(s.is_finite() && s > 1.0)) {
            return Err(Error::InvalidSystem("branch slopes must exceed 1".into()));
        }
        let total: f64 = slopes.iter().map(|s| 1.0 / s).sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidSystem("branches overlap".into()));
        }
        let k = slopes.len();
        let gap = if k > 1 { (1.0 - total).max(0.0) / (k - 1) as f64 } else { 0.0 };
        let mut starts = Vec::with_capacity(k);
        let mut at = 0.0;
        for (i, s) in slopes.iter().enumerate() {
            starts.push(if i + 1 == k && k > 1 { 1.0 - 1.0 / s } else { at });
            at += 1.0 / s + gap;
        }
        Ok(AffineMap { starts, slopes: slopes.to_vec() })
    }

    /// `(start, end, slope)` of each branch.
    pub fn branches(&self) -> Vec<(f64, f64, f64)> {
        self.starts.iter().zip(&self.slopes).map(|(&a, &s)| (a, a + 1.0 / s, s)).collect()
    }

    pub fn apply(&self, x: f64) -> f64 {
        let i = self.branch_of(x);
        (self.slopes[i] * (x - self.starts[i])).clamp(0.0, 1.0)
    }

    /// Index of the branch containing `x`, or the nearest branch for gap points.
    pub fn branch_of(&self, x: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, (a, b, _)) in self.branches().into_iter().enumerate() {
            let d = if x < a { a - x } else if x > b { x - b } else { 0.0 };
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    pub fn max_slope(&self) -> f64 {
        self.slopes.iter().copied().fold(1.0, f64::max)
    }

    pub fn uniform_slope(&self) -> Option<f64> {
        let s = self.slopes[0];
        self.slopes.iter().all(|&t| t == s).then_some(s)
    }

    /// Preimage of a closed-interval list under the map, restricted to branches.
    pub fn preimage(&self, set: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(set.len() * self.slopes.len());
        for (a, s) in self.starts.iter().zip(&self.slopes) {
            out.extend(set.iter().map(|&(l, r)| (a + l / s, a + r / s)));
        }
        normalize(out)
    }
}

/// Builds an interval system from per-generator branch slopes.
pub fn expanding_interval_system(name: &str, specs: &[Vec<f64>]) -> Result<SemigroupSystem> {
    let gens = specs.iter().map(|s| AffineMap::new(s).map(Generator::Affine)).collect::<Result<Vec<_>>>()?;
    SemigroupSystem::new(name, Domain::Interval, gens)
}

pub(crate) fn affine_maps(system: &SemigroupSystem) -> Result<Vec<&AffineMap>> {
    system
        .generators()
        .iter()
        .map(|g| match g {
            Generator::Affine(a) => Ok(a),
            _ => Err(Error::AnalyticUnavailable("not an interval system".into())),
        })
        .collect()
}

/// Sorts and merges touching or overlapping closed intervals.
pub fn normalize(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (l, r) in v {
        match out.last_mut() {
            Some(last) if l <= last.1 => last.1 = last.1.max(r),
            _ => out.push((l, r)),
        }
    }
    out
}

pub fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let l = a[i].0.max(b[j].0);
        let r = a[i].1.min(b[j].1);
        if l <= r {
            out.push((l, r));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

pub fn total_length(v: &[(f64, f64)]) -> f64 {
    v.iter().map(|(l, r)| r - l).sum()
}

/// Depth-`n` approximation `Λ_n` of the joint Cantor core: points whose orbit
/// along every word of length `n` stays inside the branch domains.
pub fn core_intervals(system: &SemigroupSystem, n: usize, cap: usize) -> Result<Vec<(f64, f64)>> {
    let maps = affine_maps(system)?;
    let mut set = vec![(0.0, 1.0)];
    for _ in 0..n {
        let mut next: Option<Vec<(f64, f64)>> = None;
        for map in &maps {
            let pre = map.preimage(&set);
            next = Some(match next {
                None => pre,
                Some(cur) => intersect(&cur, &pre),
            });
        }
        set = next.unwrap_or_default();
        if set.len() > cap {
            return Err(Error::DepthTooLarge { m: system.m(), n, cap });
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ternary_layout() {
        let t = AffineMap::new(&[3.0, 3.0]).unwrap();
        let b = t.branches();
        assert_abs_diff_eq!(b[1].0, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.apply(0.8), 0.4, epsilon = 1e-12);
        assert_eq!(t.apply(0.5), 1.0);
        assert_eq!(t.uniform_slope(), Some(3.0));
        assert!(AffineMap::new(&[1.5, 1.5]).is_err());
        assert!(AffineMap::new(&[0.5]).is_err());
    }

    #[test]
    fn doubling_is_full() {
        let d = AffineMap::new(&[2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(d.apply(0.75), 0.5, epsilon = 1e-15);
        let s = expanding_interval_system("dbl", &[vec![2.0, 2.0]]).unwrap();
        assert_abs_diff_eq!(total_length(&core_intervals(&s, 5, 1000).unwrap()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cantor_core_counts() {
        let s = expanding_interval_system("c", &[vec![3.0, 3.0]]).unwrap();
        let c = core_intervals(&s, 4, 1000).unwrap();
        assert_eq!(c.len(), 16);
        assert_abs_diff_eq!(total_length(&c), (2.0f64 / 3.0).powi(4), epsilon = 1e-12);
    }

    #[test]
    fn joint_core_of_ternary_and_quintic_shrinks_to_fixed_points() {
        let s = expanding_interval_system("tq", &[vec![3.0, 3.0], vec![5.0, 5.0]]).unwrap();
        let c = core_intervals(&s, 3, 1000).unwrap();
        assert_eq!(c.len(), 2);
        assert_abs_diff_eq!(c[0].1, 5f64.powi(-3), epsilon = 1e-12);
    }
}
