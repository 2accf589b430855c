//! Orbits, consecutive sums and the three Bowen-ball families.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::MultiPotential;
use crate::system::{Point, SemigroupSystem};
use crate::word::{checked_pow, Word};
use crate::ENUMERATION_CAP;

/// `x, f_{C_1} x, f_{C_2} f_{C_1} x, …` (first symbol applied first).
pub fn orbit(system: &SemigroupSystem, x: Point, word: &Word) -> Vec<Point> {
    let mut out = Vec::with_capacity(word.len() + 1);
    let mut p = x;
    out.push(p);
    for &s in word.symbols() {
        p = system.apply(s, p);
        out.push(p);
    }
    out
}

/// `φ_{C_1}(x) + φ_{C_2}(f_{C_1} x) + … + φ_{C_n}(f_{C_{n-1}} ⋯ f_{C_1} x)`.
pub fn consecutive_sum(system: &SemigroupSystem, phi: &MultiPotential, x: Point, word: &Word) -> f64 {
    let mut p = x;
    let mut s = 0.0;
    for &j in word.symbols() {
        s += phi.eval(j, p);
        p = system.apply(j, p);
    }
    s
}

/// Bowen distance `max_k d(orbit_k(x), orbit_k(z))` along `word`.
pub fn dn_distance(system: &SemigroupSystem, x: Point, z: Point, word: &Word) -> f64 {
    let (mut a, mut b) = (x, z);
    let mut d = system.distance(a, b);
    for &s in word.symbols() {
        a = system.apply(s, a);
        b = system.apply(s, b);
        d = d.max(system.distance(a, b));
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BallKind {
    Trajectory(Word),
    Condensed(usize),
    Exhaustive(usize),
}

impl BallKind {
    pub fn depth(&self) -> usize {
        match self {
            BallKind::Trajectory(w) => w.len(),
            BallKind::Condensed(n) | BallKind::Exhaustive(n) => *n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub kind: BallKind,
    pub center: Point,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(kind: BallKind, center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument("radius must be positive".into()));
        }
        if kind.depth() == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        Ok(BallSpec { kind, center, radius })
    }

    pub fn trajectory(word: Word, center: Point, radius: f64) -> Result<Self> {
        Self::new(BallKind::Trajectory(word), center, radius)
    }
}

fn check_cap(system: &SemigroupSystem, n: usize) -> Result<()> {
    match checked_pow(system.m(), n) {
        Some(c) if c <= ENUMERATION_CAP => Ok(()),
        _ => Err(Error::DepthTooLarge { m: system.m(), n, cap: ENUMERATION_CAP }),
    }
}

/// Step of the joint orbit `(x_k, z_k)` over every generator, merging
/// bit-identical states. `fold` combines the values of merged states.
fn step_pairs<V: Copy>(
    system: &SemigroupSystem,
    states: &HashMap<((u64, u64), (u64, u64)), (Point, Point, V)>,
    mut next_value: impl FnMut(usize, Point, Point, V) -> Option<V>,
    fold: impl Fn(V, V) -> V,
) -> HashMap<((u64, u64), (u64, u64)), (Point, Point, V)> {
    let mut out: HashMap<_, (Point, Point, V)> = HashMap::with_capacity(states.len() * system.m());
    let mut keys: Vec<_> = states.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let (a, b, v) = states[&k];
        for j in 0..system.m() {
            let (a2, b2) = (system.apply(j, a), system.apply(j, b));
            if let Some(v2) = next_value(j, a2, b2, v) {
                out.entry((a2.bits(), b2.bits()))
                    .and_modify(|e| e.2 = fold(e.2, v2))
                    .or_insert((a2, b2, v2));
            }
        }
    }
    out
}

/// `(min, max)` over all words of length `n` of `dn_distance(x, z, C)`.
pub fn dn_extremes_over_words(system: &SemigroupSystem, x: Point, z: Point, n: usize) -> Result<(f64, f64)> {
    check_cap(system, n)?;
    let d0 = system.distance(x, z);
    let mut states = HashMap::new();
    states.insert((x.bits(), z.bits()), (x, z, (d0, d0)));
    for _ in 0..n {
        states = step_pairs(
            system,
            &states,
            |_, a, b, (lo, hi)| {
                let d = system.distance(a, b);
                Some((lo.max(d), hi.max(d)))
            },
            |u, v| (u.0.min(v.0), u.1.max(v.1)),
        );
    }
    let lo = states.values().map(|s| s.2 .0).fold(f64::INFINITY, f64::min);
    let hi = states.values().map(|s| s.2 .1).fold(0.0, f64::max);
    Ok((lo, hi))
}

/// `(s_n, S_n)`: infimum and supremum over words of length `n` of the
/// consecutive sum at `x`.
pub fn sum_extremes_over_words(
    system: &SemigroupSystem,
    phi: &MultiPotential,
    x: Point,
    n: usize,
) -> Result<(f64, f64)> {
    if let Some(c) = phi.constant_values() {
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Ok((n as f64 * lo, n as f64 * hi));
    }
    check_cap(system, n)?;
    let mut states: HashMap<(u64, u64), (Point, f64, f64)> = HashMap::new();
    states.insert(x.bits(), (x, 0.0, 0.0));
    for _ in 0..n {
        let mut next: HashMap<(u64, u64), (Point, f64, f64)> = HashMap::with_capacity(states.len() * system.m());
        let mut keys: Vec<_> = states.keys().copied().collect();
        keys.sort_unstable();
        for k in keys {
            let (p, lo, hi) = states[&k];
            for j in 0..system.m() {
                let v = phi.eval(j, p);
                let q = system.apply(j, p);
                next.entry(q.bits())
                    .and_modify(|e| {
                        e.1 = e.1.min(lo + v);
                        e.2 = e.2.max(hi + v);
                    })
                    .or_insert((q, lo + v, hi + v));
            }
        }
        states = next;
    }
    let lo = states.values().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let hi = states.values().map(|s| s.2).fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Membership of `z` in a ball, with strict `< ε` comparisons.
pub fn ball_contains(system: &SemigroupSystem, ball: &BallSpec, z: Point) -> Result<bool> {
    let eps = ball.radius;
    match &ball.kind {
        BallKind::Trajectory(w) => Ok(dn_distance(system, ball.center, z, w) < eps),
        BallKind::Condensed(n) => {
            let (_, hi) = dn_extremes_over_words(system, ball.center, z, *n)?;
            Ok(hi < eps)
        }
        BallKind::Exhaustive(n) => {
            check_cap(system, *n)?;
            let x = ball.center;
            if system.distance(x, z) >= eps {
                return Ok(false);
            }
            let mut states = HashMap::new();
            states.insert((x.bits(), z.bits()), (x, z, ()));
            for _ in 0..*n {
                states = step_pairs(system, &states, |_, a, b, _| (system.distance(a, b) < eps).then_some(()), |_, _| ());
                if states.is_empty() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Greedy disjoint subfamily of trajectory balls along prefixes of one
/// trajectory. Balls are processed by increasing depth; a ball is kept iff
/// its center is `2ε`-separated, at the shallower depth, from every kept
/// center. The kept balls are pairwise disjoint and their `3ε` enlargements
/// cover the input family.
pub fn vitali_disjointify(system: &SemigroupSystem, balls: &[BallSpec]) -> Result<Vec<BallSpec>> {
    let Some(first) = balls.first() else {
        return Ok(Vec::new());
    };
    let eps = first.radius;
    let mut words = Vec::with_capacity(balls.len());
    for b in balls {
        match &b.kind {
            BallKind::Trajectory(w) => words.push(w),
            _ => return Err(Error::InvalidArgument("only trajectory balls can be disjointified".into())),
        }
        if b.radius != eps {
            return Err(Error::InvalidArgument("all balls must share one radius".into()));
        }
    }
    let longest = words.iter().max_by_key(|w| w.len()).copied().expect("nonempty");
    if !words.iter().all(|w| w.is_prefix_of(longest)) {
        return Err(Error::MixedTrajectories);
    }
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by_key(|&i| words[i].len());
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let ok = kept.iter().all(|&k| {
            let w = if words[k].len() <= words[i].len() { words[k] } else { words[i] };
            dn_distance(system, balls[k].center, balls[i].center, w) >= 2.0 * eps
        });
        if ok {
            kept.push(i);
        }
    }
    Ok(kept.into_iter().map(|i| balls[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::parse_system;
    use approx::assert_abs_diff_eq;

    fn doubling() -> SemigroupSystem {
        parse_system("circle:2").unwrap()
    }

    #[test]
    fn orbit_and_sums() {
        let s = doubling();
        let w = Word::constant(0, 2);
        let o = orbit(&s, Point::on_line(0.3), &w);
        assert_abs_diff_eq!(o[1].x, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(o[2].x, 0.2, epsilon = 1e-12);
        let phi = crate::potential::parse_potential("coordinate", 1, s.domain()).unwrap();
        assert_abs_diff_eq!(consecutive_sum(&s, &phi, Point::on_line(0.3), &w), 0.9, epsilon = 1e-12);
        let t = parse_system("diag:2,3").unwrap();
        let o = orbit(&t, Point::new(0.4, 0.9), &Word::constant(0, 1));
        assert_abs_diff_eq!(o[1].x, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(o[1].y, 0.7, epsilon = 1e-12);
        let c = MultiPotential::constants(&[0.25, -1.0]).unwrap();
        let pair = parse_system("circle:2|3").unwrap();
        assert_eq!(consecutive_sum(&pair, &c, Point::on_line(0.1), &Word::new(vec![0, 1], 2).unwrap()), -0.75);
    }

    #[test]
    fn membership_examples() {
        let s = doubling();
        let w = Word::constant(0, 1);
        let ball = BallSpec::trajectory(w.clone(), Point::on_line(0.3), 0.1).unwrap();
        assert!(ball_contains(&s, &ball, Point::on_line(0.34)).unwrap());
        assert!(!ball_contains(&s, &ball, Point::on_line(0.36)).unwrap());
        assert_abs_diff_eq!(dn_distance(&s, Point::on_line(0.3), Point::on_line(0.34), &w), 0.08, epsilon = 1e-12);
        for kind in [BallKind::Condensed(3), BallKind::Exhaustive(3), BallKind::Trajectory(Word::constant(0, 3))] {
            let b = BallSpec::new(kind, Point::on_line(0.3), 0.1).unwrap();
            assert!(ball_contains(&s, &b, Point::on_line(0.3)).unwrap());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let s = parse_system("circle:2|3").unwrap();
        let b = BallSpec::new(BallKind::Condensed(13), Point::on_line(0.1), 0.1).unwrap();
        assert!(matches!(ball_contains(&s, &b, Point::on_line(0.1)), Err(Error::DepthTooLarge { .. })));
    }

    #[test]
    fn sum_extremes_match_enumeration() {
        let s = parse_system("circle:2|3").unwrap();
        let phi = crate::potential::random_potential(5, 1.0, 2, s.domain());
        let x = Point::on_line(0.1234);
        let (lo, hi) = sum_extremes_over_words(&s, &phi, x, 6).unwrap();
        let sums: Vec<f64> = Word::all(2, 6, 4096).unwrap().iter().map(|w| consecutive_sum(&s, &phi, x, w)).collect();
        assert_abs_diff_eq!(lo, sums.iter().copied().fold(f64::INFINITY, f64::min), epsilon = 1e-12);
        assert_abs_diff_eq!(hi, sums.iter().copied().fold(f64::NEG_INFINITY, f64::max), epsilon = 1e-12);
    }

    #[test]
    fn vitali_rejects_mixed_and_keeps_shallow() {
        let s = parse_system("circle:2|3").unwrap();
        let a = BallSpec::trajectory(Word::new(vec![0], 2).unwrap(), Point::on_line(0.3), 0.05).unwrap();
        let b = BallSpec::trajectory(Word::new(vec![1, 0], 2).unwrap(), Point::on_line(0.31), 0.05).unwrap();
        assert_eq!(vitali_disjointify(&s, &[a.clone(), b]), Err(Error::MixedTrajectories));
        let c = BallSpec::trajectory(Word::new(vec![0, 1, 1], 2).unwrap(), Point::on_line(0.305), 0.05).unwrap();
        let kept = vitali_disjointify(&s, &[c, a.clone()]).unwrap();
        assert_eq!(kept, vec![a]);
    }
}
