//! Phase spaces, generator maps and semigroup systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::interval::AffineMap;
use crate::systems::toral::IntMatrix;

/// A state of the system. One-dimensional domains use `x` only and keep
/// `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub const fn on_line(x: f64) -> Self {
        Point { x, y: 0.0 }
    }

    pub(crate) fn bits(&self) -> (u64, u64) {
        (self.x.to_bits(), self.y.to_bits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// `[0,1)²` with the max of the two circle distances.
    Torus2,
    /// `[0,1)` with the circle distance.
    Circle,
    /// `[0,1]` with `|a - b|`; the interval maps live on a Cantor core inside it.
    Interval,
    /// One-sided full shift on `symbols` letters, coded as base-`symbols`
    /// expansions in `[0,1)`; `d = 2^{-first disagreement}`.
    FullShift { symbols: u32 },
}

impl Domain {
    pub fn dimension(self) -> usize {
        match self {
            Domain::Torus2 => 2,
            _ => 1,
        }
    }

    pub fn distance(self, a: Point, b: Point) -> f64 {
        match self {
            Domain::Torus2 => circle_distance(a.x, b.x).max(circle_distance(a.y, b.y)),
            Domain::Circle => circle_distance(a.x, b.x),
            Domain::Interval => (a.x - b.x).abs(),
            Domain::FullShift { symbols } => shift_distance(a.x, b.x, symbols),
        }
    }

    /// Largest possible distance between two points.
    pub fn diameter(self) -> f64 {
        match self {
            Domain::Torus2 | Domain::Circle => 0.5,
            Domain::Interval | Domain::FullShift { .. } => 1.0,
        }
    }

    pub fn contains(self, p: Point) -> bool {
        match self {
            Domain::Torus2 => (0.0..1.0).contains(&p.x) && (0.0..1.0).contains(&p.y),
            Domain::Circle | Domain::FullShift { .. } => (0.0..1.0).contains(&p.x) && p.y == 0.0,
            Domain::Interval => (0.0..=1.0).contains(&p.x) && p.y == 0.0,
        }
    }
}

pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

fn shift_distance(a: f64, b: f64, symbols: u32) -> f64 {
    let k = symbols as f64;
    let (mut a, mut b) = (a, b);
    // digits beyond what an f64 resolves are treated as agreeing
    let depth = (52.0 / k.log2()).floor() as i32;
    for j in 0..depth {
        let (da, db) = ((a * k).floor(), (b * k).floor());
        if a.to_bits() == b.to_bits() {
            return 0.0;
        }
        if da != db {
            return 2f64.powi(-j);
        }
        a = a * k - da;
        b = b * k - db;
    }
    0.0
}

/// Reduces to the canonical representative in `[0,1)`.
pub(crate) fn wrap(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A generator map of the semigroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    /// Toral endomorphism `p ↦ A p mod 1`.
    Linear(IntMatrix),
    /// Circle map `x ↦ k x mod 1`.
    CircleMul(i64),
    /// Piecewise affine expanding interval map.
    Affine(AffineMap),
    /// Left shift on the full shift.
    Shift,
}

impl Generator {
    pub fn apply(&self, domain: Domain, p: Point) -> Point {
        match self {
            Generator::Linear(a) => Point::new(
                wrap(a[0][0] as f64 * p.x + a[0][1] as f64 * p.y),
                wrap(a[1][0] as f64 * p.x + a[1][1] as f64 * p.y),
            ),
            Generator::CircleMul(k) => Point::on_line(wrap(*k as f64 * p.x)),
            Generator::Affine(map) => Point::on_line(map.apply(p.x)),
            Generator::Shift => match domain {
                Domain::FullShift { symbols } => Point::on_line(wrap(symbols as f64 * p.x)),
                _ => Point::on_line(wrap(2.0 * p.x)),
            },
        }
    }

    /// Lipschitz constant with respect to the domain metric.
    pub fn max_expansion(&self) -> f64 {
        match self {
            Generator::Linear(a) => a.iter().map(|r| (r[0].abs() + r[1].abs()) as f64).fold(1.0, f64::max),
            Generator::CircleMul(k) => (k.abs() as f64).max(1.0),
            Generator::Affine(map) => map.max_slope(),
            Generator::Shift => 2.0,
        }
    }

    /// Maximal number of preimages of a point.
    pub fn preimage_bound(&self, domain: Domain) -> usize {
        match self {
            Generator::Linear(a) => (a[0][0] * a[1][1] - a[0][1] * a[1][0]).unsigned_abs() as usize,
            Generator::CircleMul(k) => k.unsigned_abs() as usize,
            Generator::Affine(map) => map.branches().len(),
            Generator::Shift => match domain {
                Domain::FullShift { symbols } => symbols as usize,
                _ => 2,
            },
        }
    }

    /// `|Df|` when it is a single constant (conformal with uniform expansion).
    pub fn uniform_expansion(&self) -> Option<f64> {
        match self {
            Generator::Linear(a) if a[0][1] == 0 && a[1][0] == 0 && a[0][0].abs() == a[1][1].abs() => {
                Some(a[0][0].abs() as f64)
            }
            Generator::Linear(_) => None,
            Generator::CircleMul(k) => Some(k.abs() as f64),
            Generator::Affine(map) => map.uniform_slope(),
            Generator::Shift => None,
        }
    }
}

/// The generator set `{id, f_1, ..., f_m}` acting on a domain; the identity
/// is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupSystem {
    pub name: String,
    domain: Domain,
    generators: Vec<Generator>,
}

impl SemigroupSystem {
    pub fn new(name: impl Into<String>, domain: Domain, generators: Vec<Generator>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidSystem("no generators".into()));
        }
        for g in &generators {
            let ok = matches!(
                (domain, g),
                (Domain::Torus2, Generator::Linear(_))
                    | (Domain::Circle, Generator::CircleMul(_))
                    | (Domain::Interval, Generator::Affine(_))
                    | (Domain::FullShift { .. }, Generator::Shift)
            );
            if !ok {
                return Err(Error::InvalidSystem(format!("generator {g:?} does not act on {domain:?}")));
            }
            if let Generator::Linear(a) = g {
                if a[0][0] * a[1][1] - a[0][1] * a[1][0] == 0 {
                    return Err(Error::InvalidSystem("singular toral matrix".into()));
                }
            }
            if let Generator::CircleMul(k) = g {
                if *k == 0 {
                    return Err(Error::InvalidSystem("circle map x -> 0".into()));
                }
            }
        }
        if let Domain::FullShift { symbols } = domain {
            if symbols < 2 {
                return Err(Error::InvalidSystem("full shift needs at least 2 symbols".into()));
            }
        }
        Ok(SemigroupSystem { name: name.into(), domain, generators })
    }

    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    #[inline]
    pub fn apply(&self, j: usize, p: Point) -> Point {
        self.generators[j].apply(self.domain, p)
    }

    #[inline]
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        self.domain.distance(a, b)
    }

    /// `L_max`, the largest generator Lipschitz constant (at least 1).
    pub fn max_expansion(&self) -> f64 {
        self.generators.iter().map(Generator::max_expansion).fold(1.0, f64::max)
    }

    pub fn max_preimages(&self) -> usize {
        self.generators.iter().map(|g| g.preimage_bound(self.domain)).max().unwrap_or(1)
    }

    /// Relabels generators: generator `j` of the result is generator
    /// `inverse[j]` of `self`, where `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if !is_permutation(perm, self.m()) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        let mut gens = self.generators.clone();
        for (old, &new) in perm.iter().enumerate() {
            gens[new] = self.generators[old].clone();
        }
        Ok(SemigroupSystem { name: format!("{}~perm", self.name), domain: self.domain, generators: gens })
    }

    /// Checks by sampling that every generator maps sample points into the domain.
    pub fn check_invariance(&self, samples: usize) -> bool {
        (0..samples).all(|i| {
            let t = (i as f64 + 0.5) / samples as f64;
            let p = match self.domain {
                Domain::Torus2 => Point::new(t, (t * 7.31).fract()),
                _ => Point::on_line(t),
            };
            (0..self.m()).all(|j| self.domain.contains(self.apply(j, p)))
        })
    }
}

pub(crate) fn is_permutation(perm: &[usize], m: usize) -> bool {
    let mut seen = vec![false; m];
    perm.len() == m && perm.iter().all(|&p| p < m && !std::mem::replace(&mut seen[p], true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_metric_is_max_of_circle_distances() {
        let d = Domain::Torus2.distance(Point::new(0.05, 0.5), Point::new(0.95, 0.7));
        assert!((d - 0.2).abs() < 1e-15);
        assert_eq!(Domain::Circle.distance(Point::on_line(0.3), Point::on_line(0.34)), (0.3f64 - 0.34).abs());
    }

    #[test]
    fn shift_metric_uses_first_disagreement() {
        let d = Domain::FullShift { symbols: 2 };
        assert_eq!(d.distance(Point::on_line(0.25), Point::on_line(0.75)), 1.0);
        assert_eq!(d.distance(Point::on_line(0.25), Point::on_line(0.375)), 0.25);
        assert_eq!(d.distance(Point::on_line(0.25), Point::on_line(0.25)), 0.0);
    }

    #[test]
    fn rejects_mismatched_generators() {
        assert!(SemigroupSystem::new("bad", Domain::Circle, vec![Generator::Shift]).is_err());
        assert!(SemigroupSystem::new("sing", Domain::Torus2, vec![Generator::Linear([[1, 2], [2, 4]])]).is_err());
    }

    #[test]
    fn permutation_relabels() {
        let s = SemigroupSystem::new("c", Domain::Circle, vec![Generator::CircleMul(2), Generator::CircleMul(3)]).unwrap();
        let p = s.permuted(&[1, 0]).unwrap();
        assert_eq!(p.generators()[0], Generator::CircleMul(3));
        assert!(s.check_invariance(100));
    }
}
