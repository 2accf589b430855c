//! Multi-potentials: one scalar observable per generator.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{Domain, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Observable {
    Zero,
    Constant(f64),
    /// The raw coordinate `x` (axis 0) or `y` (axis 1).
    Coordinate { axis: usize },
    /// `Σ amp · cos(2π (kx x + ky y) + phase)`.
    Trig { terms: Vec<(f64, i32, i32, f64)> },
    /// Value `values[i]` on the cell `[i/k, (i+1)/k)` of the `x` coordinate.
    PiecewiseConstant { values: Vec<f64> },
}

impl Observable {
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Observable::Zero => 0.0,
            Observable::Constant(c) => *c,
            Observable::Coordinate { axis } => {
                if *axis == 0 {
                    p.x
                } else {
                    p.y
                }
            }
            Observable::Trig { terms } => terms
                .iter()
                .map(|&(a, kx, ky, ph)| a * (TAU * (kx as f64 * p.x + ky as f64 * p.y) + ph).cos())
                .sum(),
            Observable::PiecewiseConstant { values } => {
                let k = values.len();
                values[((p.x * k as f64).floor() as usize).min(k - 1)]
            }
        }
    }

    /// Bounds `(inf, sup)` over the domain.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Observable::Zero => (0.0, 0.0),
            Observable::Constant(c) => (*c, *c),
            Observable::Coordinate { .. } => (0.0, 1.0),
            Observable::Trig { terms } => {
                let s: f64 = terms.iter().map(|t| t.0.abs()).sum();
                (-s, s)
            }
            Observable::PiecewiseConstant { values } => (
                values.iter().copied().fold(f64::INFINITY, f64::min),
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ),
        }
    }

    /// Bound on `|φ(a) − φ(b)|` whenever `d(a, b) < r`.
    pub fn oscillation(&self, domain: Domain, r: f64) -> f64 {
        let (lo, hi) = self.range();
        let spread = hi - lo;
        match self {
            Observable::Zero | Observable::Constant(_) => 0.0,
            Observable::Coordinate { .. } => match domain {
                Domain::Interval | Domain::FullShift { .. } => r.min(spread),
                Domain::Torus2 | Domain::Circle => spread,
            },
            Observable::Trig { terms } => {
                let lip: f64 = terms.iter().map(|&(a, kx, ky, _)| a.abs() * TAU * (kx.abs() + ky.abs()) as f64).sum();
                (lip * r).min(spread)
            }
            Observable::PiecewiseConstant { .. } => spread,
        }
    }
}

/// `scale · observable + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub observable: Observable,
    pub scale: f64,
    pub offset: f64,
}

impl Component {
    pub fn new(observable: Observable) -> Self {
        Component { observable, scale: 1.0, offset: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Component { observable: Observable::Zero, scale: 1.0, offset: c }
    }

    #[inline]
    pub fn eval(&self, p: Point) -> f64 {
        self.scale * self.observable.eval(p) + self.offset
    }

    pub fn range(&self) -> (f64, f64) {
        let (lo, hi) = self.observable.range();
        let (a, b) = (self.scale * lo + self.offset, self.scale * hi + self.offset);
        (a.min(b), a.max(b))
    }

    pub fn oscillation(&self, domain: Domain, r: f64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        self.scale.abs() * self.observable.oscillation(domain, r)
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.observable {
            Observable::Zero => Some(self.offset),
            Observable::Constant(c) => Some(self.scale * c + self.offset),
            _ if self.scale == 0.0 => Some(self.offset),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPotential {
    components: Vec<Component>,
}

impl MultiPotential {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidPotential("no components".into()));
        }
        for c in &components {
            let (lo, hi) = c.range();
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidPotential("unbounded component".into()));
            }
        }
        Ok(MultiPotential { components })
    }

    pub fn zero(m: usize) -> Self {
        MultiPotential { components: vec![Component::constant(0.0); m] }
    }

    pub fn constants(values: &[f64]) -> Result<Self> {
        MultiPotential::new(values.iter().map(|&c| Component::constant(c)).collect())
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn check_arity(&self, m: usize) -> Result<()> {
        if self.m() != m {
            return Err(Error::InvalidPotential(format!("{} components for {m} generators", self.m())));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, j: usize, p: Point) -> f64 {
        self.components[j].eval(p)
    }

    /// `M` with `|φ_j| ≤ M` everywhere.
    pub fn sup_norm(&self) -> f64 {
        self.components.iter().map(|c| { let (a, b) = c.range(); a.abs().max(b.abs()) }).fold(0.0, f64::max)
    }

    /// Per-component `(inf, sup)` bounds.
    pub fn ranges(&self) -> Vec<(f64, f64)> {
        self.components.iter().map(Component::range).collect()
    }

    /// Largest per-component oscillation over sets of diameter below `r`.
    pub fn max_oscillation(&self, domain: Domain, r: f64) -> f64 {
        self.components.iter().map(|c| c.oscillation(domain, r)).fold(0.0, f64::max)
    }

    /// Per-component constants if every component is constant.
    pub fn constant_values(&self) -> Option<Vec<f64>> {
        self.components.iter().map(Component::constant_value).collect()
    }

    /// `t · Φ`.
    pub fn scaled(&self, t: f64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| Component { observable: c.observable.clone(), scale: c.scale * t, offset: c.offset * t })
            .collect();
        MultiPotential { components }
    }

    /// `Φ + c` in every component.
    pub fn shifted(&self, c: f64) -> Self {
        let components =
            self.components.iter().map(|k| Component { offset: k.offset + c, ..k.clone() }).collect();
        MultiPotential { components }
    }

    /// Component `j` of the result is component `inverse(perm)[j]`, matching
    /// `SemigroupSystem::permuted`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut components = self.components.clone();
        for (old, &new) in perm.iter().enumerate() {
            components[new] = self.components[old].clone();
        }
        MultiPotential { components }
    }
}

/// Parses `zero`, `coordinate`, `constants:c1,…,cm` or `random:seed,amplitude`.
pub fn parse_potential(spec: &str, m: usize, domain: Domain) -> Result<MultiPotential> {
    let spec = spec.trim();
    let (tag, body) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = || -> Result<Vec<f64>> {
        body.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("potential `{spec}`: {e}"))))
            .collect()
    };
    let p = match tag.trim() {
        "zero" => MultiPotential::zero(m),
        "coordinate" => MultiPotential::new(vec![Component::new(Observable::Coordinate { axis: 0 }); m])?,
        "constants" => {
            let v = nums()?;
            if v.len() != m {
                return Err(Error::Parse(format!("potential `{spec}` needs {m} constants")));
            }
            MultiPotential::constants(&v)?
        }
        "random" => {
            let v = nums()?;
            if v.len() != 2 || v[0] < 0.0 || v[0].fract() != 0.0 {
                return Err(Error::Parse(format!("potential `{spec}` needs `random:seed,amplitude`")));
            }
            random_potential(v[0] as u64, v[1], m, domain)
        }
        other => return Err(Error::Parse(format!("unknown potential `{other}`"))),
    };
    Ok(p)
}

/// Smooth random multi-potential with `sup |φ_j| ≤ amplitude`.
pub fn random_potential(seed: u64, amplitude: f64, m: usize, domain: Domain) -> MultiPotential {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_d = domain.dimension() == 2;
    let components = (0..m)
        .map(|_| {
            let terms = (0..3)
                .map(|_| {
                    let a = amplitude / 3.0 * rng.gen_range(-1.0..=1.0);
                    let kx = rng.gen_range(-2..=2);
                    let ky = if two_d { rng.gen_range(-2..=2) } else { 0 };
                    (a, kx, ky, rng.gen_range(0.0..TAU))
                })
                .collect();
            Component::new(Observable::Trig { terms })
        })
        .collect();
    MultiPotential { components }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_potentials() {
        let z = parse_potential("zero", 2, Domain::Circle).unwrap();
        assert_eq!(z.constant_values(), Some(vec![0.0, 0.0]));
        let c = parse_potential("constants:1.5,-2", 2, Domain::Circle).unwrap();
        assert_eq!(c.eval(1, Point::on_line(0.3)), -2.0);
        assert!(parse_potential("constants:1", 2, Domain::Circle).is_err());
        let x = parse_potential("coordinate", 1, Domain::Circle).unwrap();
        assert_eq!(x.eval(0, Point::on_line(0.3)), 0.3);
        let r = parse_potential("random:7,0.5", 3, Domain::Torus2).unwrap();
        assert!(r.sup_norm() <= 0.5 + 1e-12);
        assert_eq!(r, parse_potential("random:7,0.5", 3, Domain::Torus2).unwrap());
        assert!(parse_potential("bogus", 1, Domain::Circle).is_err());
    }

    #[test]
    fn random_stays_within_bounds() {
        let r = random_potential(3, 0.8, 2, Domain::Torus2);
        for i in 0..200 {
            let p = Point::new((i as f64 * 0.137).fract(), (i as f64 * 0.291).fract());
            for j in 0..2 {
                let (lo, hi) = r.components()[j].range();
                let v = r.eval(j, p);
                assert!(lo <= v && v <= hi && v.abs() <= 0.8 + 1e-12);
            }
        }
    }

    #[test]
    fn shift_scale_permute() {
        let c = MultiPotential::constants(&[1.0, 2.0]).unwrap();
        assert_eq!(c.shifted(0.5).constant_values(), Some(vec![1.5, 2.5]));
        assert_eq!(c.scaled(-2.0).constant_values(), Some(vec![-2.0, -4.0]));
        assert_eq!(c.permuted(&[1, 0]).constant_values(), Some(vec![2.0, 1.0]));
    }
}
