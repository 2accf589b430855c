//! Toral endomorphisms of the 2-torus: eigenvalues, exact ball boxes for
//! diagonal generators, closed-form entropies and the Berend checker.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{wrap, Domain, Generator, Point, SemigroupSystem};
use crate::word::Word;

/// Row-major 2×2 integer matrix.
pub type IntMatrix = [[i64; 2]; 2];

pub fn det(a: &IntMatrix) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn trace(a: &IntMatrix) -> i64 {
    a[0][0] + a[1][1]
}

pub fn is_diagonal(a: &IntMatrix) -> bool {
    a[0][1] == 0 && a[1][0] == 0
}

pub fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut c = [[0i64; 2]; 2];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `A p mod 1` with canonical representatives in `[0,1)`.
pub fn toral_apply(a: &IntMatrix, p: Point) -> Point {
    Point::new(
        wrap(a[0][0] as f64 * p.x + a[0][1] as f64 * p.y),
        wrap(a[1][0] as f64 * p.x + a[1][1] as f64 * p.y),
    )
}

/// Roots of the characteristic polynomial ordered by modulus.
pub fn toral_eigen(a: &IntMatrix) -> (Complex64, Complex64) {
    let t = trace(a) as f64;
    let d = det(a) as f64;
    let disc = Complex64::new(t * t - 4.0 * d, 0.0).sqrt();
    let l1 = (Complex64::new(t, 0.0) - disc) / 2.0;
    let l2 = (Complex64::new(t, 0.0) + disc) / 2.0;
    if l1.norm() <= l2.norm() {
        (l1, l2)
    } else {
        (l2, l1)
    }
}

/// Topological entropy of a single toral endomorphism, `Σ log max(1, |λ|)`.
pub fn single_entropy(a: &IntMatrix) -> f64 {
    let (l1, l2) = toral_eigen(a);
    l1.norm().max(1.0).ln() + l2.norm().max(1.0).ln()
}

/// Irreducibility of the characteristic polynomial over the integers.
pub fn is_irreducible(a: &IntMatrix) -> bool {
    let t = trace(a) as i128;
    let d = det(a) as i128;
    let disc = t * t - 4 * d;
    if disc < 0 {
        return true;
    }
    let r = (disc as f64).sqrt() as i128;
    !(r.saturating_sub(2)..=r + 2).any(|s| s >= 0 && s * s == disc)
}

/// Closed-form values `(h⁺, h^A, h)` for the diagonal pair `A(α,β), A(γ,δ)`
/// as stated in the literature for this family.
pub fn closed_form_entropies(alpha: u32, beta: u32, gamma: u32, delta: u32) -> Result<(f64, f64, f64)> {
    if [alpha, beta, gamma, delta].iter().any(|&v| v < 2) {
        return Err(Error::InvalidArgument("diagonal entries must be at least 2".into()));
    }
    let l = |v: u32| (v as f64).ln();
    let h_plus = l(alpha.min(gamma)) + l(beta.min(delta));
    let h_a = (l(alpha) + l(beta)).min(l(gamma) + l(delta));
    let h_cond = l(alpha.max(gamma)) + l(beta.max(delta));
    Ok((h_plus, h_a, h_cond))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallBox {
    pub half_sides: [f64; 2],
}

impl BallBox {
    pub fn area(&self) -> f64 {
        4.0 * self.half_sides[0] * self.half_sides[1]
    }

    pub fn contains_offset(&self, dx: f64, dy: f64) -> bool {
        dx.abs() < self.half_sides[0] && dy.abs() < self.half_sides[1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoxKind {
    Trajectory(Word),
    Condensed(usize),
    /// Largest single-word box; contained in the exhaustive ball.
    ExhaustiveInner(usize),
    /// Per-axis slowest rate; contains the exhaustive ball.
    ExhaustiveOuter(usize),
}

/// Diagonal entries of every generator, or an error if some generator is not
/// a diagonal toral map.
pub fn diagonal_entries(system: &SemigroupSystem) -> Result<Vec<[f64; 2]>> {
    if system.domain() != Domain::Torus2 {
        return Err(Error::AnalyticUnavailable("not a toral system".into()));
    }
    system
        .generators()
        .iter()
        .map(|g| match g {
            Generator::Linear(a) if is_diagonal(a) => Ok([a[0][0].abs() as f64, a[1][1].abs() as f64]),
            _ => Err(Error::AnalyticUnavailable("non-diagonal generator".into())),
        })
        .collect()
}

/// Exact Bowen-ball box of a diagonal system, valid while no coordinate
/// wraps (`ε · max entry ≤ 1/2`).
pub fn analytic_ball_box(system: &SemigroupSystem, kind: &BoxKind, eps: f64) -> Result<BallBox> {
    let diag = diagonal_entries(system)?;
    let axis = |f: &dyn Fn(usize) -> f64| -> [f64; 2] { [f(0), f(1)] };
    let rates: [f64; 2] = match kind {
        BoxKind::Trajectory(w) => axis(&|i| w.symbols().iter().map(|&s| diag[s][i].ln()).sum()),
        BoxKind::Condensed(n) => axis(&|i| *n as f64 * diag.iter().map(|d| d[i]).fold(1.0, f64::max).ln()),
        BoxKind::ExhaustiveOuter(n) => {
            axis(&|i| *n as f64 * diag.iter().map(|d| d[i]).fold(f64::INFINITY, f64::min).ln())
        }
        BoxKind::ExhaustiveInner(n) => {
            let best = (0..diag.len())
                .min_by(|&a, &b| (diag[a][0] * diag[a][1]).total_cmp(&(diag[b][0] * diag[b][1])))
                .unwrap_or(0);
            axis(&|i| *n as f64 * diag[best][i].ln())
        }
    };
    Ok(BallBox { half_sides: [(eps * (-rates[0]).exp()).min(0.5), (eps * (-rates[1]).exp()).min(0.5)] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BerendConclusion {
    OnlyTorusInvariant,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerendVerdict {
    pub commutative: bool,
    pub all_eigen_moduli_gt1: bool,
    pub has_irreducible_generator_with_distinct_moduli: bool,
    pub exhaustive_lt_every_single_entropy: bool,
    pub conclusion: BerendConclusion,
}

pub fn berend_check(generators: &[IntMatrix], h_plus_estimate: f64, single_entropies: &[f64]) -> Result<BerendVerdict> {
    if generators.len() < 2 {
        return Err(Error::InvalidArgument("need at least two generators".into()));
    }
    if single_entropies.len() != generators.len() {
        return Err(Error::InvalidArgument("one single-map entropy per generator required".into()));
    }
    let commutative = generators
        .iter()
        .enumerate()
        .all(|(i, a)| generators[i + 1..].iter().all(|b| mul(a, b) == mul(b, a)));
    let all_eigen_moduli_gt1 = generators.iter().all(|a| {
        let (l1, l2) = toral_eigen(a);
        l1.norm() > 1.0 && l2.norm() > 1.0
    });
    let has_irreducible_generator_with_distinct_moduli = generators.iter().any(|a| {
        let (l1, l2) = toral_eigen(a);
        is_irreducible(a) && (l1.norm() - l2.norm()).abs() > 1e-12
    });
    let exhaustive_lt_every_single_entropy = single_entropies.iter().all(|&h| h_plus_estimate < h);
    let all = commutative
        && all_eigen_moduli_gt1
        && has_irreducible_generator_with_distinct_moduli
        && exhaustive_lt_every_single_entropy;
    Ok(BerendVerdict {
        commutative,
        all_eigen_moduli_gt1,
        has_irreducible_generator_with_distinct_moduli,
        exhaustive_lt_every_single_entropy,
        conclusion: if all { BerendConclusion::OnlyTorusInvariant } else { BerendConclusion::Inconclusive },
    })
}

/// Integer matrices `M_0 = I, M_k = A_{C_k} ⋯ A_{C_1}` along a word.
pub fn prefix_products(system: &SemigroupSystem, word: &Word) -> Result<Vec<[[i128; 2]; 2]>> {
    let mats: Vec<IntMatrix> = system
        .generators()
        .iter()
        .map(|g| match g {
            Generator::Linear(a) => Ok(*a),
            _ => Err(Error::AnalyticUnavailable("not a linear toral system".into())),
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(word.len() + 1);
    let mut cur = [[1i128, 0], [0, 1]];
    out.push(cur);
    for &s in word.symbols() {
        let a = mats[s];
        let mut next = [[0i128; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = (a[i][0] as i128)
                    .checked_mul(cur[0][j])
                    .and_then(|u| (a[i][1] as i128).checked_mul(cur[1][j]).and_then(|v| u.checked_add(v)))
                    .ok_or_else(|| Error::AnalyticUnavailable("matrix product overflow".into()))?;
            }
        }
        cur = next;
        out.push(cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn apply_examples() {
        let p = toral_apply(&[[2, 0], [0, 3]], Point::new(0.4, 0.9));
        assert_abs_diff_eq!(p.x, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 0.7, epsilon = 1e-12);
        let q = toral_apply(&[[0, 1], [1, 2]], Point::new(0.5, 0.25));
        assert_eq!((q.x, q.y), (0.25, 0.0));
        let r = toral_apply(&[[1, 0], [0, 1]], Point::new(0.1, 0.2));
        assert_eq!((r.x, r.y), (0.1, 0.2));
    }

    #[test]
    fn eigen_examples() {
        let (a, b) = toral_eigen(&[[2, 0], [0, 3]]);
        assert_abs_diff_eq!(a.re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.re, 3.0, epsilon = 1e-12);
        let (a, b) = toral_eigen(&[[0, 1], [1, 2]]);
        assert_abs_diff_eq!(a.re, 1.0 - 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(b.re, 1.0 + 2f64.sqrt(), epsilon = 1e-12);
        let (a, b) = toral_eigen(&[[1, 0], [4, 1]]);
        assert_abs_diff_eq!(a.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenvalues_solve_characteristic_polynomial() {
        for a in [[[2, 1], [1, 1]], [[0, 1], [-1, 0]], [[3, 2], [1, 5]], [[1, 1], [-1, 2]]] {
            let (l1, l2) = toral_eigen(&a);
            for l in [l1, l2] {
                let r = l * l - l * trace(&a) as f64 + det(&a) as f64;
                assert!(r.norm() < 1e-9);
            }
        }
    }

    #[test]
    fn closed_forms() {
        let (hp, ha, hc) = closed_form_entropies(2, 3, 3, 2).unwrap();
        assert_abs_diff_eq!(hp, 4f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ha, 6f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(hc, 9f64.ln(), epsilon = 1e-12);
        let (hp, ha, hc) = closed_form_entropies(4, 5, 4, 5).unwrap();
        assert_abs_diff_eq!(hp, 20f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ha, hc, epsilon = 1e-12);
        let first = closed_form_entropies(4, 5, 2, 6).unwrap().0;
        let second = closed_form_entropies(2, 10, 3, 4).unwrap().0;
        assert_abs_diff_eq!(first, 10f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(second, 8f64.ln(), epsilon = 1e-12);
        assert!(closed_form_entropies(1, 3, 3, 2).is_err());
        assert_eq!(closed_form_entropies(2, 5, 3, 4).unwrap(), closed_form_entropies(3, 4, 2, 5).unwrap());
    }

    #[test]
    fn berend_examples() {
        let d = berend_check(&[[[2, 0], [0, 3]], [[3, 0], [0, 2]]], 1.0, &[6f64.ln(), 6f64.ln()]).unwrap();
        assert!(d.commutative && !d.has_irreducible_generator_with_distinct_moduli);
        assert_eq!(d.conclusion, BerendConclusion::Inconclusive);
        let nc = berend_check(&[[[1, 2], [0, 1]], [[1, 0], [2, 1]]], 0.0, &[0.0, 0.0]).unwrap();
        assert!(!nc.commutative);
        let m = [[2, 1], [1, 1]];
        let m2 = mul(&m, &m);
        let v = berend_check(&[m, m2], 0.1, &[single_entropy(&m), single_entropy(&m2)]).unwrap();
        assert!(v.commutative && v.has_irreducible_generator_with_distinct_moduli);
        assert!(!v.all_eigen_moduli_gt1);
        assert_eq!(v.conclusion, BerendConclusion::Inconclusive);
        let c = [[3, 1], [1, 2]];
        let ok = berend_check(&[c, mul(&c, &c)], 0.5, &[single_entropy(&c), single_entropy(&mul(&c, &c))]).unwrap();
        assert_eq!(ok.conclusion, BerendConclusion::OnlyTorusInvariant);
    }

    #[test]
    fn boxes_nest() {
        let s = SemigroupSystem::new(
            "d",
            Domain::Torus2,
            vec![Generator::Linear([[2, 0], [0, 3]]), Generator::Linear([[3, 0], [0, 2]])],
        )
        .unwrap();
        let eps = 0.1;
        let t = analytic_ball_box(&s, &BoxKind::Trajectory(Word::new(vec![0, 0], 2).unwrap()), eps).unwrap();
        assert_abs_diff_eq!(t.half_sides[0], eps / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.half_sides[1], eps / 9.0, epsilon = 1e-15);
        let c = analytic_ball_box(&s, &BoxKind::Condensed(3), eps).unwrap();
        let o = analytic_ball_box(&s, &BoxKind::ExhaustiveOuter(3), eps).unwrap();
        assert_abs_diff_eq!(c.half_sides[0], eps / 27.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.half_sides[1], eps / 8.0, epsilon = 1e-15);
        for w in Word::all(2, 3, 64).unwrap() {
            let b = analytic_ball_box(&s, &BoxKind::Trajectory(w), eps).unwrap();
            for i in 0..2 {
                assert!(c.half_sides[i] <= b.half_sides[i] && b.half_sides[i] <= o.half_sides[i]);
            }
        }
    }
}
