//! Generic grid estimator with covers shared across pressure kinds.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{greedy_cover, solution, Candidate, CoverAtom, CoverSolution, Grid};
use super::packing::packing_log_weight;
use super::{check_inputs, finish, log_sum_exp, EstimateConfig, LogBounds, Method, PressureEstimate, PressureKind, Region};
use crate::ball::{ball_contains, consecutive_sum, dn_extremes_over_words, orbit, sum_extremes_over_words, BallKind, BallSpec};
use crate::error::{Error, Result};
use crate::par;
use crate::potential::MultiPotential;
use crate::system::{Point, SemigroupSystem};
use crate::word::{checked_pow, Word};
use crate::ENUMERATION_CAP;

/// Seeded words for sampled free-pressure averages.
pub(crate) fn sampled_words(m: usize, n: usize, seed: u64, count: usize) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 20) ^ 0x5eed);
    (0..count.max(1))
        .map(|_| Word::new((0..n).map(|_| rng.gen_range(0..m)).collect(), m).expect("in range"))
        .collect()
}

/// `true` iff `d_w(center, z) < ε`, given the orbit of the center.
fn within(system: &SemigroupSystem, center_orbit: &[Point], z: Point, word: &Word, eps: f64) -> bool {
    let mut p = z;
    if system.distance(center_orbit[0], p) >= eps {
        return false;
    }
    for (k, &j) in word.symbols().iter().enumerate() {
        p = system.apply(j, p);
        if system.distance(center_orbit[k + 1], p) >= eps {
            return false;
        }
    }
    true
}

/// Grid-based estimator for one system, potential, depth and radius.
/// Covers computed for one kind are reused to tighten the others.
pub struct Session {
    system: SemigroupSystem,
    phi: MultiPotential,
    n: usize,
    eps: f64,
    config: EstimateConfig,
    grid: Grid,
    osc: f64,
    enumerable: bool,
    extremes: OnceCell<Vec<(f64, f64)>>,
    word_cands: RefCell<HashMap<Word, Rc<Vec<Candidate>>>>,
    word_covers: RefCell<HashMap<Word, Rc<CoverSolution>>>,
    covers: RefCell<HashMap<String, Rc<CoverSolution>>>,
}

impl Session {
    pub fn new(
        system: &SemigroupSystem,
        phi: &MultiPotential,
        n: usize,
        eps: f64,
        region: &Region,
        config: &EstimateConfig,
    ) -> Result<Self> {
        check_inputs(system, phi, n, eps)?;
        region.validate(system.domain())?;
        let grid = Grid::new(system, n, eps, region, config)?;
        Ok(Session {
            system: system.clone(),
            phi: phi.clone(),
            n,
            eps,
            config: config.clone(),
            osc: n as f64 * phi.max_oscillation(system.domain(), eps),
            enumerable: checked_pow(system.m(), n).is_some_and(|c| c <= ENUMERATION_CAP),
            grid,
            extremes: OnceCell::new(),
            word_cands: RefCell::default(),
            word_covers: RefCell::default(),
            covers: RefCell::default(),
        })
    }

    pub fn system(&self) -> &SemigroupSystem {
        &self.system
    }

    pub fn grid_points(&self) -> usize {
        self.grid.targets.len()
    }

    pub fn estimate(&self, kind: &PressureKind) -> Result<PressureEstimate> {
        let b = self.log_bounds(kind)?;
        finish(kind, self.system.domain(), self.n, self.eps, Method::GenericGrid, self.config.seed, b)
    }

    /// The cover behind the upper bound of `kind`; the free kind has none.
    pub fn cover(&self, kind: &PressureKind) -> Result<CoverSolution> {
        match kind {
            PressureKind::Free | PressureKind::Lift => {
                Err(Error::InvalidArgument("this kind averages many covers".into()))
            }
            PressureKind::Trajectory(rule) => Ok((*self.word_cover(&rule.prefix(self.n, self.system.m())?)?).clone()),
            _ => Ok((*self.best_cover(kind)?).clone()),
        }
    }

    /// `log` of the weight of an atom of a `kind` cover under `psi`.
    pub fn atom_log_weight(&self, kind: &PressureKind, atom: &CoverAtom, psi: &MultiPotential) -> Result<f64> {
        if let Some(w) = &atom.word {
            return Ok(consecutive_sum(&self.system, psi, atom.center, w));
        }
        let (lo, hi) = sum_extremes_over_words(&self.system, psi, atom.center, self.n)?;
        Ok(match kind {
            PressureKind::CondensedUpper | PressureKind::ExhaustiveUpper => hi,
            _ => lo,
        })
    }

    fn log_bounds(&self, kind: &PressureKind) -> Result<LogBounds> {
        let (upper, size) = match kind {
            PressureKind::Lift => {
                return Err(Error::InvalidArgument("the lift is estimated through the free kind".into()))
            }
            PressureKind::Free => return self.free_bounds(),
            PressureKind::Trajectory(rule) => {
                let c = self.word_cover(&rule.prefix(self.n, self.system.m())?)?;
                (c.log_cost, c.len() as f64)
            }
            _ => {
                let c = self.best_cover(kind)?;
                (c.log_cost, c.len() as f64)
            }
        };
        let lower = self.packing(kind)?;
        if lower > upper + 1e-9 * upper.abs().max(1.0) {
            return Err(Error::BoundInversion { lower, upper, context: kind.label() });
        }
        Ok(LogBounds { lower, upper, cover_size: size, stochastic: false })
    }

    fn free_bounds(&self) -> Result<LogBounds> {
        let (words, stochastic) = if self.enumerable {
            (Word::all(self.system.m(), self.n, ENUMERATION_CAP)?, false)
        } else {
            (sampled_words(self.system.m(), self.n, self.config.seed, self.config.free_samples), true)
        };
        let ln_count = (words.len() as f64).ln();
        let mut ups = Vec::with_capacity(words.len());
        let mut los = Vec::with_capacity(words.len());
        let mut size = 0.0;
        for w in &words {
            let c = self.word_cover(w)?;
            ups.push(c.log_cost);
            size += c.len() as f64;
            los.push(self.packing(&PressureKind::Trajectory(crate::word::WordRule::Explicit(w.symbols().to_vec())))?);
        }
        Ok(LogBounds {
            lower: log_sum_exp(los) - ln_count,
            upper: log_sum_exp(ups) - ln_count,
            cover_size: size / words.len() as f64,
            stochastic,
        })
    }

    fn extremes(&self) -> Result<&[(f64, f64)]> {
        if self.extremes.get().is_none() {
            let (system, phi, n) = (&self.system, &self.phi, self.n);
            let pts: Vec<Point> = self.grid.points.clone();
            let v = par::try_map(self.config.exec, &pts, |&p| sum_extremes_over_words(system, phi, p, n))?;
            let _ = self.extremes.set(v);
        }
        Ok(self.extremes.get().expect("set above"))
    }

    fn candidates_for_word(&self, word: &Word) -> Rc<Vec<Candidate>> {
        if let Some(c) = self.word_cands.borrow().get(word) {
            return c.clone();
        }
        let (system, phi, grid, eps) = (&self.system, &self.phi, &self.grid, self.eps);
        let shape = grid.periodic.then(|| {
            let o = orbit(system, grid.points[0], word);
            grid.shape(|z| within(system, &o, z, word, eps))
        });
        let cands = par::map(self.config.exec, &grid.targets, |&center| {
            let coverage = match &shape {
                Some(s) => grid.translate(s, center),
                None => {
                    let o = orbit(system, grid.points[center], word);
                    grid.flood(center, |z| within(system, &o, z, word, eps))
                }
            };
            Candidate { center, word: None, coverage, log_weight: consecutive_sum(system, phi, grid.points[center], word) }
        });
        let rc = Rc::new(cands);
        self.word_cands.borrow_mut().insert(word.clone(), rc.clone());
        rc
    }

    fn word_cover(&self, word: &Word) -> Result<Rc<CoverSolution>> {
        if let Some(c) = self.word_covers.borrow().get(word) {
            return Ok(c.clone());
        }
        let cands = self.candidates_for_word(word);
        let chosen = greedy_cover(self.grid.targets.len(), &cands)?;
        let mut sol = solution(&self.grid, &[], &cands, &chosen);
        for a in &mut sol.atoms {
            a.word = Some(word.clone());
        }
        let rc = Rc::new(sol);
        self.word_covers.borrow_mut().insert(word.clone(), rc.clone());
        Ok(rc)
    }

    /// Greedy cover by condensed or exhaustive balls with the given weights.
    fn set_cover(&self, exhaustive: bool, upper_weight: bool) -> Result<CoverSolution> {
        if !self.enumerable {
            return Err(Error::DepthTooLarge { m: self.system.m(), n: self.n, cap: ENUMERATION_CAP });
        }
        let ext = self.extremes()?;
        let (system, grid, eps, n) = (&self.system, &self.grid, self.eps, self.n);
        let kind = if exhaustive { BallKind::Exhaustive(n) } else { BallKind::Condensed(n) };
        let shape = match grid.periodic {
            true => {
                let ball = BallSpec::new(kind.clone(), grid.points[0], eps)?;
                Some(grid.shape(|z| ball_contains(system, &ball, z).unwrap_or(false)))
            }
            false => None,
        };
        let cands = par::try_map(self.config.exec, &grid.targets, |&center| -> Result<Candidate> {
            let coverage = match &shape {
                Some(s) => grid.translate(s, center),
                None => {
                    let ball = BallSpec::new(kind.clone(), grid.points[center], eps)?;
                    grid.flood(center, |z| ball_contains(system, &ball, z).unwrap_or(false))
                }
            };
            let (lo, hi) = ext[center];
            Ok(Candidate { center, word: None, coverage, log_weight: if upper_weight { hi } else { lo } })
        })?;
        let chosen = greedy_cover(grid.targets.len(), &cands)?;
        Ok(solution(grid, &[], &cands, &chosen))
    }

    /// Same balls, weights replaced by the lower or upper extreme sum.
    fn reweighted(&self, cover: &CoverSolution, upper_weight: bool) -> Result<CoverSolution> {
        let mut atoms = cover.atoms.clone();
        for a in &mut atoms {
            let (lo, hi) = sum_extremes_over_words(&self.system, &self.phi, a.center, self.n)?;
            a.log_weight = if upper_weight { hi } else { lo };
            a.word = None;
        }
        let log_cost = log_sum_exp(atoms.iter().map(|a| a.log_weight));
        Ok(CoverSolution { atoms, log_cost })
    }

    fn best_cover(&self, kind: &PressureKind) -> Result<Rc<CoverSolution>> {
        let key = kind.label();
        if let Some(c) = self.covers.borrow().get(&key) {
            return Ok(c.clone());
        }
        let pick = |a: CoverSolution, b: CoverSolution| if b.log_cost < a.log_cost { b } else { a };
        let best = match kind {
            PressureKind::CondensedLower => {
                let own = self.set_cover(false, false)?;
                let up = self.best_cover(&PressureKind::CondensedUpper)?;
                pick(own, self.reweighted(&up, false)?)
            }
            PressureKind::CondensedUpper => self.set_cover(false, true)?,
            PressureKind::ExhaustiveUpper => {
                let own = self.set_cover(true, true)?;
                let amal = self.best_cover(&PressureKind::Amalgamated)?;
                pick(own, self.reweighted(&amal, true)?)
            }
            PressureKind::ExhaustiveLower => {
                let own = self.set_cover(true, false)?;
                let up = self.best_cover(&PressureKind::ExhaustiveUpper)?;
                let amal = self.best_cover(&PressureKind::Amalgamated)?;
                let best = pick(own, self.reweighted(&up, false)?);
                pick(best, self.reweighted(&amal, false)?)
            }
            PressureKind::Amalgamated => self.amalgamated_cover()?,
            PressureKind::Trajectory(_) | PressureKind::Free | PressureKind::Lift => unreachable!("handled by the caller"),
        };
        let rc = Rc::new(best);
        self.covers.borrow_mut().insert(key, rc.clone());
        Ok(rc)
    }

    fn amalgamated_cover(&self) -> Result<CoverSolution> {
        let m = self.system.m();
        let pool = self.config.pool.words(m, self.n);
        let mut best: Option<CoverSolution> = None;
        let mut consider = |c: CoverSolution| {
            if best.as_ref().map_or(true, |b| c.log_cost < b.log_cost) {
                best = Some(c);
            }
        };
        let mixed: Vec<Word> = if self.enumerable
            && checked_pow(m, self.n).is_some_and(|c| c.saturating_mul(self.grid.targets.len()) <= self.config.max_atoms)
        {
            Word::all(m, self.n, ENUMERATION_CAP)?
        } else {
            pool.clone()
        };
        if mixed.len().saturating_mul(self.grid.targets.len()) <= self.config.max_atoms {
            let mut cands = Vec::new();
            for (i, w) in mixed.iter().enumerate() {
                cands.extend(self.candidates_for_word(w).iter().map(|c| Candidate { word: Some(i), ..c.clone() }));
            }
            let chosen = greedy_cover(self.grid.targets.len(), &cands)?;
            consider(solution(&self.grid, &mixed, &cands, &chosen));
            self.word_cands.borrow_mut().retain(|w, _| pool.contains(w));
        }
        for w in &pool {
            consider((*self.word_cover(w)?).clone());
        }
        if self.enumerable {
            consider((*self.best_cover(&PressureKind::CondensedLower)?).clone());
        }
        best.ok_or_else(|| Error::Infeasible("no amalgamated cover".into()))
    }

    /// `log` weight of a separated set for `kind`.
    fn packing(&self, kind: &PressureKind) -> Result<f64> {
        let (system, eps, n, osc) = (&self.system, self.eps, self.n, self.osc);
        let two = 2.0 * eps;
        let base = |p: Point, q: Point| system.distance(p, q) >= two;
        let inf_phi = || self.phi.ranges().iter().map(|r| r.0).fold(f64::INFINITY, f64::min) * n as f64;
        let at_targets = |f: &dyn Fn(usize) -> f64| -> Vec<f64> { self.grid.targets.iter().map(|&t| f(t)).collect() };
        match kind {
            PressureKind::Trajectory(rule) => {
                let w = rule.prefix(n, system.m())?;
                let weights = at_targets(&|t| consecutive_sum(system, &self.phi, self.grid.points[t], &w) - osc);
                Ok(packing_log_weight(&self.grid, eps, &weights, |p, q| crate::ball::dn_distance(system, p, q, &w) >= two))
            }
            PressureKind::Amalgamated if !self.enumerable => {
                let weights = vec![inf_phi(); self.grid.targets.len()];
                Ok(packing_log_weight(&self.grid, eps, &weights, base))
            }
            PressureKind::ExhaustiveLower => {
                let weights = vec![inf_phi(); self.grid.targets.len()];
                Ok(packing_log_weight(&self.grid, eps, &weights, base))
            }
            PressureKind::Free | PressureKind::Lift => unreachable!("packed per word"),
            _ => {
                let ext = self.extremes()?;
                let upper = *kind == PressureKind::CondensedUpper;
                let weights = at_targets(&|t| (if upper { ext[t].1 } else { ext[t].0 }) - osc);
                let sep = |p: Point, q: Point| {
                    let (lo, hi) = dn_extremes_over_words(system, p, q, n).unwrap_or((0.0, 0.0));
                    match kind {
                        PressureKind::Amalgamated => lo >= two,
                        PressureKind::ExhaustiveUpper => system.distance(p, q) >= two,
                        _ => hi >= two,
                    }
                };
                Ok(packing_log_weight(&self.grid, eps, &weights, sep))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::parse_system;

    #[test]
    fn generic_doubling_brackets_log_two() {
        let s = parse_system("circle:2").unwrap();
        let phi = MultiPotential::zero(1);
        let sess = Session::new(&s, &phi, 6, 0.125, &Region::Whole, &EstimateConfig::generic()).unwrap();
        let e = sess.estimate(&PressureKind::Trajectory(crate::word::WordRule::Constant(0))).unwrap();
        assert!(e.lower <= e.upper);
        assert!(e.upper < 2f64.ln() + 0.6 && e.upper > 2f64.ln() - 0.1, "{e:?}");
    }

    #[test]
    fn amalgamated_never_exceeds_trajectories() {
        let s = parse_system("circle:2|3").unwrap();
        let phi = crate::potential::random_potential(3, 0.2, 2, s.domain());
        let sess = Session::new(&s, &phi, 3, 0.125, &Region::Whole, &EstimateConfig::generic()).unwrap();
        let a = sess.estimate(&PressureKind::Amalgamated).unwrap();
        let t = sess.estimate(&PressureKind::Trajectory(crate::word::WordRule::Constant(0))).unwrap();
        assert!(a.upper <= t.upper + 1e-12);
        let cl = sess.estimate(&PressureKind::CondensedLower).unwrap();
        assert!(a.upper <= cl.upper + 1e-12);
    }
}
