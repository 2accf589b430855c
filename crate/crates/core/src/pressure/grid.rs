//! Candidate grids, atom coverage and greedy weighted set cover.

use std::cmp::Ordering;
use std::cell::RefCell;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{log_sum_exp, EstimateConfig, Region};
use crate::error::{Error, Result};
use crate::system::{Domain, Generator, Point, SemigroupSystem};
use crate::systems::interval::core_intervals;
use crate::word::Word;

/// One ball of a cover: a center, the word it follows (`None` for condensed
/// and exhaustive balls) and `log` of its weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverAtom {
    pub center: Point,
    pub word: Option<Word>,
    pub log_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub atoms: Vec<CoverAtom>,
    pub log_cost: f64,
}

impl CoverSolution {
    pub fn total_cost(&self) -> f64 {
        self.log_cost.exp()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Dyadic grid on the domain; the target points are those in the region.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub domain: Domain,
    pub nx: usize,
    pub ny: usize,
    pub points: Vec<Point>,
    /// Target index of each point, or `u32::MAX` outside the region.
    pub target_of: Vec<u32>,
    /// Point index of each target.
    pub targets: Vec<usize>,
    /// Every generator is linear with integer entries, so it maps grid points
    /// to grid points exactly and balls at different centers are translates.
    pub periodic: bool,
}

impl Grid {
    pub fn new(
        system: &SemigroupSystem,
        n: usize,
        eps: f64,
        region: &Region,
        config: &EstimateConfig,
    ) -> Result<Self> {
        let domain = system.domain();
        let l = system.max_expansion();
        let delta = (eps / 4.0).min((eps.ln() - n as f64 * l.ln()).exp() / 2.0);
        let needed = (1.0 / delta).ceil();
        let limit = match domain {
            Domain::Torus2 => (config.max_grid_2d as f64).sqrt(),
            _ => config.max_grid_1d as f64,
        };
        if !(needed <= limit) {
            return Err(Error::Infeasible(format!(
                "grid spacing {delta:.3e} needs {needed:.0} points per axis, limit {limit:.0}"
            )));
        }
        let nx = (needed as usize).next_power_of_two().max(2);
        let spacing = 1.0 / nx as f64;
        let (ny, points): (usize, Vec<Point>) = match domain {
            Domain::Torus2 => {
                let pts = (0..nx * nx).map(|k| Point::new((k % nx) as f64 * spacing, (k / nx) as f64 * spacing)).collect();
                (nx, pts)
            }
            Domain::Circle | Domain::FullShift { .. } => (1, (0..nx).map(|i| Point::on_line(i as f64 * spacing)).collect()),
            Domain::Interval => {
                let core = core_intervals(system, n, config.interval_cap)?;
                let pts: Vec<Point> = (0..=nx)
                    .map(|i| i as f64 * spacing)
                    .filter(|&x| {
                        let k = core.partition_point(|iv| iv.1 < x);
                        k < core.len() && core[k].0 <= x
                    })
                    .map(Point::on_line)
                    .collect();
                (1, pts)
            }
        };
        if points.is_empty() {
            return Err(Error::Infeasible("no grid point lies in the invariant core".into()));
        }
        let mut target_of = vec![u32::MAX; points.len()];
        let mut targets = Vec::new();
        for (i, p) in points.iter().enumerate() {
            if in_region(region, domain, *p) {
                target_of[i] = targets.len() as u32;
                targets.push(i);
            }
        }
        if targets.is_empty() {
            return Err(Error::Infeasible("region contains no grid point".into()));
        }
        let periodic = system.generators().iter().all(|g| match (g, domain) {
            (Generator::Linear(_), Domain::Torus2) | (Generator::CircleMul(_), Domain::Circle) => true,
            _ => false,
        });
        Ok(Grid { domain, nx, ny, points, target_of, targets, periodic })
    }

    pub fn neighbors(&self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        let len = self.points.len();
        match self.domain {
            Domain::Torus2 => {
                let (x, y) = (i % self.nx, i / self.nx);
                let (nx, ny) = (self.nx, self.ny);
                out.push(y * nx + (x + 1) % nx);
                out.push(y * nx + (x + nx - 1) % nx);
                out.push(((y + 1) % ny) * nx + x);
                out.push(((y + ny - 1) % ny) * nx + x);
            }
            Domain::Circle => {
                out.push((i + 1) % len);
                out.push((i + len - 1) % len);
            }
            Domain::Interval | Domain::FullShift { .. } => {
                if i + 1 < len {
                    out.push(i + 1);
                }
                if i > 0 {
                    out.push(i - 1);
                }
            }
        }
    }

    /// Targets reached from `center` through grid neighbors inside the ball.
    pub fn flood(&self, center: usize, member: impl Fn(Point) -> bool) -> Vec<u32> {
        let mut covered = Vec::new();
        self.visit(center, member, |i| {
            if self.target_of[i] != u32::MAX {
                covered.push(self.target_of[i]);
            }
        });
        covered.sort_unstable();
        covered
    }

    /// Cells reached from the origin, for translating to other centers of a
    /// periodic grid.
    pub fn shape(&self, member: impl Fn(Point) -> bool) -> Vec<usize> {
        debug_assert!(self.periodic);
        let mut cells = Vec::new();
        self.visit(0, member, |i| cells.push(i));
        cells.sort_unstable();
        cells
    }

    /// Targets of `shape` translated to `center`; equals `flood(center, ..)`
    /// on a periodic grid.
    pub fn translate(&self, shape: &[usize], center: usize) -> Vec<u32> {
        let (nx, ny) = (self.nx, self.ny);
        let (cx, cy) = (center % nx, center / nx);
        let mut covered = Vec::with_capacity(shape.len());
        // Cells are emitted in increasing translated index: wrapped rows first,
        // and within a row the wrapped columns first.
        let wrap_row = shape.partition_point(|&i| i / nx < ny - cy);
        for part in [&shape[wrap_row..], &shape[..wrap_row]] {
            for row in part.chunk_by(|a, b| a / nx == b / nx) {
                let y = (row[0] / nx + cy) % ny;
                let wrap_col = row.partition_point(|&i| i % nx < nx - cx);
                for &i in row[wrap_col..].iter().chain(&row[..wrap_col]) {
                    let t = self.target_of[y * nx + (i % nx + cx) % nx];
                    if t != u32::MAX {
                        covered.push(t);
                    }
                }
            }
        }
        covered
    }

    fn visit(&self, center: usize, member: impl Fn(Point) -> bool, mut found: impl FnMut(usize)) {
        thread_local! {
            // Visit stamps per grid cell, reused across floods on this thread.
            static STAMPS: RefCell<(Vec<u32>, u32)> = const { RefCell::new((Vec::new(), 0)) };
        }
        STAMPS.with(|cell| {
            let (stamps, epoch) = &mut *cell.borrow_mut();
            if stamps.len() != self.points.len() || *epoch == u32::MAX {
                *stamps = vec![0; self.points.len()];
                *epoch = 0;
            }
            *epoch += 1;
            let mark = *epoch;
            let mut queue = vec![center];
            stamps[center] = mark;
            let mut nb = Vec::with_capacity(4);
            while let Some(i) = queue.pop() {
                found(i);
                self.neighbors(i, &mut nb);
                for &j in &nb {
                    if stamps[j] != mark {
                        stamps[j] = mark;
                        if member(self.points[j]) {
                            queue.push(j);
                        }
                    }
                }
            }
        })
    }
}

fn in_region(region: &Region, domain: Domain, p: Point) -> bool {
    match region {
        Region::Whole => true,
        Region::TorusBox { x0, x1, y0, y1 } => (*x0..*x1).contains(&p.x) && (*y0..*y1).contains(&p.y),
        Region::Cylinder { digits } => {
            let k = match domain {
                Domain::FullShift { symbols } => symbols as f64,
                _ => return false,
            };
            let mut x = p.x;
            digits.iter().all(|&d| {
                let digit = (x * k).floor();
                x = x * k - digit;
                digit as u32 == d
            })
        }
    }
}

/// A candidate ball for the set-cover search.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub center: usize,
    pub word: Option<usize>,
    pub coverage: Vec<u32>,
    pub log_weight: f64,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: f64,
    rank: usize,
    idx: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key).then_with(|| other.rank.cmp(&self.rank))
    }
}

/// Lazy greedy weighted set cover: repeatedly takes the candidate maximizing
/// `newly covered / weight`. Ties are broken by center, coverage and weight,
/// so relabeling words does not change the selected cost.
pub(crate) fn greedy_cover(num_targets: usize, cands: &[Candidate]) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&cands[a], &cands[b]);
        p.center
            .cmp(&q.center)
            .then_with(|| p.coverage.cmp(&q.coverage))
            .then_with(|| p.log_weight.total_cmp(&q.log_weight))
    });
    let mut rank = vec![0; cands.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut coverable = vec![false; num_targets];
    for c in cands {
        for &t in &c.coverage {
            coverable[t as usize] = true;
        }
    }
    if let Some(t) = coverable.iter().position(|&b| !b) {
        return Err(Error::Infeasible(format!("grid target {t} lies in no candidate ball")));
    }
    let key = |count: usize, lw: f64| (count as f64).ln() - lw;
    let mut heap: BinaryHeap<Entry> = cands
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.coverage.is_empty())
        .map(|(i, c)| Entry { key: key(c.coverage.len(), c.log_weight), rank: rank[i], idx: i })
        .collect();
    let mut covered = vec![false; num_targets];
    let mut left = num_targets;
    let mut chosen = Vec::new();
    while left > 0 {
        let top = heap.pop().ok_or_else(|| Error::Infeasible("cover search exhausted".into()))?;
        let c = &cands[top.idx];
        let fresh = c.coverage.iter().filter(|&&t| !covered[t as usize]).count();
        if fresh == 0 {
            continue;
        }
        let k = key(fresh, c.log_weight);
        if k.to_bits() != top.key.to_bits() {
            heap.push(Entry { key: k, ..top });
            continue;
        }
        for &t in &c.coverage {
            if !covered[t as usize] {
                covered[t as usize] = true;
                left -= 1;
            }
        }
        chosen.push(top.idx);
    }
    Ok(chosen)
}

pub(crate) fn solution(grid: &Grid, words: &[Word], cands: &[Candidate], chosen: &[usize]) -> CoverSolution {
    let atoms: Vec<CoverAtom> = chosen
        .iter()
        .map(|&i| CoverAtom {
            center: grid.points[cands[i].center],
            word: cands[i].word.map(|w| words[w].clone()),
            log_weight: cands[i].log_weight,
        })
        .collect();
    let log_cost = log_sum_exp(atoms.iter().map(|a| a.log_weight));
    CoverSolution { atoms, log_cost }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translated_shape_matches_flood() {
        let system = crate::systems::parse_system("toral:0,1,1,2;2,1,1,0").unwrap();
        let grid = Grid::new(&system, 2, 0.25, &Region::Whole, &EstimateConfig::default()).unwrap();
        assert!(grid.periodic);
        let word = Word::new(vec![0, 1], 2).unwrap();
        let (system, word) = (&system, &word);
        let ball = |c: usize| {
            let o = crate::ball::orbit(system, grid.points[c], word);
            move |z: Point| {
                let oz = crate::ball::orbit(system, z, word);
                o.iter().zip(&oz).all(|(a, b)| system.distance(*a, *b) < 0.25)
            }
        };
        let shape = grid.shape(ball(0));
        for c in [0, 1, 77, grid.points.len() - 1, 5000] {
            assert_eq!(grid.translate(&shape, c), grid.flood(c, ball(c)));
        }
    }

    fn cand(center: usize, cov: &[u32], lw: f64) -> Candidate {
        Candidate { center, word: None, coverage: cov.to_vec(), log_weight: lw }
    }

    #[test]
    fn greedy_prefers_cheap_coverage() {
        let c = vec![cand(0, &[0, 1, 2, 3], 2.0), cand(1, &[0, 1], 0.0), cand(2, &[2, 3], 0.0)];
        let mut ch = greedy_cover(4, &c).unwrap();
        ch.sort();
        assert_eq!(ch, vec![1, 2]);
    }

    #[test]
    fn uncoverable_target_is_infeasible() {
        let c = vec![cand(0, &[0], 0.0)];
        assert!(matches!(greedy_cover(2, &c), Err(Error::Infeasible(_))));
    }

    #[test]
    fn torus_neighbors_wrap() {
        let s = crate::systems::parse_system("diag:2,2").unwrap();
        let g = Grid::new(&s, 1, 0.25, &Region::Whole, &EstimateConfig::default()).unwrap();
        let mut nb = Vec::new();
        g.neighbors(0, &mut nb);
        assert!(nb.contains(&(g.nx - 1)) && nb.contains(&((g.ny - 1) * g.nx)));
    }

    #[test]
    fn cylinder_region_selects_prefix() {
        assert!(in_region(&Region::Cylinder { digits: vec![0, 1] }, Domain::FullShift { symbols: 2 }, Point::on_line(0.3)));
        assert!(!in_region(&Region::Cylinder { digits: vec![1] }, Domain::FullShift { symbols: 2 }, Point::on_line(0.3)));
    }
}
