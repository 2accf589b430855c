//! Weighted separated sets, giving lower bounds on cover costs.

use std::collections::HashMap;

use super::grid::Grid;
use super::log_sum_exp;
use crate::system::{Domain, Point};

/// Greedy maximal separated subset of the grid targets, heaviest first.
///
/// `separated(p, q)` must hold whenever the base distance is at least `2ε`;
/// only pairs in neighboring `2ε` cells are tested. Returns `log Σ exp(w)`
/// over the chosen points.
pub(crate) fn packing_log_weight(
    grid: &Grid,
    eps: f64,
    weights: &[f64],
    separated: impl Fn(Point, Point) -> bool,
) -> f64 {
    let cells = Cells::new(grid.domain, eps);
    let mut order: Vec<usize> = (0..grid.targets.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut buckets: HashMap<(i64, i64), Vec<Point>> = HashMap::new();
    let mut chosen = Vec::new();
    let mut keys = Vec::with_capacity(9);
    for t in order {
        let p = grid.points[grid.targets[t]];
        cells.around(p, &mut keys);
        let clash = keys
            .iter()
            .filter_map(|k| buckets.get(k))
            .any(|b| b.iter().any(|&q| !separated(p, q)));
        if !clash {
            buckets.entry(cells.key(p)).or_default().push(p);
            chosen.push(weights[t]);
        }
    }
    log_sum_exp(chosen)
}

struct Cells {
    domain: Domain,
    count: i64,
    scale: f64,
}

impl Cells {
    fn new(domain: Domain, eps: f64) -> Self {
        match domain {
            Domain::FullShift { symbols } => {
                let q = ((1.0 / (2.0 * eps)).log2().floor().max(0.0) as i32 + 1).min(50);
                let scale = (symbols as f64).powi(q).min(2f64.powi(52));
                Cells { domain, count: scale as i64, scale }
            }
            _ => {
                let count = ((1.0 / (2.0 * eps)).floor() as i64).max(1);
                Cells { domain, count, scale: count as f64 }
            }
        }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        let c = |v: f64| ((v * self.scale).floor() as i64).clamp(0, self.count - 1);
        match self.domain {
            Domain::Torus2 => (c(p.x), c(p.y)),
            _ => (c(p.x), 0),
        }
    }

    fn around(&self, p: Point, out: &mut Vec<(i64, i64)>) {
        out.clear();
        let (kx, ky) = self.key(p);
        let n = self.count;
        let wrap = matches!(self.domain, Domain::Torus2 | Domain::Circle);
        let step = |k: i64, d: i64| -> Option<i64> {
            let v = k + d;
            if wrap {
                Some(v.rem_euclid(n))
            } else if (0..n).contains(&v) {
                Some(v)
            } else {
                None
            }
        };
        let (dx, dy): (&[i64], &[i64]) = match self.domain {
            Domain::FullShift { .. } => (&[0], &[0]),
            Domain::Torus2 => (&[-1, 0, 1], &[-1, 0, 1]),
            _ => (&[-1, 0, 1], &[0]),
        };
        for &a in dx {
            for &b in dy {
                if let (Some(x), Some(y)) = (step(kx, a), if b == 0 { Some(ky) } else { step(ky, b) }) {
                    if !out.contains(&(x, y)) {
                        out.push((x, y));
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pressure::{EstimateConfig, Region};
    use crate::systems::parse_system;

    #[test]
    fn separated_circle_points() {
        let s = parse_system("circle:2").unwrap();
        let g = Grid::new(&s, 1, 0.125, &Region::Whole, &EstimateConfig::default()).unwrap();
        let w = vec![0.0; g.targets.len()];
        let lw = packing_log_weight(&g, 0.125, &w, |p, q| s.distance(p, q) >= 0.25);
        assert!((lw - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn shift_cells_separate_cylinders() {
        let s = parse_system("shift:2").unwrap();
        let g = Grid::new(&s, 1, 0.25, &Region::Whole, &EstimateConfig::default()).unwrap();
        let w = vec![0.0; g.targets.len()];
        let lw = packing_log_weight(&g, 0.25, &w, |p, q| s.distance(p, q) >= 0.5);
        assert!((lw - 4f64.ln()).abs() < 1e-12);
    }
}
