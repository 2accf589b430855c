//! Local entropies of measures along trajectories and the marginal bound
//! for product measures on the skew product.

use std::collections::{HashSet, VecDeque};
use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ball::{ball_contains, BallKind, BallSpec};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::pressure::{ln_ball_volume, widening};
use crate::system::{Domain, Generator, Point, SemigroupSystem};
use crate::systems::toral::single_entropy;
use crate::word::WordPool;

const MASS_TOL: f64 = 1e-9;
const MAX_FLOOD_CELLS: usize = 1 << 22;

/// A probability measure on the base space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeasureModel {
    /// Normalized Lebesgue (Haar) measure.
    Lebesgue,
    /// Mass per cell of a uniform grid with `resolution` cells per axis,
    /// row-major with `x` fastest.
    GridDensity { resolution: usize, masses: Vec<f64> },
    /// Weighted points.
    EmpiricalSample { points: Vec<Point>, weights: Vec<f64> },
}

impl MeasureModel {
    pub fn dirac(p: Point) -> Self {
        MeasureModel::EmpiricalSample { points: vec![p], weights: vec![1.0] }
    }

    pub fn grid(domain: Domain, resolution: usize, masses: Vec<f64>) -> Result<Self> {
        let cells = resolution.checked_pow(domain.dimension() as u32).unwrap_or(usize::MAX);
        if resolution == 0 || masses.len() != cells {
            return Err(Error::InvalidArgument(format!("expected {cells} cell masses, got {}", masses.len())));
        }
        check_masses(&masses)?;
        Ok(MeasureModel::GridDensity { resolution, masses })
    }

    pub fn empirical(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidArgument("one weight per sample point required".into()));
        }
        check_masses(&weights)?;
        Ok(MeasureModel::EmpiricalSample { points, weights })
    }

    /// Reads `cell_index,mass` rows; a header row is skipped.
    pub fn from_csv(reader: impl Read, domain: Domain, resolution: usize) -> Result<Self> {
        let cells = resolution.checked_pow(domain.dimension() as u32).unwrap_or(usize::MAX);
        let mut masses = vec![0.0; cells.min(1 << 28)];
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed = (rec.get(0).map(str::parse::<usize>), rec.get(1).map(str::parse::<f64>));
            match parsed {
                (Some(Ok(c)), Some(Ok(m))) if c < masses.len() => masses[c] += m,
                (Some(Ok(c)), Some(Ok(_))) => return Err(Error::Parse(format!("cell {c} out of range"))),
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("bad measure row {}", i + 1))),
            }
        }
        MeasureModel::grid(domain, resolution, masses)
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            MeasureModel::Lebesgue => 1.0,
            MeasureModel::GridDensity { masses, .. } => masses.iter().sum(),
            MeasureModel::EmpiricalSample { weights, .. } => weights.iter().sum(),
        }
    }

    /// `count` points distributed according to the measure.
    pub fn sample(&self, domain: Domain, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = domain.dimension();
        let pick = |weights: &[f64], rng: &mut ChaCha8Rng| {
            let mut u = rng.gen::<f64>() * weights.iter().sum::<f64>();
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    return i;
                }
                u -= w;
            }
            weights.len() - 1
        };
        (0..count)
            .map(|_| match self {
                MeasureModel::Lebesgue => {
                    Point::new(rng.gen::<f64>(), if d == 2 { rng.gen::<f64>() } else { 0.0 })
                }
                MeasureModel::GridDensity { resolution, masses } => {
                    let c = pick(masses, &mut rng);
                    let r = *resolution as f64;
                    let x = ((c % resolution) as f64 + rng.gen::<f64>()) / r;
                    let y = if d == 2 { ((c / resolution) as f64 + rng.gen::<f64>()) / r } else { 0.0 };
                    Point::new(x, y)
                }
                MeasureModel::EmpiricalSample { points, weights } => points[pick(weights, &mut rng)],
            })
            .collect()
    }
}

fn check_masses(m: &[f64]) -> Result<()> {
    if m.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("masses must be nonnegative".into()));
    }
    let total: f64 = m.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidArgument(format!("total mass {total} is not 1")));
    }
    Ok(())
}

/// Bernoulli measure on words times a base measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductMeasureModel {
    pub symbol_weights: Vec<f64>,
    pub base: MeasureModel,
}

impl ProductMeasureModel {
    pub fn new(symbol_weights: Vec<f64>, base: MeasureModel) -> Result<Self> {
        if symbol_weights.is_empty() {
            return Err(Error::InvalidArgument("no symbol weights".into()));
        }
        check_masses(&symbol_weights)?;
        Ok(ProductMeasureModel { symbol_weights, base })
    }

    /// Shannon entropy of the symbol weights.
    pub fn symbol_entropy(&self) -> f64 {
        -self.symbol_weights.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NamedMeasure {
    Base(MeasureModel),
    Product(ProductMeasureModel),
}

/// Parses `lebesgue`, `dirac:x[,y]` or `bernoulli:p1,…,pm × lebesgue`
/// (`x` or `*` also separate the factors).
pub fn parse_measure(spec: &str, domain: Domain) -> Result<NamedMeasure> {
    let spec = spec.trim();
    let nums = |s: &str| -> Result<Vec<f64>> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{t}` in `{spec}`"))))
            .collect()
    };
    if spec == "lebesgue" {
        return Ok(NamedMeasure::Base(MeasureModel::Lebesgue));
    }
    if let Some(rest) = spec.strip_prefix("dirac:") {
        let v = nums(rest)?;
        let p = match (v.as_slice(), domain.dimension()) {
            ([x], 1) => Point::on_line(*x),
            ([x, y], 2) => Point::new(*x, *y),
            _ => return Err(Error::Parse(format!("`{spec}` has the wrong number of coordinates"))),
        };
        if !domain.contains(p) {
            return Err(Error::InvalidArgument(format!("`{spec}` lies outside the domain")));
        }
        return Ok(NamedMeasure::Base(MeasureModel::dirac(p)));
    }
    if let Some(rest) = spec.strip_prefix("bernoulli:") {
        let (w, base) = rest
            .split_once('×')
            .or_else(|| rest.split_once('*'))
            .or_else(|| rest.split_once(" x "))
            .ok_or_else(|| Error::Parse(format!("`{spec}` needs a base factor")))?;
        let base = match parse_measure(base, domain)? {
            NamedMeasure::Base(b) => b,
            NamedMeasure::Product(_) => return Err(Error::Parse("nested product measure".into())),
        };
        return Ok(NamedMeasure::Product(ProductMeasureModel::new(nums(w)?, base)?));
    }
    Err(Error::Parse(format!("unknown measure `{spec}`")))
}

/// `ln μ(ball)`, `-∞` for an empty ball.
pub fn ln_ball_measure(mu: &MeasureModel, system: &SemigroupSystem, ball: &BallSpec) -> Result<f64> {
    let domain = system.domain();
    match mu {
        MeasureModel::Lebesgue => match ln_ball_volume(system, ball) {
            Ok(v) => Ok(v),
            Err(Error::AnalyticUnavailable(_)) => {
                let res = lebesgue_resolution(system, ball)?;
                let cell = -(domain.dimension() as f64) * (res as f64).ln();
                let cells = flood_cells(system, ball, res)?;
                Ok(if cells.is_empty() { f64::NEG_INFINITY } else { (cells.len() as f64).ln() + cell })
            }
            Err(e) => Err(e),
        },
        MeasureModel::GridDensity { resolution, masses } => {
            if 1.0 / (*resolution as f64) > ball.radius / 4.0 {
                return Err(Error::UnderResolved(format!(
                    "cell size 1/{resolution} exceeds a quarter of the radius {}",
                    ball.radius
                )));
            }
            let cells = flood_cells(system, ball, *resolution)?;
            Ok(cells.iter().map(|&c| masses[c]).sum::<f64>().ln())
        }
        MeasureModel::EmpiricalSample { points, weights } => {
            let mut total = 0.0;
            for (p, w) in points.iter().zip(weights) {
                if system.distance(ball.center, *p) < ball.radius && ball_contains(system, ball, *p)? {
                    total += w;
                }
            }
            Ok(total.ln())
        }
    }
}

pub fn ball_measure(mu: &MeasureModel, system: &SemigroupSystem, ball: &BallSpec) -> Result<f64> {
    Ok(ln_ball_measure(mu, system, ball)?.exp())
}

fn lebesgue_resolution(system: &SemigroupSystem, ball: &BallSpec) -> Result<usize> {
    let need = 8.0 * system.max_expansion().powi(ball.kind.depth() as i32) / ball.radius;
    let cap = if system.domain().dimension() == 2 { 1 << 11 } else { 1 << 20 };
    if !(need <= cap as f64) {
        return Err(Error::UnderResolved(format!("ball needs {need:.0} cells per axis, limit {cap}")));
    }
    Ok((need.ceil() as usize).next_power_of_two())
}

/// Cells of a `res`-per-axis grid whose centers lie in the ball and connect
/// to the cell holding the center.
fn flood_cells(system: &SemigroupSystem, ball: &BallSpec, res: usize) -> Result<Vec<usize>> {
    let domain = system.domain();
    let two_d = domain.dimension() == 2;
    let wrap = matches!(domain, Domain::Torus2 | Domain::Circle);
    let r = res as f64;
    let center_of = |c: usize| {
        let x = ((c % res) as f64 + 0.5) / r;
        Point::new(x, if two_d { ((c / res) as f64 + 0.5) / r } else { 0.0 })
    };
    let idx = |v: f64| ((v * r).floor() as usize).min(res - 1);
    let start = idx(ball.center.x) + if two_d { idx(ball.center.y) * res } else { 0 };
    if !ball_contains(system, ball, center_of(start))? {
        return Ok(Vec::new());
    }
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(c) = queue.pop_front() {
        out.push(c);
        if out.len() > MAX_FLOOD_CELLS {
            return Err(Error::Infeasible("ball spans too many grid cells".into()));
        }
        let (x, y) = (c % res, c / res);
        let mut nb = Vec::with_capacity(4);
        let step = |v: usize, up: bool| -> Option<usize> {
            match (up, wrap) {
                (true, _) if v + 1 < res => Some(v + 1),
                (true, true) => Some(0),
                (false, _) if v > 0 => Some(v - 1),
                (false, true) => Some(res - 1),
                _ => None,
            }
        };
        for up in [true, false] {
            if let Some(x2) = step(x, up) {
                nb.push(y * res + x2);
            }
            if two_d {
                if let Some(y2) = step(y, up) {
                    nb.push(y2 * res + x);
                }
            }
        }
        for n in nb {
            if seen.insert(n) && ball_contains(system, ball, center_of(n))? {
                queue.push_back(n);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalRates {
    pub n: usize,
    pub upper: f64,
    pub lower: f64,
    pub exhaustive: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEntropyEstimate {
    pub x: Point,
    pub epsilon: f64,
    pub n_range: Vec<usize>,
    pub h_upper_local: f64,
    pub h_lower_local: f64,
    pub h_exhaustive_local: f64,
    /// Mass-decay rates at each depth; the estimates are their minima.
    pub sequence: Vec<LocalRates>,
    /// Some ball had zero mass; its rate is `+∞`.
    pub zero_mass: bool,
}

/// Mass-decay rates `−log μ(B)/n` over pool words (sup and inf) and of the
/// exhaustive ball, with the `lim inf` in `n` replaced by the minimum over
/// `n_range`.
pub fn local_amalgamated_entropy(
    mu: &MeasureModel,
    system: &SemigroupSystem,
    x: Point,
    eps: f64,
    n_range: &[usize],
    pool: &WordPool,
) -> Result<LocalEntropyEstimate> {
    if n_range.is_empty() || n_range.contains(&0) {
        return Err(Error::InvalidArgument("depths must be positive and nonempty".into()));
    }
    let mut sequence = Vec::with_capacity(n_range.len());
    let mut zero_mass = false;
    for &n in n_range {
        let nf = n as f64;
        let rate = |ln_mass: f64| if ln_mass == f64::NEG_INFINITY { f64::INFINITY } else { -ln_mass / nf };
        let mut upper = f64::NEG_INFINITY;
        let mut lower = f64::INFINITY;
        for w in pool.words(system.m(), n) {
            let r = rate(ln_ball_measure(mu, system, &BallSpec::new(BallKind::Trajectory(w), x, eps)?)?);
            upper = upper.max(r);
            lower = lower.min(r);
        }
        let exh = rate(ln_ball_measure(mu, system, &BallSpec::new(BallKind::Exhaustive(n), x, eps)?)?);
        zero_mass |= upper == f64::INFINITY || exh == f64::INFINITY;
        // exhaustive balls contain every word ball
        sequence.push(LocalRates { n, upper, lower, exhaustive: exh.min(lower) });
    }
    let min = |f: fn(&LocalRates) -> f64| sequence.iter().map(f).fold(f64::INFINITY, f64::min);
    Ok(LocalEntropyEstimate {
        x,
        epsilon: eps,
        n_range: n_range.to_vec(),
        h_upper_local: min(|r| r.upper),
        h_lower_local: min(|r| r.lower),
        h_exhaustive_local: min(|r| r.exhaustive),
        sequence,
        zero_mass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalPoint {
    pub estimate: LocalEntropyEstimate,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    /// Entropy of the product measure under the skew product.
    pub joint_entropy: f64,
    /// Entropy of the symbol marginal under the shift.
    pub symbol_entropy: f64,
    pub bound: f64,
    pub points: Vec<MarginalPoint>,
    pub holds: bool,
}

fn lebesgue_entropy(g: &Generator) -> Result<f64> {
    match g {
        Generator::Linear(a) => Ok(single_entropy(a)),
        Generator::CircleMul(k) => Ok((k.unsigned_abs() as f64).ln()),
        Generator::Shift => Err(Error::InvalidArgument("shift entropy depends on the alphabet".into())),
        Generator::Affine(_) => Err(Error::InvalidArgument("Lebesgue measure is not invariant for gapped maps".into())),
    }
}

/// Checks `h⁺_ν(x) ≤ h^l_ν(x) ≤ h(μ̂) − h(μ)` at each point, where `μ̂` is
/// the product measure, `μ` its symbol marginal and `ν` its base marginal.
pub fn marginal_bound_check(
    product: &ProductMeasureModel,
    system: &SemigroupSystem,
    points: &[Point],
    eps: f64,
    n_range: &[usize],
    pool: &WordPool,
    exec: Exec,
) -> Result<MarginalReport> {
    let m = system.m();
    if product.symbol_weights.len() != m {
        return Err(Error::InvalidArgument(format!("{} symbol weights for {m} generators", product.symbol_weights.len())));
    }
    let gens = system.generators();
    let all_equal = gens.windows(2).all(|w| w[0] == w[1]);
    let commuting_diagonal = gens.iter().all(|g| match g {
        Generator::Linear(a) => crate::systems::toral::is_diagonal(a),
        Generator::CircleMul(_) => true,
        _ => false,
    });
    let uniform = product.symbol_weights.iter().all(|&p| (p - 1.0 / m as f64).abs() < MASS_TOL);
    if !(all_equal || (uniform && commuting_diagonal)) {
        return Err(Error::NonErgodic("needs equal generators, or uniform weights on commuting diagonal maps".into()));
    }
    let base_entropy = match (&product.base, system.domain()) {
        (MeasureModel::Lebesgue, Domain::FullShift { symbols }) => (symbols as f64).ln(),
        (MeasureModel::Lebesgue, _) => {
            let h = gens.iter().map(lebesgue_entropy).collect::<Result<Vec<_>>>()?;
            h.iter().zip(&product.symbol_weights).map(|(h, p)| h * p).sum()
        }
        _ => return Err(Error::InvalidArgument("base entropy is known for Lebesgue measure only".into())),
    };
    let symbol_entropy = product.symbol_entropy();
    let joint_entropy = symbol_entropy + base_entropy;
    let bound = joint_entropy - symbol_entropy;
    let n_max = *n_range.iter().max().ok_or_else(|| Error::InvalidArgument("empty depth range".into()))?;
    let tolerance = widening(system.domain(), n_max, eps);
    let estimates = par::try_map(exec, points, |&x| {
        local_amalgamated_entropy(&product.base, system, x, eps, n_range, pool)
    })?;
    let points: Vec<MarginalPoint> = estimates
        .into_iter()
        .map(|e| {
            let holds = e.h_exhaustive_local <= e.h_lower_local + 1e-12 && e.h_lower_local <= bound + tolerance;
            MarginalPoint { estimate: e, tolerance, holds }
        })
        .collect();
    Ok(MarginalReport { joint_entropy, symbol_entropy, bound, holds: points.iter().all(|p| p.holds), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::parse_system;
    use crate::word::Word;

    #[test]
    fn lebesgue_box_mass() {
        let s = parse_system("diag:2,3|3,2").unwrap();
        let w = Word::from_one_based(&[1, 2], 2).unwrap();
        let b = BallSpec::new(BallKind::Trajectory(w), Point::new(0.3, 0.4), 0.2).unwrap();
        let m = ball_measure(&MeasureModel::Lebesgue, &s, &b).unwrap();
        assert!((m - 0.16 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn whole_and_dirac() {
        let s = parse_system("circle:2").unwrap();
        let x = Point::on_line(0.3);
        let b = BallSpec::new(BallKind::Trajectory(Word::constant(0, 5)), x, 0.1).unwrap();
        assert_eq!(ball_measure(&MeasureModel::dirac(x), &s, &b).unwrap(), 1.0);
        let e = local_amalgamated_entropy(&MeasureModel::dirac(x), &s, x, 0.1, &[2, 4], &WordPool::default()).unwrap();
        assert_eq!((e.h_upper_local, e.h_lower_local, e.h_exhaustive_local), (0.0, 0.0, 0.0));
    }

    #[test]
    fn grid_matches_lebesgue_and_rejects_coarse() {
        let s = parse_system("circle:3").unwrap();
        let res = 1 << 12;
        let g = MeasureModel::grid(Domain::Circle, res, vec![1.0 / res as f64; res]).unwrap();
        let b = BallSpec::new(BallKind::Trajectory(Word::constant(0, 3)), Point::on_line(0.41), 0.2).unwrap();
        let exact = ball_measure(&MeasureModel::Lebesgue, &s, &b).unwrap();
        assert!((ball_measure(&g, &s, &b).unwrap() - exact).abs() <= 2.0 / res as f64);
        let coarse = MeasureModel::grid(Domain::Circle, 8, vec![0.125; 8]).unwrap();
        assert!(matches!(ball_measure(&coarse, &s, &b), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn doubling_local_entropy_is_log_two() {
        let s = parse_system("circle:2").unwrap();
        let e = local_amalgamated_entropy(&MeasureModel::Lebesgue, &s, Point::on_line(0.37), 0.125, &[10, 20, 30], &WordPool::default())
            .unwrap();
        assert!((e.h_lower_local - 2f64.ln()).abs() < 0.2);
        assert!(e.h_exhaustive_local <= e.h_lower_local && e.h_lower_local <= e.h_upper_local);
    }

    #[test]
    fn parses_named_measures() {
        assert_eq!(parse_measure("lebesgue", Domain::Torus2).unwrap(), NamedMeasure::Base(MeasureModel::Lebesgue));
        assert!(matches!(parse_measure("bernoulli:0.5,0.5 × lebesgue", Domain::Circle), Ok(NamedMeasure::Product(_))));
        assert!(parse_measure("dirac:0.2", Domain::Torus2).is_err());
        assert!(parse_measure("bernoulli:0.5,0.4 × lebesgue", Domain::Circle).is_err());
        let csv = "cell,mass\n0,0.25\n1,0.75\n";
        let m = MeasureModel::from_csv(csv.as_bytes(), Domain::Circle, 2).unwrap();
        assert_eq!(m.total_mass(), 1.0);
    }

    #[test]
    fn marginal_bound_for_doubling_pair() {
        let s = parse_system("circle:2|2").unwrap();
        let p = ProductMeasureModel::new(vec![0.5, 0.5], MeasureModel::Lebesgue).unwrap();
        let pts = p.base.sample(s.domain(), 5, 1);
        let r = marginal_bound_check(&p, &s, &pts, 0.125, &[20, 40], &WordPool::default(), Exec::Sequential).unwrap();
        assert!((r.bound - 2f64.ln()).abs() < 1e-12);
        assert!(r.holds);
        let bad = parse_system("circle:2|3").unwrap();
        let q = ProductMeasureModel::new(vec![0.9, 0.1], MeasureModel::Lebesgue).unwrap();
        assert!(matches!(
            marginal_bound_check(&q, &bad, &pts, 0.125, &[4], &WordPool::default(), Exec::Sequential),
            Err(Error::NonErgodic(_))
        ));
    }
}
