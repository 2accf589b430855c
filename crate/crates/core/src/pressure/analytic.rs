//! Exact ball geometry for linear toral maps, circle maps, affine interval
//! maps and full shifts, with potentials constant on each generator.

use super::session::sampled_words;
use super::{log_sum_exp, EstimateConfig, LogBounds, PressureKind, Region};
use crate::ball::{BallKind, BallSpec};
use crate::error::{Error, Result};
use crate::geometry::{area, best_lattice_pair, slab_polygon};
use crate::potential::MultiPotential;
use crate::system::{Domain, Generator, SemigroupSystem};
use crate::systems::interval::{affine_maps, core_intervals, total_length, AffineMap};
use crate::systems::toral::{diagonal_entries, prefix_products, IntMatrix};
use crate::word::{checked_pow, Word};
use crate::ENUMERATION_CAP;

const COMPOSITION_CAP: usize = 1 << 20;
/// Integers below this are exact in `f64` products.
const EXACT_LIMIT: f64 = 4_503_599_627_370_496.0;

fn unavailable(why: &str) -> Error {
    Error::AnalyticUnavailable(why.into())
}

/// Bounds on `log` of the minimal cover cost, or `AnalyticUnavailable`.
pub fn analytic_log_bounds(
    system: &SemigroupSystem,
    phi: &MultiPotential,
    kind: &PressureKind,
    n: usize,
    eps: f64,
    region: &Region,
    config: &EstimateConfig,
) -> Result<LogBounds> {
    if *kind == PressureKind::Lift {
        return Err(Error::InvalidArgument("the lift is estimated through the free kind".into()));
    }
    let c = phi.constant_values().ok_or_else(|| unavailable("potential is not constant per generator"))?;
    let ctx = Ctx { system, c: &c, kind, n, eps, config };
    match system.domain() {
        Domain::FullShift { symbols } => shift_bounds(&ctx, region, symbols),
        _ if *region != Region::Whole => Err(unavailable("exact geometry covers the whole space only")),
        Domain::Torus2 => match diagonal_entries(system) {
            Ok(d) => axes_bounds(&ctx, d.into_iter().map(|a| a.to_vec()).collect()),
            Err(_) => linear_bounds(&ctx),
        },
        Domain::Circle => {
            let entries = system
                .generators()
                .iter()
                .map(|g| match g {
                    Generator::CircleMul(k) => vec![k.unsigned_abs() as f64],
                    _ => unreachable!("circle systems hold circle maps"),
                })
                .collect();
            axes_bounds(&ctx, entries)
        }
        Domain::Interval => interval_bounds(&ctx),
    }
}

struct Ctx<'a> {
    system: &'a SemigroupSystem,
    c: &'a [f64],
    kind: &'a PressureKind,
    n: usize,
    eps: f64,
    config: &'a EstimateConfig,
}

impl Ctx<'_> {
    fn m(&self) -> usize {
        self.system.m()
    }

    fn weight(&self, word: &Word) -> f64 {
        word.symbols().iter().map(|&s| self.c[s]).sum()
    }

    fn min_c(&self) -> f64 {
        self.c.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn max_c(&self) -> f64 {
        self.c.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn trajectory_word(&self) -> Result<Word> {
        match self.kind {
            PressureKind::Trajectory(rule) => rule.prefix(self.n, self.m()),
            _ => unreachable!("only called for trajectory kinds"),
        }
    }

    /// All words when `m^n` is within the cap, otherwise the pool.
    fn candidate_words(&self) -> Result<(Vec<Word>, bool)> {
        match checked_pow(self.m(), self.n) {
            Some(c) if c <= ENUMERATION_CAP => Ok((Word::all(self.m(), self.n, ENUMERATION_CAP)?, true)),
            _ => Ok((self.config.pool.words(self.m(), self.n), false)),
        }
    }

    fn sampled_words(&self) -> Vec<Word> {
        sampled_words(self.m(), self.n, self.config.seed, self.config.free_samples)
    }
}

/// Number of open intervals of length `2ε/P` needed for the circle.
fn ln_axis_count(ln_p: f64, exact_p: Option<f64>, eps: f64) -> f64 {
    match exact_p {
        Some(p) => {
            let x = p / (2.0 * eps);
            ((x + 1e-9 * x.max(1.0)).floor() + 1.0).ln()
        }
        None => {
            let lx = ln_p - (2.0 * eps).ln();
            lx + (-lx).exp().ln_1p()
        }
    }
}

fn ln_grid_count(eps: f64) -> f64 {
    let x = 1.0 / (2.0 * eps);
    ((x + 1e-9 * x).floor() + 1.0).ln()
}

struct AxisProducts {
    ln: Vec<f64>,
    exact: Vec<Option<f64>>,
}

impl AxisProducts {
    fn from_powers(entries: &[Vec<f64>], counts: &[usize]) -> Self {
        let d = entries[0].len();
        let ln: Vec<f64> =
            (0..d).map(|i| counts.iter().zip(entries).map(|(&k, e)| k as f64 * e[i].ln()).sum()).collect();
        let exact = (0..d)
            .map(|i| {
                (ln[i] < EXACT_LIMIT.ln() - 1.0)
                    .then(|| counts.iter().zip(entries).map(|(&k, e)| e[i].powi(k as i32)).product())
            })
            .collect();
        AxisProducts { ln, exact }
    }

    fn ln_upper(&self, eps: f64) -> f64 {
        self.ln.iter().zip(&self.exact).map(|(&l, &e)| ln_axis_count(l, e, eps)).sum()
    }

    fn ln_lower(&self, eps: f64) -> f64 {
        self.ln.iter().map(|l| l - (2.0 * eps).ln()).sum::<f64>().max(0.0)
    }
}

/// Compositions of `n` into `m` nonnegative parts.
fn compositions(m: usize, n: usize) -> Result<Vec<Vec<usize>>> {
    let count = (1..m).fold(1f64, |acc, i| acc * (n + i) as f64 / i as f64);
    if count > COMPOSITION_CAP as f64 {
        return Err(unavailable("too many symbol compositions"));
    }
    let mut out = Vec::new();
    let mut cur = vec![0; m];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    Ok(out)
}

fn ln_multinomial(counts: &[usize]) -> f64 {
    let lf = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    lf(counts.iter().sum()) - counts.iter().map(|&k| lf(k)).sum::<f64>()
}

fn bounds(lower: f64, upper: f64, ln_count: f64) -> LogBounds {
    LogBounds { lower, upper, cover_size: ln_count.exp(), stochastic: false }
}

/// Minimum of `(ln_count + weight)` with the count of the minimizer.
fn argmin(items: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    items.into_iter().fold((f64::INFINITY, 0.0), |best, (lc, w)| if lc + w < best.0 { (lc + w, lc) } else { best })
}

/// Area of a union of centered boxes `[-a, a] × [-b, b]`, from log half-sides.
fn ln_union_area(boxes: &[(f64, f64)]) -> f64 {
    if boxes[0].1.is_nan() {
        let la = boxes.iter().map(|b| b.0).fold(f64::NEG_INFINITY, f64::max);
        return 2f64.ln() + la;
    }
    let mut v = boxes.to_vec();
    v.sort_by(|p, q| q.0.total_cmp(&p.0));
    let la0 = v[0].0;
    let lb_ref = v.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
    let mut run_b = f64::NEG_INFINITY;
    let mut total = 0.0;
    for i in 0..v.len() {
        run_b = run_b.max(v[i].1);
        let a_i = (v[i].0 - la0).exp();
        let a_next = if i + 1 < v.len() { (v[i + 1].0 - la0).exp() } else { 0.0 };
        total += (a_i - a_next) * (run_b - lb_ref).exp();
    }
    4f64.ln() + la0 + lb_ref + total.ln()
}

/// Diagonal toral maps (two axes) and circle maps (one axis).
fn axes_bounds(ctx: &Ctx, entries: Vec<Vec<f64>>) -> Result<LogBounds> {
    let eps = ctx.eps;
    let n = ctx.n;
    let max_e = entries.iter().flatten().copied().fold(1.0, f64::max);
    if eps > 1.0 / (max_e + 1.0) {
        return Err(unavailable("radius too large for exact boxes"));
    }
    let weight = |k: &[usize]| k.iter().zip(ctx.c).map(|(&k, c)| k as f64 * c).sum::<f64>();
    match ctx.kind {
        PressureKind::Trajectory(_) => {
            let w = ctx.trajectory_word()?;
            let p = AxisProducts::from_powers(&entries, &w.counts(ctx.m()));
            let wt = ctx.weight(&w);
            Ok(bounds(p.ln_lower(eps) + wt, p.ln_upper(eps) + wt, p.ln_upper(eps)))
        }
        PressureKind::Amalgamated => {
            let comps = compositions(ctx.m(), n)?;
            let prods: Vec<(AxisProducts, f64)> =
                comps.iter().map(|k| (AxisProducts::from_powers(&entries, k), weight(k))).collect();
            let (up, cnt) = argmin(prods.iter().map(|(p, w)| (p.ln_upper(eps), *w)));
            let (lo, _) = argmin(prods.iter().map(|(p, w)| (p.ln_lower(eps), *w)));
            Ok(bounds(lo, up, cnt))
        }
        PressureKind::CondensedLower | PressureKind::CondensedUpper => {
            let d = entries[0].len();
            let maxes: Vec<Vec<f64>> =
                vec![(0..d).map(|i| entries.iter().map(|e| e[i]).fold(1.0, f64::max)).collect()];
            let p = AxisProducts::from_powers(&maxes, &[n]);
            let w = if *ctx.kind == PressureKind::CondensedLower { n as f64 * ctx.min_c() } else { n as f64 * ctx.max_c() };
            Ok(bounds(p.ln_lower(eps) + w, p.ln_upper(eps) + w, p.ln_upper(eps)))
        }
        PressureKind::ExhaustiveLower | PressureKind::ExhaustiveUpper => {
            let comps = compositions(ctx.m(), n)?;
            let prods: Vec<AxisProducts> = comps.iter().map(|k| AxisProducts::from_powers(&entries, k)).collect();
            let boxes: Vec<(f64, f64)> = prods
                .iter()
                .map(|p| (eps.ln() - p.ln[0], p.ln.get(1).map_or(f64::NAN, |l| eps.ln() - l)))
                .collect();
            let lo_count = (-ln_union_area(&boxes)).max(0.0);
            let up_count = prods.iter().map(|p| p.ln_upper(eps)).fold(f64::INFINITY, f64::min);
            let w = if *ctx.kind == PressureKind::ExhaustiveLower { n as f64 * ctx.min_c() } else { n as f64 * ctx.max_c() };
            Ok(bounds(lo_count.min(up_count) + w, up_count + w, up_count))
        }
        PressureKind::Lift => unreachable!("rejected on entry"),
        PressureKind::Free => {
            let comps = compositions(ctx.m(), n)?;
            let ln_m = n as f64 * (ctx.m() as f64).ln();
            let mut ups = Vec::with_capacity(comps.len());
            let mut los = Vec::with_capacity(comps.len());
            for k in &comps {
                let p = AxisProducts::from_powers(&entries, k);
                let lm = ln_multinomial(k);
                ups.push(lm + p.ln_upper(eps) + weight(k));
                los.push(lm + p.ln_lower(eps) + weight(k));
            }
            let up = log_sum_exp(ups) - ln_m;
            let lo = log_sum_exp(los) - ln_m;
            Ok(bounds(lo, up, up - n as f64 * ctx.min_c()))
        }
    }
}

/// Counts for a single linear word: `(ln upper, ln lower)`.
fn linear_word_counts(system: &SemigroupSystem, word: &Word, eps: f64) -> Result<(f64, f64)> {
    let prods = prefix_products(system, word)?;
    let rows: Vec<[i128; 2]> = prods.iter().flat_map(|m| [m[0], m[1]]).collect();
    slab_counts(&rows, eps)
}

fn slab_counts(rows: &[[i128; 2]], eps: f64) -> Result<(f64, f64)> {
    let a = area(&slab_polygon(rows, eps));
    if !(a > 0.0) {
        return Err(Error::Infeasible("degenerate ball polygon".into()));
    }
    let ln_lo = (-a.ln()).max(0.0);
    let ln_pack = 4f64.ln() - a.ln();
    let ln_lat = best_lattice_pair(rows, eps).map_or(f64::INFINITY, |d| (d as f64).ln() + 2.0 * ln_grid_count(eps));
    Ok((ln_pack.min(ln_lat), ln_lo))
}

/// Non-diagonal linear toral maps.
fn linear_bounds(ctx: &Ctx) -> Result<LogBounds> {
    let eps = ctx.eps;
    let n = ctx.n;
    let norm = |a: &IntMatrix| a.iter().map(|r| r[0].abs() + r[1].abs()).max().unwrap_or(0) as f64;
    let max_norm = ctx
        .system
        .generators()
        .iter()
        .map(|g| match g {
            Generator::Linear(a) => norm(a),
            _ => unreachable!("torus systems hold linear maps"),
        })
        .fold(1.0, f64::max);
    if eps > 1.0 / (max_norm + 1.0) {
        return Err(unavailable("radius too large for exact polygons"));
    }
    let trivial_lo = (-(4.0 * eps * eps).ln()).max(0.0);
    match ctx.kind {
        PressureKind::Trajectory(_) => {
            let w = ctx.trajectory_word()?;
            let (up, lo) = linear_word_counts(ctx.system, &w, eps)?;
            let wt = ctx.weight(&w);
            Ok(bounds(lo + wt, up + wt, up))
        }
        PressureKind::Amalgamated => {
            let (words, all) = ctx.candidate_words()?;
            // A ball below floating-point resolution, or one whose products
            // overflow, needs more atoms than any resolvable word, so it never
            // attains the minimum.
            let mut counts: Vec<(f64, f64, f64)> = Vec::with_capacity(words.len());
            for w in &words {
                match linear_word_counts(ctx.system, w, eps) {
                    Ok((u, l)) => counts.push((u, l, ctx.weight(w))),
                    Err(Error::Infeasible(_) | Error::AnalyticUnavailable(_)) if !all => {}
                    Err(e) => return Err(e),
                }
            }
            if counts.is_empty() {
                return Err(Error::Infeasible("every candidate ball is below floating-point resolution".into()));
            }
            let (up, cnt) = argmin(counts.iter().map(|&(u, _, w)| (u, w)));
            let lo = if all {
                argmin(counts.iter().map(|&(_, l, w)| (l, w))).0
            } else {
                trivial_lo + n as f64 * ctx.min_c()
            };
            Ok(bounds(lo, up, cnt))
        }
        PressureKind::CondensedLower | PressureKind::CondensedUpper => {
            if checked_pow(ctx.m(), n).map_or(true, |c| c > ENUMERATION_CAP) {
                return Err(Error::DepthTooLarge { m: ctx.m(), n, cap: ENUMERATION_CAP });
            }
            let mut rows: Vec<[i128; 2]> = Vec::new();
            for w in Word::all(ctx.m(), n, ENUMERATION_CAP)? {
                for p in prefix_products(ctx.system, &w)? {
                    rows.push(p[0]);
                    rows.push(p[1]);
                }
            }
            rows.sort_unstable();
            rows.dedup();
            let (up, lo) = slab_counts(&rows, eps)?;
            let w = if *ctx.kind == PressureKind::CondensedLower { n as f64 * ctx.min_c() } else { n as f64 * ctx.max_c() };
            Ok(bounds(lo + w, up + w, up))
        }
        PressureKind::ExhaustiveLower | PressureKind::ExhaustiveUpper => {
            Err(unavailable("exhaustive balls of non-diagonal maps have no closed form"))
        }
        PressureKind::Lift => unreachable!("rejected on entry"),
        PressureKind::Free => {
            let (words, all) = ctx.candidate_words()?;
            let words = if all { words } else { ctx.sampled_words() };
            let ln_m = if all { n as f64 * (ctx.m() as f64).ln() } else { (words.len() as f64).ln() };
            let mut ups = Vec::with_capacity(words.len());
            let mut los = Vec::with_capacity(words.len());
            for w in &words {
                let (u, l) = linear_word_counts(ctx.system, w, eps)?;
                ups.push(u + ctx.weight(w));
                los.push(l + ctx.weight(w));
            }
            let up = log_sum_exp(ups) - ln_m;
            let lo = log_sum_exp(los) - ln_m;
            Ok(LogBounds { lower: lo, upper: up, cover_size: (up - n as f64 * ctx.min_c()).exp(), stochastic: !all })
        }
    }
}

/// Number of open intervals of length `2ε` with centers inside the pieces
/// covering the sorted closed pieces of `[0, 1]`.
fn greedy_interval_count(pieces: impl Iterator<Item = (f64, f64)>, eps: f64) -> f64 {
    let step = 2.0 * eps * (1.0 - 1e-12);
    let mut covered = f64::NEG_INFINITY;
    let mut count = 0.0;
    for (a, b) in pieces {
        if b <= covered {
            continue;
        }
        let start = a.max(covered);
        let k = ((b - start) / step).ceil().max(1.0);
        count += k;
        covered = start + k * step;
    }
    count
}

/// Cover count along `word` of the core, one greedy cover per cylinder.
fn interval_word_count(maps: &[&AffineMap], core: &[(f64, f64)], word: &Word, eps: f64, cap: usize) -> Result<f64> {
    let n = word.len();
    let mut count = 0.0;
    let mut visited = 0usize;
    let mut stack = vec![(0.0f64, 1.0f64, 0usize)];
    while let Some((u, v, d)) = stack.pop() {
        let first = core.partition_point(|iv| iv.1 < u);
        if first >= core.len() || core[first].0 > v {
            continue;
        }
        if d == n {
            let len = v - u;
            let pieces = core[first..]
                .iter()
                .take_while(|iv| iv.0 <= v)
                .map(|&(a, b)| (((a.max(u) - u) / len).clamp(0.0, 1.0), ((b.min(v) - u) / len).clamp(0.0, 1.0)));
            count += greedy_interval_count(pieces, eps);
            continue;
        }
        if v - u <= 16.0 * f64::EPSILON * u.abs().max(v.abs()) {
            return Err(Error::UnderResolved(format!("cylinder width below floating-point resolution at depth {d}")));
        }
        visited += 1;
        if visited > cap {
            return Err(Error::DepthTooLarge { m: maps.len(), n, cap });
        }
        for (a, b, _) in maps[word.symbols()[d]].branches() {
            stack.push((u + a * (v - u), u + b * (v - u), d + 1));
        }
    }
    Ok(count)
}

/// Affine expanding interval maps on the depth-`n` core.
fn interval_bounds(ctx: &Ctx) -> Result<LogBounds> {
    let eps = ctx.eps;
    let n = ctx.n;
    let nf = n as f64;
    let maps = affine_maps(ctx.system)?;
    let s_max = maps.iter().map(|m| m.max_slope()).fold(1.0, f64::max);
    if eps > 1.0 / (2.0 * s_max + 1.0) {
        return Err(unavailable("radius too large for exact cylinders"));
    }
    let s_min: Vec<f64> =
        maps.iter().map(|m| m.branches().iter().map(|b| b.2).fold(f64::INFINITY, f64::min)).collect();
    let ln_2e = (2.0 * eps).ln();
    if ctx.m() == 1 {
        let k = maps[0].branches().len() as f64;
        let up = nf * k.ln() + ln_grid_count(eps);
        let lo = nf * k.ln() + (-ln_2e).max(0.0);
        let w = nf * ctx.c[0];
        return Ok(bounds(lo + w, up + w, up));
    }
    let cap = ctx.config.interval_cap;
    let core = core_intervals(ctx.system, n, cap)?;
    if core.is_empty() {
        return Err(Error::Infeasible("empty invariant core".into()));
    }
    let ln_core = total_length(&core).ln();
    let word_lo = |w: &Word| (ln_core + w.symbols().iter().map(|&s| s_min[s].ln()).sum::<f64>() - ln_2e).max(0.0);
    let word_up = |w: &Word| interval_word_count(&maps, &core, w, eps, cap).map(f64::ln);
    match ctx.kind {
        PressureKind::Trajectory(_) => {
            let w = ctx.trajectory_word()?;
            let up = word_up(&w)?;
            let wt = ctx.weight(&w);
            Ok(bounds(word_lo(&w) + wt, up + wt, up))
        }
        PressureKind::Amalgamated => {
            let (words, _) = ctx.candidate_words()?;
            let ups = words.iter().map(|w| word_up(w).map(|u| (u, ctx.weight(w)))).collect::<Result<Vec<_>>>()?;
            let (up, cnt) = argmin(ups);
            let per_symbol = (0..ctx.m()).map(|j| ctx.c[j] + s_min[j].ln()).fold(f64::INFINITY, f64::min);
            let lo = (nf * ctx.min_c()).max(ln_core - ln_2e + nf * per_symbol);
            Ok(bounds(lo, up, cnt))
        }
        PressureKind::CondensedLower | PressureKind::CondensedUpper => {
            let gapped = maps.iter().all(|m| {
                let b = m.branches();
                b.windows(2).all(|p| p[1].0 - p[0].1 > 1e-12)
            });
            if !gapped {
                return Err(unavailable("condensed cylinders need gaps between branches"));
            }
            let r = (eps.ln() - nf * s_max.ln()).exp();
            let step = 2.0 * r * (1.0 - 1e-12);
            let count: f64 = core.iter().map(|(a, b)| ((b - a) / step).ceil().max(1.0)).sum();
            let best_min = s_min.iter().copied().fold(1.0, f64::max);
            let lo_count = (ln_core + nf * best_min.ln() - ln_2e).max(0.0);
            let w = if *ctx.kind == PressureKind::CondensedLower { nf * ctx.min_c() } else { nf * ctx.max_c() };
            Ok(bounds(lo_count.min(count.ln()) + w, count.ln() + w, count.ln()))
        }
        PressureKind::ExhaustiveLower | PressureKind::ExhaustiveUpper => {
            let (words, _) = ctx.candidate_words()?;
            let up = words.iter().map(|w| word_up(w)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min);
            let worst_min = s_min.iter().copied().fold(f64::INFINITY, f64::min);
            let lo_count = (ln_core + nf * worst_min.ln() - (4.0 * eps).ln()).max(0.0);
            let w = if *ctx.kind == PressureKind::ExhaustiveLower { nf * ctx.min_c() } else { nf * ctx.max_c() };
            Ok(bounds(lo_count.min(up) + w, up + w, up))
        }
        PressureKind::Lift => unreachable!("rejected on entry"),
        PressureKind::Free => {
            let (words, all) = ctx.candidate_words()?;
            let words = if all { words } else { ctx.sampled_words() };
            let ln_m = if all { nf * (ctx.m() as f64).ln() } else { (words.len() as f64).ln() };
            let mut ups = Vec::with_capacity(words.len());
            let mut los = Vec::with_capacity(words.len());
            for w in &words {
                ups.push(word_up(w)? + ctx.weight(w));
                los.push(word_lo(w) + ctx.weight(w));
            }
            let up = log_sum_exp(ups) - ln_m;
            let lo = log_sum_exp(los) - ln_m;
            Ok(LogBounds { lower: lo.min(up), upper: up, cover_size: (up - nf * ctx.min_c()).exp(), stochastic: !all })
        }
    }
}

/// Full shift: a depth-`n` ball is a cylinder of length `q + n`.
fn shift_bounds(ctx: &Ctx, region: &Region, symbols: u32) -> Result<LogBounds> {
    let q = ((1.0 / ctx.eps).log2().floor() as i64 + 1).max(0) as usize;
    let fixed = match region {
        Region::Whole => 0,
        Region::Cylinder { digits } => digits.len(),
        Region::TorusBox { .. } => return Err(Error::InvalidArgument("torus box on a shift".into())),
    };
    let ln_count = (q + ctx.n).saturating_sub(fixed) as f64 * (symbols as f64).ln();
    let nf = ctx.n as f64;
    let w = match ctx.kind {
        PressureKind::Trajectory(_) => ctx.weight(&ctx.trajectory_word()?),
        PressureKind::Amalgamated | PressureKind::CondensedLower | PressureKind::ExhaustiveLower => nf * ctx.min_c(),
        PressureKind::CondensedUpper | PressureKind::ExhaustiveUpper => nf * ctx.max_c(),
        PressureKind::Free => nf * (log_sum_exp(ctx.c.iter().copied()) - (ctx.m() as f64).ln()),
        PressureKind::Lift => unreachable!("rejected on entry"),
    };
    Ok(bounds(ln_count + w, ln_count + w, ln_count))
}

/// `ln` of the Lebesgue measure of a ball whose geometry is exact: linear
/// toral maps, circle maps and full shifts at radii without wrap-around.
pub(crate) fn ln_ball_volume(system: &SemigroupSystem, ball: &BallSpec) -> Result<f64> {
    let eps = ball.radius;
    let m = system.m();
    let axes: Option<Vec<Vec<f64>>> = match system.domain() {
        Domain::Circle => Some(
            system
                .generators()
                .iter()
                .map(|g| match g {
                    Generator::CircleMul(k) => vec![k.unsigned_abs() as f64],
                    _ => unreachable!("circle systems hold circle maps"),
                })
                .collect(),
        ),
        Domain::Torus2 => diagonal_entries(system).ok().map(|d| d.into_iter().map(|a| a.to_vec()).collect()),
        Domain::FullShift { symbols } => {
            let q = ((1.0 / eps).log2().floor() as i64 + 1).max(0) as usize;
            return Ok(-((q + ball.kind.depth()) as f64) * (symbols as f64).ln());
        }
        Domain::Interval => return Err(unavailable("interval balls depend on branch positions")),
    };
    if let Some(entries) = axes {
        let max_e = entries.iter().flatten().copied().fold(1.0, f64::max);
        if eps > 1.0 / (max_e + 1.0) {
            return Err(unavailable("radius too large for exact boxes"));
        }
        let d = entries[0].len();
        let side = |p: &AxisProducts| p.ln.iter().map(|l| (2.0 * eps).ln() - l).sum::<f64>();
        return match &ball.kind {
            BallKind::Trajectory(w) => Ok(side(&AxisProducts::from_powers(&entries, &w.counts(m)))),
            BallKind::Condensed(n) => {
                let maxes = vec![(0..d).map(|i| entries.iter().map(|e| e[i]).fold(1.0, f64::max)).collect()];
                Ok(side(&AxisProducts::from_powers(&maxes, &[*n])))
            }
            BallKind::Exhaustive(n) => {
                let boxes: Vec<(f64, f64)> = compositions(m, *n)?
                    .iter()
                    .map(|k| {
                        let p = AxisProducts::from_powers(&entries, k);
                        (eps.ln() - p.ln[0], p.ln.get(1).map_or(f64::NAN, |l| eps.ln() - l))
                    })
                    .collect();
                Ok(ln_union_area(&boxes))
            }
        };
    }
    let norm = |a: &IntMatrix| a.iter().map(|r| r[0].abs() + r[1].abs()).max().unwrap_or(0) as f64;
    let max_norm = system
        .generators()
        .iter()
        .map(|g| match g {
            Generator::Linear(a) => norm(a),
            _ => unreachable!("torus systems hold linear maps"),
        })
        .fold(1.0, f64::max);
    if eps > 1.0 / (max_norm + 1.0) {
        return Err(unavailable("radius too large for exact polygons"));
    }
    let words = match &ball.kind {
        BallKind::Trajectory(w) => vec![w.clone()],
        BallKind::Condensed(n) => Word::all(m, *n, ENUMERATION_CAP)?,
        BallKind::Exhaustive(_) => return Err(unavailable("exhaustive balls of non-diagonal maps have no closed form")),
    };
    let mut rows = Vec::new();
    for w in &words {
        for p in prefix_products(system, w)? {
            rows.push(p[0]);
            rows.push(p[1]);
        }
    }
    rows.sort_unstable();
    rows.dedup();
    let a = area(&slab_polygon(&rows, eps));
    if !(a > 0.0) {
        return Err(Error::Infeasible("degenerate ball polygon".into()));
    }
    Ok(a.ln())
}
