//! Planar convex polygons for exact Bowen-ball geometry of linear words.

pub type Vec2 = [f64; 2];

/// Clips a convex polygon to the half-plane `a·v ≤ c`.
pub fn clip(poly: &[Vec2], a: Vec2, c: f64) -> Vec<Vec2> {
    let val = |p: &Vec2| a[0] * p[0] + a[1] * p[1] - c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (vp, vq) = (val(&p), val(&q));
        if vp <= 0.0 {
            out.push(p);
        }
        if (vp < 0.0 && vq > 0.0) || (vp > 0.0 && vq < 0.0) {
            let t = vp / (vp - vq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Shoelace area.
pub fn area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let s: f64 = (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    0.5 * s.abs()
}

/// `{v : |r·v| ≤ ε for every row r}` as a polygon, starting from the square
/// `[−ε, ε]²`. Rows are normalized before clipping.
pub fn slab_polygon(rows: &[[i128; 2]], eps: f64) -> Vec<Vec2> {
    let mut poly = vec![[-eps, -eps], [eps, -eps], [eps, eps], [-eps, eps]];
    for r in rows {
        let (a, b) = (r[0] as f64, r[1] as f64);
        let norm = a.abs().max(b.abs());
        if norm == 0.0 {
            continue;
        }
        let u = [a / norm, b / norm];
        let c = eps / norm;
        poly = clip(&poly, u, c);
        poly = clip(&poly, [-u[0], -u[1]], c);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Smallest `|det L|` over pairs of rows `L = (r, s)` taken from `rows` whose
/// parallelogram `{|r·v| < ε, |s·v| < ε}` lies inside every slab `|t·v| < ε`.
pub fn best_lattice_pair(rows: &[[i128; 2]], eps: f64) -> Option<i128> {
    let mut uniq: Vec<[i128; 2]> = rows
        .iter()
        .filter(|r| r[0] != 0 || r[1] != 0)
        .map(|r| if r[0] < 0 || (r[0] == 0 && r[1] < 0) { [-r[0], -r[1]] } else { *r })
        .collect();
    uniq.sort_unstable();
    uniq.dedup();
    let mut best: Option<i128> = None;
    for i in 0..uniq.len() {
        for j in i + 1..uniq.len() {
            let (r, s) = (uniq[i], uniq[j]);
            let d = r[0].checked_mul(s[1]).zip(r[1].checked_mul(s[0])).and_then(|(u, v)| u.checked_sub(v));
            let Some(d) = d.filter(|d| *d != 0) else { continue };
            if best.is_some_and(|b| b <= d.abs()) {
                continue;
            }
            let df = d as f64;
            // vertices L^{-1}(±ε, ±ε)
            let verts = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].map(|(a, b)| {
                let (u, w) = (a * eps, b * eps);
                [(s[1] as f64 * u - r[1] as f64 * w) / df, (-(s[0] as f64) * u + r[0] as f64 * w) / df]
            });
            let inside = uniq.iter().all(|t| {
                verts.iter().all(|v| (t[0] as f64 * v[0] + t[1] as f64 * v[1]).abs() <= eps * (1.0 + 1e-9))
            });
            if inside {
                best = Some(d.abs());
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_and_shear() {
        let eps = 0.25;
        assert_abs_diff_eq!(area(&slab_polygon(&[[1, 0], [0, 1]], eps)), 4.0 * eps * eps, epsilon = 1e-15);
        let rows = [[1, 0], [0, 1], [1, 64]];
        let k = slab_polygon(&rows, eps);
        let a = area(&k);
        assert_abs_diff_eq!(a, 4.0 * eps * eps / 64.0, epsilon = 1e-15);
        assert_eq!(best_lattice_pair(&rows, eps), Some(64));
    }

    #[test]
    fn clipping_a_triangle() {
        let t = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]];
        assert_abs_diff_eq!(area(&clip(&t, [1.0, 0.0], 1.0)), 1.5, epsilon = 1e-12);
        assert!(clip(&t, [1.0, 1.0], -1.0).is_empty());
    }
}
