//! Named system constructors and the string syntax used in config files.

use crate::error::{Error, Result};
use crate::system::{Domain, Generator, SemigroupSystem};
use crate::systems::interval::expanding_interval_system;
use crate::systems::toral::IntMatrix;

/// Parses a system spec:
///
/// * `toral:a,b,c,d;e,f,g,h`: row-major integer matrices, one per `;` group
///   (a single matrix may also be written `toral:a,b;c,d`);
/// * `diag:α,β|γ,δ`: diagonal toral matrices;
/// * `cantor:s,s|t,t`: per-generator branch slopes of an interval map;
/// * `circle:k1|k2`: circle maps `x ↦ k x mod 1`;
/// * `shift:k`: the full shift on `k` symbols.
pub fn parse_system(spec: &str) -> Result<SemigroupSystem> {
    let spec = spec.trim();
    let (tag, body) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("system spec `{spec}` lacks a `kind:` prefix")))?;
    let body = body.trim();
    match tag.trim() {
        "toral" => {
            let groups: Vec<Vec<i64>> = body.split(';').map(parse_list::<i64>).collect::<Result<_>>()?;
            let flat: Vec<i64> = groups.iter().flatten().copied().collect();
            let mats: Vec<IntMatrix> = if flat.len() == 4 {
                vec![[[flat[0], flat[1]], [flat[2], flat[3]]]]
            } else if groups.iter().all(|g| g.len() == 4) {
                groups.iter().map(|g| [[g[0], g[1]], [g[2], g[3]]]).collect()
            } else {
                return Err(Error::Parse(format!("toral spec `{body}` needs four entries per matrix")));
            };
            SemigroupSystem::new(spec, Domain::Torus2, mats.into_iter().map(Generator::Linear).collect())
        }
        "diag" => {
            let gens = body
                .split('|')
                .map(|g| {
                    let v = parse_list::<i64>(g)?;
                    match v.as_slice() {
                        [a, b] => Ok(Generator::Linear([[*a, 0], [0, *b]])),
                        _ => Err(Error::Parse(format!("diag generator `{g}` needs two entries"))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            SemigroupSystem::new(spec, Domain::Torus2, gens)
        }
        "cantor" => {
            let slopes = body.split('|').map(parse_list::<f64>).collect::<Result<Vec<_>>>()?;
            expanding_interval_system(spec, &slopes)
        }
        "circle" => {
            let gens = body
                .split('|')
                .map(|g| g.trim().parse::<i64>().map(Generator::CircleMul).map_err(|e| Error::Parse(format!("`{g}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            SemigroupSystem::new(spec, Domain::Circle, gens)
        }
        "shift" => {
            let k: u32 = body.parse().map_err(|e| Error::Parse(format!("`{body}`: {e}")))?;
            SemigroupSystem::new(spec, Domain::FullShift { symbols: k }, vec![Generator::Shift])
        }
        other => Err(Error::Parse(format!("unknown system kind `{other}`"))),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<T>().map_err(|e| Error::Parse(format!("`{}`: {e}", t.trim()))))
        .collect::<Result<Vec<T>>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    Ok(v)
}

/// Diagonal pair `A(α,β), A(γ,δ)`.
pub fn diagonal_pair(alpha: i64, beta: i64, gamma: i64, delta: i64) -> Result<SemigroupSystem> {
    parse_system(&format!("diag:{alpha},{beta}|{gamma},{delta}"))
}

/// The pair `A = [[0,1],[1,a]]`, `B = [[a,1],[1,0]]` whose alternating word is a shear.
pub fn shear_pair(a: i64) -> Result<SemigroupSystem> {
    parse_system(&format!("toral:0,1,1,{a};{a},1,1,0"))
}

/// Spec strings of the built-in catalog.
pub const CATALOG: &[&str] = &[
    "diag:2,3|3,2",
    "diag:4,5|2,6",
    "toral:0,1,1,2;2,1,1,0",
    "circle:2",
    "circle:2|2",
    "circle:2|3",
    "cantor:3,3",
    "cantor:5,5",
    "cantor:3,3|5,5",
    "cantor:2,2|3,3",
    "shift:2",
];

pub fn catalog() -> Vec<SemigroupSystem> {
    CATALOG.iter().map(|s| parse_system(s).expect("catalog entries parse")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        assert_eq!(parse_system("toral:1,2;3,4").unwrap().m(), 1);
        assert_eq!(parse_system("toral:0,1,1,2;2,1,1,0").unwrap().m(), 2);
        assert_eq!(parse_system("diag:2,3|3,2").unwrap().m(), 2);
        assert_eq!(parse_system("cantor:3,3|5,5").unwrap().domain(), Domain::Interval);
        assert_eq!(parse_system("circle:2|3").unwrap().domain(), Domain::Circle);
        assert_eq!(parse_system("shift:3").unwrap().domain(), Domain::FullShift { symbols: 3 });
        assert_eq!(catalog().len(), CATALOG.len());
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["toral:1,2,3", "diag:2|3", "cantor:1,1", "nope:1", "diag", "circle:x", "cantor:2,2,2"] {
            assert!(parse_system(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn catalog_is_forward_invariant() {
        for s in catalog() {
            assert!(s.check_invariance(257), "{}", s.name);
        }
    }
}
