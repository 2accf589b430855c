mod common;

use proptest::prelude::*;

use presslab_core::potential::random_potential;
use presslab_core::systems::{catalog, parse_system};
use presslab_core::{ball_contains, BallKind, BallSpec, PressureKind, SemigroupSystem, Word};

fn zoo(i: usize) -> SemigroupSystem {
    let all = catalog();
    all[i % all.len()].clone()
}

fn word(system: &SemigroupSystem, symbols: &[usize]) -> Word {
    Word::new(symbols.iter().map(|s| s % system.m()).collect(), system.m()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn balls_are_nested(i in 0usize..64, syms in prop::collection::vec(0usize..8, 1..5), u in 0.0..1.0, v in 0.0..1.0, a in 0.0..1.0, b in 0.0..1.0) {
        let s = zoo(i);
        let d = s.domain();
        let x = common::point_in(d, u, v);
        let z = common::near(d, x, 0.2, a, b);
        prop_assert_eq!(common::ball_nesting(&s, x, z, &word(&s, &syms), 0.2), Ok(()));
    }

    #[test]
    fn weights_add_over_concatenation(i in 0usize..64, seed in any::<u64>(), p in prop::collection::vec(0usize..8, 1..6), q in prop::collection::vec(0usize..8, 1..6), u in 0.0..1.0, v in 0.0..1.0) {
        let s = zoo(i);
        let phi = random_potential(seed, 0.5, s.m(), s.domain());
        let x = common::point_in(s.domain(), u, v);
        prop_assert_eq!(common::concatenation_additivity(&s, &phi, x, &word(&s, &p), &word(&s, &q)), Ok(()));
    }

    #[test]
    fn vitali_selection_is_disjoint_and_covering(i in 0usize..64, syms in prop::collection::vec(0usize..8, 5), centers in prop::collection::vec((0.0..1.0, 0.0..1.0, 1usize..=5), 1..10), probes in prop::collection::vec((0.0..1.0, 0.0..1.0), 100)) {
        let s = zoo(i);
        let d = s.domain();
        let w = word(&s, &syms);
        let balls: Vec<BallSpec> = centers
            .iter()
            .map(|&(u, v, k)| BallSpec::trajectory(w.prefix(k).unwrap(), common::point_in(d, u, v), 0.1).unwrap())
            .collect();
        let probes: Vec<_> = probes.iter().map(|&(u, v)| common::point_in(d, u, v)).collect();
        prop_assert_eq!(common::vitali(&s, &balls, &probes), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn packing_stays_below_cover(i in 0usize..64, seed in any::<u64>()) {
        let s = zoo(i);
        let phi = random_potential(seed, 0.4, s.m(), s.domain());
        let n = common::fitting_depth(&s, if s.domain().dimension() == 2 { 2 } else { 3 }, 0.25);
        prop_assert_eq!(common::packing_below_cover(&s, &phi, &PressureKind::Amalgamated, n, 0.25), Ok(()));
    }

    #[test]
    fn relabeling_generators_preserves_bounds(i in 0usize..64, seed in any::<u64>()) {
        let s = zoo(i);
        prop_assume!(s.m() >= 2);
        let phi = random_potential(seed, 0.4, s.m(), s.domain());
        let perm: Vec<usize> = (0..s.m()).rev().collect();
        let n = common::fitting_depth(&s, if s.domain().dimension() == 2 { 2 } else { 3 }, 0.25);
        prop_assert_eq!(common::permutation_equivariance(&s, &phi, &perm, n, 0.25), Ok(()));
    }

    #[test]
    fn seeded_runs_are_reproducible(i in 0usize..64, seed in any::<u64>()) {
        let s = zoo(i);
        let phi = random_potential(seed, 0.4, s.m(), s.domain());
        let n = common::fitting_depth(&s, if s.domain().dimension() == 2 { 1 } else { 3 }, 0.25);
        prop_assert_eq!(common::determinism(&s, &phi, n, 0.25, seed), Ok(()));
    }
}

fn fill_fraction(s: &SemigroupSystem, n: usize, eps: f64) -> f64 {
    let center = common::point_in(s.domain(), 0.37, 0.61);
    let ball = BallSpec::new(BallKind::Exhaustive(n), center, eps).unwrap();
    let k = 60;
    let mut inside = 0;
    for a in 0..k {
        for b in 0..k {
            let z = common::near(s.domain(), center, eps, (a as f64 + 0.5) / k as f64, (b as f64 + 0.5) / k as f64);
            inside += ball_contains(s, &ball, z).unwrap() as usize;
        }
    }
    inside as f64 / (k * k) as f64
}

#[test]
fn exhaustive_ball_fill_fraction_shrinks() {
    let s = parse_system("diag:2,3|3,2").unwrap();
    let fractions: Vec<f64> = (1..=3).map(|n| fill_fraction(&s, n, 0.2)).collect();
    for w in fractions.windows(2) {
        assert!(w[1] < w[0], "{fractions:?}");
    }
    assert!(fractions[2] < 0.05, "{fractions:?}");
}
