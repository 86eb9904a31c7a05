mod common;

use explograph_core::rational::rat;
use explograph_core::tropcurve::{Edge, End, TropicalCurve, Vertex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_force_automorphisms, random_balanced_curve};

#[test]
fn cut_keeps_balance_and_counts_ends() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let c = random_balanced_curve(&mut rng, 5, 6, 3);
        assert!(c.check_balanced());
        let stars = c.cut();
        assert_eq!(stars.len(), c.vertices.len());
        assert!(stars.iter().all(|s| s.is_balanced()));
        let total: usize = stars.iter().map(|s| s.ends.len()).sum();
        assert_eq!(total, c.ends.len() + 2 * c.edges.len());
    }
}

#[test]
fn automorphisms_match_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nontrivial = 0;
    for _ in 0..400 {
        // few distinct positions so that symmetric graphs show up
        let c = random_balanced_curve(&mut rng, 5, 8, 1);
        if c.edges.len() > 8 {
            continue;
        }
        let fast = c.automorphism_order().unwrap();
        assert_eq!(fast, brute_force_automorphisms(&c), "{c:?}");
        nontrivial += usize::from(fast > 1);
    }
    assert!(nontrivial > 10);
}

#[test]
fn symmetric_examples() {
    let v = |x: i64| Vertex { pos: vec![rat(x), rat(0)], genus: 0, cell: 0 };
    // two coincident vertices joined by contracted edges: vertex swap too
    let c = TropicalCurve {
        vertices: vec![v(0), v(0)],
        edges: vec![
            Edge { v: [0, 1], len: rat(1), d: vec![0, 0] },
            Edge { v: [1, 0], len: rat(1), d: vec![0, 0] },
        ],
        ends: vec![End { v: 0, d: vec![0, 0] }, End { v: 1, d: vec![0, 0] }],
    };
    assert_eq!(c.automorphism_order().unwrap(), brute_force_automorphisms(&c));
    assert_eq!(c.automorphism_order().unwrap(), 4);
    let lp = TropicalCurve {
        vertices: vec![v(0)],
        edges: vec![Edge { v: [0, 0], len: rat(2), d: vec![0, 0] }],
        ends: vec![],
    };
    assert_eq!(lp.automorphism_order().unwrap(), 2);
    assert_eq!(brute_force_automorphisms(&lp), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn k_factor_multiplicative_on_unions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_balanced_curve(&mut rng, 3, 3, 3);
        let b = random_balanced_curve(&mut rng, 3, 3, 3);
        let u = a.disjoint_union(&b);
        prop_assert_eq!(u.k_factor(true).unwrap(), a.k_factor(true).unwrap() * b.k_factor(true).unwrap());
    }

    #[test]
    fn genus_of_connected_union_by_edge(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_balanced_curve(&mut rng, 3, 4, 3);
        if let Ok(g) = a.genus() {
            let extra: u32 = a.edges.len() as u32 + 1 - a.vertices.len() as u32;
            prop_assert_eq!(g, extra + a.vertices.iter().map(|v| v.genus).sum::<u32>());
        }
    }
}
