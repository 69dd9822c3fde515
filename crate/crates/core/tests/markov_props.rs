mod common;

use std::collections::BTreeSet;

use chameleon::arith::{int, pow_n, Rational};
use chameleon::conjugacy::{markov_partition_for, random_thompson_element};
use chameleon::markov::{derive, natural_level, MarkovSystem, VertexRef};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pick(i: usize) -> MarkovSystem {
    let all = valid_partitions();
    system(&all[i % all.len()])
}

fn check_tables(s: &MarkovSystem, depths: u32) {
    let r = int(s.circumference() as i64);
    for d in 0..depths {
        let t = s.table(d).unwrap();
        let next = s.table(d + 1).unwrap();
        assert_eq!(t.lengths().iter().sum::<Rational>(), r);
        assert_eq!(*next, derive(&t, s.g()).unwrap());
        // each child has the length of the interval it covers, shrunk by g's slope there
        let lens = t.lengths();
        let kids = next.lengths();
        let n = s.base() as usize;
        for j in 0..t.len() {
            let mid = (t.lifted(j as i64) + t.lifted(j as i64 + 1)) / int(2);
            let slope = s.g().slope_right(&mid).clone();
            for c in 0..n {
                assert_eq!(kids[n * j + c], &lens[(n * j + c) % t.len()] / &slope);
            }
        }
    }
}

fn brute_stable_level(s: &MarkovSystem) -> u32 {
    let m = s.power_form().unwrap();
    let n = s.base() as u64;
    let breaks: Vec<Rational> = s.g().breakpoints();
    let base = s.table(0).unwrap();
    (0..=m)
        .find(|&k| {
            let stride = n.pow(m - k) as usize;
            let verts: BTreeSet<&Rational> = base.endpoints.iter().step_by(stride).collect();
            breaks.iter().all(|b| verts.contains(b))
        })
        .unwrap()
}

#[test]
fn corpus_tables_are_consistent() {
    for (_, lengths) in examples() {
        let s = system(&lengths);
        check_tables(&s, 4);
        assert!(s.orbit_law_holds(6).unwrap());
    }
}

#[test]
fn corpus_stable_levels() {
    assert_eq!(system(&EX1).stable_level(), Ok(4));
    assert_eq!(system(&EX4).stable_level(), Ok(3));
    for (id, lengths) in examples() {
        let s = system(&lengths);
        if s.power_form().is_some() {
            assert_eq!(s.stable_level().unwrap(), brute_stable_level(&s), "example {id}");
        }
    }
}

#[test]
fn vertex_levels_and_classes() {
    assert_eq!(natural_level(VertexRef::new(6, 4), 2), 3);
    assert_eq!(natural_level(VertexRef::new(0, 4), 2), 0);
    let s = system(&EX1);
    for i in 0..16u64 {
        let lam = natural_level(VertexRef::new(i, 4), 2);
        let x = s.vertex_value(VertexRef::new(i, 4));
        // x first appears at its natural level
        let first = (0..=4).find(|&k| {
            (0..(1u64 << k)).any(|j| s.vertex_value(VertexRef::new(j, k)) == x)
        });
        assert_eq!(first, Some(lam));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumerated_partitions_are_markov(i in any::<usize>()) {
        let s = pick(i);
        check_tables(&s, 3);
        prop_assert!(s.orbit_law_holds(3 + s.power_form().unwrap_or(0)).unwrap());
        if s.power_form().is_some() {
            prop_assert_eq!(s.stable_level().unwrap(), brute_stable_level(&s));
        }
    }

    #[test]
    fn partitions_of_thompson_conjugates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_thompson_element(&mut rng, 6);
        let s = MarkovSystem::new(markov_partition_for(&h).unwrap()).unwrap();
        check_tables(&s, 2);
        prop_assert_eq!(s.stable_level().unwrap(), brute_stable_level(&s));
        // the level-k vertices are h of the standard ones
        let m = s.power_form().unwrap();
        for k in 0..=m + 2 {
            for i in 0..(1u64 << k) {
                let q = int(i as i64) * pow_n(2, -(k as i64));
                prop_assert_eq!(s.vertex_value(VertexRef::new(i, k)), h.eval(&q));
            }
        }
    }
}
