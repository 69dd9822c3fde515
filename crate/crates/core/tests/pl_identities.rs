mod common;

use chameleon::arith::{int, rat, Rational};
use chameleon::conjugacy::{markov_partition_for, random_thompson_element};
use chameleon::markov::MarkovSystem;
use chameleon::pl::{classify, d_n, GroupTag, MapRecord};
use chameleon::{CircleMap, LineMap, Piece, PlMap};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn line_samples(f: &LineMap, g: &LineMap) -> Vec<Rational> {
    let mut xs = g.sample_points();
    let ginv = g.invert();
    xs.extend(f.breakpoints().iter().map(|b| ginv.eval(b)));
    xs.extend([rat(1, 3), rat(-7, 5), int(0)]);
    xs
}

fn circle_samples(f: &CircleMap, g: &CircleMap) -> Vec<Rational> {
    let mut xs = g.sample_points();
    for b in f.breakpoints() {
        if g.degree() == 1 {
            xs.push(g.invert().unwrap().eval(&b));
        }
    }
    xs.extend([rat(1, 3), rat(2, 7), int(0)]);
    xs
}

/// A degree-2 map conjugate to doubling.
fn random_expanding(rng: &mut ChaCha8Rng) -> CircleMap {
    let h = random_thompson_element(rng, 5);
    MarkovSystem::new(markov_partition_for(&h).unwrap()).unwrap().g().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_rule_on_the_line(seed in any::<u64>(), n in prop::sample::select(vec![2u32, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (random_bpl(&mut rng, n), random_bpl(&mut rng, n));
        let fg = f.compose(&g);
        for x in line_samples(&f, &g) {
            prop_assert_eq!(fg.eval(&x), f.eval(&g.eval(&x)));
            let lhs = fg.break_value(&x, n).unwrap();
            let rhs = f.break_value(&g.eval(&x), n).unwrap() + g.break_value(&x, n).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn chain_rule_on_the_circle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_thompson_element(&mut rng, 5);
        let g = if seed % 2 == 0 { random_thompson_element(&mut rng, 5) } else { random_expanding(&mut rng) };
        for (outer, inner) in [(&f, &g), (&g, &f)] {
            let c = outer.compose(inner).unwrap();
            prop_assert_eq!(c.degree(), outer.degree() * inner.degree());
            for x in circle_samples(outer, inner) {
                let y = inner.eval(&x);
                prop_assert_eq!(c.eval(&x), outer.eval(&y));
                let lhs = c.break_value(&x, 2).unwrap();
                let rhs = outer.break_value(&y, 2).unwrap() + inner.break_value(&x, 2).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn inverse_is_an_involution(seed in any::<u64>(), n in prop::sample::select(vec![2u32, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_bpl(&mut rng, n);
        prop_assert_eq!(f.invert().invert(), f.clone());
        prop_assert!(f.compose(&f.invert()).is_identity());
        let h = random_thompson_element(&mut rng, 6);
        prop_assert_eq!(h.invert().unwrap().invert().unwrap(), h.clone());
        prop_assert!(h.compose(&h.invert().unwrap()).unwrap().is_identity());
    }

    #[test]
    fn circle_breaks_sum_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(random_thompson_element(&mut rng, 6).sum_of_breaks(2), Ok(0));
        prop_assert_eq!(random_expanding(&mut rng).sum_of_breaks(2), Ok(0));
    }

    #[test]
    fn d3_is_a_homomorphism(seed in any::<u64>(), a in 0i64..9, b in 0i64..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = |k: i64| LineMap::translation(rat(k, 3));
        let f = PlMap::Line(shift(a).compose(&random_bpl(&mut rng, 3)));
        let g = PlMap::Line(random_bpl(&mut rng, 3).compose(&shift(b)));
        prop_assert!(classify(&f, 3).has(GroupTag::PlN));
        let (df, dg) = (d_n(&f, 3).unwrap(), d_n(&g, 3).unwrap());
        prop_assert_eq!(df, (a % 2) as u32);
        prop_assert_eq!(d_n(&f.compose(&g).unwrap(), 3).unwrap(), (df + dg) % 2);
    }

    #[test]
    fn normal_form_is_canonical(seed in any::<u64>(), cut_num in 1i64..63) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_thompson_element(&mut rng, 6);
        // re-split at an arbitrary point and rotate the window
        let cut = rat(cut_num, 64);
        let mut segs = Vec::new();
        for (a, b, p) in h.segments() {
            if a < cut && cut < b {
                segs.push((a.clone(), cut.clone(), p.clone()));
                segs.push((cut.clone(), b, p.clone()));
            } else {
                segs.push((a, b, p.clone()));
            }
        }
        let rotated: Vec<(Rational, Rational, Piece)> = segs
            .into_iter()
            .map(|(a, b, p)| {
                if a < cut {
                    let t = Piece::translation(int(-1));
                    (a + int(1), b + int(1), Piece::translation(int(1)).after(&p.after(&t)))
                } else {
                    (a, b, p)
                }
            })
            .collect();
        prop_assert_eq!(CircleMap::from_segments(1, 1, rotated).unwrap(), h.clone());
        let json = serde_json::to_string(&h.to_record()).unwrap();
        let back: MapRecord = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(CircleMap::from_record(&back).unwrap(), h);
    }
}

#[test]
fn doubling_is_its_own_normal_form() {
    let nu = CircleMap::nu(2);
    assert_eq!(nu.pieces().len(), 1);
    assert!(nu.breakpoints().is_empty());
    assert_eq!(nu.compose(&CircleMap::identity(1)).unwrap(), nu);
}
