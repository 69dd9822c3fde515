mod common;

use chameleon::arith::{int, is_nadic, rat, reduce_mod, Rational};
use chameleon::interpolation::{interpolate_circle, interpolate_line, match_on_interval, match_subdivisions, Arc};
use chameleon::pl::{classify, GroupTag};
use chameleon::PlMap;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn line_interpolation_hits_targets(seed in any::<u64>(), n in prop::sample::select(vec![2u32, 3, 5]), k in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = delta_tuple(&mut rng, n, k);
        let ys = delta_tuple(&mut rng, n, k);
        let f = interpolate_line(n, &xs, &ys).unwrap();
        prop_assert!(classify(&PlMap::Line(f.clone()), n).has(GroupTag::BplN));
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert_eq!(&f.eval(x), y);
        }
    }

    #[test]
    fn matching_keeps_the_window(seed in any::<u64>(), n in prop::sample::select(vec![2u32, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_bpl(&mut rng, n);
        let a = delta_value(&mut rng, n, 4, 2);
        let b = &a + rat(rng.gen_range(1..40), 7);
        let m = match_on_interval(n, &f, &a, &b).unwrap();
        prop_assert!(classify(&PlMap::Line(m.clone()), n).has(GroupTag::BplN));
        let mut cuts = vec![a.clone()];
        cuts.extend(f.breakpoints().iter().filter(|c| **c > a && **c < b).cloned());
        cuts.push(b.clone());
        for w in cuts.windows(2) {
            let mid = (&w[0] + &w[1]) / int(2);
            prop_assert_eq!(m.piece_at(&mid), f.piece_at(&mid));
            prop_assert_eq!(m.eval(&w[0]), f.eval(&w[0]));
        }
        prop_assert_eq!(m.eval(&b), f.eval(&b));
    }

    #[test]
    fn subdivisions_match(n in prop::sample::select(vec![2u32, 3, 5]), a in 1i64..500, b in 1i64..500, e in 0u32..4, f in 0u32..4) {
        let m = (n - 1) as i64;
        let x = rat(a * m, (n as i64).pow(e));
        let y = rat(b * m, (n as i64).pow(f));
        let (px, py) = match_subdivisions(&x, &y, n).unwrap();
        prop_assert_eq!(px.len(), py.len());
        prop_assert_eq!(px.iter().sum::<Rational>(), x);
        prop_assert_eq!(py.iter().sum::<Rational>(), y);
        for (p, q) in px.iter().zip(&py) {
            prop_assert!(chameleon::arith::power_of(&(q / p), n).is_some());
        }
    }

    #[test]
    fn circle_interpolation_lands_in_arcs(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<Rational> = (0..k).map(|_| rat(rng.gen_range(0..997), 997)).collect();
        pts.sort();
        pts.dedup();
        let mut los: Vec<Rational> = (0..pts.len()).map(|_| rat(rng.gen_range(0..64), 64)).collect();
        los.sort();
        los.dedup();
        prop_assume!(los.len() == pts.len());
        let shift = rng.gen_range(0..los.len());
        los.rotate_left(shift);
        let targets: Vec<Arc> = los.iter().map(|lo| Arc { lo: lo.clone(), hi: lo + rat(1, 128) }).collect();
        let g = interpolate_circle(2, 1, &pts, &targets).unwrap();
        prop_assert!(classify(&PlMap::Circle(g.clone()), 2).has(GroupTag::BtNR));
        for (p, t) in pts.iter().zip(&targets) {
            let off = reduce_mod(&(g.eval(p) - &t.lo), 1);
            prop_assert!(off <= &t.hi - &t.lo);
        }
        for b in g.breakpoints() {
            prop_assert!(is_nadic(&b, 2));
        }
    }
}
