#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

use chameleon::arith::{int, pow_n, Rational};
use chameleon::interpolation::interpolate_line;
use chameleon::markov::MarkovSystem;
use chameleon::{CircleMap, LineMap, Piece};
use num_bigint::BigInt;
use rand::Rng;

pub const EX1: [u64; 16] = [2, 2, 3, 1, 4, 2, 1, 1, 2, 2, 3, 1, 2, 2, 2, 2];
pub const EX2: [u64; 6] = [2, 2, 1, 1, 1, 1];
pub const EX3: [u64; 16] = [1, 1, 3, 1, 2, 4, 1, 1, 1, 1, 6, 2, 2, 2, 2, 2];
pub const EX4: [u64; 8] = [1, 3, 4, 2, 1, 3, 1, 1];
pub const EX5: [u64; 18] = [1, 1, 3, 1, 2, 1, 3, 1, 2, 2, 1, 3, 2, 1, 1, 3, 2, 2];

pub fn examples() -> Vec<(u32, Vec<u64>)> {
    vec![
        (1, EX1.to_vec()),
        (2, EX2.to_vec()),
        (3, EX3.to_vec()),
        (4, EX4.to_vec()),
        (5, EX5.to_vec()),
    ]
}

pub fn system(lengths: &[u64]) -> MarkovSystem {
    MarkovSystem::from_lengths(2, lengths.to_vec()).unwrap()
}

/// `(n−1)m / nᵉ`, which always has digit sum `0 mod n−1`.
pub fn delta_value<R: Rng>(rng: &mut R, n: u32, span: i64, max_exp: u32) -> Rational {
    let e = rng.gen_range(0..=max_exp);
    let scale = num_traits::pow(BigInt::from(n), e as usize);
    let m = rng.gen_range(-span..=span) * num_traits::ToPrimitive::to_i64(&scale).unwrap();
    let jitter = rng.gen_range(-(n as i64 - 1)..=(n as i64 - 1));
    Rational::new(BigInt::from((n as i64 - 1) * (m + jitter)), scale)
}

pub fn delta_tuple<R: Rng>(rng: &mut R, n: u32, k: usize) -> Vec<Rational> {
    let mut set = BTreeSet::new();
    while set.len() < k {
        set.insert(delta_value(rng, n, 6, 3));
    }
    set.into_iter().collect()
}

pub fn random_bpl<R: Rng>(rng: &mut R, n: u32) -> LineMap {
    let k = rng.gen_range(1..=4);
    let xs = delta_tuple(rng, n, k);
    let ys = delta_tuple(rng, n, k);
    interpolate_line(n, &xs, &ys).unwrap()
}

/// Depth-first over length vectors, checking each slope condition as soon
/// as the three lengths it involves are assigned.
fn enumerate(p: usize, alphabet: u64, out: &mut Vec<Vec<u64>>) {
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); p];
    for i in 0..p {
        ready[i.max((2 * i) % p).max((2 * i + 1) % p)].push(i);
    }
    let mut cur = vec![0u64; p];
    fn rec(k: usize, p: usize, alphabet: u64, cur: &mut Vec<u64>, ready: &[Vec<usize>], out: &mut Vec<Vec<u64>>) {
        if k == p {
            if cur.iter().any(|&x| x != cur[0]) && MarkovSystem::from_lengths(2, cur.clone()).is_ok() {
                out.push(cur.clone());
            }
            return;
        }
        for v in 1..=alphabet {
            cur[k] = v;
            let fine = ready[k].iter().all(|&i| {
                let image = cur[(2 * i) % p] + cur[(2 * i + 1) % p];
                image.is_multiple_of(cur[i]) && (image / cur[i]).is_power_of_two()
            });
            if fine {
                rec(k + 1, p, alphabet, cur, ready, out);
            }
        }
    }
    rec(0, p, alphabet, &mut cur, &ready, out);
}

/// Every non-constant valid base-2 length vector of a few sizes over a
/// small alphabet.
pub fn valid_partitions() -> &'static [Vec<u64>] {
    static CACHE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut out = Vec::new();
        for (p, alphabet) in [(6, 8), (8, 8), (10, 6), (12, 6), (16, 6)] {
            enumerate(p, alphabet, &mut out);
        }
        out
    })
}

/// Solutions of `g^q(x) = x`, by walking every itinerary of `q` pieces.
pub fn periodic_by_itinerary(g: &CircleMap, q: u32) -> BTreeSet<Rational> {
    let r = int(g.circumference() as i64);
    let segs: Vec<(Rational, Rational, Piece)> =
        g.segments().into_iter().map(|(a, b, p)| (a, b, p.clone())).collect();
    let mut out = BTreeSet::new();
    let start = (int(0), r.clone(), Piece::identity());
    let mut frontier = vec![start];
    for _ in 0..q {
        let mut next = Vec::new();
        for (lo, hi, f) in frontier {
            // [lo, hi) maps affinely by f into [0, r); push it through each piece
            for (a, b, p) in &segs {
                let (ya, yb) = (f.eval(&lo), f.eval(&hi));
                let (u, v) = (ya.max(a.clone()), yb.min(b.clone()));
                if u >= v {
                    continue;
                }
                let (dlo, dhi) = (f.preimage(&u), f.preimage(&v));
                let composed = p.after(&f);
                let (ilo, ihi) = (composed.eval(&dlo), composed.eval(&dhi));
                let mut k = chameleon::arith::floor(&(&ilo / &r));
                loop {
                    let base = Rational::from_integer(k.clone()) * &r;
                    if base >= ihi {
                        break;
                    }
                    let (c, d) = (ilo.clone().max(base.clone()), ihi.clone().min(&base + &r));
                    if c < d {
                        let shifted = Piece::translation(-base.clone()).after(&composed);
                        next.push((composed.preimage(&c), composed.preimage(&d), shifted));
                    }
                    k += 1;
                }
            }
        }
        frontier = next;
    }
    for (lo, hi, f) in frontier {
        if f.slope == int(1) {
            continue;
        }
        let x = -f.intercept.clone() / (&f.slope - int(1));
        if x >= lo && x < hi {
            out.insert(x);
        }
    }
    out
}

pub fn dyadic(num: i64, exp: i64) -> Rational {
    int(num) * pow_n(2, -exp)
}
