use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{CircleMap, LineMap, PlMap};
use crate::arith::{floor, is_nadic, nadic_between, phi_rational, power_of, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GroupTag {
    #[serde(rename = "PL_n")]
    PlN,
    #[serde(rename = "BPL_n")]
    BplN,
    #[serde(rename = "F_n")]
    FN,
    #[serde(rename = "T_n,r")]
    TNR,
    #[serde(rename = "BT_n,r")]
    BtNR,
    #[serde(rename = "Tbar_n,r")]
    TbarNR,
    #[serde(rename = "Aff_n")]
    AffN,
}

/// Which of the defining conditions (1)–(5) hold, and the resulting tags.
///
/// The conditions are: PL, orientation preserving, slopes in `nᶻ`, breaks
/// in `ℤ[1/n]`, and `ℤ[1/n]` carried into itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub satisfies: [bool; 5],
    pub tags: BTreeSet<GroupTag>,
    /// `(i, j)` with `f(x) = x + i(n−1)` near `+∞` and `x + j(n−1)` near `−∞`.
    pub end_translations: Option<(i64, i64)>,
    pub d_n_value: Option<u32>,
}

impl MembershipReport {
    pub fn has(&self, tag: GroupTag) -> bool {
        self.tags.contains(&tag)
    }
}

fn images_stay_nadic<F: Fn(&Rational) -> Rational>(f: F, samples: &[Rational], n: u32) -> bool {
    samples.iter().all(|x| !is_nadic(x, n) || is_nadic(&f(x), n))
}

/// n-adic sample points: every n-adic breakpoint and one n-adic point
/// strictly inside each gap.
fn nadic_samples(cuts: &[Rational], lo: Rational, hi: Rational, n: u32) -> Vec<Rational> {
    let mut fence = vec![lo];
    fence.extend(cuts.iter().cloned());
    fence.push(hi);
    let mut out: Vec<Rational> = cuts.iter().filter(|c| is_nadic(c, n)).cloned().collect();
    for w in fence.windows(2) {
        if w[0] < w[1] {
            out.push(nadic_between(&w[0], &w[1], n));
        }
    }
    out
}

pub fn classify(m: &PlMap, n: u32) -> MembershipReport {
    match m {
        PlMap::Line(f) => classify_line(f, n),
        PlMap::Circle(f) => classify_circle(f, n),
    }
}

fn classify_line(f: &LineMap, n: u32) -> MembershipReport {
    let bps = f.breakpoints();
    let s3 = f.pieces().iter().all(|p| power_of(&p.slope, n).is_some());
    let s4 = bps.iter().all(|b| is_nadic(b, n));
    let one = Rational::one();
    let (lo, hi) = match (bps.first(), bps.last()) {
        (Some(a), Some(b)) => (Rational::from_integer(floor(a)) - &one, Rational::from_integer(floor(b)) + &one + &one),
        _ => (-one.clone(), one.clone()),
    };
    let samples = nadic_samples(bps, lo, hi, n);
    let s5 = images_stay_nadic(|x| f.eval(x), &samples, n);
    let satisfies = [true, !f.is_reversing(), s3, s4, s5];
    let mut tags = BTreeSet::new();
    let mut end_translations = None;
    let mut d_n_value = None;
    if satisfies.iter().all(|&b| b) {
        tags.insert(GroupTag::PlN);
        if bps.is_empty() {
            tags.insert(GroupTag::AffN);
        }
        let step = BigInt::from(n - 1);
        let shift = |p: &super::Piece| -> Option<i64> {
            if !p.slope.is_one() || !p.intercept.is_integer() {
                return None;
            }
            let (q, r) = p.intercept.to_integer().div_rem(&step);
            if r.is_zero() {
                q.to_i64()
            } else {
                None
            }
        };
        if let (Some(i), Some(j)) = (shift(f.right_end()), shift(f.left_end())) {
            tags.insert(GroupTag::FN);
            end_translations = Some((i, j));
            if i == 0 && j == 0 {
                tags.insert(GroupTag::BplN);
            }
        }
        d_n_value = d_n(&PlMap::Line(f.clone()), n).ok();
    }
    MembershipReport {
        satisfies,
        tags,
        end_translations,
        d_n_value,
    }
}

fn classify_circle(f: &CircleMap, n: u32) -> MembershipReport {
    let bps = f.breakpoints();
    let s3 = f.pieces().iter().all(|p| power_of(&p.slope, n).is_some());
    let s4 = bps.iter().all(|b| is_nadic(b, n));
    let r = Rational::from_integer(BigInt::from(f.circumference()));
    let samples = nadic_samples(f.cuts(), Rational::zero(), r, n);
    let s5 = images_stay_nadic(|x| f.lift(x), &samples, n);
    let satisfies = [true, true, s3, s4, s5];
    let mut tags = BTreeSet::new();
    let mut d_n_value = None;
    if satisfies.iter().all(|&b| b) {
        tags.insert(GroupTag::TbarNR);
        if f.degree() == 1 {
            tags.insert(GroupTag::TNR);
            if bps.is_empty() {
                tags.insert(GroupTag::AffN);
            }
            let a = (f.circumference() as u32).gcd(&(n - 1)).max(1);
            if let Ok(c) = d_n(&PlMap::Circle(f.clone()), n) {
                if c % a == 0 {
                    tags.insert(GroupTag::BtNR);
                }
                if a == (n - 1).max(1) {
                    d_n_value = Some(c);
                }
            }
        }
    }
    MembershipReport {
        satisfies,
        tags,
        end_translations: None,
        d_n_value,
    }
}

/// The coset shift `φ(f(x)) − φ(x)` of a member of `PL_n(ℝ)`.
///
/// Circle maps are measured on their normal-form lift. Computed at `0` and
/// confirmed at two more n-adic points.
pub fn d_n(m: &PlMap, n: u32) -> Result<u32> {
    let modulus = (n - 1).max(1);
    let f = |x: &Rational| match m {
        PlMap::Line(g) => g.eval(x),
        PlMap::Circle(g) => g.lift(x),
    };
    let nn = BigInt::from(n);
    let points = [
        Rational::zero(),
        Rational::new(BigInt::one(), nn.clone()),
        Rational::new(BigInt::from(7), &nn * &nn) - Rational::one(),
    ];
    let mut value = None;
    for x in &points {
        let (Some(a), Some(b)) = (phi_rational(&f(x), n), phi_rational(x, n)) else {
            return Err(Error::InconsistentResidue);
        };
        let c = (a + modulus - b) % modulus;
        match value {
            None => value = Some(c),
            Some(v) if v != c => return Err(Error::InconsistentResidue),
            _ => {}
        }
    }
    Ok(value.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::pl::Piece;

    #[test]
    fn doubling_is_only_in_the_monoid() {
        let rep = classify(&PlMap::Circle(CircleMap::nu(2)), 2);
        assert!(rep.has(GroupTag::TbarNR));
        assert!(!rep.has(GroupTag::TNR));
    }

    #[test]
    fn half_rotation_is_in_t() {
        let rep = classify(&PlMap::Circle(CircleMap::rotation(1, &rat(1, 2))), 2);
        assert!(rep.has(GroupTag::TNR) && rep.has(GroupTag::BtNR));
    }

    #[test]
    fn third_rotation_fails_condition_five() {
        let rep = classify(&PlMap::Circle(CircleMap::rotation(1, &rat(1, 3))), 2);
        assert_eq!(rep.satisfies, [true, true, true, true, false]);
        assert!(rep.tags.is_empty());
    }

    #[test]
    fn times_three_is_not_pl2() {
        let rep = classify(&PlMap::Line(LineMap::affine(Piece::new(int(3), int(0)))), 2);
        assert!(!rep.satisfies[2]);
        assert!(!rep.has(GroupTag::PlN));
        let rep3 = classify(&PlMap::Line(LineMap::affine(Piece::new(int(3), int(0)))), 3);
        assert!(rep3.has(GroupTag::PlN) && rep3.has(GroupTag::AffN));
        assert!(!rep3.has(GroupTag::FN));
    }

    #[test]
    fn translations_and_f_n() {
        let rep = classify(&PlMap::Line(LineMap::translation(int(4))), 3);
        assert!(rep.has(GroupTag::FN) && !rep.has(GroupTag::BplN));
        assert_eq!(rep.end_translations, Some((2, 2)));
        assert_eq!(rep.d_n_value, Some(0));
        let rep = classify(&PlMap::Line(LineMap::identity()), 3);
        assert!(rep.has(GroupTag::BplN));
        let rep = classify(&PlMap::Line(LineMap::translation(int(1))), 3);
        assert!(!rep.has(GroupTag::FN));
        assert_eq!(rep.end_translations, None);
    }

    #[test]
    fn d_n_examples() {
        assert_eq!(d_n(&PlMap::Line(LineMap::translation(rat(3, 8))), 2), Ok(0));
        assert_eq!(d_n(&PlMap::Line(LineMap::translation(int(1))), 3), Ok(1));
        assert_eq!(d_n(&PlMap::Line(LineMap::affine(Piece::new(int(3), int(0)))), 3), Ok(0));
        assert_eq!(
            d_n(&PlMap::Line(LineMap::affine(Piece::new(int(1), rat(1, 3)))), 2),
            Err(Error::InconsistentResidue)
        );
    }

    #[test]
    fn bt_needs_coset_preservation() {
        // On S_2 with n = 3, rotation by 1 moves Δ_3 off itself.
        let rep = classify(&PlMap::Circle(CircleMap::rotation(2, &int(1))), 3);
        assert!(rep.has(GroupTag::TNR) && !rep.has(GroupTag::BtNR));
        let rep = classify(&PlMap::Circle(CircleMap::rotation(2, &rat(2, 3))), 3);
        assert!(rep.has(GroupTag::BtNR));
    }
}
