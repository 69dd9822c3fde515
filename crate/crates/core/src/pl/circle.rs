use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{log_ratio, Piece};
use crate::arith::{floor, reduce_mod, Rational};
use crate::error::{Error, Result};

/// A degree-`d` PL map of `S_r = ℝ/rℤ`, stored as a lift on `[0, r)`.
///
/// `pieces[i]` is the lift on `[cuts[i], cuts[i+1])` (the last one runs to
/// `r`), and `lift(x + r) = lift(x) + d·r`. In normal form `cuts[0] = 0`,
/// `lift(0) ∈ [0, r)` and no two neighbouring pieces share a slope.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircleMap {
    pub(super) circumference: u64,
    pub(super) degree: u64,
    pub(super) cuts: Vec<Rational>,
    pub(super) pieces: Vec<Piece>,
}

/// A forward orbit split at its first repetition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub preperiod: Vec<Rational>,
    pub cycle: Vec<Rational>,
}

impl Orbit {
    pub fn ends_at_fixed_point(&self) -> bool {
        self.cycle.len() == 1
    }
}

fn big(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

impl CircleMap {
    /// Builds a map from lift segments `(start, end, piece)` covering some
    /// window `[s, s + r)` of the line contiguously.
    pub fn from_segments(
        circumference: u64,
        degree: u64,
        segments: Vec<(Rational, Rational, Piece)>,
    ) -> Result<Self> {
        if circumference == 0 || degree == 0 {
            return Err(Error::InvalidMap("circumference and degree must be positive".into()));
        }
        let r = big(circumference);
        let dr = big(circumference * degree);
        let mut based = Vec::with_capacity(segments.len() + 1);
        for (mut start, end, piece) in segments {
            if start >= end {
                return Err(Error::InvalidMap("empty segment".into()));
            }
            if !piece.slope.is_positive() {
                return Err(Error::InvalidMap("slopes must be positive".into()));
            }
            let mut m = floor(&(&start / &r));
            while start < end {
                let mr = Rational::from_integer(m.clone()) * &r;
                let boundary = &mr + &r;
                let stop = if end < boundary { end.clone() } else { boundary };
                let intercept = &piece.intercept + &piece.slope * &mr - Rational::from_integer(m.clone()) * &dr;
                based.push((&start - &mr, &stop - &mr, Piece::new(piece.slope.clone(), intercept)));
                start = stop;
                m += 1;
            }
        }
        based.sort_by(|a, b| a.0.cmp(&b.0));
        if based.is_empty() || !based[0].0.is_zero() || based.last().unwrap().1 != r {
            return Err(Error::InvalidMap("segments do not tile one period".into()));
        }
        for w in based.windows(2) {
            if w[0].1 != w[1].0 {
                return Err(Error::InvalidMap("segments do not tile one period".into()));
            }
            if w[0].2.eval(&w[0].1) != w[1].2.eval(&w[1].0) {
                return Err(Error::InvalidMap(format!("lift is discontinuous at {}", w[0].1)));
            }
        }
        let first = &based[0].2;
        let last = &based.last().unwrap().2;
        if last.eval(&r) != first.eval(&Rational::zero()) + &dr {
            return Err(Error::InvalidMap("lift does not have the stated degree".into()));
        }
        let shift = Rational::from_integer(floor(&(&first.intercept / &r))) * &r;
        let mut cuts: Vec<Rational> = Vec::new();
        let mut pieces: Vec<Piece> = Vec::new();
        for (start, _, piece) in based {
            let piece = Piece::new(piece.slope, piece.intercept - &shift);
            if pieces.last().is_some_and(|p| p.slope == piece.slope) {
                continue;
            }
            cuts.push(start);
            pieces.push(piece);
        }
        Ok(Self {
            circumference,
            degree,
            cuts,
            pieces,
        })
    }

    pub fn identity(circumference: u64) -> Self {
        Self::rotation(circumference, &Rational::zero())
    }

    pub fn rotation(circumference: u64, by: &Rational) -> Self {
        Self::from_segments(
            circumference,
            1,
            vec![(Rational::zero(), big(circumference), Piece::translation(by.clone()))],
        )
        .expect("rotation is valid")
    }

    /// `x ↦ k·x` on `S_r`, of degree `k`.
    pub fn scaling(circumference: u64, k: u64) -> Self {
        Self::from_segments(
            circumference,
            k,
            vec![(Rational::zero(), big(circumference), Piece::new(big(k), Rational::zero()))],
        )
        .expect("scaling is valid")
    }

    /// The degree-n map `ν_n` on `S_{n−1}`.
    pub fn nu(n: u32) -> Self {
        Self::scaling((n - 1) as u64, n as u64)
    }

    pub fn circumference(&self) -> u64 {
        self.circumference
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn cuts(&self) -> &[Rational] {
        &self.cuts
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn r(&self) -> Rational {
        big(self.circumference)
    }

    /// `(start, end, piece)` for every piece of the fundamental domain.
    pub fn segments(&self) -> Vec<(Rational, Rational, &Piece)> {
        let r = self.r();
        (0..self.pieces.len())
            .map(|i| {
                let end = self.cuts.get(i + 1).cloned().unwrap_or_else(|| r.clone());
                (self.cuts[i].clone(), end, &self.pieces[i])
            })
            .collect()
    }

    fn owner(&self, x: &Rational) -> usize {
        self.cuts.partition_point(|c| c <= x) - 1
    }

    pub fn piece_at(&self, x: &Rational) -> &Piece {
        &self.pieces[self.owner(&reduce_mod(x, self.circumference))]
    }

    pub fn lift(&self, x: &Rational) -> Rational {
        let r = self.r();
        let m = floor(&(x / &r));
        let mr = Rational::from_integer(m.clone()) * &r;
        let base = x - &mr;
        self.pieces[self.owner(&base)].eval(&base) + Rational::from_integer(m) * big(self.degree) * r
    }

    /// The unique `x ∈ ℝ` with `lift(x) = y`.
    pub fn lift_preimage(&self, y: &Rational) -> Rational {
        let r = self.r();
        let period = big(self.degree) * &r;
        let start = self.pieces[0].eval(&Rational::zero());
        let m = floor(&((y - &start) / &period));
        let y0 = y - Rational::from_integer(m.clone()) * &period;
        let segs = self.segments();
        let i = segs.partition_point(|(a, _, p)| p.eval(a) <= y0) - 1;
        segs[i].2.preimage(&y0) + Rational::from_integer(m) * r
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let x = reduce_mod(x, self.circumference);
        reduce_mod(&self.pieces[self.owner(&x)].eval(&x), self.circumference)
    }

    pub fn slope_right(&self, x: &Rational) -> &Rational {
        &self.piece_at(x).slope
    }

    pub fn slope_left(&self, x: &Rational) -> &Rational {
        let x = reduce_mod(x, self.circumference);
        match self.cuts.binary_search(&x) {
            Ok(0) => &self.pieces.last().unwrap().slope,
            Ok(i) => &self.pieces[i - 1].slope,
            Err(i) => &self.pieces[i - 1].slope,
        }
    }

    /// `log_n` of the right-to-left slope ratio at `x`.
    pub fn break_value(&self, x: &Rational, n: u32) -> Result<i64> {
        log_ratio(self.slope_right(x), self.slope_left(x), n, x)
    }

    /// Points where the one-sided slopes differ, in `[0, r)`.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.cuts
            .iter()
            .filter(|c| self.slope_left(c) != self.slope_right(c))
            .cloned()
            .collect()
    }

    pub fn breaks(&self, n: u32) -> Result<Vec<(Rational, i64)>> {
        self.breakpoints()
            .into_iter()
            .map(|x| self.break_value(&x, n).map(|b| (x, b)))
            .collect()
    }

    pub fn sum_of_breaks(&self, n: u32) -> Result<i64> {
        Ok(self.breaks(n)?.iter().map(|(_, b)| b).sum())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &CircleMap) -> Result<CircleMap> {
        if self.circumference != inner.circumference {
            return Err(Error::IncompatibleMaps(self.circumference, inner.circumference));
        }
        let r = self.r();
        let dr = big(self.degree) * &r;
        let mut segments = Vec::new();
        for (a, b, piece) in inner.segments() {
            let (ya, yb) = (piece.eval(&a), piece.eval(&b));
            let mut xs = vec![a.clone()];
            let mut m = floor(&(&ya / &r));
            loop {
                let shift = Rational::from_integer(m.clone()) * &r;
                if shift >= yb {
                    break;
                }
                for c in &self.cuts {
                    let y = c + &shift;
                    if y > ya && y < yb {
                        xs.push(piece.preimage(&y));
                    }
                }
                m += 1;
            }
            xs.push(b);
            for w in xs.windows(2) {
                let y0 = piece.eval(&w[0]);
                let m = floor(&(&y0 / &r));
                let mr = Rational::from_integer(m.clone()) * &r;
                let outer = &self.pieces[self.owner(&(&y0 - &mr))];
                let shifted = Piece::new(
                    outer.slope.clone(),
                    &outer.intercept - &outer.slope * &mr + Rational::from_integer(m) * &dr,
                );
                segments.push((w[0].clone(), w[1].clone(), shifted.after(piece)));
            }
        }
        CircleMap::from_segments(self.circumference, self.degree * inner.degree, segments)
    }

    pub fn invert(&self) -> Result<CircleMap> {
        if self.degree != 1 {
            return Err(Error::NotInvertible { degree: self.degree });
        }
        let segments = self
            .segments()
            .into_iter()
            .map(|(a, b, p)| (p.eval(&a), p.eval(&b), p.inverse()))
            .collect();
        CircleMap::from_segments(self.circumference, 1, segments)
    }

    pub fn iterate(&self, k: u32) -> Result<CircleMap> {
        let mut acc = CircleMap::identity(self.circumference);
        for _ in 0..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Forward orbit of `x` until the first repeated point.
    pub fn orbit(&self, x: &Rational, max_steps: usize) -> Result<Orbit> {
        let mut seen: HashMap<Rational, usize> = HashMap::new();
        let mut seq = Vec::new();
        let mut cur = reduce_mod(x, self.circumference);
        for _ in 0..=max_steps {
            if let Some(&i) = seen.get(&cur) {
                let cycle = seq.split_off(i);
                return Ok(Orbit {
                    preperiod: seq,
                    cycle,
                });
            }
            seen.insert(cur.clone(), seq.len());
            let next = self.eval(&cur);
            seq.push(cur);
            cur = next;
        }
        Err(Error::BudgetExceeded { steps: max_steps })
    }

    /// Cut points plus piece midpoints, enough to tell two maps apart.
    pub fn sample_points(&self) -> Vec<Rational> {
        let two = Rational::from_integer(BigInt::from(2));
        let mut out = Vec::new();
        for (a, b, _) in self.segments() {
            out.push((&a + &b) / &two);
            out.push(a);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.degree == 1 && self.pieces.len() == 1 && self.pieces[0] == Piece::identity()
    }
}

impl Default for CircleMap {
    fn default() -> Self {
        Self::identity(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn tent_like() -> CircleMap {
        // Slope 2 on [0, 1/4), 2/3 on [1/4, 1).
        CircleMap::from_segments(
            1,
            1,
            vec![
                (rat(0, 1), rat(1, 4), Piece::new(int(2), int(0))),
                (rat(1, 4), int(1), Piece::new(rat(2, 3), rat(1, 3))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn doubling_map_evaluates() {
        let nu = CircleMap::nu(2);
        assert_eq!(nu.eval(&rat(5, 16)), rat(5, 8));
        assert_eq!(nu.eval(&rat(3, 4)), rat(1, 2));
        assert_eq!(nu.break_value(&rat(1, 3), 2), Ok(0));
        assert!(nu.breakpoints().is_empty());
    }

    #[test]
    fn doubling_twice_is_times_four() {
        let nu = CircleMap::nu(2);
        assert_eq!(nu.compose(&nu).unwrap(), CircleMap::scaling(1, 4));
    }

    #[test]
    fn identity_is_neutral() {
        let f = tent_like();
        let id = CircleMap::identity(1);
        assert_eq!(id.compose(&f).unwrap(), f);
        assert_eq!(f.compose(&id).unwrap(), f);
    }

    #[test]
    fn rotation_inverse() {
        let rho = CircleMap::rotation(1, &rat(1, 2));
        let inv = rho.invert().unwrap();
        assert_eq!(inv, CircleMap::rotation(1, &rat(-1, 2)));
        assert_eq!(inv.eval(&rat(1, 8)), rat(5, 8));
        assert_eq!(CircleMap::identity(1).invert().unwrap(), CircleMap::identity(1));
        assert_eq!(
            CircleMap::nu(2).invert(),
            Err(Error::NotInvertible { degree: 2 })
        );
    }

    #[test]
    fn inverse_negates_breaks() {
        let f = tent_like();
        let inv = f.invert().unwrap();
        assert!(f.compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&f).unwrap().is_identity());
        assert_eq!(f.break_value(&rat(1, 4), 2), Err(Error::NotAPowerRatio {
            at: rat(1, 4),
            ratio: rat(1, 3),
        }));
    }

    #[test]
    fn rebasing_wraps_segments() {
        // The same rotation given on the window [1/2, 3/2).
        let f = CircleMap::from_segments(
            1,
            1,
            vec![(rat(1, 2), rat(3, 2), Piece::translation(rat(5, 4)))],
        )
        .unwrap();
        assert_eq!(f, CircleMap::rotation(1, &rat(1, 4)));
    }

    #[test]
    fn orbit_of_doubling() {
        let o = CircleMap::nu(2).orbit(&rat(5, 16), 20).unwrap();
        assert_eq!(o.preperiod, vec![rat(5, 16), rat(5, 8), rat(1, 4), rat(1, 2)]);
        assert_eq!(o.cycle, vec![int(0)]);
        let o = CircleMap::nu(2).orbit(&rat(1, 3), 20).unwrap();
        assert_eq!(o.cycle, vec![rat(1, 3), rat(2, 3)]);
        assert!(matches!(
            CircleMap::nu(2).orbit(&rat(1, 7), 1),
            Err(Error::BudgetExceeded { steps: 1 })
        ));
    }

    #[test]
    fn rejects_bad_degree() {
        let r = CircleMap::from_segments(
            1,
            2,
            vec![(rat(0, 1), int(1), Piece::identity())],
        );
        assert!(matches!(r, Err(Error::InvalidMap(_))));
    }
}
