use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{log_ratio, Piece};
use crate::arith::Rational;
use crate::error::{Error, Result};

/// A PL homeomorphism of `ℝ` with finitely many breaks.
///
/// `pieces[0]` acts on `(−∞, b₀)`, `pieces[i]` on `[b_{i−1}, b_i)` and the
/// last piece on `[b_last, ∞)`. Orientation-reversing maps are stored as
/// `x ↦ −F(x)` with `F` increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineMap {
    pub(super) breakpoints: Vec<Rational>,
    pub(super) pieces: Vec<Piece>,
    pub(super) reversed: bool,
}

impl LineMap {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Piece>, reversed: bool) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidMap("need one more piece than breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("breakpoints must increase".into()));
        }
        if pieces.iter().any(|p| !p.slope.is_positive()) {
            return Err(Error::InvalidMap("slopes must be positive".into()));
        }
        for (i, b) in breakpoints.iter().enumerate() {
            if pieces[i].eval(b) != pieces[i + 1].eval(b) {
                return Err(Error::InvalidMap(format!("discontinuous at {b}")));
            }
        }
        let mut bs = Vec::new();
        let mut ps = vec![pieces[0].clone()];
        for (b, p) in breakpoints.into_iter().zip(pieces.into_iter().skip(1)) {
            if ps.last() != Some(&p) {
                bs.push(b);
                ps.push(p);
            }
        }
        Ok(Self {
            breakpoints: bs,
            pieces: ps,
            reversed,
        })
    }

    pub fn affine(piece: Piece) -> Self {
        Self::new(Vec::new(), vec![piece], false).expect("affine map is valid")
    }

    pub fn identity() -> Self {
        Self::affine(Piece::identity())
    }

    pub fn translation(t: Rational) -> Self {
        Self::affine(Piece::translation(t))
    }

    /// `x ↦ −x`.
    pub fn reflection() -> Self {
        Self {
            reversed: true,
            ..Self::identity()
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_reversing(&self) -> bool {
        self.reversed
    }

    pub fn left_end(&self) -> &Piece {
        &self.pieces[0]
    }

    pub fn right_end(&self) -> &Piece {
        self.pieces.last().unwrap()
    }

    fn owner(&self, x: &Rational) -> usize {
        self.breakpoints.partition_point(|b| b <= x)
    }

    /// The increasing factor `F` at `x`.
    pub fn piece_at(&self, x: &Rational) -> &Piece {
        &self.pieces[self.owner(x)]
    }

    fn forward(&self, x: &Rational) -> Rational {
        self.piece_at(x).eval(x)
    }

    fn backward(&self, y: &Rational) -> Rational {
        let i = self
            .breakpoints
            .iter()
            .enumerate()
            .take_while(|(i, b)| self.pieces[*i].eval(b) <= *y)
            .count();
        self.pieces[i].preimage(y)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let y = self.forward(x);
        if self.reversed {
            -y
        } else {
            y
        }
    }

    fn signed(&self, s: &Rational) -> Rational {
        if self.reversed {
            -s
        } else {
            s.clone()
        }
    }

    pub fn slope_right(&self, x: &Rational) -> Rational {
        self.signed(&self.piece_at(x).slope)
    }

    pub fn slope_left(&self, x: &Rational) -> Rational {
        let i = self.breakpoints.partition_point(|b| b < x);
        self.signed(&self.pieces[i].slope)
    }

    pub fn break_value(&self, x: &Rational, n: u32) -> Result<i64> {
        log_ratio(&self.slope_right(x), &self.slope_left(x), n, x)
    }

    pub fn breaks(&self, n: u32) -> Result<Vec<(Rational, i64)>> {
        self.breakpoints
            .iter()
            .map(|b| self.break_value(b, n).map(|v| (b.clone(), v)))
            .collect()
    }

    /// `x ↦ −F(−x)`, the conjugate of the increasing factor by reflection.
    fn conjugated(&self) -> LineMap {
        let breakpoints = self.breakpoints.iter().rev().map(|b| -b).collect();
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| Piece::new(p.slope.clone(), -&p.intercept))
            .collect();
        LineMap {
            breakpoints,
            pieces,
            reversed: self.reversed,
        }
    }

    fn compose_increasing(outer: &LineMap, inner: &LineMap) -> LineMap {
        let mut cuts: Vec<Rational> = inner.breakpoints.clone();
        cuts.extend(outer.breakpoints.iter().map(|b| inner.backward(b)));
        cuts.sort();
        cuts.dedup();
        let one = Rational::one();
        let two = Rational::from_integer(BigInt::from(2));
        let samples: Vec<Rational> = if cuts.is_empty() {
            vec![Rational::zero()]
        } else {
            let mut s = vec![&cuts[0] - &one];
            s.extend(cuts.windows(2).map(|w| (&w[0] + &w[1]) / &two));
            s.push(cuts.last().unwrap() + &one);
            s
        };
        let pieces = samples
            .iter()
            .map(|x| outer.piece_at(&inner.forward(x)).after(inner.piece_at(x)))
            .collect();
        LineMap::new(cuts, pieces, false).expect("composition of valid maps")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LineMap) -> LineMap {
        let outer = if inner.reversed {
            self.conjugated()
        } else {
            self.clone()
        };
        let mut out = Self::compose_increasing(&outer, inner);
        out.reversed = self.reversed ^ inner.reversed;
        out
    }

    pub fn invert(&self) -> LineMap {
        let breakpoints = self.breakpoints.iter().map(|b| self.forward(b)).collect();
        let pieces = self.pieces.iter().map(Piece::inverse).collect();
        let inv = LineMap {
            breakpoints,
            pieces,
            reversed: false,
        };
        if self.reversed {
            LineMap {
                reversed: true,
                ..inv.conjugated()
            }
        } else {
            inv
        }
    }

    /// Breakpoints plus one point inside every piece.
    pub fn sample_points(&self) -> Vec<Rational> {
        let one = Rational::one();
        let two = Rational::from_integer(BigInt::from(2));
        let Some(first) = self.breakpoints.first() else {
            return vec![Rational::zero()];
        };
        let mut out = vec![first - &one];
        for w in self.breakpoints.windows(2) {
            out.push(w[0].clone());
            out.push((&w[0] + &w[1]) / &two);
        }
        let last = self.breakpoints.last().unwrap();
        out.push(last.clone());
        out.push(last + &one);
        out
    }

    pub fn is_identity(&self) -> bool {
        !self.reversed && self.pieces.len() == 1 && self.pieces[0] == Piece::identity()
    }
}
