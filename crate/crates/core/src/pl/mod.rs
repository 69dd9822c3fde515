//! Piecewise-affine maps with finitely many breaks.

mod circle;
mod classify;
mod line;
mod serial;

pub use circle::{CircleMap, Orbit};
pub use classify::{classify, d_n, GroupTag, MembershipReport};
pub use line::LineMap;
pub use serial::{MapRecord, PieceRecord};

use crate::arith::{power_of, Rational};
use crate::error::{Error, Result};
use num_traits::{One, Zero};

/// `x ↦ slope·x + intercept` with positive slope.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Piece {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Self { slope, intercept }
    }

    pub fn identity() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }

    pub fn translation(t: Rational) -> Self {
        Self::new(Rational::one(), t)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Piece) -> Piece {
        Piece::new(
            &self.slope * &inner.slope,
            &self.slope * &inner.intercept + &self.intercept,
        )
    }

    pub fn inverse(&self) -> Piece {
        let s = self.slope.recip();
        let t = -&self.intercept * &s;
        Piece::new(s, t)
    }

    /// Solves `self(x) = y`.
    pub fn preimage(&self, y: &Rational) -> Rational {
        (y - &self.intercept) / &self.slope
    }
}

/// Either kind of map, for the operations that apply to both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlMap {
    Circle(CircleMap),
    Line(LineMap),
}

impl PlMap {
    pub fn eval(&self, x: &Rational) -> Rational {
        match self {
            PlMap::Circle(m) => m.eval(x),
            PlMap::Line(m) => m.eval(x),
        }
    }

    pub fn break_value(&self, x: &Rational, n: u32) -> Result<i64> {
        match self {
            PlMap::Circle(m) => m.break_value(x, n),
            PlMap::Line(m) => m.break_value(x, n),
        }
    }

    pub fn compose(&self, inner: &PlMap) -> Result<PlMap> {
        match (self, inner) {
            (PlMap::Circle(a), PlMap::Circle(b)) => a.compose(b).map(PlMap::Circle),
            (PlMap::Line(a), PlMap::Line(b)) => Ok(PlMap::Line(a.compose(b))),
            _ => Err(Error::InvalidMap("cannot compose a line map with a circle map".into())),
        }
    }

    pub fn to_record(&self) -> MapRecord {
        match self {
            PlMap::Circle(m) => m.to_record(),
            PlMap::Line(m) => m.to_record(),
        }
    }

    pub fn from_record(rec: &MapRecord) -> Result<PlMap> {
        match rec.space.as_str() {
            "circle" => CircleMap::from_record(rec).map(PlMap::Circle),
            "line" => LineMap::from_record(rec).map(PlMap::Line),
            other => Err(Error::Parse(format!("unknown space {other:?}"))),
        }
    }
}

pub(crate) fn log_ratio(right: &Rational, left: &Rational, n: u32, at: &Rational) -> Result<i64> {
    let ratio = right / left;
    power_of(&ratio, n).ok_or_else(|| Error::NotAPowerRatio {
        at: at.clone(),
        ratio,
    })
}
