//! Exact piecewise-linear dynamics for Thompson-type groups.
//!
//! The crate covers n-adic arithmetic, PL maps of the line and circle,
//! interpolation inside `BPL_n`, affine Markov partitions for conjugates of
//! the degree-n map `ν_n`, the conjugator they determine, and the
//! break-value calculus that decides whether that conjugator is PL.

#![allow(clippy::result_large_err)]

pub mod arith;
pub mod break_calculus;
pub mod conjugacy;
pub mod error;
pub mod interpolation;
pub mod markov;
pub mod pl;
pub mod serial;

pub use arith::{NAdic, Rational};
pub use error::{Enclosure, Error, Result};
pub use pl::{CircleMap, LineMap, Piece, PlMap};
