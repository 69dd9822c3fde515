use crate::arith::Rational;
use thiserror::Error;

/// Closed interval known to contain a conjugator value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("unsupported base {0} for this operation")]
    UnsupportedBase(u32),
    #[error("exponent {exponent} is below level {level}")]
    ExponentBelowLevel { exponent: u32, level: u32 },
    #[error("map of degree {degree} is not invertible")]
    NotInvertible { degree: u64 },
    #[error("slope ratio {ratio} at {at} is not a power of the base")]
    NotAPowerRatio { at: Rational, ratio: Rational },
    #[error("residue of d_n differs between sample points")]
    InconsistentResidue,
    #[error("circumferences differ ({0} vs {1})")]
    IncompatibleMaps(u64, u64),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("budget of {steps} steps exceeded")]
    BudgetExceeded { steps: usize },
    #[error("enclosure budget exceeded at depth {depth}, best width {}", best.width())]
    EnclosureBudgetExceeded { depth: u32, best: Enclosure },
    #[error("{value} is not in the kernel of the digit-sum homomorphism")]
    NotInDelta { value: Rational },
    #[error("sequence is not strictly increasing")]
    NotIncreasing,
    #[error("d_n of the input map is {residue}, not 0")]
    NonzeroDn { residue: u32 },
    #[error("bad cyclic order: {0}")]
    BadCyclicOrder(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("slope {slope} on interval {index} is not a power of the base")]
    SlopeNotPowerOfN { index: usize, slope: Rational },
    #[error("endpoint {index} = {value} is not n-adic")]
    EndpointNotNAdic { index: usize, value: Rational },
    #[error("map does not carry interval {index} onto consecutive intervals")]
    NotMarkov { index: usize },
    #[error("{intervals} intervals is not of the form (n-1)n^m")]
    NotPowerForm { intervals: usize },
    #[error("vertices lie in different extended orbits ({0} vs {1})")]
    ClassMismatch(u32, u32),
    #[error("(n-1) does not divide the interval count, fixed points of the degree-n map are not vertices")]
    FixedPointsNotVertices,
    #[error("{value} is not a vertex within the memo depth")]
    NotAVertex { value: Rational },
    #[error("odd interval count {0}")]
    OddCount(usize),
    #[error("conjugator is not PL")]
    NotPl,
    #[error("itinerary branch with slope product 1 has a fixed segment starting at {start}")]
    NeutralBranch { start: Rational },
    #[error("orbit enters a cycle with nonzero breaks {breaks:?}")]
    DivergentCycle { cycle: Vec<Rational>, breaks: Vec<i64> },
    #[error("orbit ends at fixed point {point} with break {break_value}")]
    DivergentFixedPoint { point: Rational, break_value: i64 },
    #[error("reconstructed conjugate does not reproduce the map")]
    ReconstructionMismatch,
    #[error("reconstructed initial slope {slope} is not a power of two")]
    SlopeNotPowerOfTwo { slope: Rational },
    #[error("bad length: {0}")]
    BadLength(String),
    #[error("vertex at level {level} is below the stable level {stable}")]
    InadmissibleVertex { level: u32, stable: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
