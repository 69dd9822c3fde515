//! Exact rationals, canonical n-adic values, the digit-sum homomorphism and
//! circle reduction.
//!
//! Everything here is exact. A value of `ℤ[1/n]` is held as `a/nᵉ` with
//! `e = 0` or `n ∤ a`; the canonical exponent is the position of the last
//! nonzero base-n digit.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

pub fn check_base(n: u32) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidBase(n))
    } else {
        Ok(())
    }
}

pub fn floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Reduces `q` into `[0, r)`.
pub fn reduce_mod(q: &Rational, r: u64) -> Rational {
    let r = Rational::from_integer(BigInt::from(r));
    let k = floor(&(q / &r));
    q - r * Rational::from_integer(k)
}

/// `nᵏ` as an exact rational, for any integer `k`.
pub fn pow_n(n: u32, k: i64) -> Rational {
    let base = BigInt::from(n);
    let mag = num_traits::pow(base, k.unsigned_abs() as usize);
    if k >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

fn integer_log(mut m: BigInt, n: u32) -> Option<i64> {
    let n = BigInt::from(n);
    let mut k = 0i64;
    while m > BigInt::one() {
        let (q, r) = m.div_rem(&n);
        if !r.is_zero() {
            return None;
        }
        m = q;
        k += 1;
    }
    (m == BigInt::one()).then_some(k)
}

/// Exact `log_n(q)` when `q` is an integral power of `n`.
pub fn power_of(q: &Rational, n: u32) -> Option<i64> {
    if !q.is_positive() {
        return None;
    }
    if q.denom().is_one() {
        integer_log(q.numer().clone(), n)
    } else if q.numer().is_one() {
        integer_log(q.denom().clone(), n).map(|k| -k)
    } else {
        None
    }
}

/// Canonical element `mantissa / base^exponent` of `ℤ[1/n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NAdic {
    base: u32,
    mantissa: BigInt,
    exponent: u32,
}

impl NAdic {
    pub fn new(base: u32, mantissa: BigInt, exponent: u32) -> Result<Self> {
        check_base(base)?;
        let n = BigInt::from(base);
        let (mut a, mut e) = (mantissa, exponent);
        while e > 0 && (&a % &n).is_zero() {
            a /= &n;
            e -= 1;
        }
        Ok(Self {
            base,
            mantissa: a,
            exponent: e,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(
            self.mantissa.clone(),
            num_traits::pow(BigInt::from(self.base), self.exponent as usize),
        )
    }
}

impl fmt::Display for NAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// Canonical n-adic form of `q`, if `q ∈ ℤ[1/n]`.
///
/// Membership holds iff every prime dividing the reduced denominator also
/// divides `n`.
pub fn to_nadic(q: &Rational, n: u32) -> Option<NAdic> {
    if n < 2 {
        return None;
    }
    let nb = BigInt::from(n);
    let mut rest = q.denom().clone();
    loop {
        let g = rest.gcd(&nb);
        if g.is_one() {
            break;
        }
        rest /= g;
    }
    if !rest.is_one() {
        return None;
    }
    let mut e = 0u32;
    let mut power = BigInt::one();
    while !(&power % q.denom()).is_zero() {
        power *= &nb;
        e += 1;
    }
    let mantissa = q.numer() * (power / q.denom());
    NAdic::new(n, mantissa, e).ok()
}

pub fn is_nadic(q: &Rational, n: u32) -> bool {
    to_nadic(q, n).is_some()
}

fn residue(a: &BigInt, modulus: u32) -> u32 {
    if modulus <= 1 {
        return 0;
    }
    a.mod_floor(&BigInt::from(modulus)).to_u32().unwrap_or(0)
}

/// The digit-sum ("casting out nines") homomorphism `ℤ[1/n] → ℤ_{n−1}`.
///
/// Since `n ≡ 1 (mod n−1)`, `φ(a/nᵉ) = a mod (n−1)`.
pub fn phi_n(x: &NAdic) -> u32 {
    residue(&x.mantissa, x.base - 1)
}

/// `phi_n` of a rational, or `None` when it is not n-adic.
pub fn phi_rational(q: &Rational, n: u32) -> Option<u32> {
    to_nadic(q, n).map(|x| phi_n(&x))
}

/// Membership in `Δ_n`, the kernel of `phi_n`.
pub fn in_delta(q: &Rational, n: u32) -> bool {
    phi_rational(q, n) == Some(0)
}

/// Largest `z` with `nᶻ | i`. Zero is divisible by every power, so `i = 0`
/// yields `u32::MAX`.
pub fn trailing_zeros(i: u64, n: u32) -> u32 {
    if i == 0 {
        return u32::MAX;
    }
    let n = n as u64;
    let (mut i, mut z) = (i, 0);
    while i % n == 0 {
        i /= n;
        z += 1;
    }
    z
}

/// `ν_n^{e−K}(x)` reduced into `[0, n−1)`, where `e` is the canonical
/// exponent of `x` on `S_{n−1}`. Its base-n expansion is the last `K` digits
/// of the expansion of `x`.
pub fn omega(x: &NAdic, level: u32) -> Result<NAdic> {
    let n = x.base;
    let r = (n - 1) as u64;
    let reduced = to_nadic(&reduce_mod(&x.to_rational(), r), n).expect("reduction keeps n-adics");
    let e = reduced.exponent;
    if e < level {
        return Err(Error::ExponentBelowLevel {
            exponent: e,
            level,
        });
    }
    let shifted = reduced.to_rational() * pow_n(n, (e - level) as i64);
    Ok(to_nadic(&reduce_mod(&shifted, r), n).expect("reduction keeps n-adics"))
}

/// A point of `S_r = ℝ/rℤ`, held in `[0, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CirclePoint {
    value: Rational,
    circumference: u64,
}

impl CirclePoint {
    pub fn new(value: &Rational, circumference: u64) -> Self {
        Self {
            value: reduce_mod(value, circumference),
            circumference,
        }
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn circumference(&self) -> u64 {
        self.circumference
    }

    pub fn add(&self, delta: &Rational) -> Self {
        Self::new(&(&self.value + delta), self.circumference)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum PointClass {
    NAdicPoint,
    RationalNonNAdic,
}

pub fn classify_point(q: &Rational, n: u32) -> PointClass {
    if is_nadic(q, n) {
        PointClass::NAdicPoint
    } else {
        PointClass::RationalNonNAdic
    }
}

/// Smallest `e` such that `n^{-e} < width`.
pub fn resolution_for(width: &Rational, n: u32) -> u32 {
    let mut e = 0u32;
    while pow_n(n, -(e as i64)) >= *width {
        e += 1;
    }
    e
}

/// An n-adic point strictly inside `(a, b)`.
pub fn nadic_between(a: &Rational, b: &Rational, n: u32) -> Rational {
    assert!(a < b, "empty interval");
    let e = resolution_for(&(b - a), n);
    let step = pow_n(n, -(e as i64));
    let k = floor(&(a / &step)) + BigInt::one();
    Rational::from_integer(k) * step
}
