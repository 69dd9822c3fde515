//! The conjugator `h` with `g = h ν_n h⁻¹` determined by a Markov partition.
//!
//! `h` sends the Q-vertex `i(n−1)/(p nᵈ)` of the uniform partition to
//! endpoint `i` of the `d`-times derived partition. It is evaluated exactly
//! on those vertices and by nested enclosures elsewhere.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::arith::{ceil, floor, int, is_nadic, pow_n, reduce_mod, to_nadic, Rational};
use crate::error::{Enclosure, Error, Result};
use crate::interpolation::match_subdivisions;
use crate::markov::{AffineMarkovPartition, MarkovSystem, PartitionLevelTable};
use crate::pl::{CircleMap, Piece};

pub const DEFAULT_MAX_DEPTH: u32 = 16;

/// `CHAMELEON_MAX_DEPTH` if set to an integer, else 16.
pub fn max_depth_from_env() -> u32 {
    std::env::var("CHAMELEON_MAX_DEPTH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DEPTH)
}

#[derive(Debug, Clone)]
pub struct Conjugator {
    system: MarkovSystem,
    max_depth: u32,
}

/// Result of checking `g ∘ h = h ∘ ν_n` on derived tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyCheck {
    pub holds: bool,
    pub depth: u32,
    pub checked: usize,
    /// `(q, h(q))` at the first failure.
    #[serde(serialize_with = "crate::serial::opt_pair")]
    pub witness: Option<(Rational, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// An n-adic point whose `h`-preimage is not n-adic.
    NonNAdicPreimage {
        #[serde(with = "crate::serial::rational")]
        point: Rational,
        #[serde(with = "crate::serial::rational")]
        preimage: Rational,
    },
    /// An n-adic point of `g` with period > 1; its preimage is a periodic
    /// point of `ν_n`, never n-adic.
    PeriodicPoint {
        #[serde(with = "crate::serial::rational")]
        point: Rational,
        period: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicStatus {
    pub depth: u32,
    pub subset_holds: bool,
    pub counterexample: Option<Counterexample>,
}

impl Conjugator {
    pub fn new(system: MarkovSystem) -> Self {
        Self {
            system,
            max_depth: max_depth_from_env(),
        }
    }

    pub fn from_lengths(base: u32, lengths: Vec<u64>) -> Result<Self> {
        Ok(Self::new(MarkovSystem::from_lengths(base, lengths)?))
    }

    pub fn with_max_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn system(&self) -> &MarkovSystem {
        &self.system
    }

    pub fn g(&self) -> &CircleMap {
        self.system.g()
    }

    fn n(&self) -> u32 {
        self.system.base()
    }

    fn r(&self) -> Rational {
        int(self.system.circumference() as i64)
    }

    /// Spacing of Q-vertices after `depth` derivations.
    pub fn q_step(&self, depth: u32) -> Rational {
        self.r() / int(self.system.len() as i64) * pow_n(self.n(), -(depth as i64))
    }

    pub fn q_vertex(&self, idx: u64, depth: u32) -> Rational {
        self.q_step(depth) * int(idx as i64)
    }

    fn require_fixed_vertices(&self) -> Result<()> {
        if !(self.system.len() as u64).is_multiple_of(self.system.circumference()) {
            return Err(Error::FixedPointsNotVertices);
        }
        Ok(())
    }

    /// `(index, depth)` of `q` as a Q-vertex, at its coarsest depth.
    fn q_index(&self, q: &Rational) -> Result<(u64, u32)> {
        let q = reduce_mod(q, self.system.circumference());
        let w = &q / self.q_step(0);
        let x = to_nadic(&w, self.n()).ok_or_else(|| Error::NotAVertex { value: q.clone() })?;
        let idx = x.to_rational() * pow_n(self.n(), x.exponent() as i64);
        let idx = idx
            .to_integer()
            .to_u64()
            .ok_or(Error::BudgetExceeded { steps: x.exponent() as usize })?;
        self.system.depth_period(x.exponent())?;
        Ok((idx, x.exponent()))
    }

    /// Exact `h(q)` for a Q-vertex `q`; this includes every n-adic point
    /// when `n − 1` divides the interval count. Experimental for `n > 2`.
    pub fn h_eval(&self, q: &Rational) -> Result<Rational> {
        self.require_fixed_vertices()?;
        let (idx, depth) = self.q_index(q)?;
        Ok(self.system.value_at(idx, depth))
    }

    /// `h⁻¹(x)` for a vertex `x` of some derived partition within the depth
    /// budget.
    pub fn h_inverse_eval(&self, x: &Rational) -> Result<Rational> {
        let r = self.system.circumference();
        let table = self.system.table(0)?;
        let step = self.q_step(0);
        let n = int(self.n() as i64);
        let mut path = Vec::new();
        let mut cur = reduce_mod(x, r);
        for _ in 0..=self.max_depth {
            match table.endpoints.binary_search(&cur) {
                Ok(j) => {
                    let mut y = &step * int(j as i64);
                    for interval in path.iter().rev() {
                        let lo = &step * int(*interval as i64);
                        let hi = &lo + &step;
                        y = (0..self.n())
                            .map(|k| (&y + int(k as i64) * self.r()) / &n)
                            .find(|c| *c >= lo && *c < hi)
                            .expect("one preimage per interval");
                    }
                    return Ok(y);
                }
                Err(pos) => {
                    path.push(pos - 1);
                    cur = self.g().eval(&cur);
                }
            }
        }
        Err(Error::NotAVertex { value: x.clone() })
    }

    /// An interval containing `h(q)` of width at most `width`.
    pub fn h_eval_enclosure(&self, q: &Rational, width: &Rational) -> Result<Enclosure> {
        if let Ok(v) = self.h_eval(q) {
            return Ok(Enclosure { lo: v.clone(), hi: v });
        }
        let q = reduce_mod(q, self.system.circumference());
        let mut best = Enclosure {
            lo: Rational::zero(),
            hi: self.r(),
        };
        for depth in 0..=self.max_depth {
            let idx = floor(&(&q / self.q_step(depth)))
                .to_u64()
                .ok_or(Error::BudgetExceeded { steps: depth as usize })?;
            self.system.depth_period(depth)?;
            best = Enclosure {
                lo: self.system.value_at(idx, depth),
                hi: self.system.value_at(idx + 1, depth),
            };
            if best.width() <= *width {
                return Ok(best);
            }
        }
        Err(Error::EnclosureBudgetExceeded {
            depth: self.max_depth,
            best,
        })
    }

    /// `L(I_{2i}) = L(I_{2i+1})` for every `i`.
    pub fn equal_pairs(&self) -> Result<bool> {
        equal_pairs(self.system.partition())
    }

    /// The PL conjugator through `(i(n−1)/p, x_i)`, when `h` is PL.
    pub fn extract_pl_h(&self) -> Result<CircleMap> {
        if !self.equal_pairs()? {
            return Err(Error::NotPl);
        }
        let step = self.q_step(0);
        let p = self.system.len() as u64;
        let segments = (0..p)
            .map(|i| {
                let (y0, y1) = (&step * int(i as i64), &step * int(i as i64 + 1));
                let (x0, x1) = (self.system.x(i), self.system.x(i + 1));
                let slope = (&x1 - &x0) / &step;
                let intercept = &x0 - &slope * &y0;
                (y0, y1, Piece::new(slope, intercept))
            })
            .collect();
        let h = CircleMap::from_segments(self.system.circumference(), 1, segments)?;
        let lhs = self.g().compose(&h)?;
        let rhs = h.compose(&CircleMap::nu(self.n()))?;
        if lhs != rhs {
            return Err(Error::ReconstructionMismatch);
        }
        Ok(h)
    }

    /// Derived tables `0..=depth`, for `check_tables`.
    pub fn tables(&self, depth: u32) -> Result<Vec<PartitionLevelTable>> {
        (0..=depth).map(|d| self.system.table(d).map(|t| (*t).clone())).collect()
    }

    /// Checks `g(h(q)) = h(ν_n q)` on every Q-vertex up to `depth`.
    pub fn check_conjugacy(&self, depth: u32) -> Result<ConjugacyCheck> {
        if depth > self.max_depth {
            return Err(Error::BudgetExceeded { steps: depth as usize });
        }
        Ok(self.check_tables(&self.tables(depth)?))
    }

    /// The conjugacy check run against the given tables, which are taken to
    /// be the derived partitions `0, 1, …`. Every entry is also compared with
    /// the index recursion.
    pub fn check_tables(&self, tables: &[PartitionLevelTable]) -> ConjugacyCheck {
        let n = self.n() as u64;
        let mut checked = 0;
        let depth = tables.len().saturating_sub(1) as u32;
        for (d, t) in tables.iter().enumerate() {
            let d = d as u32;
            let period = t.len() as u64;
            for idx in 0..period {
                let hq = &t.endpoints[idx as usize];
                let image = &t.endpoints[((n * idx) % period) as usize];
                checked += 1;
                if self.g().eval(hq) != *image || self.system.value_at(idx, d) != *hq {
                    return ConjugacyCheck {
                        holds: false,
                        depth,
                        checked,
                        witness: Some((self.q_vertex(idx, d), hq.clone())),
                    };
                }
            }
        }
        ConjugacyCheck {
            holds: true,
            depth,
            checked,
            witness: None,
        }
    }

    /// Evidence about `h(ℤ[1/n]) = ℤ[1/n]` from derived tables to `depth`.
    pub fn dyadic_image_status(&self, depth: u32) -> Result<DyadicStatus> {
        let n = self.n();
        let mut subset_holds = true;
        let mut counterexample = None;
        for d in 0..=depth {
            let t = self.system.table(d)?;
            for (idx, x) in t.endpoints.iter().enumerate() {
                let nadic = is_nadic(x, n);
                subset_holds &= nadic;
                let q = self.q_vertex(idx as u64, d);
                if counterexample.is_none() && nadic && !is_nadic(&q, n) {
                    counterexample = Some(Counterexample::NonNAdicPreimage {
                        point: x.clone(),
                        preimage: q,
                    });
                }
            }
        }
        if counterexample.is_none() {
            'search: for period in 2..=depth.min(6) {
                for x in periodic_points(self.g(), period)? {
                    if is_nadic(&x, n) && self.g().eval(&x) != x {
                        counterexample = Some(Counterexample::PeriodicPoint { point: x, period });
                        break 'search;
                    }
                }
            }
        }
        Ok(DyadicStatus {
            depth,
            subset_holds,
            counterexample,
        })
    }
}

/// `L(I_{2i}) = L(I_{2i+1})` for all `i` (base 2 only).
pub fn equal_pairs(p: &AffineMarkovPartition) -> Result<bool> {
    if p.base() != 2 {
        return Err(Error::UnsupportedBase(p.base()));
    }
    if !p.len().is_multiple_of(2) {
        return Err(Error::OddCount(p.len()));
    }
    Ok(p.lengths().chunks(2).all(|w| w[0] == w[1]))
}

/// All `x` with `m^q(x) = x`, solved piece by piece on the lift of `m^q`.
pub fn periodic_points(m: &CircleMap, q: u32) -> Result<Vec<Rational>> {
    let f = m.iterate(q)?;
    let r = int(m.circumference() as i64);
    let mut out = Vec::new();
    for (a, b, piece) in f.segments() {
        let da = piece.eval(&a) - &a;
        let db = piece.eval(&b) - &b;
        if piece.slope == int(1) {
            if (&da / &r).is_integer() {
                return Err(Error::NeutralBranch { start: a });
            }
            continue;
        }
        let (lo, hi) = if da <= db { (da, db) } else { (db, da) };
        let mut k = ceil(&(&lo / &r));
        while Rational::from_integer(k.clone()) * &r <= hi {
            let x = (Rational::from_integer(k.clone()) * &r - &piece.intercept) / (&piece.slope - int(1));
            if x >= a && x < b {
                out.push(x);
            }
            k += 1;
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The partition `h(standard level M+1)` for `h ∈ T_{2,1}` fixing 0, where
/// `M` bounds the exponents of the breaks of `h`. Its map is `h ν_2 h⁻¹`.
pub fn markov_partition_for(h: &CircleMap) -> Result<AffineMarkovPartition> {
    if h.circumference() != 1 || h.degree() != 1 {
        return Err(Error::InvalidMap("expected a homeomorphism of S_1".into()));
    }
    if !h.eval(&Rational::zero()).is_zero() {
        return Err(Error::InvalidMap("h must fix 0".into()));
    }
    let mut level = 0;
    for b in h.breakpoints() {
        let x = to_nadic(&b, 2).ok_or(Error::EndpointNotNAdic {
            index: 0,
            value: b.clone(),
        })?;
        level = level.max(x.exponent());
    }
    let k = level + 1;
    let count = 1u64 << k;
    let points: Vec<Rational> = (0..=count)
        .map(|i| h.lift(&(int(i as i64) * pow_n(2, -(k as i64)))))
        .collect();
    let lengths: Vec<Rational> = points.windows(2).map(|w| &w[1] - &w[0]).collect();
    let scale = lengths
        .iter()
        .map(|l| l.denom().clone())
        .fold(BigInt::from(1), |acc, d| num_integer::Integer::lcm(&acc, &d));
    let ints = lengths
        .iter()
        .map(|l| {
            (l * Rational::from_integer(scale.clone()))
                .to_integer()
                .to_u64()
                .ok_or_else(|| Error::InvalidPartition("lengths overflow".into()))
        })
        .collect::<Result<Vec<u64>>>()?;
    AffineMarkovPartition::new(2, ints)
}

fn random_dyadics<R: Rng>(rng: &mut R, count: usize, exponent: u32) -> Vec<Rational> {
    let denom = 1u64 << exponent;
    let mut picks = std::collections::BTreeSet::new();
    while picks.len() < count {
        picks.insert(rng.gen_range(1..denom));
    }
    picks
        .into_iter()
        .map(|a| Rational::new(BigInt::from(a), BigInt::from(denom)))
        .collect()
}

/// A random element of `T_{2,1}` fixing 0: up to `max_points` random dyadic
/// points are sent to random dyadic images, gaps filled by matched
/// power-of-2 subdivisions.
pub fn random_thompson_element<R: Rng>(rng: &mut R, max_points: usize) -> CircleMap {
    let k = rng.gen_range(0..=max_points);
    let xs = random_dyadics(rng, k, 6);
    let ys = random_dyadics(rng, k, 6);
    let mut px = vec![Rational::zero()];
    px.extend(xs);
    px.push(int(1));
    let mut py = vec![Rational::zero()];
    py.extend(ys);
    py.push(int(1));
    let mut segments = Vec::new();
    for i in 0..px.len() - 1 {
        let (la, lb) = (&px[i + 1] - &px[i], &py[i + 1] - &py[i]);
        let (sa, sb) = match_subdivisions(&la, &lb, 2).expect("dyadic gaps always match");
        let (mut x, mut y) = (px[i].clone(), py[i].clone());
        for (a, b) in sa.iter().zip(&sb) {
            let slope = b / a;
            let intercept = &y - &slope * &x;
            segments.push((x.clone(), &x + a, Piece::new(slope, intercept)));
            x += a;
            y += b;
        }
    }
    CircleMap::from_segments(1, 1, segments).expect("matched subdivisions form a homeomorphism")
}
