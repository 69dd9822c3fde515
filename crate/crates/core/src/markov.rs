//! Affine n-ary Markov partitions and the degree-n map they induce.
//!
//! Lengths `L_0..L_{p−1}` cut `S_{n−1}` into intervals `I_i` with endpoints
//! `x_i`, and `g` carries `I_i` affinely onto `I_{ni} ∪ … ∪ I_{ni+n−1}`.
//! Derived partitions pull the structure back through `g`; vertices of
//! derived levels are evaluated by walking that pull-back on indices.

use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{check_base, floor, int, is_nadic, pow_n, power_of, trailing_zeros, Rational};
use crate::error::{Error, Result};
use crate::pl::{classify, CircleMap, MembershipReport, Piece, PlMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMarkovPartition {
    base: u32,
    lengths: Vec<u64>,
}

impl AffineMarkovPartition {
    pub fn new(base: u32, lengths: Vec<u64>) -> Result<Self> {
        check_base(base)?;
        if lengths.is_empty() || lengths.contains(&0) {
            return Err(Error::InvalidPartition("lengths must be positive".into()));
        }
        if lengths.len() < (base - 1) as usize {
            return Err(Error::InvalidPartition(format!(
                "need at least {} intervals",
                base - 1
            )));
        }
        Ok(Self { base, lengths })
    }

    /// Parses `{"base": n, "lengths": [..]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            base: u32,
            lengths: Vec<u64>,
        }
        let f: File = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(f.base, f.lengths)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.lengths.iter().sum()
    }

    /// `(n−1)/ΣL`, the length of one integer unit on `S_{n−1}`.
    pub fn unit(&self) -> Rational {
        Rational::new(BigInt::from(self.base - 1), BigInt::from(self.total()))
    }

    /// `m` with `p = (n−1)nᵐ`, if there is one.
    pub fn power_form(&self) -> Option<u32> {
        let r = (self.base - 1) as usize;
        if !self.len().is_multiple_of(r) {
            return None;
        }
        power_of(&int((self.len() / r) as i64), self.base).map(|m| m as u32)
    }

    /// `L_{ni} + … + L_{ni+n−1}` over `L_i`, indices mod p.
    pub fn slope(&self, i: usize) -> Rational {
        let p = self.len();
        let n = self.base as usize;
        let image: u64 = (0..n).map(|t| self.lengths[(n * i + t) % p]).sum();
        Rational::new(BigInt::from(image), BigInt::from(self.lengths[i % p]))
    }

    /// Endpoints `x_0 = 0 < x_1 < … < x_{p−1}`.
    pub fn endpoints(&self) -> Vec<Rational> {
        let unit = self.unit();
        let mut acc = 0u64;
        self.lengths
            .iter()
            .map(|l| {
                let v = &unit * int(acc as i64);
                acc += l;
                v
            })
            .collect()
    }

    /// The induced degree-n map, with no validity checks on slopes.
    pub fn build_g(&self) -> CircleMap {
        let p = self.len() as i64;
        let xs = self.endpoints();
        let r = int(self.base as i64 - 1);
        let lifted = |j: i64| -> Rational {
            let q = j.div_euclid(p);
            &xs[j.rem_euclid(p) as usize] + &r * int(q)
        };
        let segments = (0..p)
            .map(|i| {
                let s = self.slope(i as usize);
                let a = lifted(i);
                let t = lifted(self.base as i64 * i) - &s * &a;
                (a, lifted(i + 1), Piece::new(s, t))
            })
            .collect();
        CircleMap::from_segments(self.base as u64 - 1, self.base as u64, segments)
            .expect("partition maps are continuous")
    }

    pub fn validate_and_build_g(&self) -> Result<(CircleMap, MembershipReport)> {
        for i in 0..self.len() {
            let slope = self.slope(i);
            if power_of(&slope, self.base).is_none() {
                return Err(Error::SlopeNotPowerOfN { index: i, slope });
            }
        }
        for (index, value) in self.endpoints().into_iter().enumerate() {
            if !is_nadic(&value, self.base) {
                return Err(Error::EndpointNotNAdic { index, value });
            }
        }
        let g = self.build_g();
        let report = classify(&PlMap::Circle(g.clone()), self.base);
        Ok((g, report))
    }
}

/// `x_i^k`, the i-th endpoint of the level-k partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexRef {
    pub index: u64,
    pub level: u32,
}

impl VertexRef {
    pub fn new(index: u64, level: u32) -> Self {
        Self { index, level }
    }
}

/// `λ = max(k − z(i), 0)`: the least level at which the vertex appears.
pub fn natural_level(v: VertexRef, n: u32) -> u32 {
    if v.index == 0 {
        return 0;
    }
    v.level.saturating_sub(trailing_zeros(v.index, n))
}

/// `φ_n(i/nᵏ) = i mod (n−1)`, the class of the fixed point the orbit ends at.
pub fn extended_orbit_class(v: VertexRef, n: u32) -> u32 {
    (v.index % (n - 1).max(1) as u64) as u32
}

/// Endpoints of one partition level over a single period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionLevelTable {
    pub level: u32,
    pub circumference: u64,
    #[serde(with = "crate::serial::rationals")]
    pub endpoints: Vec<Rational>,
}

impl PartitionLevelTable {
    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    /// Endpoint `j` of the lifted partition of `ℝ`.
    pub fn lifted(&self, j: i64) -> Rational {
        let p = self.len() as i64;
        &self.endpoints[j.rem_euclid(p) as usize] + int(self.circumference as i64 * j.div_euclid(p))
    }

    pub fn lengths(&self) -> Vec<Rational> {
        (0..self.len() as i64)
            .map(|i| self.lifted(i + 1) - self.lifted(i))
            .collect()
    }

    /// Lifted index of `x`, if it is an endpoint.
    pub fn index_of(&self, x: &Rational) -> Option<i64> {
        let r = int(self.circumference as i64);
        let q = floor(&(x / &r));
        let base = x - Rational::from_integer(q.clone()) * &r;
        let t = self.endpoints.binary_search(&base).ok()? as i64;
        let q: i64 = q.try_into().ok()?;
        Some(t + q * self.len() as i64)
    }
}

/// `(n−1)nᵏ` intervals `[i n^{−k}, (i+1) n^{−k}]`.
pub fn standard_partition(n: u32, k: u32) -> PartitionLevelTable {
    let step = pow_n(n, -(k as i64));
    let count = (n as u64 - 1) * (n as u64).pow(k);
    PartitionLevelTable {
        level: k,
        circumference: n as u64 - 1,
        endpoints: (0..count).map(|i| int(i as i64) * &step).collect(),
    }
}

/// Pulls `table` back through `g`: each interval is cut into the `g`-preimages
/// of the `n` consecutive intervals it covers.
pub fn derive(table: &PartitionLevelTable, g: &CircleMap) -> Result<PartitionLevelTable> {
    let n = g.degree() as i64;
    let mut out = Vec::with_capacity(table.len() * n as usize);
    for i in 0..table.len() as i64 {
        let (a, b) = (table.lifted(i), table.lifted(i + 1));
        let (ga, gb) = (g.lift(&a), g.lift(&b));
        let j = table.index_of(&ga).ok_or(Error::NotMarkov { index: i as usize })?;
        if table.lifted(j + n) != gb {
            return Err(Error::NotMarkov { index: i as usize });
        }
        out.push(a);
        for t in 1..n {
            out.push(g.lift_preimage(&table.lifted(j + t)));
        }
    }
    Ok(PartitionLevelTable {
        level: table.level + 1,
        circumference: table.circumference,
        endpoints: out,
    })
}

/// A validated partition with its map `g`, slopes and a cache of derived
/// tables.
#[derive(Debug)]
pub struct MarkovSystem {
    partition: AffineMarkovPartition,
    g: CircleMap,
    endpoints: Vec<Rational>,
    slopes: Vec<Rational>,
    base_breaks: Vec<i64>,
    power: Option<u32>,
    tables: RwLock<Vec<Arc<PartitionLevelTable>>>,
}

impl MarkovSystem {
    pub fn new(partition: AffineMarkovPartition) -> Result<Self> {
        let (g, _) = partition.validate_and_build_g()?;
        let n = partition.base();
        let p = partition.len();
        let slopes: Vec<Rational> = (0..p).map(|i| partition.slope(i)).collect();
        let base_breaks = (0..p)
            .map(|i| {
                let left = &slopes[(i + p - 1) % p];
                power_of(&(&slopes[i] / left), n).expect("slopes are powers of n")
            })
            .collect();
        let endpoints = partition.endpoints();
        let base_table = PartitionLevelTable {
            level: 0,
            circumference: n as u64 - 1,
            endpoints: endpoints.clone(),
        };
        Ok(Self {
            power: partition.power_form(),
            partition,
            g,
            endpoints,
            slopes,
            base_breaks,
            tables: RwLock::new(vec![Arc::new(base_table)]),
        })
    }

    pub fn from_lengths(base: u32, lengths: Vec<u64>) -> Result<Self> {
        Self::new(AffineMarkovPartition::new(base, lengths)?)
    }

    pub fn partition(&self) -> &AffineMarkovPartition {
        &self.partition
    }

    pub fn g(&self) -> &CircleMap {
        &self.g
    }

    pub fn base(&self) -> u32 {
        self.partition.base()
    }

    pub fn circumference(&self) -> u64 {
        self.base() as u64 - 1
    }

    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    pub fn power_form(&self) -> Option<u32> {
        self.power
    }

    pub fn require_power_form(&self) -> Result<u32> {
        self.power.ok_or(Error::NotPowerForm { intervals: self.len() })
    }

    pub fn slope(&self, j: u64) -> &Rational {
        &self.slopes[(j % self.len() as u64) as usize]
    }

    /// Break value of `g` at base endpoint `x_i`.
    pub fn base_break(&self, i: usize) -> i64 {
        self.base_breaks[i % self.len()]
    }

    /// Base indices where `g` breaks, with their values.
    pub fn break_indices(&self) -> Vec<(usize, i64)> {
        self.base_breaks
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0)
            .map(|(i, b)| (i, *b))
            .collect()
    }

    /// Lifted base endpoint `X(j)`.
    pub fn x(&self, j: u64) -> Rational {
        let p = self.len() as u64;
        &self.endpoints[(j % p) as usize] + int(((j / p) * self.circumference()) as i64)
    }

    /// Number of intervals after `depth` derivations.
    pub fn depth_period(&self, depth: u32) -> Result<u64> {
        (self.base() as u64)
            .checked_pow(depth)
            .and_then(|f| f.checked_mul(self.len() as u64))
            .ok_or(Error::BudgetExceeded { steps: depth as usize })
    }

    /// Endpoint `idx` of the `depth`-times derived partition, lifted when
    /// `idx` runs past one period.
    pub fn value_at(&self, idx: u64, depth: u32) -> Rational {
        let n = self.base() as u64;
        let e = trailing_zeros(idx, self.base()).min(depth);
        let mut value = self.x(idx / n.pow(e));
        for dd in e + 1..=depth {
            let j = idx / n.pow(dd);
            value = self.x(j) + (value - self.x(n * j)) / self.slope(j);
        }
        value
    }

    /// Break of `g` at endpoint `idx` of the `depth`-derived partition.
    pub fn break_at(&self, idx: u64, depth: u32) -> i64 {
        let f = (self.base() as u64).pow(depth);
        if idx.is_multiple_of(f) {
            self.base_break(((idx / f) % self.len() as u64) as usize)
        } else {
            0
        }
    }

    /// `(index, derivation depth)` for a vertex reference.
    ///
    /// In power form the level counts standard-partition levels, so the base
    /// table is level `m`; otherwise the level is the derivation depth.
    pub fn locate(&self, v: VertexRef) -> (u64, u32) {
        match self.power {
            Some(m) if v.level <= m => (v.index * (self.base() as u64).pow(m - v.level), 0),
            Some(m) => (v.index, v.level - m),
            None => (v.index, v.level),
        }
    }

    /// Vertex count at `level`.
    pub fn level_period(&self, level: u32) -> Result<u64> {
        let n = self.base() as u64;
        match self.power {
            Some(_) => n
                .checked_pow(level)
                .and_then(|f| f.checked_mul(n - 1))
                .ok_or(Error::BudgetExceeded { steps: level as usize }),
            None => self.depth_period(level),
        }
    }

    pub fn vertex_value(&self, v: VertexRef) -> Rational {
        let (idx, depth) = self.locate(v);
        self.value_at(idx, depth)
    }

    pub fn vertex_break(&self, v: VertexRef) -> i64 {
        let (idx, depth) = self.locate(v);
        self.break_at(idx, depth)
    }

    /// The table after `depth` derivations, built on demand and cached.
    pub fn table(&self, depth: u32) -> Result<Arc<PartitionLevelTable>> {
        if let Some(t) = self.tables.read().unwrap().get(depth as usize) {
            return Ok(t.clone());
        }
        self.depth_period(depth)?;
        let mut tables = self.tables.write().unwrap();
        while tables.len() <= depth as usize {
            let next = derive(tables.last().unwrap(), &self.g)?;
            tables.push(Arc::new(next));
        }
        Ok(tables[depth as usize].clone())
    }

    /// Smallest `k ≤ m` such that every break index is divisible by `n^{m−k}`.
    pub fn stable_level(&self) -> Result<u32> {
        let m = self.require_power_form()?;
        let n = self.base();
        let zeros = self
            .break_indices()
            .iter()
            .map(|(i, _)| trailing_zeros(*i as u64, n).min(m))
            .min()
            .unwrap_or(m);
        Ok(m - zeros)
    }

    /// Interval length `L(I_i^k)`.
    pub fn interval_length(&self, v: VertexRef) -> Rational {
        let (idx, depth) = self.locate(v);
        let (next, d2) = self.locate(VertexRef::new(v.index + 1, v.level));
        debug_assert_eq!(depth, d2);
        self.value_at(next, depth) - self.value_at(idx, depth)
    }

    /// The natural slope of the pair `(a, c)`: the ratio of the level-`λ+K`
    /// intervals that start at the two vertices.
    pub fn natural_slope(&self, a: VertexRef, c: VertexRef) -> Result<Rational> {
        let n = self.base();
        let (ja, jc) = (extended_orbit_class(a, n), extended_orbit_class(c, n));
        if ja != jc {
            return Err(Error::ClassMismatch(ja, jc));
        }
        let k = self.stable_level()?;
        let reduce = |v: VertexRef| {
            if v.index == 0 {
                return VertexRef::new(0, 0);
            }
            let z = trailing_zeros(v.index, n).min(v.level);
            VertexRef::new(v.index / (n as u64).pow(z), v.level - z)
        };
        let (a, c) = (reduce(a), reduce(c));
        let nk = (n as u64).pow(k);
        let la = self.interval_length(VertexRef::new(nk * a.index, a.level + k));
        let lc = self.interval_length(VertexRef::new(nk * c.index, c.level + k));
        Ok(lc / la)
    }

    /// `true` iff `g(x_i^k) = x_{ni}^k` for every vertex with `k ≤ level`.
    pub fn orbit_law_holds(&self, level: u32) -> Result<bool> {
        for k in 0..=level {
            let period = self.level_period(k)?;
            for i in 0..period {
                let v = self.vertex_value(VertexRef::new(i, k));
                let w = self.vertex_value(VertexRef::new((self.base() as u64 * i) % period, k));
                if self.g.eval(&v) != w {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl Clone for MarkovSystem {
    fn clone(&self) -> Self {
        Self {
            partition: self.partition.clone(),
            g: self.g.clone(),
            endpoints: self.endpoints.clone(),
            slopes: self.slopes.clone(),
            base_breaks: self.base_breaks.clone(),
            power: self.power,
            tables: RwLock::new(self.tables.read().unwrap().clone()),
        }
    }
}
