//! Explicit members of `BPL_n` and `BT_{n,r}` with prescribed values.
//!
//! Everything is built from one move: cut two n-adic intervals with the
//! same digit-sum residue into equally many pieces of power-of-n length
//! and map the pieces across in order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{ceil, check_base, floor, in_delta, int, phi_rational, pow_n, reduce_mod, to_nadic, Rational};
use crate::error::{Error, Result};
use crate::pl::{d_n, CircleMap, LineMap, Piece, PlMap};

/// Base-n digit decomposition of a positive n-adic length, largest first.
pub fn digit_pieces(len: &Rational, n: u32) -> Result<Vec<Rational>> {
    let x = to_nadic(len, n)
        .filter(|_| len.is_positive())
        .ok_or_else(|| Error::BadLength(format!("{len} is not a positive n-adic length")))?;
    let nb = BigInt::from(n);
    let mut a = x.mantissa().clone();
    let mut digits = Vec::new();
    while !a.is_zero() {
        let (q, d) = a.div_rem(&nb);
        digits.push(d.to_u32().unwrap());
        a = q;
    }
    let mut out = Vec::new();
    for (pos, d) in digits.iter().enumerate().rev() {
        let size = pow_n(n, pos as i64 - x.exponent() as i64);
        out.extend(std::iter::repeat_n(size, *d as usize));
    }
    Ok(out)
}

fn split_longest(pieces: &mut Vec<Rational>, n: u32) {
    let (idx, _) = pieces
        .iter()
        .enumerate()
        .fold((0, &pieces[0]), |best, (i, p)| if p > best.1 { (i, p) } else { best });
    let part = &pieces[idx] / int(n as i64);
    pieces.splice(idx..=idx, std::iter::repeat_n(part, n as usize));
}

/// Cuts lengths `a` and `b` into equally many power-of-n pieces.
///
/// Requires `φ(a) = φ(b)`; each split of one piece into `n` adds `n − 1`
/// pieces, so the counts can always be matched.
pub fn match_subdivisions(a: &Rational, b: &Rational, n: u32) -> Result<(Vec<Rational>, Vec<Rational>)> {
    check_base(n)?;
    if phi_rational(a, n) != phi_rational(b, n) {
        return Err(Error::BadLength(format!("{a} and {b} lie in different cosets")));
    }
    let mut pa = digit_pieces(a, n)?;
    let mut pb = digit_pieces(b, n)?;
    while pa.len() != pb.len() {
        if pa.len() < pb.len() {
            split_longest(&mut pa, n);
        } else {
            split_longest(&mut pb, n);
        }
    }
    Ok((pa, pb))
}

/// Affine pieces carrying `[x0, x0 + Σa)` onto `[y0, y0 + Σb)` piece by piece.
fn bridge(x0: &Rational, y0: &Rational, a: &Rational, b: &Rational, n: u32) -> Result<Vec<(Rational, Rational, Piece)>> {
    let (pa, pb) = match_subdivisions(a, b, n)?;
    let (mut x, mut y) = (x0.clone(), y0.clone());
    let mut out = Vec::with_capacity(pa.len());
    for (la, lb) in pa.iter().zip(&pb) {
        let slope = lb / la;
        let intercept = &y - &slope * &x;
        let next = &x + la;
        out.push((x.clone(), next.clone(), Piece::new(slope, intercept)));
        x = next;
        y += lb;
    }
    Ok(out)
}

/// Line map that is the identity outside the segments and follows them inside.
fn line_from_segments(segments: Vec<(Rational, Rational, Piece)>) -> LineMap {
    let mut breakpoints = Vec::new();
    let mut pieces = vec![Piece::identity()];
    for (start, _, p) in &segments {
        breakpoints.push(start.clone());
        pieces.push(p.clone());
    }
    if let Some((_, end, _)) = segments.last() {
        breakpoints.push(end.clone());
        pieces.push(Piece::identity());
    }
    LineMap::new(breakpoints, pieces, false).expect("segments form a homeomorphism")
}

fn check_increasing(xs: &[Rational]) -> Result<()> {
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        Err(Error::NotIncreasing)
    } else {
        Ok(())
    }
}

/// An element of `BPL_n` with `f(xs[i]) = ys[i]`.
pub fn interpolate_line(n: u32, xs: &[Rational], ys: &[Rational]) -> Result<LineMap> {
    check_base(n)?;
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::BadLength("need equally many, and at least one, points".into()));
    }
    for v in xs.iter().chain(ys) {
        if !in_delta(v, n) {
            return Err(Error::NotInDelta { value: v.clone() });
        }
    }
    check_increasing(xs)?;
    check_increasing(ys)?;
    let pad = int(n as i64 - 1);
    let lo = xs[0].clone().min(ys[0].clone()) - &pad;
    let hi = xs.last().unwrap().clone().max(ys.last().unwrap().clone()) + &pad;
    let mut px = vec![lo.clone()];
    px.extend(xs.iter().cloned());
    px.push(hi.clone());
    let mut py = vec![lo];
    py.extend(ys.iter().cloned());
    py.push(hi);
    let mut segments = Vec::new();
    for i in 0..px.len() - 1 {
        let (a, b) = (&px[i + 1] - &px[i], &py[i + 1] - &py[i]);
        segments.extend(bridge(&px[i], &py[i], &a, &b, n)?);
    }
    Ok(line_from_segments(segments))
}

/// An element of `BPL_n` that agrees with `f` on `[a, b]`.
pub fn match_on_interval(n: u32, f: &LineMap, a: &Rational, b: &Rational) -> Result<LineMap> {
    check_base(n)?;
    if a >= b {
        return Err(Error::NotIncreasing);
    }
    if f.is_reversing() {
        return Err(Error::InvalidMap("orientation-reversing input".into()));
    }
    let residue = d_n(&PlMap::Line(f.clone()), n)?;
    if residue != 0 {
        return Err(Error::NonzeroDn { residue });
    }
    let lo = Rational::from_integer(floor(a));
    let hi = Rational::from_integer(ceil(b));
    let (flo, fhi) = (f.eval(&lo), f.eval(&hi));
    let pad = int(n as i64 - 1);
    let left = Rational::from_integer(floor(&lo.clone().min(flo.clone()))) - &pad;
    let right = Rational::from_integer(ceil(&hi.clone().max(fhi.clone()))) + &pad;

    let mut segments = bridge(&left, &left, &(&lo - &left), &(&flo - &left), n)?;
    let mut cuts = vec![lo.clone()];
    cuts.extend(f.breakpoints().iter().filter(|c| **c > lo && **c < hi).cloned());
    cuts.push(hi.clone());
    for w in cuts.windows(2) {
        segments.push((w[0].clone(), w[1].clone(), f.piece_at(&w[0]).clone()));
    }
    segments.extend(bridge(&hi, &fhi, &(&right - &hi), &(&right - &fhi), n)?);
    Ok(line_from_segments(segments))
}

/// A closed arc `[lo, hi]` of `S_r`, with `hi` allowed past `r` to wrap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub lo: Rational,
    pub hi: Rational,
}

/// Lifts a cyclic sequence to increasing reals starting at its first entry.
fn unroll(values: &[Rational], r: u64) -> Vec<Rational> {
    let base = reduce_mod(&values[0], r);
    values
        .iter()
        .map(|v| &base + reduce_mod(&(v - &base), r))
        .collect()
}

fn grid_step(width: &Rational, n: u32) -> Rational {
    // (n−1)/nᴱ ∈ Δ_n, taken below width/4.
    let quarter = width / int(4);
    let mut e = 0i64;
    while int(n as i64 - 1) * pow_n(n, -e) >= quarter {
        e += 1;
    }
    int(n as i64 - 1) * pow_n(n, -e)
}

/// An element of `BT_{n,r}` taking `points[i]` into `targets[i]`.
pub fn interpolate_circle(n: u32, r: u64, points: &[Rational], targets: &[Arc]) -> Result<CircleMap> {
    check_base(n)?;
    if points.len() != targets.len() || points.is_empty() {
        return Err(Error::BadLength("need one target arc per point".into()));
    }
    let rr = int(r as i64);
    let xs = unroll(points, r);
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadCyclicOrder("points are not distinct and counterclockwise".into()));
    }
    let los: Vec<Rational> = targets.iter().map(|t| t.lo.clone()).collect();
    let starts = unroll(&los, r);
    let arcs: Vec<(Rational, Rational)> = starts
        .iter()
        .zip(targets)
        .map(|(s, t)| (s.clone(), s + (&t.hi - &t.lo)))
        .collect();
    for (i, (lo, hi)) in arcs.iter().enumerate() {
        if lo >= hi || hi - lo >= rr {
            return Err(Error::BadCyclicOrder(format!("target {i} is not a proper arc")));
        }
        let next = arcs.get(i + 1).map(|a| a.0.clone()).unwrap_or_else(|| &arcs[0].0 + &rr);
        if *hi >= next {
            return Err(Error::BadCyclicOrder("targets overlap or are out of order".into()));
        }
    }

    let mut gap = rr.clone();
    for i in 0..xs.len() {
        let next = xs.get(i + 1).cloned().unwrap_or_else(|| &xs[0] + &rr);
        gap = gap.min(next - &xs[i]);
    }
    let h = grid_step(&gap, n);
    let bracket = |x: &Rational| {
        let u = Rational::from_integer(ceil(&(x / &h)) - 1) * &h;
        let v = Rational::from_integer(floor(&(x / &h)) + 1) * &h;
        (u, v)
    };
    let inner = |(lo, hi): &(Rational, Rational)| {
        let step = grid_step(&(hi - lo), n);
        let y = Rational::from_integer(floor(&(lo / &step)) + 1) * &step;
        let y2 = &y + &step;
        (y, y2)
    };
    let us: Vec<(Rational, Rational)> = xs.iter().map(bracket).collect();
    let vs: Vec<(Rational, Rational)> = arcs.iter().map(inner).collect();

    let mut segments = Vec::new();
    let k = xs.len();
    for i in 0..k {
        let (u, v) = &us[i];
        let (y, y2) = &vs[i];
        segments.extend(bridge(u, y, &(v - u), &(y2 - y), n)?);
        let (u_next, y_next) = if i + 1 < k {
            (us[i + 1].0.clone(), vs[i + 1].0.clone())
        } else {
            (&us[0].0 + &rr, &vs[0].0 + &rr)
        };
        segments.extend(bridge(v, y2, &(&u_next - v), &(&y_next - y2), n)?);
    }
    CircleMap::from_segments(r, 1, segments)
}
