use serde::{Deserialize, Serialize};

use super::{CircleMap, LineMap, Piece};
use crate::arith::{parse_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub slope: String,
    pub intercept: String,
}

/// File format for a map. Rationals are strings `"a/b"`.
///
/// Circle maps list the cut points of the fundamental domain `[0, r)` and
/// one piece per cut; line maps list their bounded pieces here and the two
/// unbounded ones in `left_end` / `right_end`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapRecord {
    pub space: String,
    pub circumference: Option<u64>,
    pub degree: u64,
    pub breakpoints: Vec<String>,
    pub pieces: Vec<PieceRecord>,
    pub orientation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_end: Option<PieceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_end: Option<PieceRecord>,
}

impl From<&Piece> for PieceRecord {
    fn from(p: &Piece) -> Self {
        Self {
            slope: p.slope.to_string(),
            intercept: p.intercept.to_string(),
        }
    }
}

impl PieceRecord {
    fn parse(&self) -> Result<Piece> {
        Ok(Piece::new(parse_rational(&self.slope)?, parse_rational(&self.intercept)?))
    }
}

fn parse_all(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|s| parse_rational(s)).collect()
}

impl Serialize for CircleMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl Serialize for LineMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl CircleMap {
    pub fn to_record(&self) -> MapRecord {
        MapRecord {
            space: "circle".into(),
            circumference: Some(self.circumference),
            degree: self.degree,
            breakpoints: self.cuts.iter().map(|c| c.to_string()).collect(),
            pieces: self.pieces.iter().map(PieceRecord::from).collect(),
            orientation: "preserving".into(),
            left_end: None,
            right_end: None,
        }
    }

    pub fn from_record(rec: &MapRecord) -> Result<Self> {
        if rec.space != "circle" {
            return Err(Error::Parse("expected a circle map".into()));
        }
        let r = rec
            .circumference
            .ok_or_else(|| Error::Parse("circle map needs a circumference".into()))?;
        let cuts = parse_all(&rec.breakpoints)?;
        if cuts.len() != rec.pieces.len() {
            return Err(Error::Parse("need one piece per cut".into()));
        }
        let mut ends: Vec<Rational> = cuts.iter().skip(1).cloned().collect();
        ends.push(Rational::from_integer(r.into()));
        let segments = cuts
            .into_iter()
            .zip(ends)
            .zip(&rec.pieces)
            .map(|((a, b), p)| p.parse().map(|p| (a, b, p)))
            .collect::<Result<Vec<_>>>()?;
        CircleMap::from_segments(r, rec.degree, segments)
    }
}

impl LineMap {
    pub fn to_record(&self) -> MapRecord {
        let k = self.pieces.len();
        MapRecord {
            space: "line".into(),
            circumference: None,
            degree: 1,
            breakpoints: self.breakpoints.iter().map(|b| b.to_string()).collect(),
            pieces: self.pieces[1..k.saturating_sub(1).max(1)]
                .iter()
                .map(PieceRecord::from)
                .collect(),
            orientation: if self.reversed { "reversing" } else { "preserving" }.into(),
            left_end: Some(PieceRecord::from(&self.pieces[0])),
            right_end: Some(PieceRecord::from(&self.pieces[k - 1])),
        }
    }

    pub fn from_record(rec: &MapRecord) -> Result<Self> {
        if rec.space != "line" {
            return Err(Error::Parse("expected a line map".into()));
        }
        let breakpoints = parse_all(&rec.breakpoints)?;
        let left = rec
            .left_end
            .as_ref()
            .ok_or_else(|| Error::Parse("line map needs left_end".into()))?
            .parse()?;
        let right = rec
            .right_end
            .as_ref()
            .ok_or_else(|| Error::Parse("line map needs right_end".into()))?
            .parse()?;
        let reversed = match rec.orientation.as_str() {
            "preserving" => false,
            "reversing" => true,
            other => return Err(Error::Parse(format!("unknown orientation {other:?}"))),
        };
        let mut pieces = vec![left];
        if breakpoints.is_empty() {
            if pieces[0] != right || !rec.pieces.is_empty() {
                return Err(Error::Parse("an affine line map has equal end pieces".into()));
            }
        } else {
            for p in &rec.pieces {
                pieces.push(p.parse()?);
            }
            pieces.push(right);
        }
        LineMap::new(breakpoints, pieces, reversed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn circle_round_trip() {
        let f = CircleMap::from_segments(
            1,
            1,
            vec![
                (rat(0, 1), rat(1, 2), Piece::new(rat(1, 2), rat(1, 8))),
                (rat(1, 2), int(1), Piece::new(rat(3, 2), rat(-3, 8))),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&f.to_record()).unwrap();
        let back: MapRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(CircleMap::from_record(&back).unwrap(), f);
        assert!(json.contains("\"1/8\""));
    }

    #[test]
    fn line_round_trip() {
        let f = LineMap::new(
            vec![int(0), int(1)],
            vec![Piece::identity(), Piece::new(int(2), int(0)), Piece::translation(int(1))],
            true,
        )
        .unwrap();
        let rec = f.to_record();
        assert_eq!(rec.pieces.len(), 1);
        assert_eq!(LineMap::from_record(&rec).unwrap(), f);
        let id = LineMap::identity();
        assert_eq!(LineMap::from_record(&id.to_record()).unwrap(), id);
    }
}
