//! Serde helpers writing rationals as `"a/b"` strings.

use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serializer};

use crate::arith::{parse_rational, Rational};

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub mod rationals {
    use super::*;

    pub fn serialize<S: Serializer>(qs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(qs.iter().map(|q| q.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn opt_pair<S: Serializer>(pair: &Option<(Rational, Rational)>, s: S) -> Result<S::Ok, S::Error> {
    match pair {
        None => s.serialize_none(),
        Some((a, b)) => {
            let mut t = s.serialize_tuple(2)?;
            t.serialize_element(&a.to_string())?;
            t.serialize_element(&b.to_string())?;
            t.end()
        }
    }
}
