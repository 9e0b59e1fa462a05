use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{PflError, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Accepts `p`, `-p`, `p/q`; surrounding whitespace is ignored.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(PflError::Parse("empty rational".into()));
    }
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| PflError::Parse(format!("bad rational `{t}`")))?;
    let d = BigInt::from_str(d).map_err(|_| PflError::Parse(format!("bad rational `{t}`")))?;
    if d.is_zero() {
        return Err(PflError::DivisionByZero);
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A point of a chart, given by exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint(pub Vec<Rational>);

impl RationalPoint {
    pub fn origin(dim: usize) -> Self {
        RationalPoint(vec![Rational::zero(); dim])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RationalPoint(v.iter().map(|&x| rat(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    /// Comma separated list of rationals.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(RationalPoint(Vec::new()));
        }
        t.split(',').map(parse_rational).collect::<Result<Vec<_>>>().map(RationalPoint)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.0.len() != dim {
            return Err(PflError::PointDimension { expected: dim, found: self.0.len() });
        }
        Ok(())
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(format_rational).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map(RationalPoint)
            .map_err(serde::de::Error::custom)
    }
}
