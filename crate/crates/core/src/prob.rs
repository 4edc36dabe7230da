//! Exact arbitrary-precision rational values.
//!
//! All laws in this crate are computed in `Rat` (a big-integer rational) with
//! no rounding anywhere; `Prob` is the subtype restricted to the unit
//! interval. Floats appear only in Monte-Carlo reporting, through explicit
//! conversions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact rational number, unbounded precision.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// 2^k as a rational, k may be negative.
pub fn pow2(k: i64) -> Rat {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(BigInt::one(), p)
    }
}

pub fn factorial(n: usize) -> BigInt {
    let mut out = BigInt::one();
    for k in 2..=n {
        out *= BigInt::from(k);
    }
    out
}

/// M (M-1) ... (M-m+1).
pub fn falling_factorial(m_total: usize, m_terms: usize) -> BigInt {
    assert!(m_terms <= m_total);
    let mut out = BigInt::one();
    for k in 0..m_terms {
        out *= BigInt::from(m_total - k);
    }
    out
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    Rat::from_str(s.trim()).map_err(|e| Error::Parse(format!("invalid rational {s:?}: {e}")))
}

/// An exact probability: a rational confined to the unit interval.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prob(Rat);

impl Prob {
    pub fn new(value: Rat) -> Result<Self, Error> {
        if value.is_negative() || value > Rat::one() {
            return Err(Error::Parse(format!("probability {value} outside [0,1]")));
        }
        Ok(Prob(value))
    }

    /// Wraps a value that is in range by construction; panics otherwise.
    pub fn expect(value: Rat) -> Self {
        Prob::new(value).expect("probability outside [0,1]")
    }

    pub fn zero() -> Self {
        Prob(Rat::zero())
    }

    pub fn one() -> Self {
        Prob(Rat::one())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Prob::expect(rat(num, den))
    }

    pub fn rat(&self) -> &Rat {
        &self.0
    }

    pub fn into_rat(self) -> Rat {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Lossy conversion for Monte-Carlo reporting.
    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.0)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prob({})", self.0)
    }
}

impl FromStr for Prob {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Prob::new(parse_rat(s)?)
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serialize any rational as a `num/den` string (for report payloads).
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}
