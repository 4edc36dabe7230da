//! Infinite binary strings.
//!
//! An infinite string is anything that can answer "what is bit i": the
//! [`BitStream`] trait. Concrete atoms are eventually periodic and kept in a
//! normal form (primitive period, minimal preperiod) so equality and
//! separation depth are exact decisions rather than bounded probes.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::word::Word;

/// Default probe depth for black-box streams before two inputs are declared
/// duplicates. Distinctness of opaque oracles is only semi-decidable.
pub const DEFAULT_PROBE_DEPTH: usize = 4096;

/// A deterministic prefix oracle for an element of {0,1}^infinity.
pub trait BitStream {
    fn bit_at(&self, i: usize) -> u8;

    /// First k bits, as a word.
    fn prefix(&self, k: usize) -> Word {
        let bits: Vec<u8> = (0..k).map(|i| self.bit_at(i)).collect();
        Word::from_bits(&bits)
    }

    /// A depth by which `self` and `other` must differ if they are distinct,
    /// when one can be computed exactly. `None` means equality is only
    /// semi-decidable and callers fall back to their probe cap.
    fn decision_bound(&self, _other: &Self) -> Option<usize>
    where
        Self: Sized,
    {
        None
    }
}

impl<F: Fn(usize) -> u8> BitStream for F {
    fn bit_at(&self, i: usize) -> u8 {
        let b = self(i);
        assert!(b <= 1, "bit oracle returned {b}");
        b
    }
}

/// A finite word probed as a stream. Only valid while probes stay inside the
/// word; callers must guarantee separation happens before the end.
impl BitStream for Word {
    fn bit_at(&self, i: usize) -> u8 {
        self.bit(i)
    }

    fn decision_bound(&self, other: &Self) -> Option<usize> {
        Some(self.len().min(other.len()))
    }
}

/// An eventually periodic infinite string `pre (period)^infinity`.
///
/// Values are normalized on construction: the period is primitive (not a
/// power of a shorter word) and the preperiod is as short as possible, so
/// structural equality coincides with equality of the infinite strings.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventuallyPeriodic {
    pre: Vec<u8>,
    period: Vec<u8>,
}

impl EventuallyPeriodic {
    pub fn new(pre: &[u8], period: &[u8]) -> Result<Self, Error> {
        if period.is_empty() {
            return Err(Error::Parse("period must be nonempty".to_string()));
        }
        if pre.iter().chain(period.iter()).any(|&b| b > 1) {
            return Err(Error::Parse("bits must be 0 or 1".to_string()));
        }
        let mut s = EventuallyPeriodic {
            pre: pre.to_vec(),
            period: period.to_vec(),
        };
        s.normalize();
        Ok(s)
    }

    /// The all-`bit` constant string, e.g. 000...
    pub fn constant(bit: u8) -> Self {
        EventuallyPeriodic::new(&[], &[bit]).unwrap()
    }

    fn normalize(&mut self) {
        // primitive period: shortest d | len with period = period[..d] repeated
        let len = self.period.len();
        for d in 1..len {
            if len.is_multiple_of(d) && self.period.chunks(d).all(|c| c == &self.period[..d]) {
                self.period.truncate(d);
                break;
            }
        }
        // minimal preperiod: absorb trailing preperiod bits into the period
        while let Some(&last) = self.pre.last() {
            if self.period.last() == Some(&last) {
                self.pre.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.pre
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// Depth by which this string and `other` must have disagreed if they are
    /// distinct: past the longer preperiod both are periodic with the lcm of
    /// the period lengths, so agreement over one full window implies equality.
    pub fn decision_depth(&self, other: &Self) -> usize {
        let pre = self.pre.len().max(other.pre.len());
        pre + self.period.len().lcm(&other.period.len())
    }

    /// Index of the first differing bit, or `None` if the strings are equal.
    pub fn separation(&self, other: &Self) -> Option<usize> {
        (0..self.decision_depth(other)).find(|&i| self.bit_at(i) != other.bit_at(i))
    }

    /// Whether `w` is a prefix of this string.
    pub fn has_prefix(&self, w: &Word) -> bool {
        (0..w.len()).all(|i| self.bit_at(i) == w.bit(i))
    }
}

impl BitStream for EventuallyPeriodic {
    fn bit_at(&self, i: usize) -> u8 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    fn decision_bound(&self, other: &Self) -> Option<usize> {
        Some(self.decision_depth(other))
    }
}

impl fmt::Display for EventuallyPeriodic {
    /// Canonical text form `pre(period)`, e.g. `(0)` for 000... and `01(10)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.pre {
            write!(f, "{b}")?;
        }
        write!(f, "(")?;
        for &b in &self.period {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for EventuallyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EventuallyPeriodic({self})")
    }
}

impl FromStr for EventuallyPeriodic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(format!("invalid string {s:?}: expected pre(period)"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let parse_bits = |part: &str| -> Result<Vec<u8>, Error> {
            part.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(bad()),
                })
                .collect()
        };
        let pre = parse_bits(&s[..open])?;
        let period = parse_bits(&s[open + 1..s.len() - 1])?;
        EventuallyPeriodic::new(&pre, &period)
    }
}

impl Serialize for EventuallyPeriodic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EventuallyPeriodic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
