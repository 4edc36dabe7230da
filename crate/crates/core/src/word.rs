//! Finite binary words, doubling as Ulam-Harris addresses of tree vertices.
//!
//! The derived `Ord` on the underlying bit vector is lexicographic with
//! shorter-prefix-first, so a word always sorts immediately before its
//! extensions. Canonical forms elsewhere in the crate rely on that.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A finite string over {0,1}, possibly empty.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    bits: Vec<u8>,
}

impl Word {
    /// The empty word (tree root).
    pub fn root() -> Self {
        Word { bits: Vec::new() }
    }

    /// Builds a word from a slice of bits; every entry must be 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "word bits must be 0 or 1");
        Word {
            bits: bits.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn last_bit(&self) -> Option<u8> {
        self.bits.last().copied()
    }

    /// `self` followed by one extra bit.
    pub fn child(&self, bit: u8) -> Word {
        assert!(bit <= 1);
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.extend_from_slice(&self.bits);
        bits.push(bit);
        Word { bits }
    }

    /// `self` followed by all of `suffix`.
    pub fn concat(&self, suffix: &Word) -> Word {
        let mut bits = Vec::with_capacity(self.bits.len() + suffix.bits.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&suffix.bits);
        Word { bits }
    }

    /// Drops the last bit; `None` at the root.
    pub fn parent(&self) -> Option<Word> {
        if self.bits.is_empty() {
            None
        } else {
            Some(Word {
                bits: self.bits[..self.bits.len() - 1].to_vec(),
            })
        }
    }

    /// Same parent, flipped last bit; `None` at the root.
    pub fn sibling(&self) -> Option<Word> {
        let mut bits = self.bits.clone();
        let last = bits.last_mut()?;
        *last = 1 - *last;
        Some(Word { bits })
    }

    /// Prefix order: `self` is an initial segment of `other` (equality included).
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.bits.len() <= other.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    /// Strict prefix order `self < other`.
    pub fn is_strict_prefix_of(&self, other: &Word) -> bool {
        self.bits.len() < other.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    /// Longest common prefix (the meet in the prefix order).
    pub fn meet(&self, other: &Word) -> Word {
        let n = self
            .bits
            .iter()
            .zip(other.bits.iter())
            .take_while(|(a, b)| a == b)
            .count();
        Word {
            bits: self.bits[..n].to_vec(),
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        assert!(len <= self.bits.len());
        Word {
            bits: self.bits[..len].to_vec(),
        }
    }
}

impl fmt::Display for Word {
    /// Text form: the bit string, or `e` for the empty word.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return write!(f, "e");
        }
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "e" {
            return Ok(Word::root());
        }
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(Error::Parse(format!(
                        "invalid word {s:?}: expected bits or `e`"
                    )))
                }
            }
        }
        if bits.is_empty() {
            return Err(Error::Parse(
                "empty word must be written `e`".to_string(),
            ));
        }
        Ok(Word { bits })
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
