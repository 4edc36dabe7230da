//! Probability measures on {0,1}^infinity with exactly computable cylinder
//! masses.
//!
//! Four base families (Bernoulli, two-state Markov, dyadic step densities,
//! finitely many eventually periodic atoms) plus finite mixtures. Every
//! parameter is rational, so every cylinder mass (and everything downstream
//! in the transition laws) is exact. Degenerate parameters that would smuggle
//! an atom into a "diffuse" family are rejected at construction.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{pow2, Prob, Rat};
use crate::rng::bernoulli_exact;
use crate::strings::EventuallyPeriodic;
use crate::word::Word;

/// A point mass at an eventually periodic string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub s: EventuallyPeriodic,
    pub mass: Prob,
}

/// A source measure for the input strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub enum SourceMeasure {
    /// I.i.d. bits, P{bit = 1} = p1, with 0 < p1 < 1.
    Bernoulli { p1: Prob },
    /// Two-state Markov bits: initial distribution and transition matrix
    /// (rows sum to one, entries strictly inside (0,1)).
    Markov {
        init: [Prob; 2],
        trans: [[Prob; 2]; 2],
    },
    /// Step density on dyadic intervals: weight of each depth-d cell,
    /// uniform inside cells.
    DyadicDensity { depth: u32, weights: Vec<Prob> },
    /// Purely atomic with finitely many eventually periodic atoms.
    Atomic { atoms: Vec<Atom> },
    /// Finite convex mixture of measures.
    Mixture { parts: Vec<(Prob, SourceMeasure)> },
}

/// Untyped mirror used for (de)serialization so that every decoded value
/// passes validation.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum RawMeasure {
    Bernoulli {
        p1: Prob,
    },
    Markov {
        init: [Prob; 2],
        trans: [[Prob; 2]; 2],
    },
    DyadicDensity {
        depth: u32,
        weights: Vec<Prob>,
    },
    Atomic {
        atoms: Vec<Atom>,
    },
    Mixture {
        parts: Vec<RawPart>,
    },
}

#[derive(Clone, Serialize, Deserialize)]
struct RawPart {
    w: Prob,
    m: RawMeasure,
}

impl TryFrom<RawMeasure> for SourceMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        match raw {
            RawMeasure::Bernoulli { p1 } => SourceMeasure::bernoulli(p1),
            RawMeasure::Markov { init, trans } => SourceMeasure::markov(init, trans),
            RawMeasure::DyadicDensity { depth, weights } => {
                SourceMeasure::dyadic_density(depth, weights)
            }
            RawMeasure::Atomic { atoms } => SourceMeasure::atomic(atoms),
            RawMeasure::Mixture { parts } => {
                let parts = parts
                    .into_iter()
                    .map(|p| Ok((p.w, SourceMeasure::try_from(p.m)?)))
                    .collect::<Result<Vec<_>>>()?;
                SourceMeasure::mixture(parts)
            }
        }
    }
}

impl From<SourceMeasure> for RawMeasure {
    fn from(m: SourceMeasure) -> RawMeasure {
        match m {
            SourceMeasure::Bernoulli { p1 } => RawMeasure::Bernoulli { p1 },
            SourceMeasure::Markov { init, trans } => RawMeasure::Markov { init, trans },
            SourceMeasure::DyadicDensity { depth, weights } => {
                RawMeasure::DyadicDensity { depth, weights }
            }
            SourceMeasure::Atomic { atoms } => RawMeasure::Atomic { atoms },
            SourceMeasure::Mixture { parts } => RawMeasure::Mixture {
                parts: parts
                    .into_iter()
                    .map(|(w, m)| RawPart { w, m: m.into() })
                    .collect(),
            },
        }
    }
}

fn check_sums_to_one(what: &str, values: &[&Prob]) -> Result<()> {
    let total: Rat = values.iter().map(|p| p.rat()).sum();
    if total.is_one() {
        Ok(())
    } else {
        Err(Error::InvalidMeasure(format!("{what} must sum to 1, got {total}")))
    }
}

impl SourceMeasure {
    /// The fair coin-tossing measure.
    pub fn fair_coin() -> Self {
        SourceMeasure::Bernoulli {
            p1: Prob::from_ratio(1, 2),
        }
    }

    pub fn bernoulli(p1: Prob) -> Result<Self> {
        if p1.is_zero() || p1.is_one() {
            return Err(Error::InvalidMeasure(
                "bernoulli p1 must lie strictly inside (0,1); a degenerate \
                 coin is an atom"
                    .to_string(),
            ));
        }
        Ok(SourceMeasure::Bernoulli { p1 })
    }

    pub fn markov(init: [Prob; 2], trans: [[Prob; 2]; 2]) -> Result<Self> {
        check_sums_to_one("markov initial distribution", &[&init[0], &init[1]])?;
        for row in &trans {
            check_sums_to_one("markov transition rows", &[&row[0], &row[1]])?;
            if row.iter().any(|p| p.is_zero() || p.is_one()) {
                return Err(Error::InvalidMeasure(
                    "markov transitions must lie strictly inside (0,1) to \
                     keep the measure diffuse"
                        .to_string(),
                ));
            }
        }
        Ok(SourceMeasure::Markov { init, trans })
    }

    pub fn dyadic_density(depth: u32, weights: Vec<Prob>) -> Result<Self> {
        if depth > 20 {
            return Err(Error::InvalidMeasure(format!(
                "dyadic density depth {depth} too large (max 20)"
            )));
        }
        if weights.len() != 1 << depth {
            return Err(Error::InvalidMeasure(format!(
                "dyadic density at depth {depth} needs {} weights, got {}",
                1u64 << depth,
                weights.len()
            )));
        }
        check_sums_to_one("dyadic cell weights", &weights.iter().collect::<Vec<_>>())?;
        Ok(SourceMeasure::DyadicDensity { depth, weights })
    }

    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("atomic measure needs atoms".to_string()));
        }
        if atoms.iter().any(|a| a.mass.is_zero()) {
            return Err(Error::InvalidMeasure("atom masses must be positive".to_string()));
        }
        check_sums_to_one("atom masses", &atoms.iter().map(|a| &a.mass).collect::<Vec<_>>())?;
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                if atoms[i].s == atoms[j].s {
                    return Err(Error::InvalidMeasure(format!(
                        "atoms {} and {} coincide after normalization",
                        atoms[i].s, atoms[j].s
                    )));
                }
            }
        }
        Ok(SourceMeasure::Atomic { atoms })
    }

    pub fn mixture(parts: Vec<(Prob, SourceMeasure)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidMeasure("mixture needs parts".to_string()));
        }
        if parts.iter().any(|(w, _)| w.is_zero()) {
            return Err(Error::InvalidMeasure("mixture weights must be positive".to_string()));
        }
        check_sums_to_one(
            "mixture weights",
            &parts.iter().map(|(w, _)| w).collect::<Vec<_>>(),
        )?;
        Ok(SourceMeasure::Mixture { parts })
    }

    /// Exact mass of the cylinder of all strings extending `y`.
    pub fn cylinder_mass(&self, y: &Word) -> Prob {
        Prob::expect(self.cylinder_rat(y))
    }

    fn cylinder_rat(&self, y: &Word) -> Rat {
        match self {
            SourceMeasure::Bernoulli { p1 } => {
                let p1 = p1.rat();
                let p0 = Rat::one() - p1;
                y.bits()
                    .iter()
                    .map(|&b| if b == 1 { p1.clone() } else { p0.clone() })
                    .product()
            }
            SourceMeasure::Markov { init, trans } => {
                if y.is_empty() {
                    return Rat::one();
                }
                let mut mass = init[y.bit(0) as usize].rat().clone();
                for i in 1..y.len() {
                    mass *= trans[y.bit(i - 1) as usize][y.bit(i) as usize].rat();
                }
                mass
            }
            SourceMeasure::DyadicDensity { depth, weights } => {
                let d = *depth as usize;
                if y.len() <= d {
                    // sum of the 2^(d-|y|) cells below y
                    let lo = word_index(y) << (d - y.len());
                    let count = 1usize << (d - y.len());
                    weights[lo..lo + count].iter().map(|p| p.rat()).sum()
                } else {
                    // inside one cell the measure is uniform
                    let cell = word_index(&y.prefix(d));
                    weights[cell].rat() * pow2(d as i64 - y.len() as i64)
                }
            }
            SourceMeasure::Atomic { atoms } => atoms
                .iter()
                .filter(|a| a.s.has_prefix(y))
                .map(|a| a.mass.rat())
                .sum(),
            SourceMeasure::Mixture { parts } => parts
                .iter()
                .map(|(w, m)| w.rat() * m.cylinder_rat(y))
                .sum(),
        }
    }

    /// All point masses, aggregated across mixture components and sorted.
    pub fn atoms(&self) -> Vec<(EventuallyPeriodic, Rat)> {
        let mut acc: BTreeMap<EventuallyPeriodic, Rat> = BTreeMap::new();
        self.collect_atoms(&Rat::one(), &mut acc);
        acc.into_iter().collect()
    }

    fn collect_atoms(&self, weight: &Rat, acc: &mut BTreeMap<EventuallyPeriodic, Rat>) {
        match self {
            SourceMeasure::Atomic { atoms } => {
                for a in atoms {
                    let m = weight * a.mass.rat();
                    acc.entry(a.s.clone())
                        .and_modify(|v| *v += &m)
                        .or_insert(m);
                }
            }
            SourceMeasure::Mixture { parts } => {
                for (w, m) in parts {
                    m.collect_atoms(&(weight * w.rat()), acc);
                }
            }
            _ => {}
        }
    }

    /// Diffuse components with their compound mixture weights.
    pub fn diffuse_parts(&self) -> Vec<(Rat, &SourceMeasure)> {
        let mut out = Vec::new();
        self.collect_diffuse(&Rat::one(), &mut out);
        out
    }

    fn collect_diffuse<'m>(&'m self, weight: &Rat, out: &mut Vec<(Rat, &'m SourceMeasure)>) {
        match self {
            SourceMeasure::Atomic { .. } => {}
            SourceMeasure::Mixture { parts } => {
                for (w, m) in parts {
                    m.collect_diffuse(&(weight * w.rat()), out);
                }
            }
            _ => out.push((weight.clone(), self)),
        }
    }

    /// A measure is diffuse iff its total atomic weight is zero.
    pub fn is_diffuse(&self) -> bool {
        self.atoms().is_empty()
    }

    /// Probability that two independent draws from the measure restricted to
    /// the cylinder of `y` coincide: sum of squared conditional atom masses.
    /// Zero-mass cylinders return 0 by convention.
    pub fn collision_mass(&self, y: &Word) -> Prob {
        let denom = self.cylinder_rat(y);
        if denom.is_zero() {
            return Prob::zero();
        }
        let sum_sq: Rat = self
            .atoms()
            .into_iter()
            .filter(|(a, _)| a.has_prefix(y))
            .map(|(_, m)| &m * &m)
            .sum();
        Prob::expect(sum_sq / (&denom * &denom))
    }

    /// One step of the lazy realization of a draw: the next bit after
    /// `prefix`, with the exact conditional law.
    pub fn sample_next_bit(&self, prefix: &Word, rng: &mut impl Rng) -> Result<u8> {
        let denom = self.cylinder_rat(prefix);
        if denom.is_zero() {
            return Err(Error::ZeroMassPrefix {
                prefix: prefix.to_string(),
            });
        }
        let p1 = self.cylinder_rat(&prefix.child(1)) / denom;
        Ok(bernoulli_exact(&p1, rng) as u8)
    }

    /// A stateful sampler realizing one draw bit by bit. Consumes randomness
    /// exactly as repeated `sample_next_bit` calls would.
    pub fn sampler(&self) -> LazySampler<'_> {
        let law = match self {
            SourceMeasure::Bernoulli { p1 } => NextBitLaw::Bernoulli {
                p1: p1.rat().clone(),
            },
            SourceMeasure::Markov { init, trans } => NextBitLaw::Markov {
                init_p1: init[1].rat().clone(),
                trans_p1: [trans[0][1].rat().clone(), trans[1][1].rat().clone()],
            },
            _ => NextBitLaw::Generic,
        };
        LazySampler {
            measure: self,
            law,
            bits: Vec::new(),
        }
    }
}

fn word_index(y: &Word) -> usize {
    y.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

enum NextBitLaw {
    Bernoulli { p1: Rat },
    Markov { init_p1: Rat, trans_p1: [Rat; 2] },
    Generic,
}

/// Lazily realizes one string drawn from a measure.
pub struct LazySampler<'m> {
    measure: &'m SourceMeasure,
    law: NextBitLaw,
    bits: Vec<u8>,
}

impl LazySampler<'_> {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn next_bit(&mut self, rng: &mut impl Rng) -> Result<u8> {
        let p1 = match &self.law {
            NextBitLaw::Bernoulli { p1 } => p1.clone(),
            NextBitLaw::Markov { init_p1, trans_p1 } => match self.bits.last() {
                None => init_p1.clone(),
                Some(&b) => trans_p1[b as usize].clone(),
            },
            NextBitLaw::Generic => {
                let prefix = Word::from_bits(&self.bits);
                let denom = self.measure.cylinder_rat(&prefix);
                if denom.is_zero() {
                    return Err(Error::ZeroMassPrefix {
                        prefix: prefix.to_string(),
                    });
                }
                self.measure.cylinder_rat(&prefix.child(1)) / denom
            }
        };
        let bit = bernoulli_exact(&p1, rng) as u8;
        self.bits.push(bit);
        Ok(bit)
    }

    /// Bit at position `i`, extending the realization as needed.
    pub fn bit_at(&mut self, i: usize, rng: &mut impl Rng) -> Result<u8> {
        while self.bits.len() <= i {
            self.next_bit(rng)?;
        }
        Ok(self.bits[i])
    }
}

/// Helper for the measures used throughout tests and the demonstration
/// command: two-atom measures and the fair coin.
pub fn two_atom_measure(a: &str, mass_a: Prob, b: &str) -> SourceMeasure {
    let mass_b = Prob::expect(Rat::one() - mass_a.rat());
    SourceMeasure::atomic(vec![
        Atom {
            s: a.parse().expect("atom string"),
            mass: mass_a,
        },
        Atom {
            s: b.parse().expect("atom string"),
            mass: mass_b,
        },
    ])
    .expect("valid two-atom measure")
}
