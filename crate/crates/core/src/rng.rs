//! Deterministic random streams and exact sampling primitives.
//!
//! Replica r draws from a counter-derived ChaCha stream of the master seed,
//! so results do not depend on scheduling or thread count. Bernoulli and
//! categorical draws compare random bits against exact rational boundaries;
//! no rounding enters the sampled distribution.

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::prob::Rat;

/// RNG for one replica: fixed key from the master seed, stream = replica.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    // splitmix64 expansion of the seed into a 256-bit key
    let mut x = seed;
    for chunk in key.chunks_mut(8) {
        x = x.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = x;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(replica);
    rng
}

/// Exact Bernoulli(p) for rational p: draws a uniform bit string lazily and
/// compares it against the binary expansion of p.
pub fn bernoulli_exact(p: &Rat, rng: &mut impl Rng) -> bool {
    if p >= &Rat::one() {
        return true;
    }
    let mut rest = p.clone();
    loop {
        if rest.is_zero() {
            return false;
        }
        rest *= Rat::from_integer(2.into());
        let expansion_bit = rest >= Rat::one();
        if expansion_bit {
            rest -= Rat::one();
        }
        let random_bit = rng.gen::<bool>();
        if random_bit != expansion_bit {
            // uniform < p exactly when the uniform's bit is the smaller one
            return !random_bit;
        }
    }
}

/// Exact categorical draw over nonnegative rational weights (not all zero):
/// refines a dyadic interval until it fits inside one cumulative slot.
pub fn categorical_exact(weights: &[Rat], rng: &mut impl Rng) -> usize {
    let total: Rat = weights.iter().sum();
    assert!(!total.is_zero(), "categorical needs positive total weight");
    let mut bounds = Vec::with_capacity(weights.len() + 1);
    let mut acc = Rat::zero();
    bounds.push(acc.clone());
    for w in weights {
        acc += w;
        bounds.push(acc.clone());
    }
    let mut lo = Rat::zero();
    let mut hi = total;
    loop {
        // find the slot containing lo; done if the whole interval fits
        let i = bounds.partition_point(|b| b <= &lo) - 1;
        if hi <= bounds[i + 1] {
            return i;
        }
        let mid = (&lo + &hi) / Rat::from_integer(2.into());
        if rng.gen::<bool>() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::rat;

    #[test]
    fn replica_streams_differ_and_reproduce() {
        let a: Vec<u64> = {
            let mut r = replica_rng(7, 0);
            (0..4).map(|_| r.gen()).collect()
        };
        let a2: Vec<u64> = {
            let mut r = replica_rng(7, 0);
            (0..4).map(|_| r.gen()).collect()
        };
        let b: Vec<u64> = {
            let mut r = replica_rng(7, 1);
            (0..4).map(|_| r.gen()).collect()
        };
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }

    #[test]
    fn bernoulli_exact_frequency() {
        let p = rat(3, 10);
        let mut rng = replica_rng(42, 0);
        let n = 20_000;
        let hits = (0..n).filter(|_| bernoulli_exact(&p, &mut rng)).count();
        let freq = hits as f64 / n as f64;
        // 4 sigma band around 0.3
        assert!((freq - 0.3).abs() < 4.0 * (0.3f64 * 0.7 / n as f64).sqrt());
    }

    #[test]
    fn bernoulli_exact_degenerate() {
        let mut rng = replica_rng(1, 0);
        assert!(bernoulli_exact(&rat(1, 1), &mut rng));
        assert!(!bernoulli_exact(&rat(0, 1), &mut rng));
    }

    #[test]
    fn categorical_exact_frequency() {
        let weights = [rat(1, 3), rat(2, 3)];
        let mut rng = replica_rng(9, 3);
        let n = 20_000;
        let ones = (0..n)
            .filter(|_| categorical_exact(&weights, &mut rng) == 1)
            .count();
        let freq = ones as f64 / n as f64;
        let expect = 2.0 / 3.0;
        assert!((freq - expect).abs() < 4.0 * (expect * (1.0 - expect) / n as f64).sqrt());
    }

    #[test]
    fn categorical_handles_zero_weights() {
        let weights = [rat(0, 1), rat(1, 1), rat(0, 1)];
        let mut rng = replica_rng(3, 0);
        for _ in 0..50 {
            assert_eq!(categorical_exact(&weights, &mut rng), 1);
        }
    }
}
