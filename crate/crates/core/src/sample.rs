//! Seeded generic base points.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Rational;

/// A rational base point together with how it was drawn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplePoint {
    pub coords: Vec<Rational>,
    pub seed: u64,
    pub attempt: u64,
}

impl SamplePoint {
    /// A caller-supplied point (no seed provenance).
    pub fn explicit(coords: Vec<Rational>) -> SamplePoint {
        SamplePoint {
            coords,
            seed: 0,
            attempt: 0,
        }
    }
}

/// Draws a reproducible point with coordinates `a/b`, `|a| <= height`,
/// `1 <= b <= height`, none equal to 0 or 1 and pairwise distinct.
///
/// The same `(n, seed, attempt, height)` always yields the same point.
pub fn sample_point(n: usize, seed: u64, attempt: u64, height: u64) -> SamplePoint {
    assert!(height >= 2, "height bound must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    let mut height = height as i64;
    let mut seen = BTreeSet::new();
    let mut coords = Vec::with_capacity(n);
    let mut misses = 0;
    while coords.len() < n {
        let num = rng.gen_range(-height..=height);
        let den = rng.gen_range(1..=height);
        let v = Rational::new(BigInt::from(num), BigInt::from(den));
        if v.is_zero() || v.is_one() || !seen.insert(v.clone()) {
            misses += 1;
            // Tiny heights may not admit n distinct admissible values.
            if misses % 1000 == 0 {
                height += 1;
            }
            continue;
        }
        coords.push(v);
    }
    SamplePoint {
        coords,
        seed,
        attempt,
    }
}
