//! Invertible ergodic base dynamics: irrational circle rotations and the
//! two-sided Bernoulli(1/2, 1/2) shift.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::{Scalar, TorusValue};

/// A two-sided sequence in {0,1}^Z, materialized lazily from a seed.
///
/// The symbol at absolute index `i` is bit `i mod 32` of word `i div 32` in
/// the ChaCha8 keystream keyed by `seed`, so any window can be regenerated
/// without a stored tape. Shifting only moves `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryBiSequence {
    pub seed: u64,
    pub offset: i64,
}

impl BinaryBiSequence {
    pub fn new(seed: u64) -> Self {
        BinaryBiSequence { seed, offset: 0 }
    }

    /// Symbol at position `i` relative to the current shift.
    pub fn symbol(&self, i: i64) -> u8 {
        raw_symbol(self.seed, self.offset + i)
    }

    /// Symbols at positions `start..start + len`, decoding each keystream
    /// word once.
    pub fn window(&self, start: i64, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut cached: Option<(i64, u32)> = None;
        for k in 0..len as i64 {
            let abs = self.offset + start + k;
            let word_idx = abs.div_euclid(32);
            let word = match cached {
                Some((w, bits)) if w == word_idx => bits,
                _ => {
                    rng.set_word_pos(word_position(word_idx));
                    let bits = rng.next_u32();
                    cached = Some((word_idx, bits));
                    bits
                }
            };
            out.push(((word >> abs.rem_euclid(32)) & 1) as u8);
        }
        out
    }

    pub fn shifted(&self, n: i64) -> Self {
        BinaryBiSequence {
            seed: self.seed,
            offset: self.offset + n,
        }
    }
}

fn word_position(word_idx: i64) -> u128 {
    // Two's-complement reinterpretation keeps negative words distinct.
    word_idx as u64 as u128
}

fn raw_symbol(seed: u64, abs: i64) -> u8 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(word_position(abs.div_euclid(32)));
    ((rng.next_u32() >> abs.rem_euclid(32)) & 1) as u8
}

/// A point of the base space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasePoint {
    Circle(TorusValue),
    Sequence(BinaryBiSequence),
}

impl BasePoint {
    pub fn circle(&self) -> Option<TorusValue> {
        match self {
            BasePoint::Circle(x) => Some(*x),
            BasePoint::Sequence(_) => None,
        }
    }

    pub fn sequence(&self) -> Option<&BinaryBiSequence> {
        match self {
            BasePoint::Sequence(s) => Some(s),
            BasePoint::Circle(_) => None,
        }
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Circle(x) => write!(f, "{x}"),
            BasePoint::Sequence(s) => write!(f, "seq:{}:{}", s.seed, s.offset),
        }
    }
}

/// An invertible ergodic measure-preserving base map.
///
/// The rotation angle is assumed irrational; that cannot be checked from a
/// float and is never tested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseSystem {
    Rotation { eta: TorusValue },
    Bernoulli,
}

impl BaseSystem {
    pub fn rotation(eta: impl Into<Scalar>) -> Self {
        BaseSystem::Rotation {
            eta: TorusValue::new(eta),
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, BaseSystem::Rotation { .. })
    }

    pub fn eta(&self) -> Option<TorusValue> {
        match self {
            BaseSystem::Rotation { eta } => Some(*eta),
            BaseSystem::Bernoulli => None,
        }
    }

    pub fn step(&self, x: &BasePoint) -> BasePoint {
        match (self, x) {
            (BaseSystem::Rotation { eta }, BasePoint::Circle(v)) => BasePoint::Circle(*v + *eta),
            (BaseSystem::Bernoulli, BasePoint::Sequence(s)) => BasePoint::Sequence(s.shifted(1)),
            _ => panic!("base point {x} does not belong to {self:?}"),
        }
    }

    pub fn step_inverse(&self, x: &BasePoint) -> BasePoint {
        match (self, x) {
            (BaseSystem::Rotation { eta }, BasePoint::Circle(v)) => BasePoint::Circle(*v - *eta),
            (BaseSystem::Bernoulli, BasePoint::Sequence(s)) => BasePoint::Sequence(s.shifted(-1)),
            _ => panic!("base point {x} does not belong to {self:?}"),
        }
    }

    /// Applies `step` (n > 0) or `step_inverse` (n < 0) |n| times.
    pub fn iterate(&self, x: &BasePoint, n: i64) -> BasePoint {
        match (self, x) {
            (BaseSystem::Bernoulli, BasePoint::Sequence(s)) => BasePoint::Sequence(s.shifted(n)),
            _ => {
                let mut p = *x;
                for _ in 0..n.unsigned_abs() {
                    p = if n > 0 {
                        self.step(&p)
                    } else {
                        self.step_inverse(&p)
                    };
                }
                p
            }
        }
    }

    /// Deterministic point drawn from the invariant measure.
    pub fn sample_point(&self, rng_seed: u64) -> BasePoint {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        self.sample_with(&mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> BasePoint {
        match self {
            BaseSystem::Rotation { .. } => BasePoint::Circle(TorusValue::new(rng.random::<f64>())),
            BaseSystem::Bernoulli => BasePoint::Sequence(BinaryBiSequence::new(rng.next_u64())),
        }
    }

    pub fn accepts(&self, x: &BasePoint) -> bool {
        matches!(
            (self, x),
            (BaseSystem::Rotation { .. }, BasePoint::Circle(_))
                | (BaseSystem::Bernoulli, BasePoint::Sequence(_))
        )
    }
}
