//! Seeds and the reproducible random generator.
//!
//! Every random quantity in the toolkit is drawn from ChaCha20 keyed by a
//! 128-bit [`Seed`]. The 32-byte ChaCha key is the 16 seed bytes followed by
//! 16 zero bytes, stream 0, starting at block 0. Sub-seeds are obtained with
//! [`Seed::derive`], which reads the first 16 bytes of stream `label`.
//!
//! Integer sampling avoids `rand`'s distribution code so that the exact
//! sequence of draws is pinned down by this module alone:
//! [`uniform_below`] is rejection sampling on `next_u64`, and
//! [`sample_distinct`] is Floyd's algorithm on top of it.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Identifier recorded next to every seed in files and reports.
pub const RNG_ALGORITHM: &str = "chacha20-seed128-zeropad";

pub type Rng = ChaCha20Rng;

/// A 128-bit seed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Seed(pub [u8; 16]);

impl Seed {
    pub const fn from_bytes(bytes: [u8; 16]) -> Self {
        Seed(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 16] {
        &self.0
    }

    pub fn rng(&self) -> Rng {
        let mut key = [0u8; 32];
        key[..16].copy_from_slice(&self.0);
        ChaCha20Rng::from_seed(key)
    }

    /// Independent child seed for the given label.
    pub fn derive(&self, label: u64) -> Seed {
        let mut rng = self.rng();
        rng.set_stream(label);
        let mut out = [0u8; 16];
        rng.fill_bytes(&mut out);
        Seed(out)
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        let mut bytes = [0u8; 16];
        bytes[..8].copy_from_slice(&v.to_le_bytes());
        Seed(bytes)
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed({})", self.to_hex())
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Accepts a decimal `u64` or exactly 32 hex digits.
impl FromStr for Seed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() == 32 && s.chars().all(|c| c.is_ascii_hexdigit()) {
            let mut bytes = [0u8; 16];
            for (k, b) in bytes.iter_mut().enumerate() {
                *b = u8::from_str_radix(&s[2 * k..2 * k + 2], 16)
                    .map_err(|e| Error::Format(e.to_string()))?;
            }
            return Ok(Seed(bytes));
        }
        s.parse::<u64>()
            .map(Seed::from)
            .map_err(|_| Error::Format(format!("bad seed {s:?}: want u64 or 32 hex digits")))
    }
}

impl Serialize for Seed {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Seed {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Uniform integer in `0..bound`.
///
/// # Panics
/// If `bound == 0`.
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "uniform_below: empty range");
    // largest multiple of bound that fits, exclusive
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// `d` distinct values from `0..n`, in ascending order (Floyd's algorithm).
///
/// # Panics
/// If `d > n`.
pub fn sample_distinct<R: RngCore + ?Sized>(rng: &mut R, n: usize, d: usize) -> Vec<usize> {
    assert!(d <= n, "sample_distinct: {d} > {n}");
    let mut chosen = std::collections::BTreeSet::new();
    for j in (n - d)..n {
        let t = uniform_below(rng, j as u64 + 1) as usize;
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}

/// In-place Fisher–Yates shuffle built on [`uniform_below`].
pub fn shuffle<T, R: RngCore + ?Sized>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}
