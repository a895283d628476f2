//! Keyed pseudo-random permutations of `{1..u}`, one per node.
//!
//! Each node gets a 4-round balanced Feistel network over `w`-bit values,
//! `w` the smallest even width with `2^w >= u` (at least 2). Values that land
//! outside `{1..u}` are re-encrypted until they fall inside (cycle walking),
//! which keeps the map a bijection on `{1..u}`.
//!
//! Round keys for node `i` are the first four `u64` words drawn from
//! `master_seed.derive(i)`. The round function is the SplitMix64 finaliser
//! of `half ^ key`, truncated to `w / 2` bits.

use crate::error::{Error, Result};
use crate::predistribution::NodeId;
use crate::seed::Seed;

use rand::RngCore;

const ROUNDS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationFamily {
    u: u64,
    n: u32,
    master_seed: Seed,
    keys: Vec<[u64; ROUNDS]>,
    half_bits: u32,
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl PermutationFamily {
    pub fn new(u: u64, n: u32, master_seed: Seed) -> Result<Self> {
        if u == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "permutation family needs u >= 1 and n >= 1 (got u = {u}, n = {n})"
            )));
        }
        let mut width = 64 - (u - 1).leading_zeros();
        width = width.max(2);
        if width % 2 == 1 {
            width += 1;
        }
        if width > 62 {
            return Err(Error::InvalidArgument(format!("domain {u} too large")));
        }
        let keys = (1..=n)
            .map(|i| {
                let mut rng = master_seed.derive(i as u64).rng();
                let mut k = [0u64; ROUNDS];
                for slot in &mut k {
                    *slot = rng.next_u64();
                }
                k
            })
            .collect();
        Ok(PermutationFamily {
            u,
            n,
            master_seed,
            keys,
            half_bits: width / 2,
        })
    }

    pub fn domain(&self) -> u64 {
        self.u
    }

    pub fn nodes(&self) -> u32 {
        self.n
    }

    pub fn master_seed(&self) -> Seed {
        self.master_seed
    }

    fn check(&self, k: u64, i: NodeId) -> Result<&[u64; ROUNDS]> {
        if k == 0 || k > self.u {
            return Err(Error::InvalidArgument(format!(
                "index {k} outside 1..={}",
                self.u
            )));
        }
        if i == 0 || i > self.n {
            return Err(Error::InvalidNode { node: i, n: self.n });
        }
        Ok(&self.keys[i as usize - 1])
    }

    fn round(&self, key: u64, half: u64) -> u64 {
        mix64(half ^ key) & ((1u64 << self.half_bits) - 1)
    }

    fn encrypt(&self, keys: &[u64; ROUNDS], x: u64) -> u64 {
        let mask = (1u64 << self.half_bits) - 1;
        let (mut left, mut right) = (x >> self.half_bits, x & mask);
        for &k in keys {
            let next = left ^ self.round(k, right);
            left = right;
            right = next;
        }
        (left << self.half_bits) | right
    }

    fn decrypt(&self, keys: &[u64; ROUNDS], y: u64) -> u64 {
        let mask = (1u64 << self.half_bits) - 1;
        let (mut left, mut right) = (y >> self.half_bits, y & mask);
        for &k in keys.iter().rev() {
            let prev = right ^ self.round(k, left);
            right = left;
            left = prev;
        }
        (left << self.half_bits) | right
    }

    /// `F(k, i)`: location in `1..=u` of pool index `k` for node `i`.
    pub fn permute(&self, k: u64, i: NodeId) -> Result<u64> {
        let keys = self.check(k, i)?;
        let mut y = self.encrypt(keys, k - 1);
        while y >= self.u {
            y = self.encrypt(keys, y);
        }
        Ok(y + 1)
    }

    /// Inverse of [`permute`](Self::permute) for node `i`.
    pub fn invert(&self, s: u64, i: NodeId) -> Result<u64> {
        let keys = self.check(s, i)?;
        let mut x = self.decrypt(keys, s - 1);
        while x >= self.u {
            x = self.decrypt(keys, x);
        }
        Ok(x + 1)
    }
}
