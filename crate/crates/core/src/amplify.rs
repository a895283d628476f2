//! One-time-pad channels keyed by sampled XORs of common secret bits.
//!
//! Each key bit is the XOR of `d` distinct common bits of the channel, chosen
//! by a fixed-weight sampler seeded with a per-message sampling seed. The
//! seed travels in the clear in the ciphertext header: secrecy rests on the
//! pool bits, and an auditor can rebuild the exact sampling rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{fixed_weight_rows, BitString};
use crate::predistribution::{NodeId, SecretMaterial};
use crate::seed::Seed;

pub const DEFAULT_SAMPLING_WEIGHT: usize = 128;

pub const CIPHERTEXT_MAGIC: &[u8; 4] = b"NPCT";
pub const CIPHERTEXT_VERSION: u16 = 1;

/// Orders a pair as `(min, max)`, rejecting loops.
pub fn channel(i: NodeId, j: NodeId) -> Result<(NodeId, NodeId)> {
    if i == j {
        return Err(Error::InvalidArgument(format!("channel ({i}, {j}) needs two distinct nodes")));
    }
    Ok((i.min(j), i.max(j)))
}

/// Per-endpoint bookkeeping for one channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelCipherState {
    pub i: NodeId,
    pub j: NodeId,
    pub d: usize,
    /// Total length of every message keyed so far.
    pub consumed: u64,
    /// Counter for the next outgoing message.
    pub next_counter: u64,
    /// Highest counter accepted by `decrypt`.
    pub last_received: Option<u64>,
}

impl ChannelCipherState {
    pub fn new(i: NodeId, j: NodeId) -> Result<Self> {
        Self::with_weight(i, j, DEFAULT_SAMPLING_WEIGHT)
    }

    pub fn with_weight(i: NodeId, j: NodeId, d: usize) -> Result<Self> {
        let (i, j) = channel(i, j)?;
        if d == 0 {
            return Err(Error::InvalidArgument("sampling weight d must be positive".into()));
        }
        Ok(ChannelCipherState {
            i,
            j,
            d,
            consumed: 0,
            next_counter: 0,
            last_received: None,
        })
    }

    pub fn pair(&self) -> (NodeId, NodeId) {
        (self.i, self.j)
    }

    fn reserve(&self, len: u64, budget: u64) -> Result<()> {
        if self.consumed.checked_add(len).is_none_or(|total| total > budget) {
            return Err(Error::BudgetExceeded {
                consumed: self.consumed,
                requested: len,
                budget,
            });
        }
        Ok(())
    }
}

/// Encrypted message with its public header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipherText {
    pub i: NodeId,
    pub j: NodeId,
    pub counter: u64,
    pub sampling_seed: Seed,
    pub body: BitString,
}

/// Sampling rows as positions into the channel's ascending common-bit list.
pub fn sampling_rows(common: usize, d: usize, len: usize, sampling_seed: Seed) -> Result<Vec<Vec<usize>>> {
    if d > common {
        return Err(Error::WeightTooLarge { d, available: common });
    }
    fixed_weight_rows(len, common, d, sampling_seed)
}

/// Sampling rows translated to global pool indices: row `r` lists the pool
/// bits whose XOR is key bit `r`.
pub fn key_rows<M: SecretMaterial + ?Sized>(
    material: &M,
    i: NodeId,
    j: NodeId,
    d: usize,
    len: usize,
    sampling_seed: Seed,
) -> Result<Vec<Vec<usize>>> {
    let common = material.common_bits(i, j)?;
    if common.is_empty() {
        let (i, j) = channel(i, j)?;
        return Err(Error::NoCommonBits(i, j));
    }
    Ok(sampling_rows(common.len(), d, len, sampling_seed)?
        .into_iter()
        .map(|row| row.into_iter().map(|k| common[k]).collect())
        .collect())
}

/// `len` key bits for channel `(i, j)`.
pub fn derive_key<M: SecretMaterial + ?Sized>(
    material: &M,
    i: NodeId,
    j: NodeId,
    d: usize,
    len: usize,
    sampling_seed: Seed,
) -> Result<BitString> {
    let (common, values) = material.common_values(i, j)?;
    if common.is_empty() {
        let (i, j) = channel(i, j)?;
        return Err(Error::NoCommonBits(i, j));
    }
    let rows = sampling_rows(common.len(), d, len, sampling_seed)?;
    Ok(BitString::from_bits(
        rows.iter().map(|row| row.iter().fold(false, |acc, &k| acc ^ values.get(k))),
    ))
}

/// Pads `plaintext` with a fresh key and advances the sender's state.
pub fn encrypt<M: SecretMaterial + ?Sized>(
    material: &M,
    state: &mut ChannelCipherState,
    plaintext: &BitString,
    sampling_seed: Seed,
) -> Result<CipherText> {
    let len = plaintext.len() as u64;
    state.reserve(len, material.budget())?;
    let key = derive_key(material, state.i, state.j, state.d, plaintext.len(), sampling_seed)?;
    let body = plaintext.xor(&key)?;
    let ct = CipherText {
        i: state.i,
        j: state.j,
        counter: state.next_counter,
        sampling_seed,
        body,
    };
    state.next_counter += 1;
    state.consumed += len;
    Ok(ct)
}

/// Removes the pad, rejecting replays and messages past the channel budget.
/// The receiver's state changes only when decryption succeeds.
pub fn decrypt<M: SecretMaterial + ?Sized>(
    material: &M,
    state: &mut ChannelCipherState,
    ct: &CipherText,
) -> Result<BitString> {
    if (ct.i, ct.j) != state.pair() {
        return Err(Error::InvalidArgument(format!(
            "ciphertext for channel ({}, {}) given to channel ({}, {})",
            ct.i, ct.j, state.i, state.j
        )));
    }
    if let Some(last) = state.last_received {
        if ct.counter <= last {
            return Err(Error::Replay {
                i: ct.i,
                j: ct.j,
                counter: ct.counter,
                last,
            });
        }
    }
    let len = ct.body.len() as u64;
    state.reserve(len, material.budget())?;
    let key = derive_key(material, ct.i, ct.j, state.d, ct.body.len(), ct.sampling_seed)?;
    let plaintext = ct.body.xor(&key)?;
    state.last_received = Some(ct.counter);
    state.consumed += len;
    Ok(plaintext)
}

impl CipherText {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(50 + self.body.len().div_ceil(8));
        out.extend_from_slice(CIPHERTEXT_MAGIC);
        out.extend_from_slice(&CIPHERTEXT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.i.to_le_bytes());
        out.extend_from_slice(&self.j.to_le_bytes());
        out.extend_from_slice(&self.counter.to_le_bytes());
        out.extend_from_slice(self.sampling_seed.as_bytes());
        out.extend_from_slice(&(self.body.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.body.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<CipherText> {
        const HEADER: usize = 4 + 2 + 4 + 4 + 8 + 16 + 8;
        if bytes.len() < HEADER {
            return Err(Error::Format("ciphertext header truncated".into()));
        }
        if &bytes[..4] != CIPHERTEXT_MAGIC {
            return Err(Error::Format("not an NPCT ciphertext".into()));
        }
        let le = |range: std::ops::Range<usize>| -> [u8; 8] {
            let mut buf = [0u8; 8];
            buf[..range.len()].copy_from_slice(&bytes[range]);
            buf
        };
        let version = u16::from_le_bytes(bytes[4..6].try_into().expect("2 bytes"));
        if version != CIPHERTEXT_VERSION {
            return Err(Error::Format(format!("unsupported ciphertext version {version}")));
        }
        let i = u64::from_le_bytes(le(6..10)) as u32;
        let j = u64::from_le_bytes(le(10..14)) as u32;
        let counter = u64::from_le_bytes(le(14..22));
        let sampling_seed = Seed::from_bytes(bytes[22..38].try_into().expect("16 bytes"));
        let len = u64::from_le_bytes(le(38..46));
        if i >= j {
            return Err(Error::Format(format!("ciphertext pair ({i}, {j}) is not ordered")));
        }
        let body_bytes = &bytes[HEADER..];
        if (body_bytes.len() as u64) != len.div_ceil(8) {
            return Err(Error::Format(format!(
                "ciphertext body has {} bytes for {len} bits",
                body_bytes.len()
            )));
        }
        Ok(CipherText {
            i,
            j,
            counter,
            sampling_seed,
            body: BitString::from_bytes(body_bytes, len as usize)?,
        })
    }
}
