//! Bit strings and dense bit matrices over GF(2).
//!
//! Bits are packed into `u64` words, bit `k` of a row living in word `k / 64`
//! at position `k % 64`. All public behaviour is defined on logical bit order
//! (bit 0 is the first column), never on the word layout.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::seed::{sample_distinct, Seed};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Row-count cutoff below which [`cross_independent`] enumerates subsets exactly.
pub const EXACT_CROSS_INDEPENDENCE_MAX_ROWS: usize = 24;

/// An ordered sequence of bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = BitString {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        s.clear_tail();
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = BitString::zeros(0);
        for b in bits {
            s.push(b);
        }
        s
    }

    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut s = BitString {
            words: (0..words_for(len)).map(|_| rng.next_u64()).collect(),
            len,
        };
        s.clear_tail();
        s
    }

    /// Bits packed little-endian within bytes: bit `k` is bit `k % 8` of byte `k / 8`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::DimensionMismatch {
                expected: len.div_ceil(8),
                actual: bytes.len(),
            });
        }
        let mut s = BitString::zeros(len);
        for (k, byte) in bytes.iter().enumerate() {
            s.words[k / 8] |= (*byte as u64) << (8 * (k % 8));
        }
        s.clear_tail();
        Ok(s)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.len.div_ceil(8))
            .map(|k| (self.words[k / 8] >> (8 * (k % 8))) as u8)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.len, "bit {k} out of range {}", self.len);
        (self.words[k / WORD] >> (k % WORD)) & 1 == 1
    }

    pub fn set(&mut self, k: usize, value: bool) {
        assert!(k < self.len, "bit {k} out of range {}", self.len);
        let mask = 1u64 << (k % WORD);
        if value {
            self.words[k / WORD] |= mask;
        } else {
            self.words[k / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |k| self.get(k))
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl BitXor for &BitString {
    type Output = BitString;

    /// # Panics
    /// On length mismatch; use [`BitString::xor`] for a fallible version.
    fn bitxor(self, rhs: &BitString) -> BitString {
        self.xor(rhs).expect("BitString xor length mismatch")
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::from_bits)
    }
}

/// Dense row-major bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitString]) -> Result<Self> {
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Builds a matrix from rows given as lists of set column indices.
    pub fn from_sparse_rows(cols: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for &c in r {
                if c >= cols {
                    return Err(Error::DimensionMismatch {
                        expected: cols,
                        actual: c + 1,
                    });
                }
                m.set(i, c, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> BitString {
        BitString {
            words: self.row_words(r).to_vec(),
            len: self.cols,
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.stride);
        head[lo * self.stride..(lo + 1) * self.stride].swap_with_slice(&mut tail[..self.stride]);
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let s = self.stride;
        if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * s);
            for (d, v) in tail[..s].iter_mut().zip(&head[src * s..(src + 1) * s]) {
                *d ^= v;
            }
        } else {
            let (head, tail) = self.data.split_at_mut(src * s);
            for (d, v) in head[dst * s..(dst + 1) * s].iter_mut().zip(&tail[..s]) {
                *d ^= v;
            }
        }
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        self.clone().reduce_in_place()
    }

    pub fn has_full_row_rank(&self) -> bool {
        self.rank() == self.rows
    }

    /// Forward elimination; returns the rank and leaves the pivot rows on top.
    fn reduce_in_place(&mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let word = c / WORD;
            let bit = 1u64 << (c % WORD);
            let Some(pivot) =
                (rank..self.rows).find(|&r| self.data[r * self.stride + word] & bit != 0)
            else {
                continue;
            };
            self.swap_rows(pivot, rank);
            let s = self.stride;
            let (head, tail) = self.data.split_at_mut((rank + 1) * s);
            let pivot_row = &head[rank * s + word..(rank + 1) * s];
            for row in tail.chunks_exact_mut(s) {
                if row[word] & bit != 0 {
                    for (d, v) in row[word..].iter_mut().zip(pivot_row) {
                        *d ^= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Matrix–vector product over GF(2).
    pub fn mul(&self, v: &BitString) -> Result<BitString> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok(BitString::from_bits((0..self.rows).map(|r| {
            let parity = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            parity & 1 == 1
        })))
    }

    /// Vertical concatenation of matrices with equal column counts.
    pub fn stack(blocks: &[BitMatrix]) -> Result<BitMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut out = BitMatrix::zeros(0, cols);
        for b in blocks {
            if b.cols != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: b.cols,
                });
            }
            out.data.extend_from_slice(&b.data);
            out.rows += b.rows;
        }
        Ok(out)
    }

    /// Each entry is 1 independently with probability `density`.
    ///
    /// An entry is set when a fresh `next_u64` draw falls below
    /// `density * 2^64` (density 1 sets every entry).
    pub fn random_bernoulli(rows: usize, cols: usize, density: f64, seed: Seed) -> Result<Self> {
        Self::random_bernoulli_with(rows, cols, density, &mut seed.rng())
    }

    pub fn random_bernoulli_with<R: RngCore + ?Sized>(
        rows: usize,
        cols: usize,
        density: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidArgument(format!(
                "density {density} outside [0, 1]"
            )));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        if density == 0.0 {
            return Ok(m);
        }
        if density == 1.0 {
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, true);
                }
            }
            return Ok(m);
        }
        let threshold = (density * 18_446_744_073_709_551_616.0) as u64;
        for r in 0..rows {
            for c in 0..cols {
                if rng.next_u64() < threshold {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }

    /// Every row has exactly `weight` ones, placed by [`fixed_weight_rows`].
    pub fn random_fixed_weight(rows: usize, cols: usize, weight: usize, seed: Seed) -> Result<Self> {
        let support = fixed_weight_rows(rows, cols, weight, seed)?;
        BitMatrix::from_sparse_rows(cols, &support)
    }
}

/// Column supports for `rows` rows of weight `weight` over `cols` columns.
///
/// Row `r` is `sample_distinct(cols, weight)` drawn from one generator seeded
/// by `seed`, rows consumed in order. This is the sampling rule used for key
/// derivation, so any party holding the seed can rebuild the rows.
pub fn fixed_weight_rows(rows: usize, cols: usize, weight: usize, seed: Seed) -> Result<Vec<Vec<usize>>> {
    if weight > cols {
        return Err(Error::WeightTooLarge {
            d: weight,
            available: cols,
        });
    }
    let mut rng = seed.rng();
    Ok((0..rows)
        .map(|_| sample_distinct(&mut rng, cols, weight))
        .collect())
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// Rows separated by `;` or newlines, e.g. `"110;011"`.
impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<BitString> = s
            .split([';', '\n'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        let cols = rows.first().map_or(0, BitString::len);
        BitMatrix::from_rows(cols, &rows)
    }
}

/// True when no choice of row subsets, taking at least one row from every
/// block, XORs to zero.
///
/// Decided exactly by enumeration when the blocks hold at most
/// [`EXACT_CROSS_INDEPENDENCE_MAX_ROWS`] rows in total. Larger inputs fall
/// back to the sufficient test "stack has full row rank"; a rank-deficient
/// stack is then reported as `false`, which may be conservative.
pub fn cross_independent(blocks: &[BitMatrix]) -> Result<bool> {
    cross_independent_with_cutoff(blocks, EXACT_CROSS_INDEPENDENCE_MAX_ROWS)
}

pub fn cross_independent_with_cutoff(blocks: &[BitMatrix], cutoff: usize) -> Result<bool> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("no blocks".into()));
    }
    let cols = blocks[0].cols;
    if let Some(b) = blocks.iter().find(|b| b.cols != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            actual: b.cols,
        });
    }
    if blocks.iter().any(|b| b.rows == 0) {
        return Err(Error::InvalidArgument("empty block".into()));
    }
    let total: usize = blocks.iter().map(BitMatrix::rows).sum();
    let stacked = BitMatrix::stack(blocks)?;
    if total > cutoff || total >= 63 {
        return Ok(stacked.has_full_row_rank());
    }

    let mut block_masks = Vec::with_capacity(blocks.len());
    let mut offset = 0;
    for b in blocks {
        block_masks.push(((1u64 << b.rows) - 1) << offset);
        offset += b.rows;
    }
    // Gray-code walk keeps a running XOR of the selected rows.
    let mut acc = vec![0u64; stacked.stride];
    let mut prev_gray = 0u64;
    for step in 1u64..(1u64 << total) {
        let gray = step ^ (step >> 1);
        let flipped = (gray ^ prev_gray).trailing_zeros() as usize;
        prev_gray = gray;
        for (a, v) in acc.iter_mut().zip(stacked.row_words(flipped)) {
            *a ^= v;
        }
        if acc.iter().all(|&w| w == 0) && block_masks.iter().all(|m| gray & m != 0) {
            return Ok(false);
        }
    }
    Ok(true)
}
