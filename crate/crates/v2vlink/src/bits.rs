//! Bit-exact sequence type shared by every codec stage.
//!
//! A [`BitString`] stores an ordered sequence of bits with an exact length;
//! there is no hidden byte padding. The one global convention, used by every
//! documented example and file dump in this crate, is most-significant-bit
//! first: `push_uint(5, 4)` appends `0101`.

use std::fmt;
use std::ops::{BitXor, Index};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitError {
    #[error("length mismatch: {a} vs {b} bits; align streams before comparing")]
    LengthMismatch { a: usize, b: usize },
    #[error("invalid bit character {0:?}; expected '0' or '1'")]
    InvalidBitChar(char),
    #[error("read of {width} bits at offset {offset} overruns length {len}")]
    OutOfRange {
        offset: usize,
        width: usize,
        len: usize,
    },
}

/// Ordered sequence of binary digits. Immutable value semantics: cloning is
/// cheap enough at link-simulation sizes and values are freely shareable
/// between threads.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            bits: Vec::with_capacity(n),
        }
    }

    /// Builds from a slice of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        Self {
            bits: bits.to_vec(),
        }
    }

    /// `count` copies of `bit`.
    pub fn repeat(bit: u8, count: usize) -> Self {
        assert!(bit <= 1);
        Self {
            bits: vec![bit; count],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1, "bits must be 0 or 1");
        self.bits.push(bit);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn extend_from_slice(&mut self, bits: &[u8]) {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        self.bits.extend_from_slice(bits);
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.bits.get(i).copied()
    }

    /// Appends `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        assert!(width <= 64);
        assert!(
            width == 64 || value < (1u64 << width),
            "value {value} does not fit in {width} bits"
        );
        for i in (0..width).rev() {
            self.bits.push(((value >> i) & 1) as u8);
        }
    }

    /// Reads `width` bits starting at `offset`, most significant first.
    pub fn read_uint(&self, offset: usize, width: usize) -> Result<u64, BitError> {
        assert!(width <= 64);
        if offset + width > self.bits.len() {
            return Err(BitError::OutOfRange {
                offset,
                width,
                len: self.bits.len(),
            });
        }
        let mut v = 0u64;
        for &b in &self.bits[offset..offset + width] {
            v = (v << 1) | b as u64;
        }
        Ok(v)
    }

    /// Sub-range copy, `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString {
            bits: self.bits[start..end].to_vec(),
        }
    }

    /// First `n` bits; the stream-level BER bookkeeping uses this to drop
    /// block/modulation padding before comparisons.
    pub fn truncated(&self, n: usize) -> BitString {
        assert!(n <= self.bits.len());
        self.slice(0, n)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Flips the bit at `i` in place. Used by error-injection tests.
    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }
}

/// Number of positions where `a` and `b` differ. The BER numerator.
pub fn hamming_distance(a: &BitString, b: &BitString) -> Result<usize, BitError> {
    if a.len() != b.len() {
        return Err(BitError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    Ok(a.iter().zip(b.iter()).filter(|(x, y)| x != y).count())
}

/// Extends `x` with `fill` bits to the smallest multiple of `block` that is
/// >= len(x). Already-aligned input (including empty) is returned unchanged.
pub fn pad_to_multiple(x: &BitString, block: usize, fill: u8) -> BitString {
    assert!(block >= 1, "block size must be positive");
    assert!(fill <= 1);
    let rem = x.len() % block;
    if rem == 0 {
        return x.clone();
    }
    let mut out = x.clone();
    for _ in 0..(block - rem) {
        out.push(fill);
    }
    out
}

impl Index<usize> for BitString {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.bits[i]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self)
    }
}

impl FromStr for BitString {
    type Err = BitError;

    fn from_str(s: &str) -> Result<Self, BitError> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => return Err(BitError::InvalidBitChar(other)),
            }
        }
        Ok(BitString { bits })
    }
}

impl BitXor for &BitString {
    type Output = BitString;

    /// Bitwise XOR of equal-length strings; the linearity checks on the
    /// channel codes are phrased in terms of this.
    fn bitxor(self, rhs: &BitString) -> BitString {
        assert_eq!(self.len(), rhs.len(), "xor requires equal lengths");
        BitString {
            bits: self
                .iter()
                .zip(rhs.iter())
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }
}

impl FromIterator<u8> for BitString {
    fn from_iter<T: IntoIterator<Item = u8>>(iter: T) -> Self {
        let bits: Vec<u8> = iter.into_iter().collect();
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        BitString { bits }
    }
}
