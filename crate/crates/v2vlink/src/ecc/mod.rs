//! Error-detection/correction block codes.
//!
//! Three schemes, each operating blockwise over a padded stream:
//! Hamming(7,4) ([`hamming`]), the (12,7) tornado structure with exact
//! syndrome-table decoding ([`tornado`]), and rate-1/2 data negation
//! ([`negation`]). Block sizes are enforced at the type level with fixed
//! arrays; the stream helpers below do the chunking. All three correct 100%
//! of single-bit errors per block.

pub mod hamming;
pub mod negation;
pub mod tornado;

use crate::bits::BitString;

/// Outcome of decoding one block.
///
/// The `Corrected` payload is the 1-indexed flipped position for Hamming and
/// data negation, and the number of flipped bits for tornado (whose coset
/// leaders may span two positions).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockStatus {
    Clean,
    Corrected(usize),
    DetectedUncorrectable,
}

/// Aggregated per-stream decode outcome counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StreamStats {
    pub blocks: usize,
    pub clean: usize,
    pub corrected: usize,
    pub uncorrectable: usize,
}

impl StreamStats {
    fn record(&mut self, status: BlockStatus) {
        self.blocks += 1;
        match status {
            BlockStatus::Clean => self.clean += 1,
            BlockStatus::Corrected(_) => self.corrected += 1,
            BlockStatus::DetectedUncorrectable => self.uncorrectable += 1,
        }
    }
}

/// Applies a `[u8; K] -> [u8; N]` block encoder across an aligned stream.
/// Output length is exactly `(len / K) * N`.
pub fn encode_stream<const K: usize, const N: usize>(
    bits: &BitString,
    encode: impl Fn([u8; K]) -> [u8; N],
) -> BitString {
    assert_eq!(bits.len() % K, 0, "stream not aligned to {K}-bit blocks");
    let mut out = BitString::with_capacity(bits.len() / K * N);
    for chunk in bits.as_slice().chunks_exact(K) {
        let block: [u8; K] = chunk.try_into().unwrap();
        out.extend_from_slice(&encode(block));
    }
    out
}

/// Applies a block decoder across an aligned stream. Uncorrectable blocks
/// pass their data bits through unchanged so BER stays measurable.
pub fn decode_stream<const K: usize, const N: usize>(
    bits: &BitString,
    decode: impl Fn([u8; N]) -> ([u8; K], BlockStatus),
) -> (BitString, StreamStats) {
    assert_eq!(bits.len() % N, 0, "stream not aligned to {N}-bit blocks");
    let mut out = BitString::with_capacity(bits.len() / N * K);
    let mut stats = StreamStats::default();
    for chunk in bits.as_slice().chunks_exact(N) {
        let block: [u8; N] = chunk.try_into().unwrap();
        let (data, status) = decode(block);
        out.extend_from_slice(&data);
        stats.record(status);
    }
    (out, stats)
}
