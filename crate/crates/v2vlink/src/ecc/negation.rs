//! Weight-based data negation code, rate exactly 1/2.
//!
//! Encoding appends one redundancy bit per data bit: for zero or even data
//! weight the redundancy equals the data; for odd weight it is the bitwise
//! complement. Decoding XORs the two halves. A clean block yields all-zeros
//! (even weight) or all-ones (odd weight); anything else is resolved by
//! majority: the majority value of the XOR pattern names the intended
//! pattern, and each minority position is attributed to a data-bit flip if
//! flipping it restores weight-parity consistency, otherwise to the
//! redundancy bit. A 4-vs-4 majority tie is flagged, never guessed.

use super::BlockStatus;

pub const DATA_BITS: usize = 8;
pub const CODE_BITS: usize = 16;

pub fn negation_encode(data: [u8; DATA_BITS]) -> [u8; CODE_BITS] {
    let weight = data.iter().filter(|&&b| b == 1).count();
    let mut out = [0u8; CODE_BITS];
    out[..DATA_BITS].copy_from_slice(&data);
    for i in 0..DATA_BITS {
        out[DATA_BITS + i] = if weight % 2 == 1 { data[i] ^ 1 } else { data[i] };
    }
    out
}

pub fn negation_decode(block: [u8; CODE_BITS]) -> ([u8; DATA_BITS], BlockStatus) {
    let mut data: [u8; DATA_BITS] = block[..DATA_BITS].try_into().unwrap();
    let redundancy: [u8; DATA_BITS] = block[DATA_BITS..].try_into().unwrap();

    let mut x = [0u8; DATA_BITS];
    for i in 0..DATA_BITS {
        x[i] = data[i] ^ redundancy[i];
    }
    let x_ones = x.iter().filter(|&&b| b == 1).count();
    let data_odd = data.iter().filter(|&&b| b == 1).count() % 2 == 1;

    // Clean: XOR pattern exactly matches the encode rule for this parity.
    if (x_ones == 0 && !data_odd) || (x_ones == DATA_BITS && data_odd) {
        return (data, BlockStatus::Clean);
    }
    if x_ones == DATA_BITS / 2 {
        return (data, BlockStatus::DetectedUncorrectable);
    }

    let majority = if x_ones > DATA_BITS / 2 { 1 } else { 0 };
    // Under the encode rule, an all-ones pattern implies odd data weight and
    // all-zeros implies even; a single data-bit flip toggles the parity.
    let majority_needs_odd = majority == 1;
    if x.iter().all(|&b| b == majority) {
        // Uniform pattern inconsistent with the data parity: no position to
        // single out.
        return (data, BlockStatus::DetectedUncorrectable);
    }

    let mut first_position = None;
    for i in 0..DATA_BITS {
        if x[i] == majority {
            continue;
        }
        // Flipping data bit i toggles the received parity; accept the flip
        // only if that lands on the parity the majority pattern implies.
        let flip_is_consistent = !data_odd == majority_needs_odd;
        let position = if flip_is_consistent {
            data[i] ^= 1;
            i + 1
        } else {
            DATA_BITS + i + 1
        };
        first_position.get_or_insert(position);
    }
    (
        data,
        BlockStatus::Corrected(first_position.expect("minority position exists")),
    )
}
