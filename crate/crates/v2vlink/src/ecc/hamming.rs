//! Hamming(7,4) with even parity.
//!
//! Parity bits sit at positions 1, 2 and 4 (1-indexed), data at 3, 5, 6, 7:
//! p1 covers {1,3,5,7}, p2 covers {2,3,6,7}, p4 covers {4,5,6,7}. The
//! recomputed checks read directly as the 1-indexed error position, so every
//! single-bit error is corrected; double errors miscorrect silently, which is
//! inherent to the code.

use super::BlockStatus;

pub const DATA_BITS: usize = 4;
pub const CODE_BITS: usize = 7;

pub fn hamming_encode(data: [u8; DATA_BITS]) -> [u8; CODE_BITS] {
    let [d1, d2, d3, d4] = data;
    let p1 = d1 ^ d2 ^ d4; // positions 3, 5, 7
    let p2 = d1 ^ d3 ^ d4; // positions 3, 6, 7
    let p4 = d2 ^ d3 ^ d4; // positions 5, 6, 7
    [p1, p2, d1, p4, d2, d3, d4]
}

pub fn hamming_decode(block: [u8; CODE_BITS]) -> ([u8; DATA_BITS], BlockStatus) {
    let s1 = block[0] ^ block[2] ^ block[4] ^ block[6];
    let s2 = block[1] ^ block[2] ^ block[5] ^ block[6];
    let s4 = block[3] ^ block[4] ^ block[5] ^ block[6];
    let position = ((s4 << 2) | (s2 << 1) | s1) as usize;

    let mut b = block;
    let status = if position == 0 {
        BlockStatus::Clean
    } else {
        b[position - 1] ^= 1;
        BlockStatus::Corrected(position)
    };
    ([b[2], b[4], b[5], b[6]], status)
}
