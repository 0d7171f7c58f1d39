//! (12,7) tornado-structured code with exact syndrome decoding.
//!
//! The bipartite structure is fixed: data bits d1..d7 with irregular degrees
//! feed four first-layer checks, and a fifth check covers the first four
//! checks themselves:
//!
//! ```text
//! c1 = d1+d2+d3   c2 = d3+d4+d5   c3 = d5+d6+d7   c4 = d1+d4+d7
//! c5 = c1+c2+c3+c4                               (all sums mod 2)
//! ```
//!
//! The codeword is d1..d7 followed by c1..c5. Viewed as a linear code, the
//! equivalent 5x12 parity-check matrix has twelve distinct nonzero columns,
//! so minimum distance is at least 3 and every single-bit error is
//! correctable. Decoding over a noisy channel uses a coset-leader table on
//! the 5-bit syndrome space: leaders of weight 1 and 2 are stored; any
//! syndrome outside the table is flagged, never silently miscorrected.

use super::BlockStatus;

pub const DATA_BITS: usize = 7;
pub const CODE_BITS: usize = 12;

/// Fixed check structure plus the precomputed syndrome lookup table.
#[derive(Debug, Clone)]
pub struct TornadoGraph {
    /// Parity-check rows as 12-bit masks over [d1..d7, c1..c5].
    h_rows: [u16; 5],
    /// syndrome -> (error mask, weight) for coset leaders of weight <= 2.
    syndrome_table: [Option<(u16, u8)>; 32],
}

impl TornadoGraph {
    /// Builds the standard (12,7) structure and asserts its single-error
    /// correction property (distinct nonzero columns) at construction.
    pub fn standard() -> TornadoGraph {
        // Positions 0..6 = d1..d7, positions 7..11 = c1..c5.
        let rows_positions: [&[usize]; 5] = [
            &[0, 1, 2, 7],       // c1 = d1+d2+d3
            &[2, 3, 4, 8],       // c2 = d3+d4+d5
            &[4, 5, 6, 9],       // c3 = d5+d6+d7
            &[0, 3, 6, 10],      // c4 = d1+d4+d7
            &[7, 8, 9, 10, 11],  // c5 = c1+c2+c3+c4
        ];
        let mut h_rows = [0u16; 5];
        for (r, positions) in rows_positions.iter().enumerate() {
            for &p in *positions {
                h_rows[r] |= 1 << p;
            }
        }

        // Columns of the equivalent parity-check matrix must be nonzero and
        // pairwise distinct for guaranteed single-error correction.
        let mut columns = [0u8; CODE_BITS];
        for (j, col) in columns.iter_mut().enumerate() {
            for (r, &row) in h_rows.iter().enumerate() {
                if row & (1 << j) != 0 {
                    *col |= 1 << r;
                }
            }
        }
        for (j, &col) in columns.iter().enumerate() {
            assert_ne!(col, 0, "column {j} of the check matrix is zero");
            for (k, &other) in columns.iter().enumerate().skip(j + 1) {
                assert_ne!(col, other, "columns {j} and {k} coincide");
            }
        }

        // Coset-leader table: weight-1 leaders first (all distinct by the
        // column check), then weight-2 leaders in lexicographic order for
        // any still-unclaimed syndrome.
        let mut syndrome_table: [Option<(u16, u8)>; 32] = [None; 32];
        for j in 0..CODE_BITS {
            let e = 1u16 << j;
            let s = syndrome_of(&h_rows, e);
            debug_assert!(syndrome_table[s as usize].is_none());
            syndrome_table[s as usize] = Some((e, 1));
        }
        for i in 0..CODE_BITS {
            for j in i + 1..CODE_BITS {
                let e = (1u16 << i) | (1u16 << j);
                let s = syndrome_of(&h_rows, e) as usize;
                if syndrome_table[s].is_none() {
                    syndrome_table[s] = Some((e, 2));
                }
            }
        }

        TornadoGraph {
            h_rows,
            syndrome_table,
        }
    }

    pub fn parity_rows(&self) -> &[u16; 5] {
        &self.h_rows
    }

    /// Syndrome of a received 12-bit word (zero iff codeword).
    pub fn syndrome(&self, word_mask: u16) -> u8 {
        syndrome_of(&self.h_rows, word_mask)
    }

    /// The stored coset leader for a syndrome, if one of weight <= 2 exists.
    pub fn coset_leader(&self, syndrome: u8) -> Option<(u16, u8)> {
        self.syndrome_table[syndrome as usize]
    }
}

fn syndrome_of(h_rows: &[u16; 5], word: u16) -> u8 {
    let mut s = 0u8;
    for (r, &row) in h_rows.iter().enumerate() {
        s |= (((word & row).count_ones() & 1) as u8) << r;
    }
    s
}

fn mask_of(bits: &[u8]) -> u16 {
    bits.iter()
        .enumerate()
        .fold(0u16, |m, (i, &b)| m | ((b as u16) << i))
}

pub fn tornado_encode(data: [u8; DATA_BITS], _g: &TornadoGraph) -> [u8; CODE_BITS] {
    let [d1, d2, d3, d4, d5, d6, d7] = data;
    let c1 = d1 ^ d2 ^ d3;
    let c2 = d3 ^ d4 ^ d5;
    let c3 = d5 ^ d6 ^ d7;
    let c4 = d1 ^ d4 ^ d7;
    let c5 = c1 ^ c2 ^ c3 ^ c4;
    [d1, d2, d3, d4, d5, d6, d7, c1, c2, c3, c4, c5]
}

pub fn tornado_decode(block: [u8; CODE_BITS], g: &TornadoGraph) -> ([u8; DATA_BITS], BlockStatus) {
    let mask = mask_of(&block);
    let syndrome = g.syndrome(mask);
    let data = |m: u16| -> [u8; DATA_BITS] {
        let mut d = [0u8; DATA_BITS];
        for (i, bit) in d.iter_mut().enumerate() {
            *bit = ((m >> i) & 1) as u8;
        }
        d
    };

    if syndrome == 0 {
        return (data(mask), BlockStatus::Clean);
    }
    match g.coset_leader(syndrome) {
        Some((leader, weight)) => (data(mask ^ leader), BlockStatus::Corrected(weight as usize)),
        None => (data(mask), BlockStatus::DetectedUncorrectable),
    }
}
