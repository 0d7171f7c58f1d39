//! Fixed-tree Huffman coding.
//!
//! The tree is built once from a [`FrequencyTable`] and shared by both ends,
//! so no tree or mapping ever goes over the air. Tie-breaking is fully
//! deterministic: leaves carry creation indices 0..=26 (a..z then space),
//! internal nodes are numbered from 27 in creation order, merging always takes
//! the two nodes with the smallest (weight, creation index), and the
//! first-merged node takes branch bit 0.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::bits::BitString;
use crate::source::{index_symbol, symbol_index, FrequencyTable, SourceError};

/// Prefix-free codeword per alphabet symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixCodeTable {
    codes: Vec<BitString>,
}

impl PrefixCodeTable {
    pub fn code(&self, index: usize) -> &BitString {
        &self.codes[index]
    }

    pub fn codes(&self) -> &[BitString] {
        &self.codes
    }

    /// Sum of 2^-len over all codewords; <= 1 for any prefix-free set.
    pub fn kraft_sum(&self) -> f64 {
        self.codes
            .iter()
            .map(|c| (2.0f64).powi(-(c.len() as i32)))
            .sum()
    }

    /// Expected codeword length in bits per symbol under `freq`.
    pub fn expected_length(&self, freq: &FrequencyTable) -> f64 {
        self.codes
            .iter()
            .enumerate()
            .map(|(i, c)| freq.prob(i) * c.len() as f64)
            .sum()
    }

    pub fn is_prefix_free(&self) -> bool {
        for (i, a) in self.codes.iter().enumerate() {
            for (j, b) in self.codes.iter().enumerate() {
                if i != j
                    && a.len() <= b.len()
                    && a.as_slice() == &b.as_slice()[..a.len()]
                {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug)]
struct HeapEntry {
    weight: f64,
    creation_index: usize,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // Reversed so the BinaryHeap pops the smallest (weight, creation index).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then(other.creation_index.cmp(&self.creation_index))
    }
}

enum Node {
    Leaf(usize),
    Internal { zero: usize, one: usize },
}

/// Core Huffman construction over arbitrary positive weights. Returns one
/// codeword per input weight, in input order. Exposed separately from the
/// 27-symbol table so reduced harnesses can exercise toy alphabets.
pub fn build_code(weights: &[f64]) -> Vec<BitString> {
    assert!(!weights.is_empty());
    assert!(weights.iter().all(|w| w.is_finite() && *w > 0.0));
    if weights.len() == 1 {
        return vec!["0".parse().unwrap()];
    }

    let mut nodes: Vec<Node> = (0..weights.len()).map(Node::Leaf).collect();
    let mut heap: BinaryHeap<HeapEntry> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| HeapEntry {
            weight: w,
            creation_index: i,
            node: i,
        })
        .collect();
    let mut next_index = weights.len();

    while heap.len() > 1 {
        let first = heap.pop().unwrap();
        let second = heap.pop().unwrap();
        nodes.push(Node::Internal {
            zero: first.node,
            one: second.node,
        });
        heap.push(HeapEntry {
            weight: first.weight + second.weight,
            creation_index: next_index,
            node: nodes.len() - 1,
        });
        next_index += 1;
    }

    let root = heap.pop().unwrap().node;
    let mut codes = vec![BitString::new(); weights.len()];
    let mut stack = vec![(root, BitString::new())];
    while let Some((node, prefix)) = stack.pop() {
        match nodes[node] {
            Node::Leaf(sym) => codes[sym] = prefix,
            Node::Internal { zero, one } => {
                let mut p0 = prefix.clone();
                p0.push(0);
                let mut p1 = prefix;
                p1.push(1);
                stack.push((zero, p0));
                stack.push((one, p1));
            }
        }
    }
    codes
}

/// Builds the optimal prefix code for the 27-symbol alphabet.
pub fn build_huffman(freq: &FrequencyTable) -> PrefixCodeTable {
    let codes = build_code(freq.probs());
    let table = PrefixCodeTable { codes };
    debug_assert!(table.is_prefix_free());
    debug_assert!(table.kraft_sum() <= 1.0 + 1e-9);
    table
}

/// Concatenates the per-symbol codewords of `text`.
pub fn huffman_encode(text: &str, table: &PrefixCodeTable) -> Result<BitString, SourceError> {
    let mut out = BitString::new();
    for c in text.chars() {
        out.extend(table.code(symbol_index(c)?));
    }
    Ok(out)
}

/// Walks the code tree bit by bit; any trailing bits that complete no
/// codeword are a dangling-suffix error.
pub fn huffman_decode(bits: &BitString, table: &PrefixCodeTable) -> Result<String, SourceError> {
    // Decode tree as a flat array: node -> [child on 0, child on 1], with
    // leaves encoded as symbol | LEAF_TAG.
    const LEAF_TAG: u32 = 1 << 31;
    const EMPTY: u32 = u32::MAX;
    let mut tree: Vec<[u32; 2]> = vec![[EMPTY, EMPTY]];
    for (sym, code) in table.codes().iter().enumerate() {
        let mut node = 0usize;
        for (i, b) in code.iter().enumerate() {
            let last = i + 1 == code.len();
            let slot = tree[node][b as usize];
            if last {
                tree[node][b as usize] = sym as u32 | LEAF_TAG;
            } else if slot == EMPTY {
                tree.push([EMPTY, EMPTY]);
                let idx = (tree.len() - 1) as u32;
                tree[node][b as usize] = idx;
                node = idx as usize;
            } else {
                node = slot as usize;
            }
        }
    }

    let mut out = String::new();
    let mut node = 0usize;
    let mut mid_codeword = false;
    for b in bits.iter() {
        let slot = tree[node][b as usize];
        if slot == EMPTY {
            return Err(SourceError::DanglingSuffix);
        }
        if slot & LEAF_TAG != 0 {
            out.push(index_symbol((slot & !LEAF_TAG) as usize));
            node = 0;
            mid_codeword = false;
        } else {
            node = slot as usize;
            mid_codeword = true;
        }
    }
    if mid_codeword {
        return Err(SourceError::DanglingSuffix);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Codebook;
    use crate::source::ALPHABET_SIZE;

    fn default_table() -> (FrequencyTable, PrefixCodeTable) {
        let freq = FrequencyTable::from_codebook(&Codebook::builtin());
        let table = build_huffman(&freq);
        (freq, table)
    }

    /// Independent optimality oracle: minimal expected length over all
    /// prefix-code length profiles satisfying the Kraft inequality. Lengths
    /// are assigned to symbols sorted by descending probability, so only
    /// non-decreasing length profiles need enumerating.
    fn optimal_expected_length(weights: &[f64]) -> f64 {
        let n = weights.len();
        let max_len = n.max(2) - 1;
        let mut sorted = weights.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut best = f64::INFINITY;
        let mut profile = vec![0usize; n];

        fn recurse(
            sorted: &[f64],
            profile: &mut [usize],
            pos: usize,
            min_len: usize,
            max_len: usize,
            kraft_left: f64,
            acc: f64,
            best: &mut f64,
        ) {
            if acc >= *best {
                return;
            }
            if pos == sorted.len() {
                *best = acc;
                return;
            }
            for len in min_len..=max_len {
                let cost = (2.0f64).powi(-(len as i32));
                // The remaining symbols each need at least 2^-max_len.
                let remaining = (sorted.len() - pos - 1) as f64
                    * (2.0f64).powi(-(max_len as i32));
                if cost + remaining <= kraft_left + 1e-12 {
                    profile[pos] = len;
                    recurse(
                        sorted,
                        profile,
                        pos + 1,
                        len,
                        max_len,
                        kraft_left - cost,
                        acc + sorted[pos] * len as f64,
                        best,
                    );
                }
            }
        }

        recurse(&sorted, &mut profile, 0, 1, max_len, 1.0, 0.0, &mut best);
        best
    }

    #[test]
    fn toy_table_lengths() {
        let codes = build_code(&[0.5, 0.25, 0.25]);
        let lens: Vec<usize> = codes.iter().map(|c| c.len()).collect();
        assert_eq!(lens, vec![1, 2, 2]);
        let expected: f64 = [0.5, 0.25, 0.25]
            .iter()
            .zip(&lens)
            .map(|(p, l)| p * *l as f64)
            .sum();
        assert!((expected - optimal_expected_length(&[0.5, 0.25, 0.25])).abs() < 1e-12);
    }

    #[test]
    fn uniform_27_length_profile() {
        let freq = FrequencyTable::new([1.0 / 27.0; ALPHABET_SIZE]).unwrap();
        let table = build_huffman(&freq);
        let lens: Vec<usize> = table.codes().iter().map(|c| c.len()).collect();
        assert!(lens.iter().all(|&l| l == 4 || l == 5));
        assert_eq!(lens.iter().filter(|&&l| l == 4).count(), 5);
    }

    #[test]
    fn matches_brute_force_optimum_on_small_tables() {
        let cases: &[&[f64]] = &[
            &[0.5, 0.25, 0.25],
            &[0.9, 0.05, 0.03, 0.02],
            &[0.3, 0.3, 0.2, 0.1, 0.1],
            &[0.2, 0.2, 0.2, 0.2, 0.2],
            &[0.4, 0.35, 0.2, 0.05],
        ];
        for weights in cases {
            let codes = build_code(weights);
            let got: f64 = weights
                .iter()
                .zip(&codes)
                .map(|(p, c)| p * c.len() as f64)
                .sum();
            let best = optimal_expected_length(weights);
            assert!(
                (got - best).abs() < 1e-9,
                "weights {weights:?}: huffman {got}, optimum {best}"
            );
        }
    }

    #[test]
    fn output_is_prefix_free_with_kraft_at_most_one() {
        let (_, table) = default_table();
        assert!(table.is_prefix_free());
        assert!(table.kraft_sum() <= 1.0 + 1e-12);
    }

    #[test]
    fn expected_length_within_one_bit_of_entropy() {
        let (freq, table) = default_table();
        let h = freq.entropy();
        let el = table.expected_length(&freq);
        assert!(el >= h - 1e-9, "expected length {el} below entropy {h}");
        assert!(el < h + 1.0, "expected length {el} not within 1 bit of {h}");
    }

    #[test]
    fn encode_basics() {
        let (_, table) = default_table();
        assert_eq!(huffman_encode("", &table).unwrap(), BitString::new());

        let a = symbol_index('a').unwrap();
        let mut aa = BitString::new();
        aa.extend(table.code(a));
        aa.extend(table.code(a));
        assert_eq!(huffman_encode("aa", &table).unwrap(), aa);

        assert_eq!(
            huffman_encode("Bad!", &table),
            Err(SourceError::SymbolNotInAlphabet('B'))
        );
    }

    #[test]
    fn round_trip_every_codebook_message() {
        let (_, table) = default_table();
        for m in Codebook::builtin().messages() {
            let enc = huffman_encode(&m.text, &table).unwrap();
            assert_eq!(huffman_decode(&enc, &table).unwrap(), m.text);
        }
        assert_eq!(huffman_decode(&BitString::new(), &table).unwrap(), "");
    }

    #[test]
    fn dangling_suffix_detected() {
        let (_, table) = default_table();
        // No codeword in the default table is a single bit, so one extra 0
        // after a valid stream can never complete a codeword.
        assert!(table.codes().iter().all(|c| c.len() >= 2));
        let mut bits = huffman_encode("emergency ahead", &table).unwrap();
        bits.push(0);
        assert_eq!(
            huffman_decode(&bits, &table),
            Err(SourceError::DanglingSuffix)
        );
    }
}
