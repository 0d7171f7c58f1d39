//! General-purpose lossless text coders over the alphabet {a-z, space}.
//!
//! Three coders live here: fixed-tree Huffman ([`huffman`]), integer
//! arithmetic coding with interval scaling ([`arithmetic`]), and LZW with a
//! 4-bit code-width header ([`lzw`]). Huffman and arithmetic share a
//! [`FrequencyTable`]; the default table is derived from the codebook corpus
//! itself so the crate carries no invented constants.

pub mod arithmetic;
pub mod huffman;
pub mod lzw;

use std::path::Path;

use thiserror::Error;

use crate::codebook::Codebook;

/// Alphabet size: the 26 lowercase letters plus space.
pub const ALPHABET_SIZE: usize = 27;

/// Index of the space symbol (letters are 0..=25 in order).
pub const SPACE_INDEX: usize = 26;

#[derive(Debug, Error, PartialEq)]
pub enum SourceError {
    #[error("symbol {0:?} is not in the alphabet a-z/space")]
    SymbolNotInAlphabet(char),
    #[error("text of {len} characters exceeds the {max}-character limit")]
    TextTooLong { len: usize, max: usize },
    #[error("dangling suffix: trailing bits complete no codeword")]
    DanglingSuffix,
    #[error("truncated tag: fewer than {0} header bits")]
    TruncatedTag(usize),
    #[error("code width {0} in header is outside the valid range 5-15")]
    InvalidCodeWidth(u64),
    #[error("largest emitted code needs {0} bits; width header holds at most 15")]
    CodeWidthOverflow(u32),
    #[error("invalid code {code}: dictionary holds {dict_len} entries")]
    InvalidCode { code: u32, dict_len: usize },
    #[error("{got} payload bits are not a multiple of the code width {width}")]
    TrailingBits { got: usize, width: usize },
    #[error("bad frequency table: {0}")]
    BadFrequencyTable(String),
    #[error("cannot read frequency file: {0}")]
    Io(String),
}

/// Maps an alphabet character to its index, `a..z` then space.
pub fn symbol_index(c: char) -> Result<usize, SourceError> {
    match c {
        'a'..='z' => Ok(c as usize - 'a' as usize),
        ' ' => Ok(SPACE_INDEX),
        other => Err(SourceError::SymbolNotInAlphabet(other)),
    }
}

/// Inverse of [`symbol_index`].
pub fn index_symbol(i: usize) -> char {
    debug_assert!(i < ALPHABET_SIZE);
    if i == SPACE_INDEX {
        ' '
    } else {
        (b'a' + i as u8) as char
    }
}

/// Converts text to alphabet indices, rejecting out-of-alphabet symbols.
pub fn text_to_indices(text: &str) -> Result<Vec<usize>, SourceError> {
    text.chars().map(symbol_index).collect()
}

/// Per-symbol probabilities for the 27-symbol alphabet. Every probability is
/// strictly positive and the sum is 1 (within 1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    probs: [f64; ALPHABET_SIZE],
}

impl FrequencyTable {
    pub fn new(probs: [f64; ALPHABET_SIZE]) -> Result<FrequencyTable, SourceError> {
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p <= 0.0) {
            return Err(SourceError::BadFrequencyTable(format!(
                "probability {p} is not strictly positive"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(SourceError::BadFrequencyTable(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(FrequencyTable { probs })
    }

    /// Table from raw occurrence counts with add-one smoothing, so symbols
    /// absent from the corpus still get a positive probability.
    pub fn from_counts(counts: [u64; ALPHABET_SIZE]) -> FrequencyTable {
        let total: u64 = counts.iter().sum::<u64>() + ALPHABET_SIZE as u64;
        let mut probs = [0.0; ALPHABET_SIZE];
        for (p, &c) in probs.iter_mut().zip(counts.iter()) {
            *p = (c + 1) as f64 / total as f64;
        }
        FrequencyTable { probs }
    }

    /// The default table: symbol counts over the concatenation of the 20
    /// codebook message texts (add-one smoothed, then normalized).
    /// Deterministic and self-contained; no external corpus required.
    pub fn from_codebook(cb: &Codebook) -> FrequencyTable {
        let mut counts = [0u64; ALPHABET_SIZE];
        for m in cb.messages() {
            for c in m.text.chars() {
                counts[symbol_index(c).expect("codebook text is in-alphabet")] += 1;
            }
        }
        FrequencyTable::from_counts(counts)
    }

    /// Loads the documented frequency-file format: 27 lines
    /// `symbol,probability` with space spelled `SP`.
    pub fn load_file(path: &Path) -> Result<FrequencyTable, SourceError> {
        let data = std::fs::read_to_string(path).map_err(|e| SourceError::Io(e.to_string()))?;
        FrequencyTable::parse(&data)
    }

    pub fn parse(data: &str) -> Result<FrequencyTable, SourceError> {
        let mut probs = [0.0f64; ALPHABET_SIZE];
        let mut seen = [false; ALPHABET_SIZE];
        for (lineno, line) in data.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (sym, prob) = line.split_once(',').ok_or_else(|| {
                SourceError::BadFrequencyTable(format!("line {}: expected symbol,probability", lineno + 1))
            })?;
            let idx = match sym.trim() {
                "SP" => SPACE_INDEX,
                s if s.len() == 1 => symbol_index(s.chars().next().unwrap())?,
                other => {
                    return Err(SourceError::BadFrequencyTable(format!(
                        "line {}: bad symbol token {other:?}",
                        lineno + 1
                    )))
                }
            };
            if seen[idx] {
                return Err(SourceError::BadFrequencyTable(format!(
                    "duplicate symbol {:?}",
                    index_symbol(idx)
                )));
            }
            seen[idx] = true;
            probs[idx] = prob.trim().parse::<f64>().map_err(|e| {
                SourceError::BadFrequencyTable(format!("line {}: {e}", lineno + 1))
            })?;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(SourceError::BadFrequencyTable(format!(
                "missing symbol {:?}",
                index_symbol(i)
            )));
        }
        FrequencyTable::new(probs)
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn probs(&self) -> &[f64; ALPHABET_SIZE] {
        &self.probs
    }

    /// Shannon entropy in bits per symbol.
    pub fn entropy(&self) -> f64 {
        -self.probs.iter().map(|p| p * p.log2()).sum::<f64>()
    }
}
