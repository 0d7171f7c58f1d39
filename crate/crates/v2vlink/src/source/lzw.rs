//! LZW dictionary coding with a 4-bit code-width header.
//!
//! The dictionary starts with the 27 single-symbol strings (indices 0..=26,
//! a..z then space) and grows without bound within a message. Instead of the
//! classic fixed 12-bit codes, the output starts with a 4-bit header holding
//! the code width w = max(5, bits needed for the largest emitted code);
//! every code is then written as exactly w bits. Output length is therefore
//! always 4 + w * (number of emitted codes).

use std::collections::HashMap;

use crate::bits::BitString;
use crate::source::{index_symbol, text_to_indices, SourceError, ALPHABET_SIZE};

const HEADER_BITS: usize = 4;
const MIN_WIDTH: u32 = 5;
const MAX_WIDTH: u32 = 15;

/// Runs the LZW dictionary pass and returns the emitted code sequence.
/// Dictionary entries are keyed as (existing-entry code, extension symbol),
/// which is equivalent to storing the strings themselves.
pub fn encode_to_codes(text: &str) -> Result<Vec<u32>, SourceError> {
    let symbols = text_to_indices(text)?;
    let mut codes = Vec::new();
    let Some((&first, rest)) = symbols.split_first() else {
        return Ok(codes);
    };

    let mut dict: HashMap<(u32, u8), u32> = HashMap::new();
    let mut next_code = ALPHABET_SIZE as u32;
    let mut current = first as u32;
    for &sym in rest {
        let key = (current, sym as u8);
        if let Some(&code) = dict.get(&key) {
            current = code;
        } else {
            codes.push(current);
            dict.insert(key, next_code);
            next_code += 1;
            current = sym as u32;
        }
    }
    codes.push(current);
    Ok(codes)
}

/// Width-header framing of [`encode_to_codes`].
pub fn lzw_encode(text: &str) -> Result<BitString, SourceError> {
    let codes = encode_to_codes(text)?;
    let max_code = codes.iter().copied().max().unwrap_or(0);
    let width = MIN_WIDTH.max(32 - max_code.leading_zeros());
    if width > MAX_WIDTH {
        return Err(SourceError::CodeWidthOverflow(width));
    }
    let mut out = BitString::with_capacity(HEADER_BITS + width as usize * codes.len());
    out.push_uint(width as u64, HEADER_BITS);
    for code in codes {
        out.push_uint(code as u64, width as usize);
    }
    Ok(out)
}

/// Standard LZW reconstruction, including the corner case where a code
/// references the dictionary entry currently being built.
pub fn lzw_decode(bits: &BitString) -> Result<String, SourceError> {
    if bits.len() < HEADER_BITS {
        return Err(SourceError::TruncatedTag(HEADER_BITS));
    }
    let width = bits.read_uint(0, HEADER_BITS).expect("length checked");
    if !(MIN_WIDTH as u64..=MAX_WIDTH as u64).contains(&width) {
        return Err(SourceError::InvalidCodeWidth(width));
    }
    let width = width as usize;
    let payload = bits.len() - HEADER_BITS;
    if payload % width != 0 {
        return Err(SourceError::TrailingBits {
            got: payload,
            width,
        });
    }

    let n_codes = payload / width;
    if n_codes == 0 {
        return Ok(String::new());
    }

    let mut dict: Vec<Vec<u8>> = (0..ALPHABET_SIZE).map(|i| vec![i as u8]).collect();
    let read_code = |i: usize| -> u32 {
        bits.read_uint(HEADER_BITS + i * width, width).expect("length checked") as u32
    };

    let first = read_code(0);
    if first as usize >= dict.len() {
        return Err(SourceError::InvalidCode {
            code: first,
            dict_len: dict.len(),
        });
    }
    let mut prev = dict[first as usize].clone();
    let mut out: Vec<u8> = prev.clone();

    for i in 1..n_codes {
        let code = read_code(i) as usize;
        let entry = if code < dict.len() {
            dict[code].clone()
        } else if code == dict.len() {
            // The entry under construction: prev extended by its own head.
            let mut e = prev.clone();
            e.push(prev[0]);
            e
        } else {
            return Err(SourceError::InvalidCode {
                code: code as u32,
                dict_len: dict.len(),
            });
        };
        let mut new_entry = prev.clone();
        new_entry.push(entry[0]);
        dict.push(new_entry);
        out.extend_from_slice(&entry);
        prev = entry;
    }

    Ok(out.into_iter().map(|i| index_symbol(i as usize)).collect())
}
