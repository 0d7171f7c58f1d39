//! Integer arithmetic coding with interval scaling.
//!
//! 32-bit low/high registers, the three classic rescaling cases (lower half,
//! upper half, middle straddle), and symbol counts quantized to a cumulative
//! total of 2^14 with a minimum count of 1 per symbol. The encoded form is an
//! 8-bit character-count header followed by the tag bits, which makes the
//! stream self-delimiting: the decoder produces exactly header-many symbols
//! and stops.

use crate::bits::BitString;
use crate::source::{
    index_symbol, text_to_indices, FrequencyTable, SourceError, ALPHABET_SIZE,
};

const PRECISION: u32 = 32;
const WHOLE: u64 = 1 << PRECISION;
const HALF: u64 = WHOLE / 2;
const QUARTER: u64 = WHOLE / 4;
const THREE_QUARTERS: u64 = 3 * QUARTER;

/// Cumulative count total after quantization. Must stay <= 2^(PRECISION-2)
/// so every symbol interval remains non-empty after range scaling.
pub const CUMULATIVE_TOTAL: u64 = 1 << 14;

/// Longest encodable text: the count must fit the 8-bit header.
pub const MAX_TEXT_LEN: usize = 255;

const HEADER_BITS: usize = 8;

/// Frequency table quantized to integer cumulative counts summing to
/// [`CUMULATIVE_TOTAL`], with every symbol count >= 1.
#[derive(Debug, Clone)]
pub struct QuantizedModel {
    /// cum[i]..cum[i+1] is symbol i's interval; cum[27] == CUMULATIVE_TOTAL.
    cum: [u64; ALPHABET_SIZE + 1],
}

impl QuantizedModel {
    pub fn from_table(freq: &FrequencyTable) -> QuantizedModel {
        // Largest-remainder apportionment of the non-reserved mass; one count
        // per symbol is reserved up front so no interval is empty.
        let spare = CUMULATIVE_TOTAL - ALPHABET_SIZE as u64;
        let mut counts = [1u64; ALPHABET_SIZE];
        let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(ALPHABET_SIZE);
        let mut assigned = 0u64;
        for i in 0..ALPHABET_SIZE {
            let ideal = freq.prob(i) * spare as f64;
            let floor = ideal.floor() as u64;
            counts[i] += floor;
            assigned += floor;
            remainders.push((i, ideal - floor as f64));
        }
        remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for &(i, _) in remainders.iter().take((spare - assigned) as usize) {
            counts[i] += 1;
        }

        let mut cum = [0u64; ALPHABET_SIZE + 1];
        for i in 0..ALPHABET_SIZE {
            cum[i + 1] = cum[i] + counts[i];
        }
        debug_assert_eq!(cum[ALPHABET_SIZE], CUMULATIVE_TOTAL);
        QuantizedModel { cum }
    }

    fn interval(&self, sym: usize) -> (u64, u64) {
        (self.cum[sym], self.cum[sym + 1])
    }

    fn find(&self, scaled: u64) -> usize {
        // 27 entries: a linear scan beats a binary search at this size.
        for i in 0..ALPHABET_SIZE {
            if scaled < self.cum[i + 1] {
                return i;
            }
        }
        ALPHABET_SIZE - 1
    }
}

struct TagWriter {
    out: BitString,
    pending: u32,
}

impl TagWriter {
    fn emit(&mut self, bit: u8) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(bit ^ 1);
        }
        self.pending = 0;
    }
}

/// Encodes `text` as an 8-bit length header followed by the arithmetic tag.
pub fn arithmetic_encode(text: &str, freq: &FrequencyTable) -> Result<BitString, SourceError> {
    let symbols = text_to_indices(text)?;
    if symbols.len() > MAX_TEXT_LEN {
        return Err(SourceError::TextTooLong {
            len: symbols.len(),
            max: MAX_TEXT_LEN,
        });
    }

    let mut out = BitString::new();
    out.push_uint(symbols.len() as u64, HEADER_BITS);
    if symbols.is_empty() {
        return Ok(out);
    }

    let model = QuantizedModel::from_table(freq);
    let mut w = TagWriter { out, pending: 0 };
    let mut low: u64 = 0;
    let mut high: u64 = WHOLE - 1;

    for &sym in &symbols {
        let (cum_lo, cum_hi) = model.interval(sym);
        let range = high - low + 1;
        high = low + range * cum_hi / CUMULATIVE_TOTAL - 1;
        low += range * cum_lo / CUMULATIVE_TOTAL;
        loop {
            if high < HALF {
                w.emit(0);
            } else if low >= HALF {
                w.emit(1);
                low -= HALF;
                high -= HALF;
            } else if low >= QUARTER && high < THREE_QUARTERS {
                w.pending += 1;
                low -= QUARTER;
                high -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
        }
    }

    // Disambiguating termination: the final interval straddles a quarter
    // boundary; two bits (plus any pending) pin a point inside it.
    w.pending += 1;
    if low < QUARTER {
        w.emit(0);
    } else {
        w.emit(1);
    }
    Ok(w.out)
}

/// Decodes a stream produced by [`arithmetic_encode`] under the same table.
/// Produces exactly header-many symbols; a corrupted tag therefore still
/// decodes to the right character count (possibly the wrong characters).
pub fn arithmetic_decode(bits: &BitString, freq: &FrequencyTable) -> Result<String, SourceError> {
    if bits.len() < HEADER_BITS {
        return Err(SourceError::TruncatedTag(HEADER_BITS));
    }
    let count = bits.read_uint(0, HEADER_BITS).expect("length checked") as usize;
    if count == 0 {
        return Ok(String::new());
    }

    let model = QuantizedModel::from_table(freq);
    let mut pos = HEADER_BITS;
    // Tag bits beyond the stream read as 0; the termination bits guarantee
    // the true value stays inside every decoding interval regardless.
    let mut next_bit = move |bits: &BitString| -> u64 {
        let b = bits.get(pos).unwrap_or(0) as u64;
        pos += 1;
        b
    };

    let mut value: u64 = 0;
    for _ in 0..PRECISION {
        value = (value << 1) | next_bit(bits);
    }

    let mut low: u64 = 0;
    let mut high: u64 = WHOLE - 1;
    let mut out = String::with_capacity(count);

    for _ in 0..count {
        let range = high - low + 1;
        let scaled = ((value - low + 1) * CUMULATIVE_TOTAL - 1) / range;
        let sym = model.find(scaled);
        out.push(index_symbol(sym));

        let (cum_lo, cum_hi) = model.interval(sym);
        high = low + range * cum_hi / CUMULATIVE_TOTAL - 1;
        low += range * cum_lo / CUMULATIVE_TOTAL;
        loop {
            if high < HALF {
                // low half: no offset
            } else if low >= HALF {
                value -= HALF;
                low -= HALF;
                high -= HALF;
            } else if low >= QUARTER && high < THREE_QUARTERS {
                value -= QUARTER;
                low -= QUARTER;
                high -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
            value = (value << 1) | next_bit(bits);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Codebook;
    use crate::rng::SplitMix64;
    use crate::source::huffman::{build_huffman, huffman_encode};
    use crate::source::SPACE_INDEX;

    fn default_freq() -> FrequencyTable {
        FrequencyTable::from_codebook(&Codebook::builtin())
    }

    #[test]
    fn empty_text_is_header_only() {
        let enc = arithmetic_encode("", &default_freq()).unwrap();
        assert_eq!(enc, "00000000".parse().unwrap());
        assert_eq!(arithmetic_decode(&enc, &default_freq()).unwrap(), "");
    }

    #[test]
    fn quantized_model_totals() {
        let m = QuantizedModel::from_table(&default_freq());
        assert_eq!(m.cum[ALPHABET_SIZE], CUMULATIVE_TOTAL);
        for i in 0..ALPHABET_SIZE {
            assert!(m.cum[i + 1] > m.cum[i], "empty interval for symbol {i}");
        }
    }

    #[test]
    fn round_trip_every_codebook_message() {
        let freq = default_freq();
        for m in Codebook::builtin().messages() {
            let enc = arithmetic_encode(&m.text, &freq).unwrap();
            assert_eq!(arithmetic_decode(&enc, &freq).unwrap(), m.text, "{}", m.text);
        }
    }

    #[test]
    fn round_trip_random_texts() {
        let freq = default_freq();
        let mut rng = SplitMix64::new(0x5EED);
        for _ in 0..300 {
            let len = rng.next_below(MAX_TEXT_LEN + 1);
            let text: String = (0..len)
                .map(|_| index_symbol(rng.next_below(ALPHABET_SIZE)))
                .collect();
            let enc = arithmetic_encode(&text, &freq).unwrap();
            assert_eq!(arithmetic_decode(&enc, &freq).unwrap(), text);
        }
    }

    #[test]
    fn round_trip_boundary_lengths() {
        let freq = default_freq();
        for len in [1usize, 2, 254, 255] {
            let text: String = (0..len).map(|i| index_symbol(i % ALPHABET_SIZE)).collect();
            let enc = arithmetic_encode(&text, &freq).unwrap();
            assert_eq!(arithmetic_decode(&enc, &freq).unwrap(), text);
        }
    }

    #[test]
    fn text_longer_than_255_rejected() {
        let text = "a".repeat(256);
        assert_eq!(
            arithmetic_encode(&text, &default_freq()),
            Err(SourceError::TextTooLong { len: 256, max: 255 })
        );
    }

    #[test]
    fn truncated_header_rejected() {
        assert_eq!(
            arithmetic_decode(&"0000".parse().unwrap(), &default_freq()),
            Err(SourceError::TruncatedTag(8))
        );
    }

    #[test]
    fn corrupted_tag_still_yields_header_many_symbols() {
        let freq = default_freq();
        let mut enc = arithmetic_encode("emergency ahead", &freq).unwrap();
        for i in HEADER_BITS..enc.len() {
            enc.flip(i);
        }
        let decoded = arithmetic_decode(&enc, &freq).unwrap();
        assert_eq!(decoded.chars().count(), 15);
    }

    #[test]
    fn skewed_source_beats_huffman() {
        // p(a) = 0.9, the rest share 0.1: the tag for "aaaaaaaaaa"
        // approaches -10*log2(0.9) ~ 1.5 bits plus termination overhead,
        // while Huffman cannot go below 1 bit per symbol.
        let mut probs = [0.1 / 26.0; ALPHABET_SIZE];
        probs[0] = 0.9;
        let freq = FrequencyTable::new(probs).unwrap();

        let text = "aaaaaaaaaa";
        let arith = arithmetic_encode(text, &freq).unwrap();
        let tag_len = arith.len() - HEADER_BITS;

        let table = build_huffman(&freq);
        let huff_len = huffman_encode(text, &table).unwrap().len();
        assert!(
            tag_len < huff_len,
            "tag {tag_len} bits not shorter than huffman {huff_len} bits"
        );
        assert_eq!(arithmetic_decode(&arith, &freq).unwrap(), text);
    }

    #[test]
    fn decoder_consumes_exactly_the_encoder_output() {
        // Self-delimiting: appending garbage after the encoded stream must
        // not change the decode result.
        let freq = default_freq();
        let text = "left turn ahead";
        let enc = arithmetic_encode(text, &freq).unwrap();
        let mut extended = enc.clone();
        for i in 0..16 {
            extended.push((i % 2) as u8);
        }
        assert_eq!(arithmetic_decode(&extended, &freq).unwrap(), text);
    }

    #[test]
    fn space_heavy_text_round_trips() {
        let freq = default_freq();
        let text = " ".repeat(40);
        let enc = arithmetic_encode(&text, &freq).unwrap();
        assert_eq!(arithmetic_decode(&enc, &freq).unwrap(), text);
        let _ = SPACE_INDEX;
    }
}
