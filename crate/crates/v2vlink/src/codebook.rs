//! Safety-message codebook and the two message-level source coders.
//!
//! The built-in codebook is the normative set of 20 basic safety messages,
//! each carrying a fixed three-letter abbreviation, a priority class, a
//! probability (a rational over the fixed denominator 1075) and a prefix-free
//! codeword of 3-6 bits. The codewords are shipped as constants and never
//! re-derived: the table is the ground truth, including its irregularities.
//!
//! Two coders operate directly on the codebook:
//! - abbreviation coding: 3 characters x 8 bits = 24 bits per message;
//! - probability coding: the whole message maps to its table codeword.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;

/// Fixed denominator of every message probability.
pub const PROBABILITY_DENOMINATOR: u32 = 1075;

/// Bits per abbreviation character (standard 8-bit character code).
const CHAR_BITS: usize = 8;

/// Abbreviation length in characters, hence 24 bits on the wire.
pub const ABBREVIATION_LEN: usize = 3;

#[derive(Debug, Error)]
pub enum CodebookError {
    #[error("cannot read codebook file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse codebook file: {0}")]
    Parse(String),
    #[error("expected 20 messages, found {0}")]
    WrongMessageCount(usize),
    #[error("message {id}: {reason}")]
    InvalidMessage { id: u32, reason: String },
    #[error("duplicate codeword {0}")]
    DuplicateCodeword(String),
    #[error("duplicate abbreviation {0}")]
    DuplicateAbbreviation(String),
    #[error("codeword set is not prefix-free: {0} is a prefix of {1}")]
    NotPrefixFree(String, String),
    #[error("probability numerators sum to {0}, expected {PROBABILITY_DENOMINATOR}")]
    ProbabilitySum(u32),
    #[error("Kraft sum of codeword lengths is {num}/{den}, expected exactly 1")]
    KraftSum { num: u64, den: u64 },
    #[error("unknown message {0:?}")]
    UnknownMessage(String),
    #[error("unknown abbreviation {0:?}")]
    UnknownAbbreviation(String),
    #[error("bit stream is not decodable as a message codeword")]
    Undecodable,
    #[error("need at least {needed} bits, got {got}")]
    TruncatedInput { needed: usize, got: usize },
}

/// Message priority class. P1 messages are the most urgent and carry the
/// shortest codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Priority {
    P1,
    P2,
    P3,
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Priority::P1 => write!(f, "P1"),
            Priority::P2 => write!(f, "P2"),
            Priority::P3 => write!(f, "P3"),
        }
    }
}

/// One codebook row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyMessage {
    pub id: u32,
    pub text: String,
    pub abbreviation: String,
    pub priority: Priority,
    /// Probability numerator over [`PROBABILITY_DENOMINATOR`].
    pub prob_numerator: u32,
    pub codeword: BitString,
}

impl SafetyMessage {
    pub fn probability(&self) -> f64 {
        self.prob_numerator as f64 / PROBABILITY_DENOMINATOR as f64
    }
}

/// The validated message set. Immutable after load; freely shareable.
#[derive(Debug, Clone)]
pub struct Codebook {
    messages: Vec<SafetyMessage>,
}

/// Serialized row layout of the codebook JSON file.
#[derive(Serialize, Deserialize)]
struct MessageRecord {
    id: u32,
    text: String,
    abbreviation: String,
    priority: String,
    prob_numerator: u32,
    codeword_bits: String,
}

// id, text, abbreviation, priority, probability numerator, codeword.
const BUILTIN_ROWS: [(u32, &str, &str, Priority, u32, &str); 20] = [
    (1, "left turn ahead", "LTA", Priority::P2, 50, "00111"),
    (2, "right turn ahead", "RTA", Priority::P2, 50, "00110"),
    (3, "emergency ahead", "EGA", Priority::P1, 100, "101"),
    (4, "emergency braking", "EGB", Priority::P1, 100, "100"),
    (5, "brakes applied", "BKA", Priority::P1, 100, "111"),
    (6, "lane change alert", "LCA", Priority::P2, 50, "00001"),
    (7, "queue warning", "QEW", Priority::P3, 25, "001001"),
    (8, "hump warning", "HMW", Priority::P3, 25, "001000"),
    (9, "pedestrian crossing ahead", "PCA", Priority::P1, 100, "110"),
    (10, "work in progress ahead", "WPA", Priority::P3, 25, "001011"),
    (11, "leave way for the ambulance", "LWA", Priority::P1, 100, "011"),
    (12, "intersection ahead", "ISA", Priority::P2, 50, "00000"),
    (13, "taking left turn", "TLT", Priority::P2, 50, "00011"),
    (14, "taking right turn", "TRT", Priority::P2, 50, "00010"),
    (15, "road condition not good", "RNG", Priority::P3, 25, "001010"),
    (16, "allow overtake", "AWO", Priority::P3, 25, "010101"),
    (17, "allowed overtake", "AEO", Priority::P3, 25, "010100"),
    (18, "searching for parking", "SFP", Priority::P3, 25, "01011"),
    (19, "taking u turn", "TUT", Priority::P2, 50, "01001"),
    (20, "vehicle turning in front", "VTF", Priority::P2, 50, "01000"),
];

impl Codebook {
    /// The built-in 20-message codebook, validated.
    pub fn builtin() -> Codebook {
        let messages = BUILTIN_ROWS
            .iter()
            .map(|&(id, text, abbr, priority, num, cw)| SafetyMessage {
                id,
                text: text.to_string(),
                abbreviation: abbr.to_string(),
                priority,
                prob_numerator: num,
                codeword: cw.parse().expect("builtin codeword"),
            })
            .collect();
        Codebook::from_messages(messages).expect("builtin codebook must validate")
    }

    /// Builds and validates a codebook from explicit rows.
    pub fn from_messages(messages: Vec<SafetyMessage>) -> Result<Codebook, CodebookError> {
        validate(&messages)?;
        Ok(Codebook { messages })
    }

    /// Loads a codebook from the documented JSON format: an array of objects
    /// `{id, text, abbreviation, priority, prob_numerator, codeword_bits}`.
    pub fn load_file(path: &Path) -> Result<Codebook, CodebookError> {
        let data = std::fs::read_to_string(path)?;
        Codebook::from_json(&data)
    }

    pub fn from_json(data: &str) -> Result<Codebook, CodebookError> {
        let records: Vec<MessageRecord> =
            serde_json::from_str(data).map_err(|e| CodebookError::Parse(e.to_string()))?;
        let mut messages = Vec::with_capacity(records.len());
        for r in records {
            let priority = match r.priority.as_str() {
                "P1" => Priority::P1,
                "P2" => Priority::P2,
                "P3" => Priority::P3,
                other => {
                    return Err(CodebookError::Parse(format!(
                        "message {}: unknown priority {other:?}",
                        r.id
                    )))
                }
            };
            let codeword = BitString::from_str(&r.codeword_bits).map_err(|e| {
                CodebookError::Parse(format!("message {}: bad codeword: {e}", r.id))
            })?;
            messages.push(SafetyMessage {
                id: r.id,
                text: r.text,
                abbreviation: r.abbreviation,
                priority,
                prob_numerator: r.prob_numerator,
                codeword,
            });
        }
        Codebook::from_messages(messages)
    }

    pub fn to_json(&self) -> String {
        let records: Vec<MessageRecord> = self
            .messages
            .iter()
            .map(|m| MessageRecord {
                id: m.id,
                text: m.text.clone(),
                abbreviation: m.abbreviation.clone(),
                priority: m.priority.to_string(),
                prob_numerator: m.prob_numerator,
                codeword_bits: m.codeword.to_string(),
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("codebook serialization")
    }

    pub fn messages(&self) -> &[SafetyMessage] {
        &self.messages
    }

    pub fn by_id(&self, id: u32) -> Option<&SafetyMessage> {
        self.messages.iter().find(|m| m.id == id)
    }

    pub fn by_text(&self, text: &str) -> Option<&SafetyMessage> {
        self.messages.iter().find(|m| m.text == text)
    }

    /// Kraft sum of the codeword lengths as an exact rational (num, den).
    pub fn kraft_sum(&self) -> (u64, u64) {
        let max_len = self
            .messages
            .iter()
            .map(|m| m.codeword.len())
            .max()
            .unwrap_or(0) as u32;
        let den = 1u64 << max_len;
        let num = self
            .messages
            .iter()
            .map(|m| 1u64 << (max_len - m.codeword.len() as u32))
            .sum();
        (num, den)
    }
}

fn validate(messages: &[SafetyMessage]) -> Result<(), CodebookError> {
    if messages.len() != 20 {
        return Err(CodebookError::WrongMessageCount(messages.len()));
    }
    for m in messages {
        if !(1..=20).contains(&m.id) {
            return Err(CodebookError::InvalidMessage {
                id: m.id,
                reason: "id out of range 1-20".into(),
            });
        }
        if m.text.is_empty()
            || !m
                .text
                .chars()
                .all(|c| c.is_ascii_lowercase() || c == ' ')
        {
            return Err(CodebookError::InvalidMessage {
                id: m.id,
                reason: format!("text {:?} must be lowercase letters and spaces", m.text),
            });
        }
        if m.abbreviation.len() != ABBREVIATION_LEN
            || !m.abbreviation.chars().all(|c| c.is_ascii_uppercase())
        {
            return Err(CodebookError::InvalidMessage {
                id: m.id,
                reason: format!("abbreviation {:?} must be 3 uppercase letters", m.abbreviation),
            });
        }
        if !matches!(m.codeword.len(), 3 | 5 | 6) {
            return Err(CodebookError::InvalidMessage {
                id: m.id,
                reason: format!("codeword length {} not in {{3,5,6}}", m.codeword.len()),
            });
        }
    }
    // Uniqueness.
    for (i, a) in messages.iter().enumerate() {
        for b in &messages[i + 1..] {
            if a.codeword == b.codeword {
                return Err(CodebookError::DuplicateCodeword(a.codeword.to_string()));
            }
            if a.abbreviation == b.abbreviation {
                return Err(CodebookError::DuplicateAbbreviation(a.abbreviation.clone()));
            }
        }
    }
    // Prefix-freeness, all 190 pairs both ways.
    for a in messages {
        for b in messages {
            if a.id != b.id && is_prefix(&a.codeword, &b.codeword) {
                return Err(CodebookError::NotPrefixFree(
                    a.codeword.to_string(),
                    b.codeword.to_string(),
                ));
            }
        }
    }
    let prob_sum: u32 = messages.iter().map(|m| m.prob_numerator).sum();
    if prob_sum != PROBABILITY_DENOMINATOR {
        return Err(CodebookError::ProbabilitySum(prob_sum));
    }
    // Kraft sum must be exactly 1: the code is complete.
    let max_len = messages.iter().map(|m| m.codeword.len()).max().unwrap() as u32;
    let den = 1u64 << max_len;
    let num: u64 = messages
        .iter()
        .map(|m| 1u64 << (max_len - m.codeword.len() as u32))
        .sum();
    if num != den {
        return Err(CodebookError::KraftSum { num, den });
    }
    Ok(())
}

fn is_prefix(a: &BitString, b: &BitString) -> bool {
    a.len() <= b.len() && a.as_slice() == &b.as_slice()[..a.len()]
}

/// Maps a whole message to its table codeword (3-6 bits). This coder cannot
/// encode free text.
pub fn probability_encode(cb: &Codebook, message_text: &str) -> Result<BitString, CodebookError> {
    cb.by_text(message_text)
        .map(|m| m.codeword.clone())
        .ok_or_else(|| CodebookError::UnknownMessage(message_text.to_string()))
}

/// Matches the unique codeword at the front of `bits` (prefix-freeness
/// guarantees uniqueness) and returns the message text and bits consumed.
pub fn probability_decode<'a>(
    cb: &'a Codebook,
    bits: &BitString,
) -> Result<(&'a str, usize), CodebookError> {
    for m in cb.messages() {
        let n = m.codeword.len();
        if bits.len() >= n && bits.as_slice()[..n] == *m.codeword.as_slice() {
            return Ok((&m.text, n));
        }
    }
    Err(CodebookError::Undecodable)
}

/// Emits the three abbreviation characters as 8-bit character codes: exactly
/// 24 bits for any codebook message.
pub fn abbreviation_encode(cb: &Codebook, message_text: &str) -> Result<BitString, CodebookError> {
    let m = cb
        .by_text(message_text)
        .ok_or_else(|| CodebookError::UnknownMessage(message_text.to_string()))?;
    let mut out = BitString::with_capacity(ABBREVIATION_LEN * CHAR_BITS);
    for c in m.abbreviation.bytes() {
        out.push_uint(c as u64, CHAR_BITS);
    }
    Ok(out)
}

/// Decodes the first 24 bits as three characters and looks up the message.
/// The error carries the decoded characters when the lookup fails.
pub fn abbreviation_decode<'a>(
    cb: &'a Codebook,
    bits: &BitString,
) -> Result<&'a str, CodebookError> {
    let needed = ABBREVIATION_LEN * CHAR_BITS;
    if bits.len() < needed {
        return Err(CodebookError::TruncatedInput {
            needed,
            got: bits.len(),
        });
    }
    let mut abbr = String::with_capacity(ABBREVIATION_LEN);
    for i in 0..ABBREVIATION_LEN {
        let code = bits.read_uint(i * CHAR_BITS, CHAR_BITS).expect("length checked") as u32;
        abbr.push(char::from_u32(code).unwrap_or('\u{FFFD}'));
    }
    cb.messages()
        .iter()
        .find(|m| m.abbreviation == abbr)
        .map(|m| m.text.as_str())
        .ok_or(CodebookError::UnknownAbbreviation(abbr))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn builtin_row_3() {
        let cb = Codebook::builtin();
        let m = cb.by_id(3).unwrap();
        assert_eq!(m.text, "emergency ahead");
        assert_eq!(m.abbreviation, "EGA");
        assert_eq!(m.priority, Priority::P1);
        assert_eq!(m.prob_numerator, 100);
        assert_eq!(m.codeword, bs("101"));
    }

    #[test]
    fn builtin_kraft_sum_is_exactly_one() {
        // 5 codewords of length 3, 9 of length 5, 6 of length 6:
        // 5/8 + 9/32 + 6/64 = 1.
        let cb = Codebook::builtin();
        let lens: Vec<usize> = cb.messages().iter().map(|m| m.codeword.len()).collect();
        assert_eq!(lens.iter().filter(|&&l| l == 3).count(), 5);
        assert_eq!(lens.iter().filter(|&&l| l == 5).count(), 9);
        assert_eq!(lens.iter().filter(|&&l| l == 6).count(), 6);
        let (num, den) = cb.kraft_sum();
        assert_eq!(num, den);
    }

    #[test]
    fn builtin_probabilities_sum_to_denominator() {
        let cb = Codebook::builtin();
        let sum: u32 = cb.messages().iter().map(|m| m.prob_numerator).sum();
        assert_eq!(sum, PROBABILITY_DENOMINATOR);
    }

    #[test]
    fn priority_structure_matches_table() {
        let cb = Codebook::builtin();
        for m in cb.messages() {
            if m.priority == Priority::P1 {
                assert_eq!(m.codeword.len(), 3, "P1 message {} must be 3 bits", m.id);
            }
            if m.codeword.len() == 6 {
                assert_eq!(m.priority, Priority::P3, "6-bit codeword on non-P3 {}", m.id);
            }
        }
    }

    #[test]
    fn duplicate_codeword_rejected() {
        let mut messages: Vec<SafetyMessage> = Codebook::builtin().messages().to_vec();
        messages[0].codeword = bs("101"); // collides with id 3
        match Codebook::from_messages(messages) {
            Err(CodebookError::DuplicateCodeword(cw)) => assert_eq!(cw, "101"),
            other => panic!("expected duplicate codeword error, got {other:?}"),
        }
    }

    #[test]
    fn prefix_violation_rejected() {
        let mut messages: Vec<SafetyMessage> = Codebook::builtin().messages().to_vec();
        // "00111" (id 1) -> "10100...": make id 1 a 5-bit extension prefix-clash
        // with id 3 ("101") while keeping lengths legal.
        messages[0].codeword = bs("10100");
        let err = Codebook::from_messages(messages).unwrap_err();
        assert!(matches!(err, CodebookError::NotPrefixFree(_, _)), "{err}");
    }

    #[test]
    fn probability_sum_violation_rejected() {
        let mut messages: Vec<SafetyMessage> = Codebook::builtin().messages().to_vec();
        messages[0].prob_numerator = 51;
        let err = Codebook::from_messages(messages).unwrap_err();
        assert!(matches!(err, CodebookError::ProbabilitySum(1076)), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let cb = Codebook::builtin();
        let json = cb.to_json();
        let back = Codebook::from_json(&json).unwrap();
        assert_eq!(back.messages(), cb.messages());
    }

    #[test]
    fn probability_encode_examples() {
        let cb = Codebook::builtin();
        assert_eq!(probability_encode(&cb, "emergency ahead").unwrap(), bs("101"));
        assert_eq!(
            probability_encode(&cb, "left turn ahead").unwrap(),
            bs("00111")
        );
        assert!(matches!(
            probability_encode(&cb, "hello"),
            Err(CodebookError::UnknownMessage(_))
        ));
    }

    #[test]
    fn probability_decode_examples() {
        let cb = Codebook::builtin();
        assert_eq!(
            probability_decode(&cb, &bs("100")).unwrap(),
            ("emergency braking", 3)
        );
        assert_eq!(
            probability_decode(&cb, &bs("001010")).unwrap(),
            ("road condition not good", 6)
        );
        assert!(matches!(
            probability_decode(&cb, &bs("11")),
            Err(CodebookError::Undecodable)
        ));
    }

    #[test]
    fn probability_decode_consumes_prefix_only() {
        let cb = Codebook::builtin();
        let mut bits = bs("101");
        bits.extend(&bs("0011000"));
        let (text, used) = probability_decode(&cb, &bits).unwrap();
        assert_eq!(text, "emergency ahead");
        assert_eq!(used, 3);
    }

    #[test]
    fn abbreviation_examples() {
        let cb = Codebook::builtin();
        let pca = abbreviation_encode(&cb, "pedestrian crossing ahead").unwrap();
        assert_eq!(pca.len(), 24);
        let mut expected = BitString::new();
        for c in b"PCA" {
            expected.push_uint(*c as u64, 8);
        }
        assert_eq!(pca, expected);

        let lta = abbreviation_encode(&cb, "left turn ahead").unwrap();
        let mut expected = BitString::new();
        for c in b"LTA" {
            expected.push_uint(*c as u64, 8);
        }
        assert_eq!(lta, expected);

        for m in cb.messages() {
            assert_eq!(abbreviation_encode(&cb, &m.text).unwrap().len(), 24);
        }
    }

    #[test]
    fn abbreviation_decode_examples() {
        let cb = Codebook::builtin();
        let mut ega = BitString::new();
        for c in b"EGA" {
            ega.push_uint(*c as u64, 8);
        }
        assert_eq!(abbreviation_decode(&cb, &ega).unwrap(), "emergency ahead");

        let mut tut = BitString::new();
        for c in b"TUT" {
            tut.push_uint(*c as u64, 8);
        }
        assert_eq!(abbreviation_decode(&cb, &tut).unwrap(), "taking u turn");

        let mut zzz = BitString::new();
        for c in b"ZZZ" {
            zzz.push_uint(*c as u64, 8);
        }
        match abbreviation_decode(&cb, &zzz) {
            Err(CodebookError::UnknownAbbreviation(a)) => assert_eq!(a, "ZZZ"),
            other => panic!("expected unknown abbreviation, got {other:?}"),
        }
    }

    #[test]
    fn both_coders_round_trip_every_message() {
        let cb = Codebook::builtin();
        for m in cb.messages() {
            let p = probability_encode(&cb, &m.text).unwrap();
            let (text, used) = probability_decode(&cb, &p).unwrap();
            assert_eq!(text, m.text);
            assert_eq!(used, p.len());

            let a = abbreviation_encode(&cb, &m.text).unwrap();
            assert_eq!(abbreviation_decode(&cb, &a).unwrap(), m.text);
        }
    }
}
