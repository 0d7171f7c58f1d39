//! Channel codes: convolutional with Viterbi decoding, turbo with iterative
//! max-log-MAP decoding, and a desk-scale LDPC code with sum-product
//! decoding.
//!
//! All decoders consume soft per-bit log-likelihood ratios with the global
//! convention: positive LLR means bit 0 is more likely.

pub mod conv;
pub mod ldpc;
pub mod turbo;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("malformed LLR stream of {got} values: {reason}")]
    MalformedLength { got: usize, reason: String },
    #[error("info length {got} does not match interleaver length {expected}")]
    InterleaverMismatch { got: usize, expected: usize },
    #[error("code construction failed after {attempts} attempts; re-seed required")]
    ConstructionFailed { attempts: usize },
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
}
