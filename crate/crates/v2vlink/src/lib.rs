//! Codec library and Monte Carlo link simulator for V2V safety messaging.
//!
//! The crate models the full digital-communication chain for short
//! vehicle-to-vehicle safety messages: five lossless source coders, three
//! error-control block codes, three channel codes, Gray-mapped 16-QAM over an
//! AWGN channel, and a deterministic Monte Carlo engine that evaluates all 45
//! coder combinations by compression ratio and bit error rate.
//!
//! Stage layout (each stage is its own module):
//!
//! ```text
//! text -> source -> ecc -> channel -> modem/AWGN -> demod -> channel -> ecc -> source -> text
//!         coding    coding  coding                 (LLRs)    decode    decode  decode
//! ```
//!
//! [`bits::BitString`] is the currency between stages; the global bit order is
//! most-significant-bit first. All randomness flows from seeded SplitMix64
//! streams ([`rng`]), so every simulation artifact is reproducible.

pub mod bits;
pub mod channel;
pub mod codebook;
pub mod ecc;
pub mod modem;
pub mod report;
pub mod rng;
pub mod sim;
pub mod source;

pub use bits::{hamming_distance, pad_to_multiple, BitString};
pub use codebook::Codebook;
pub use sim::{MetricsRecord, PipelineSpec, SimConfig, Simulator};
