//! Monte Carlo link simulator.
//!
//! Assembles source -> ECC -> channel -> 16-QAM/AWGN -> LLR demodulation ->
//! channel decode -> ECC decode -> source decode, runs seeded trials, and
//! aggregates compression ratio and BER metrics for any of the 45
//! (source, ecc, channel) combinations.
//!
//! Reproducibility contract: a [`MetricsRecord`] is a pure function of
//! ([`SimConfig`], codebook). Per-trial noise seeds derive from
//! mix(master_seed, message id, pipeline index, trial index), so results do
//! not depend on execution order or parallelism; aggregation uses integer
//! error counts only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{hamming_distance, pad_to_multiple, BitString};
use crate::channel::conv::{conv_encode, viterbi_decode, TrellisSpec};
use crate::channel::ldpc::{ldpc_decode, ldpc_encode, LdpcCode};
use crate::channel::turbo::{turbo_decode, turbo_encode, InterleaverSpec, RscTrellis};
use crate::channel::ChannelError;
use crate::codebook::{
    abbreviation_decode, abbreviation_encode, probability_decode, probability_encode, Codebook,
    CodebookError,
};
use crate::ecc::{decode_stream, encode_stream, hamming, negation, tornado, StreamStats};
use crate::modem::{
    apply_awgn, demodulate_llr, modulate, ChannelParams, ConstellationMap, BITS_PER_SYMBOL,
};
use crate::rng::mix;
use crate::source::arithmetic::{arithmetic_decode, arithmetic_encode};
use crate::source::huffman::{build_huffman, huffman_decode, huffman_encode, PrefixCodeTable};
use crate::source::lzw::{lzw_decode, lzw_encode};
use crate::source::{FrequencyTable, SourceError};

/// Seed-stream labels for structures derived from the master seed.
const INTERLEAVER_STREAM: u64 = 0x494E_544C; // "INTL"
const LDPC_STREAM: u64 = 0x4C44_5043; // "LDPC"

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown message id {0}")]
    UnknownMessageId(u32),
    #[error("source stage: {0}")]
    Source(#[from] SourceError),
    #[error("codebook stage: {0}")]
    Codebook(#[from] CodebookError),
    #[error("channel stage: {0}")]
    Channel(#[from] ChannelError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceCoder {
    Huffman,
    Arithmetic,
    Lzw,
    Abbreviation,
    Probability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EccCoder {
    Hamming,
    Tornado,
    Negation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelCoder {
    Convolutional,
    Turbo,
    Ldpc,
}

impl SourceCoder {
    pub const ALL: [SourceCoder; 5] = [
        SourceCoder::Huffman,
        SourceCoder::Arithmetic,
        SourceCoder::Lzw,
        SourceCoder::Abbreviation,
        SourceCoder::Probability,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SourceCoder::Huffman => "huffman",
            SourceCoder::Arithmetic => "arithmetic",
            SourceCoder::Lzw => "lzw",
            SourceCoder::Abbreviation => "abbreviation",
            SourceCoder::Probability => "probability",
        }
    }
}

impl EccCoder {
    pub const ALL: [EccCoder; 3] = [EccCoder::Hamming, EccCoder::Tornado, EccCoder::Negation];

    pub fn name(&self) -> &'static str {
        match self {
            EccCoder::Hamming => "hamming",
            EccCoder::Tornado => "tornado",
            EccCoder::Negation => "negation",
        }
    }

    /// (data bits, coded bits) per block.
    pub fn block_dims(&self) -> (usize, usize) {
        match self {
            EccCoder::Hamming => (hamming::DATA_BITS, hamming::CODE_BITS),
            EccCoder::Tornado => (tornado::DATA_BITS, tornado::CODE_BITS),
            EccCoder::Negation => (negation::DATA_BITS, negation::CODE_BITS),
        }
    }
}

impl ChannelCoder {
    pub const ALL: [ChannelCoder; 3] = [
        ChannelCoder::Convolutional,
        ChannelCoder::Turbo,
        ChannelCoder::Ldpc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ChannelCoder::Convolutional => "convolutional",
            ChannelCoder::Turbo => "turbo",
            ChannelCoder::Ldpc => "ldpc",
        }
    }
}

macro_rules! impl_coder_text {
    ($ty:ty) => {
        impl std::fmt::Display for $ty {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.name())
            }
        }
        impl std::str::FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                Self::ALL
                    .iter()
                    .find(|c| c.name() == s)
                    .copied()
                    .ok_or_else(|| format!("unknown coder {s:?}"))
            }
        }
    };
}
impl_coder_text!(SourceCoder);
impl_coder_text!(EccCoder);
impl_coder_text!(ChannelCoder);

/// One of the 45 (source, ecc, channel) combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub source: SourceCoder,
    pub ecc: EccCoder,
    pub channel: ChannelCoder,
}

impl PipelineSpec {
    /// The full enumeration, source-major then ecc then channel: 45 entries.
    pub fn all() -> Vec<PipelineSpec> {
        let mut out = Vec::with_capacity(45);
        for &source in &SourceCoder::ALL {
            for &ecc in &EccCoder::ALL {
                for &channel in &ChannelCoder::ALL {
                    out.push(PipelineSpec {
                        source,
                        ecc,
                        channel,
                    });
                }
            }
        }
        out
    }

    /// Position in [`PipelineSpec::all`], used for per-trial seed derivation.
    pub fn index(&self) -> u64 {
        let s = SourceCoder::ALL.iter().position(|c| c == &self.source).unwrap();
        let e = EccCoder::ALL.iter().position(|c| c == &self.ecc).unwrap();
        let c = ChannelCoder::ALL.iter().position(|c| c == &self.channel).unwrap();
        ((s * 3 + e) * 3 + c) as u64
    }
}

impl std::fmt::Display for PipelineSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+{}+{}", self.source, self.ecc, self.channel)
    }
}

/// Simulation configuration. `ebn0_db = f64::INFINITY` disables noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub ebn0_db: f64,
    pub trials: u64,
    pub master_seed: u64,
    /// Message ids to simulate, in report order.
    pub message_ids: Vec<u32>,
    pub turbo_iterations: usize,
    pub ldpc_max_iterations: usize,
    /// When set, Eb is normalized per source-coded (information) bit
    /// instead of per transmitted bit: the noise level is adjusted by the
    /// total redundancy ratio of each pipeline.
    pub ebn0_per_info_bit: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            ebn0_db: 2.0,
            trials: 1000,
            master_seed: 42,
            message_ids: vec![3, 1, 15],
            turbo_iterations: 6,
            ldpc_max_iterations: 50,
            ebn0_per_info_bit: false,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::InvalidConfig("trials must be >= 1".into()));
        }
        if self.message_ids.is_empty() {
            return Err(SimError::InvalidConfig("no messages selected".into()));
        }
        if self.turbo_iterations == 0 || self.ldpc_max_iterations == 0 {
            return Err(SimError::InvalidConfig(
                "iteration counts must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Everything recorded for a single traced trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub source_bits: BitString,
    /// Channel-coder input: the ECC output stream.
    pub ecc_bits: BitString,
    /// Channel-coder output, before modulation padding.
    pub transmitted_bits: BitString,
    /// Channel-decoder output truncated to the ECC stream length.
    pub channel_decoded_bits: BitString,
    /// ECC-decoder output truncated to the source stream length.
    pub ecc_decoded_bits: BitString,
    pub decoded_text: Option<String>,
    pub channel_errors: usize,
    pub ecc_errors: usize,
    pub success: bool,
    /// Zero-fill added to align the modulated stream to 4-bit symbols.
    pub modulation_pad_bits: usize,
    pub symbols: usize,
    pub ecc_stats: StreamStats,
}

/// Aggregated result for one (message, pipeline) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub message_id: u32,
    pub message_text: String,
    pub source: SourceCoder,
    pub ecc: EccCoder,
    pub channel: ChannelCoder,
    pub ebn0_db: f64,
    pub trials: u64,
    pub bits_source: u64,
    pub bits_after_ecc: u64,
    pub bits_transmitted: u64,
    pub compression_ratio: f64,
    pub ber_channel: f64,
    pub ber_ecc: f64,
    pub msg_success_rate: f64,
    pub master_seed: u64,
}

impl MetricsRecord {
    pub fn pipeline(&self) -> PipelineSpec {
        PipelineSpec {
            source: self.source,
            ecc: self.ecc,
            channel: self.channel,
        }
    }
}

/// Precomputed noise-free half of a (message, pipeline) chain. Everything up
/// to the channel is deterministic, so trials only redo the noisy half.
struct TransmitContext {
    source_bits: BitString,
    ecc_bits: BitString,
    transmitted_bits: BitString,
    mod_padded: BitString,
    symbols: Vec<num_complex::Complex64>,
    interleaver: Option<InterleaverSpec>,
    ldpc: Option<LdpcCode>,
    effective_ebn0_db: f64,
}

/// The simulator owns the immutable coding resources; all methods are pure
/// given (config, seed) and safe to call from multiple threads.
pub struct Simulator {
    codebook: Codebook,
    freq: FrequencyTable,
    huffman: PrefixCodeTable,
    constellation: ConstellationMap,
    trellis: TrellisSpec,
    rsc: RscTrellis,
    tornado: tornado::TornadoGraph,
}

impl Simulator {
    /// Builds a simulator over the given codebook. The Huffman/arithmetic
    /// frequency table defaults to the codebook corpus statistics when not
    /// supplied.
    pub fn new(codebook: Codebook, freq: Option<FrequencyTable>) -> Simulator {
        let freq = freq.unwrap_or_else(|| FrequencyTable::from_codebook(&codebook));
        let huffman = build_huffman(&freq);
        Simulator {
            codebook,
            freq,
            huffman,
            constellation: ConstellationMap::new(),
            trellis: TrellisSpec::standard(),
            rsc: RscTrellis::standard(),
            tornado: tornado::TornadoGraph::standard(),
        }
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn source_encode(&self, coder: SourceCoder, text: &str) -> Result<BitString, SimError> {
        Ok(match coder {
            SourceCoder::Huffman => huffman_encode(text, &self.huffman)?,
            SourceCoder::Arithmetic => arithmetic_encode(text, &self.freq)?,
            SourceCoder::Lzw => lzw_encode(text)?,
            SourceCoder::Abbreviation => abbreviation_encode(&self.codebook, text)?,
            SourceCoder::Probability => probability_encode(&self.codebook, text)?,
        })
    }

    /// Best-effort source decoding of a possibly corrupted stream. Any
    /// decode failure (dangling suffix, invalid code, out-of-codebook
    /// result) is a `None`, which the metrics count as a message failure
    /// rather than an abort.
    pub fn source_decode(&self, coder: SourceCoder, bits: &BitString) -> Option<String> {
        match coder {
            SourceCoder::Huffman => huffman_decode(bits, &self.huffman).ok(),
            SourceCoder::Arithmetic => arithmetic_decode(bits, &self.freq).ok(),
            SourceCoder::Lzw => lzw_decode(bits).ok(),
            SourceCoder::Abbreviation => {
                abbreviation_decode(&self.codebook, bits).ok().map(String::from)
            }
            SourceCoder::Probability => {
                let (text, consumed) = probability_decode(&self.codebook, bits).ok()?;
                // A partial decode means the stream was corrupted into a
                // shorter codeword; treat it as a failure.
                (consumed == bits.len()).then(|| text.to_string())
            }
        }
    }

    fn message_text(&self, message_id: u32) -> Result<&str, SimError> {
        self.codebook
            .by_id(message_id)
            .map(|m| m.text.as_str())
            .ok_or(SimError::UnknownMessageId(message_id))
    }

    fn ecc_encode(&self, ecc: EccCoder, aligned: &BitString) -> BitString {
        match ecc {
            EccCoder::Hamming => encode_stream(aligned, hamming::hamming_encode),
            EccCoder::Tornado => encode_stream(aligned, |b| tornado::tornado_encode(b, &self.tornado)),
            EccCoder::Negation => encode_stream(aligned, negation::negation_encode),
        }
    }

    fn ecc_decode(&self, ecc: EccCoder, coded: &BitString) -> (BitString, StreamStats) {
        match ecc {
            EccCoder::Hamming => decode_stream(coded, hamming::hamming_decode),
            EccCoder::Tornado => decode_stream(coded, |b| tornado::tornado_decode(b, &self.tornado)),
            EccCoder::Negation => decode_stream(coded, negation::negation_decode),
        }
    }

    /// Builds the deterministic transmit-side context for one
    /// (message, pipeline) pair under `config`.
    fn transmit_context(
        &self,
        message_id: u32,
        pipeline: PipelineSpec,
        config: &SimConfig,
    ) -> Result<TransmitContext, SimError> {
        let text = self.message_text(message_id)?;
        let source_bits = self.source_encode(pipeline.source, text)?;

        let (data_bits, _) = pipeline.ecc.block_dims();
        let ecc_input = pad_to_multiple(&source_bits, data_bits, 0);
        let ecc_bits = self.ecc_encode(pipeline.ecc, &ecc_input);

        let mut interleaver = None;
        let mut ldpc = None;
        let transmitted_bits = match pipeline.channel {
            ChannelCoder::Convolutional => conv_encode(&ecc_bits, &self.trellis),
            ChannelCoder::Turbo => {
                let il = InterleaverSpec::new(
                    mix(&[config.master_seed, INTERLEAVER_STREAM]),
                    ecc_bits.len(),
                );
                let coded = turbo_encode(&ecc_bits, &self.rsc, &il)?;
                interleaver = Some(il);
                coded
            }
            ChannelCoder::Ldpc => {
                let code = LdpcCode::standard(mix(&[config.master_seed, LDPC_STREAM]));
                let padded = pad_to_multiple(&ecc_bits, code.k(), 0);
                let mut coded = BitString::with_capacity(padded.len() * 2);
                for chunk in padded.as_slice().chunks_exact(code.k()) {
                    let msg: BitString = chunk.iter().copied().collect();
                    coded.extend(&ldpc_encode(&msg, &code));
                }
                ldpc = Some(code);
                coded
            }
        };

        let mod_padded = pad_to_multiple(&transmitted_bits, BITS_PER_SYMBOL, 0);
        let symbols = modulate(&mod_padded, &self.constellation);

        let effective_ebn0_db = if config.ebn0_per_info_bit && config.ebn0_db.is_finite() {
            let rate = source_bits.len() as f64 / transmitted_bits.len() as f64;
            config.ebn0_db + 10.0 * rate.log10()
        } else {
            config.ebn0_db
        };

        Ok(TransmitContext {
            source_bits,
            ecc_bits,
            transmitted_bits,
            mod_padded,
            symbols,
            interleaver,
            ldpc,
            effective_ebn0_db,
        })
    }

    /// The noisy half of one trial.
    fn run_trial_inner(
        &self,
        ctx: &TransmitContext,
        pipeline: PipelineSpec,
        config: &SimConfig,
        trial_seed: u64,
    ) -> Result<TrialResult, SimError> {
        let params = ChannelParams::new(ctx.effective_ebn0_db, trial_seed);
        let noisy = apply_awgn(&ctx.symbols, &params);
        let llrs_all = demodulate_llr(&noisy, &self.constellation, &params);
        let llrs = &llrs_all[..ctx.transmitted_bits.len()];

        let channel_decoded_full = match pipeline.channel {
            ChannelCoder::Convolutional => viterbi_decode(llrs, &self.trellis)?,
            ChannelCoder::Turbo => turbo_decode(
                llrs,
                &self.rsc,
                ctx.interleaver.as_ref().expect("turbo context"),
                config.turbo_iterations,
            )?,
            ChannelCoder::Ldpc => {
                let code = ctx.ldpc.as_ref().expect("ldpc context");
                let mut out = BitString::with_capacity(llrs.len() / 2);
                for chunk in llrs.chunks_exact(code.n()) {
                    let (msg, _converged) =
                        ldpc_decode(chunk, code, config.ldpc_max_iterations)?;
                    out.extend(&msg);
                }
                out
            }
        };
        let channel_decoded_bits = channel_decoded_full.truncated(ctx.ecc_bits.len());
        let channel_errors =
            hamming_distance(&ctx.ecc_bits, &channel_decoded_bits).expect("aligned lengths");

        let (ecc_decoded_full, ecc_stats) = self.ecc_decode(pipeline.ecc, &channel_decoded_bits);
        let ecc_decoded_bits = ecc_decoded_full.truncated(ctx.source_bits.len());
        let ecc_errors =
            hamming_distance(&ctx.source_bits, &ecc_decoded_bits).expect("aligned lengths");

        let decoded_text = self.source_decode(pipeline.source, &ecc_decoded_bits);

        Ok(TrialResult {
            success: false, // the caller compares against the original text
            source_bits: ctx.source_bits.clone(),
            ecc_bits: ctx.ecc_bits.clone(),
            transmitted_bits: ctx.transmitted_bits.clone(),
            channel_decoded_bits,
            ecc_decoded_bits,
            decoded_text,
            channel_errors,
            ecc_errors,
            modulation_pad_bits: ctx.mod_padded.len() - ctx.transmitted_bits.len(),
            symbols: ctx.symbols.len(),
            ecc_stats,
        })
    }

    /// Runs one fully traced trial.
    pub fn run_trial(
        &self,
        message_id: u32,
        pipeline: PipelineSpec,
        config: &SimConfig,
        trial_seed: u64,
    ) -> Result<TrialResult, SimError> {
        config.validate()?;
        let text = self.message_text(message_id)?.to_string();
        let ctx = self.transmit_context(message_id, pipeline, config)?;
        let mut result = self.run_trial_inner(&ctx, pipeline, config, trial_seed)?;
        result.success = result.decoded_text.as_deref() == Some(text.as_str());
        Ok(result)
    }

    /// Runs `config.trials` seeded trials and aggregates the metrics.
    pub fn run_monte_carlo(
        &self,
        message_id: u32,
        pipeline: PipelineSpec,
        config: &SimConfig,
    ) -> Result<MetricsRecord, SimError> {
        config.validate()?;
        let text = self.message_text(message_id)?.to_string();
        let ctx = self.transmit_context(message_id, pipeline, config)?;

        let totals = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let trial_seed = mix(&[
                    config.master_seed,
                    message_id as u64,
                    pipeline.index(),
                    trial,
                ]);
                let r = self.run_trial_inner(&ctx, pipeline, config, trial_seed)?;
                let success = r.decoded_text.as_deref() == Some(text.as_str());
                Ok::<(u64, u64, u64), SimError>((
                    r.channel_errors as u64,
                    r.ecc_errors as u64,
                    u64::from(success),
                ))
            })
            .try_reduce(
                || (0u64, 0u64, 0u64),
                |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2)),
            )?;

        let (channel_errs, ecc_errs, successes) = totals;
        let bits_source = ctx.source_bits.len() as u64;
        let bits_after_ecc = ctx.ecc_bits.len() as u64;
        let char_count = text.chars().count() as u64;

        Ok(MetricsRecord {
            message_id,
            message_text: text,
            source: pipeline.source,
            ecc: pipeline.ecc,
            channel: pipeline.channel,
            ebn0_db: config.ebn0_db,
            trials: config.trials,
            bits_source,
            bits_after_ecc,
            bits_transmitted: ctx.transmitted_bits.len() as u64,
            compression_ratio: (8 * char_count) as f64 / bits_source as f64,
            ber_channel: channel_errs as f64 / (bits_after_ecc * config.trials) as f64,
            ber_ecc: ecc_errs as f64 / (bits_source * config.trials) as f64,
            msg_success_rate: successes as f64 / config.trials as f64,
            master_seed: config.master_seed,
        })
    }

    /// One record per (selected message x 45 pipelines), messages in config
    /// order, pipelines in enumeration order.
    pub fn sweep(&self, config: &SimConfig) -> Result<Vec<MetricsRecord>, SimError> {
        config.validate()?;
        let mut records = Vec::with_capacity(config.message_ids.len() * 45);
        for &id in &config.message_ids {
            for pipeline in PipelineSpec::all() {
                records.push(self.run_monte_carlo(id, pipeline, config)?);
            }
        }
        Ok(records)
    }

    /// ratio = 8 x character count / source-coded bit count; higher is
    /// better compression.
    pub fn compression_ratio(&self, message_id: u32, coder: SourceCoder) -> Result<f64, SimError> {
        let text = self.message_text(message_id)?;
        let bits = self.source_encode(coder, text)?;
        Ok((8 * text.chars().count()) as f64 / bits.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simulator() -> Simulator {
        Simulator::new(Codebook::builtin(), None)
    }

    fn noise_off(trials: u64) -> SimConfig {
        SimConfig {
            ebn0_db: f64::INFINITY,
            trials,
            ..SimConfig::default()
        }
    }

    #[test]
    fn pipeline_enumeration_is_45() {
        let all = PipelineSpec::all();
        assert_eq!(all.len(), 45);
        let mut indices: Vec<u64> = all.iter().map(|p| p.index()).collect();
        indices.dedup();
        assert_eq!(indices, (0..45).collect::<Vec<u64>>());
    }

    #[test]
    fn rate_formula_example() {
        // probability coding of "emergency ahead" -> 3 bits, padded to 4,
        // Hamming -> 7, convolutional with 3 flush steps -> 2*(7+3) = 20.
        let sim = simulator();
        let pipeline = PipelineSpec {
            source: SourceCoder::Probability,
            ecc: EccCoder::Hamming,
            channel: ChannelCoder::Convolutional,
        };
        let config = noise_off(1);
        let trial = sim.run_trial(3, pipeline, &config, 0).unwrap();
        assert_eq!(trial.source_bits.len(), 3);
        assert_eq!(trial.ecc_bits.len(), 7);
        assert_eq!(trial.transmitted_bits.len(), 20);
        assert!(trial.success);
        assert_eq!(trial.channel_errors, 0);
        assert_eq!(trial.ecc_errors, 0);
    }

    #[test]
    fn noise_off_chain_identity_sampled() {
        // The full 45 x 20 sweep runs in the acceptance suite; cover the
        // combination corners here.
        let sim = simulator();
        let config = noise_off(1);
        for &id in &[3u32, 1, 15, 11, 18] {
            for pipeline in PipelineSpec::all() {
                let trial = sim.run_trial(id, pipeline, &config, 7).unwrap();
                assert!(trial.success, "message {id} via {pipeline}");
                assert_eq!(trial.channel_errors, 0, "message {id} via {pipeline}");
                assert_eq!(trial.ecc_errors, 0, "message {id} via {pipeline}");
            }
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let sim = simulator();
        let config = SimConfig::default();
        let pipeline = PipelineSpec {
            source: SourceCoder::Huffman,
            ecc: EccCoder::Tornado,
            channel: ChannelCoder::Turbo,
        };
        let a = sim.run_trial(1, pipeline, &config, 12345).unwrap();
        let b = sim.run_trial(1, pipeline, &config, 12345).unwrap();
        assert_eq!(a.channel_decoded_bits, b.channel_decoded_bits);
        assert_eq!(a.ecc_decoded_bits, b.ecc_decoded_bits);
        assert_eq!(a.decoded_text, b.decoded_text);
        assert_eq!(a.success, b.success);
    }

    #[test]
    fn monte_carlo_record_noise_off() {
        let sim = simulator();
        let config = noise_off(3);
        let pipeline = PipelineSpec {
            source: SourceCoder::Probability,
            ecc: EccCoder::Tornado,
            channel: ChannelCoder::Turbo,
        };
        let record = sim.run_monte_carlo(3, pipeline, &config).unwrap();
        assert_eq!(record.ber_channel, 0.0);
        assert_eq!(record.ber_ecc, 0.0);
        assert_eq!(record.msg_success_rate, 1.0);
        assert_eq!(record.bits_source, 3);
        assert_eq!(record.compression_ratio, 40.0);
    }

    #[test]
    fn records_independent_of_parallelism() {
        let sim = simulator();
        let config = SimConfig {
            trials: 64,
            ..SimConfig::default()
        };
        let pipeline = PipelineSpec {
            source: SourceCoder::Probability,
            ecc: EccCoder::Hamming,
            channel: ChannelCoder::Ldpc,
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sim.run_monte_carlo(3, pipeline, &config).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| sim.run_monte_carlo(3, pipeline, &config).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn sweep_shape_and_order() {
        let sim = simulator();
        let config = SimConfig {
            message_ids: vec![3, 1],
            trials: 1,
            ebn0_db: f64::INFINITY,
            ..SimConfig::default()
        };
        let records = sim.sweep(&config).unwrap();
        assert_eq!(records.len(), 90);
        assert_eq!(records[0].message_id, 3);
        assert_eq!(records[45].message_id, 1);
        let pipelines: Vec<PipelineSpec> =
            records[..45].iter().map(|r| r.pipeline()).collect();
        assert_eq!(pipelines, PipelineSpec::all());
    }

    #[test]
    fn compression_ratio_examples() {
        let sim = simulator();
        assert_eq!(
            sim.compression_ratio(3, SourceCoder::Probability).unwrap(),
            40.0
        );
        assert_eq!(
            sim.compression_ratio(3, SourceCoder::Abbreviation).unwrap(),
            5.0
        );
        let rng_ratio = sim.compression_ratio(15, SourceCoder::Probability).unwrap();
        assert!((rng_ratio - 184.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn probability_coder_dominates_every_message() {
        let sim = simulator();
        for m in sim.codebook().messages().to_vec() {
            let p = sim
                .compression_ratio(m.id, SourceCoder::Probability)
                .unwrap();
            for coder in [
                SourceCoder::Huffman,
                SourceCoder::Arithmetic,
                SourceCoder::Lzw,
                SourceCoder::Abbreviation,
            ] {
                let other = sim.compression_ratio(m.id, coder).unwrap();
                assert!(
                    p > other,
                    "message {}: probability {p} not above {coder} {other}",
                    m.id
                );
            }
        }
    }

    #[test]
    fn unknown_message_id_rejected() {
        let sim = simulator();
        let config = SimConfig::default();
        let pipeline = PipelineSpec::all()[0];
        assert!(matches!(
            sim.run_trial(21, pipeline, &config, 0),
            Err(SimError::UnknownMessageId(21))
        ));
    }

    #[test]
    fn zero_trials_rejected() {
        let sim = simulator();
        let config = SimConfig {
            trials: 0,
            ..SimConfig::default()
        };
        assert!(matches!(
            sim.sweep(&config),
            Err(SimError::InvalidConfig(_))
        ));
    }
}
