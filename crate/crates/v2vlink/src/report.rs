//! Sweep artifacts (CSV/JSON) and technique ranking reports.
//!
//! The CSV schema is fixed: one header row, then one row per
//! (message, combination) record in sweep order. Floats are written with
//! Rust's shortest round-trip formatting, so identical configurations
//! produce byte-identical files and parsing recovers the exact values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{ChannelCoder, EccCoder, MetricsRecord, SourceCoder};

pub const CSV_HEADER: &str = "message_id,message_text,source,ecc,channel,ebn0_db,trials,\
bits_source,bits_after_ecc,bits_transmitted,compression_ratio,ber_channel,ber_ecc,\
msg_success_rate,master_seed";

/// The selection this evaluation is expected to reproduce: probability-based
/// source coding, tornado error control, turbo channel coding.
pub const EXPECTED_SELECTION: (SourceCoder, EccCoder, ChannelCoder) = (
    SourceCoder::Probability,
    EccCoder::Tornado,
    ChannelCoder::Turbo,
);

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no records to report")]
    Empty,
    #[error("CSV line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unexpected CSV header: {0}")]
    BadHeader(String),
}

pub fn write_csv(records: &[MetricsRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 96 + CSV_HEADER.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.message_id,
            r.message_text,
            r.source,
            r.ecc,
            r.channel,
            r.ebn0_db,
            r.trials,
            r.bits_source,
            r.bits_after_ecc,
            r.bits_transmitted,
            r.compression_ratio,
            r.ber_channel,
            r.ber_ecc,
            r.msg_success_rate,
            r.master_seed
        )
        .expect("string write");
    }
    out
}

pub fn parse_csv(data: &str) -> Result<Vec<MetricsRecord>, ReportError> {
    let mut lines = data.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => return Err(ReportError::BadHeader(header.to_string())),
        None => return Err(ReportError::Empty),
    }

    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 15 {
            return Err(ReportError::Parse {
                line: idx + 1,
                reason: format!("expected 15 fields, found {}", fields.len()),
            });
        }
        let parse_err = |reason: String| ReportError::Parse {
            line: idx + 1,
            reason,
        };
        records.push(MetricsRecord {
            message_id: fields[0].parse().map_err(|e| parse_err(format!("message_id: {e}")))?,
            message_text: fields[1].to_string(),
            source: fields[2].parse().map_err(parse_err)?,
            ecc: fields[3].parse().map_err(parse_err)?,
            channel: fields[4].parse().map_err(parse_err)?,
            ebn0_db: fields[5].parse().map_err(|e| parse_err(format!("ebn0_db: {e}")))?,
            trials: fields[6].parse().map_err(|e| parse_err(format!("trials: {e}")))?,
            bits_source: fields[7].parse().map_err(|e| parse_err(format!("bits_source: {e}")))?,
            bits_after_ecc: fields[8]
                .parse()
                .map_err(|e| parse_err(format!("bits_after_ecc: {e}")))?,
            bits_transmitted: fields[9]
                .parse()
                .map_err(|e| parse_err(format!("bits_transmitted: {e}")))?,
            compression_ratio: fields[10]
                .parse()
                .map_err(|e| parse_err(format!("compression_ratio: {e}")))?,
            ber_channel: fields[11].parse().map_err(|e| parse_err(format!("ber_channel: {e}")))?,
            ber_ecc: fields[12].parse().map_err(|e| parse_err(format!("ber_ecc: {e}")))?,
            msg_success_rate: fields[13]
                .parse()
                .map_err(|e| parse_err(format!("msg_success_rate: {e}")))?,
            master_seed: fields[14]
                .parse()
                .map_err(|e| parse_err(format!("master_seed: {e}")))?,
        });
    }
    Ok(records)
}

pub fn write_json(records: &[MetricsRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

/// Pooled error-count comparison between two techniques with Wilson 95%
/// binomial confidence intervals.
#[derive(Debug, Clone, Serialize)]
pub struct CiComparison {
    pub better: String,
    pub worse: String,
    pub better_ber: f64,
    pub worse_ber: f64,
    pub better_ci: (f64, f64),
    pub worse_ci: (f64, f64),
    /// The expected inequality holds on the point estimates.
    pub holds: bool,
    /// The 95% intervals do not overlap (in the expected direction).
    pub separated: bool,
}

impl CiComparison {
    fn new(better: String, worse: String, b: (u64, u64), w: (u64, u64)) -> CiComparison {
        let (b_ber, b_ci) = wilson_interval(b.0, b.1);
        let (w_ber, w_ci) = wilson_interval(w.0, w.1);
        CiComparison {
            better,
            worse,
            better_ber: b_ber,
            worse_ber: w_ber,
            better_ci: b_ci,
            worse_ci: w_ci,
            holds: b_ber <= w_ber,
            separated: b_ci.1 < w_ci.0,
        }
    }
}

/// Wilson score interval at 95% for `errors` successes in `total` draws.
/// Returns (point estimate, (low, high)).
pub fn wilson_interval(errors: u64, total: u64) -> (f64, (f64, f64)) {
    assert!(total > 0);
    let z = 1.959_963_984_540_054f64;
    let n = total as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At p = 0 (or 1) center and half coincide exactly in the reals; pin the
    // endpoint rather than keep the rounding residue.
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == total {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (p, (lo, hi))
}

/// Per-message technique orderings.
#[derive(Debug, Clone, Serialize)]
pub struct MessageRankings {
    pub message_id: u32,
    pub message_text: String,
    /// (coder, compression ratio), best first.
    pub source_ranking: Vec<(SourceCoder, f64)>,
    /// (coder, mean ber_ecc), best first.
    pub ecc_ranking: Vec<(EccCoder, f64)>,
    /// (coder, mean ber_channel), best first.
    pub channel_ranking: Vec<(ChannelCoder, f64)>,
}

/// Aggregate rankings over a sweep, plus the confidence-interval checks
/// behind the headline ordering claims.
#[derive(Debug, Clone, Serialize)]
pub struct RankingReport {
    pub per_message: Vec<MessageRankings>,
    /// Mean compression ratio per source coder across messages, best first.
    pub source_ranking: Vec<(SourceCoder, f64)>,
    /// Mean ber_ecc per ECC across records, best first.
    pub ecc_ranking: Vec<(EccCoder, f64)>,
    /// Mean ber_channel per channel code across records, best first.
    pub channel_ranking: Vec<(ChannelCoder, f64)>,
    pub selected: (SourceCoder, EccCoder, ChannelCoder),
    pub matches_expected: bool,
    /// tornado vs hamming and tornado vs negation on pooled ECC-stage errors.
    pub ecc_comparisons: Vec<CiComparison>,
    /// turbo vs convolutional on pooled channel-stage errors.
    pub channel_comparisons: Vec<CiComparison>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

/// Pooled (errors, bits) at the ECC boundary for one ECC technique.
/// Error counts are recovered exactly from ber * bits * trials.
fn pooled_ecc(records: &[MetricsRecord], ecc: EccCoder) -> (u64, u64) {
    let mut errors = 0u64;
    let mut bits = 0u64;
    for r in records.iter().filter(|r| r.ecc == ecc) {
        let n = r.bits_source * r.trials;
        errors += (r.ber_ecc * n as f64).round() as u64;
        bits += n;
    }
    (errors, bits)
}

fn pooled_channel(records: &[MetricsRecord], channel: ChannelCoder) -> (u64, u64) {
    let mut errors = 0u64;
    let mut bits = 0u64;
    for r in records.iter().filter(|r| r.channel == channel) {
        let n = r.bits_after_ecc * r.trials;
        errors += (r.ber_channel * n as f64).round() as u64;
        bits += n;
    }
    (errors, bits)
}

/// Builds the ranking report from sweep records. Pure function of the
/// record set.
pub fn emit_report(records: &[MetricsRecord]) -> Result<RankingReport, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }

    let mut message_ids: Vec<u32> = Vec::new();
    for r in records {
        if !message_ids.contains(&r.message_id) {
            message_ids.push(r.message_id);
        }
    }

    let rank_for = |subset: &[&MetricsRecord]| -> (Vec<(SourceCoder, f64)>, Vec<(EccCoder, f64)>, Vec<(ChannelCoder, f64)>) {
        let mut source: Vec<(SourceCoder, f64)> = SourceCoder::ALL
            .iter()
            .map(|&c| {
                (
                    c,
                    mean(
                        subset
                            .iter()
                            .filter(|r| r.source == c)
                            .map(|r| r.compression_ratio),
                    ),
                )
            })
            .collect();
        source.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut ecc: Vec<(EccCoder, f64)> = EccCoder::ALL
            .iter()
            .map(|&c| {
                (
                    c,
                    mean(subset.iter().filter(|r| r.ecc == c).map(|r| r.ber_ecc)),
                )
            })
            .collect();
        ecc.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut channel: Vec<(ChannelCoder, f64)> = ChannelCoder::ALL
            .iter()
            .map(|&c| {
                (
                    c,
                    mean(
                        subset
                            .iter()
                            .filter(|r| r.channel == c)
                            .map(|r| r.ber_channel),
                    ),
                )
            })
            .collect();
        channel.sort_by(|a, b| a.1.total_cmp(&b.1));
        (source, ecc, channel)
    };

    let per_message: Vec<MessageRankings> = message_ids
        .iter()
        .map(|&id| {
            let subset: Vec<&MetricsRecord> =
                records.iter().filter(|r| r.message_id == id).collect();
            let (source_ranking, ecc_ranking, channel_ranking) = rank_for(&subset);
            MessageRankings {
                message_id: id,
                message_text: subset[0].message_text.clone(),
                source_ranking,
                ecc_ranking,
                channel_ranking,
            }
        })
        .collect();

    let all: Vec<&MetricsRecord> = records.iter().collect();
    let (source_ranking, ecc_ranking, channel_ranking) = rank_for(&all);
    let selected = (
        source_ranking[0].0,
        ecc_ranking[0].0,
        channel_ranking[0].0,
    );

    let tornado = pooled_ecc(records, EccCoder::Tornado);
    let ecc_comparisons = vec![
        CiComparison::new(
            "tornado".into(),
            "hamming".into(),
            tornado,
            pooled_ecc(records, EccCoder::Hamming),
        ),
        CiComparison::new(
            "tornado".into(),
            "negation".into(),
            tornado,
            pooled_ecc(records, EccCoder::Negation),
        ),
    ];
    let channel_comparisons = vec![CiComparison::new(
        "turbo".into(),
        "convolutional".into(),
        pooled_channel(records, ChannelCoder::Turbo),
        pooled_channel(records, ChannelCoder::Convolutional),
    )];

    Ok(RankingReport {
        per_message,
        source_ranking,
        ecc_ranking,
        channel_ranking,
        selected,
        matches_expected: selected == EXPECTED_SELECTION,
        ecc_comparisons,
        channel_comparisons,
    })
}

/// Human-readable rendering of the ranking report.
pub fn render_report(report: &RankingReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== technique rankings (aggregate) ==");
    let _ = writeln!(out, "source coders by mean compression ratio:");
    for (c, v) in &report.source_ranking {
        let _ = writeln!(out, "  {c:<13} {v:.3}");
    }
    let _ = writeln!(out, "error control by mean BER after ECC decoding:");
    for (c, v) in &report.ecc_ranking {
        let _ = writeln!(out, "  {c:<13} {v:.6}");
    }
    let _ = writeln!(out, "channel codes by mean BER after channel decoding:");
    for (c, v) in &report.channel_ranking {
        let _ = writeln!(out, "  {c:<13} {v:.6}");
    }

    let _ = writeln!(out, "\n== per-message winners ==");
    for m in &report.per_message {
        let _ = writeln!(
            out,
            "  message {:>2} ({}): {} + {} + {}",
            m.message_id,
            m.message_text,
            m.source_ranking[0].0,
            m.ecc_ranking[0].0,
            m.channel_ranking[0].0
        );
    }

    let _ = writeln!(out, "\n== confidence checks (95% Wilson intervals) ==");
    for c in report.ecc_comparisons.iter().chain(&report.channel_comparisons) {
        let verdict = if c.holds && c.separated {
            "holds, intervals separated"
        } else if c.holds {
            "holds, intervals overlap"
        } else {
            "DISCREPANCY: inequality does not hold"
        };
        let _ = writeln!(
            out,
            "  {} <= {}: {:.6} [{:.6}, {:.6}] vs {:.6} [{:.6}, {:.6}] -- {}",
            c.better,
            c.worse,
            c.better_ber,
            c.better_ci.0,
            c.better_ci.1,
            c.worse_ber,
            c.worse_ci.0,
            c.worse_ci.1,
            verdict
        );
    }

    let (s, e, ch) = report.selected;
    let (xs, xe, xc) = EXPECTED_SELECTION;
    let _ = writeln!(
        out,
        "\nselected: {s} + {e} + {ch} (matches expected selection {xs} + {xe} + {xc}: {})",
        if report.matches_expected { "yes" } else { "no" }
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Codebook;
    use crate::sim::{SimConfig, Simulator};

    fn synthetic_record(
        message_id: u32,
        source: SourceCoder,
        ecc: EccCoder,
        channel: ChannelCoder,
        compression: f64,
        ber_channel: f64,
        ber_ecc: f64,
    ) -> MetricsRecord {
        MetricsRecord {
            message_id,
            message_text: format!("message {message_id}"),
            source,
            ecc,
            channel,
            ebn0_db: 2.0,
            trials: 100,
            bits_source: 100,
            bits_after_ecc: 200,
            bits_transmitted: 400,
            compression_ratio: compression,
            ber_channel,
            ber_ecc,
            msg_success_rate: 1.0,
            master_seed: 1,
        }
    }

    fn full_synthetic_sweep() -> Vec<MetricsRecord> {
        // BERs keyed to the technique so rankings are forced:
        // ecc: tornado 0.01 < hamming 0.02 < negation 0.03;
        // channel: turbo 0.01 < ldpc 0.02 < convolutional 0.03;
        // compression: probability 40 > abbreviation 5 > lzw 3 > rest.
        let mut out = Vec::new();
        for &source in &SourceCoder::ALL {
            for &ecc in &EccCoder::ALL {
                for &channel in &ChannelCoder::ALL {
                    let compression = match source {
                        SourceCoder::Probability => 40.0,
                        SourceCoder::Abbreviation => 5.0,
                        SourceCoder::Lzw => 3.0,
                        SourceCoder::Huffman => 2.0,
                        SourceCoder::Arithmetic => 2.5,
                    };
                    let ber_ecc = match ecc {
                        EccCoder::Tornado => 0.01,
                        EccCoder::Hamming => 0.02,
                        EccCoder::Negation => 0.03,
                    };
                    let ber_channel = match channel {
                        ChannelCoder::Turbo => 0.01,
                        ChannelCoder::Ldpc => 0.02,
                        ChannelCoder::Convolutional => 0.03,
                    };
                    out.push(synthetic_record(
                        3, source, ecc, channel, compression, ber_channel, ber_ecc,
                    ));
                }
            }
        }
        out
    }

    #[test]
    fn csv_round_trip() {
        let sim = Simulator::new(Codebook::builtin(), None);
        let config = SimConfig {
            message_ids: vec![3],
            trials: 2,
            ebn0_db: 2.0,
            ..SimConfig::default()
        };
        let records = sim.sweep(&config).unwrap();
        let csv = write_csv(&records);
        let parsed = parse_csv(&csv).unwrap();
        assert_eq!(parsed, records);
    }

    #[test]
    fn csv_is_deterministic() {
        let sim = Simulator::new(Codebook::builtin(), None);
        let config = SimConfig {
            message_ids: vec![1],
            trials: 2,
            ..SimConfig::default()
        };
        let a = write_csv(&sim.sweep(&config).unwrap());
        let b = write_csv(&sim.sweep(&config).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn bad_header_rejected() {
        assert!(matches!(
            parse_csv("nope\n1,2,3"),
            Err(ReportError::BadHeader(_))
        ));
    }

    #[test]
    fn synthetic_rankings_follow_the_numbers() {
        let records = full_synthetic_sweep();
        let report = emit_report(&records).unwrap();
        assert_eq!(report.source_ranking[0].0, SourceCoder::Probability);
        assert_eq!(report.ecc_ranking[0].0, EccCoder::Tornado);
        assert_eq!(
            report
                .ecc_ranking
                .iter()
                .map(|(c, _)| *c)
                .collect::<Vec<_>>(),
            vec![EccCoder::Tornado, EccCoder::Hamming, EccCoder::Negation]
        );
        assert_eq!(
            report
                .channel_ranking
                .iter()
                .map(|(c, _)| *c)
                .collect::<Vec<_>>(),
            vec![
                ChannelCoder::Turbo,
                ChannelCoder::Ldpc,
                ChannelCoder::Convolutional
            ]
        );
        assert!(report.matches_expected);
        assert!(report.ecc_comparisons.iter().all(|c| c.holds));
        assert!(report.channel_comparisons.iter().all(|c| c.holds));
    }

    #[test]
    fn discrepancy_is_flagged_not_hidden() {
        let mut records = full_synthetic_sweep();
        // Invert the ECC ordering: tornado now worst.
        for r in &mut records {
            r.ber_ecc = match r.ecc {
                EccCoder::Tornado => 0.05,
                EccCoder::Hamming => 0.02,
                EccCoder::Negation => 0.03,
            };
        }
        let report = emit_report(&records).unwrap();
        assert_ne!(report.ecc_ranking[0].0, EccCoder::Tornado);
        assert!(!report.matches_expected);
        assert!(report.ecc_comparisons.iter().any(|c| !c.holds));
        let text = render_report(&report);
        assert!(text.contains("DISCREPANCY"), "{text}");
        assert!(text.contains("matches expected selection"), "{text}");
    }

    #[test]
    fn noise_free_sweep_puts_probability_first_everywhere() {
        let sim = Simulator::new(Codebook::builtin(), None);
        let config = SimConfig {
            message_ids: vec![3, 1, 15],
            trials: 1,
            ebn0_db: f64::INFINITY,
            ..SimConfig::default()
        };
        let records = sim.sweep(&config).unwrap();
        let report = emit_report(&records).unwrap();
        for m in &report.per_message {
            assert_eq!(m.source_ranking[0].0, SourceCoder::Probability);
        }
        assert_eq!(report.source_ranking[0].0, SourceCoder::Probability);
    }

    #[test]
    fn empty_records_rejected() {
        assert!(matches!(emit_report(&[]), Err(ReportError::Empty)));
    }

    #[test]
    fn wilson_interval_sane() {
        let (p, (lo, hi)) = wilson_interval(10, 1000);
        assert_eq!(p, 0.01);
        assert!(lo > 0.0 && lo < p && p < hi && hi < 0.02);
        let (p0, (lo0, hi0)) = wilson_interval(0, 1000);
        assert_eq!(p0, 0.0);
        assert_eq!(lo0, 0.0);
        assert!(hi0 > 0.0 && hi0 < 0.005);
    }
}
