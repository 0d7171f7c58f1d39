//! Command-line front end: sweeps, single traced trials, codebook
//! validation, and ranking reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use v2vlink::codebook::Codebook;
use v2vlink::report::{emit_report, parse_csv, render_report, write_csv, write_json};
use v2vlink::sim::{
    ChannelCoder, EccCoder, PipelineSpec, SimConfig, SimError, Simulator, SourceCoder,
};
use v2vlink::source::FrequencyTable;

/// Directory used for default output paths.
const OUT_DIR_ENV: &str = "V2V_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "v2vlink",
    about = "Safety-message codec evaluation over a simulated 16-QAM/AWGN link",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over every (source, ecc, channel) combination.
    Sweep(SweepArgs),
    /// One traced trial of a single message through a single pipeline.
    Trial(TrialArgs),
    /// Validate or export the message codebook.
    Codebook(CodebookArgs),
    /// Rank techniques from a sweep CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct CommonSimArgs {
    /// Eb/N0 in dB, per transmitted bit.
    #[arg(long, default_value_t = 2.0)]
    ebn0_db: f64,
    /// Disable channel noise entirely (overrides --ebn0-db).
    #[arg(long)]
    no_noise: bool,
    /// Master seed for noise, interleaver and LDPC construction.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Turbo decoder iterations.
    #[arg(long, default_value_t = 6)]
    turbo_iters: usize,
    /// LDPC decoder iteration cap.
    #[arg(long, default_value_t = 50)]
    ldpc_iters: usize,
    /// Normalize Eb per source-coded bit instead of per transmitted bit.
    #[arg(long)]
    ebn0_per_info_bit: bool,
    /// Codebook JSON file (defaults to the built-in table).
    #[arg(long)]
    codebook: Option<PathBuf>,
    /// Frequency-table file for Huffman/arithmetic coding
    /// (27 lines `symbol,probability`, space written as SP).
    #[arg(long)]
    freq: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonSimArgs,
    /// Trials per (message, combination).
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Comma-separated message ids to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![3u32, 1, 15])]
    messages: Vec<u32>,
    /// Sweep the whole 20-message codebook instead of --messages.
    #[arg(long)]
    all_messages: bool,
    /// Output file; defaults to sweep.<format> under $V2V_OUT_DIR (or .).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Worker threads for trial execution (default: all cores). Results are
    /// identical for any setting.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct TrialArgs {
    #[command(flatten)]
    common: CommonSimArgs,
    /// Message id (1-20).
    #[arg(long)]
    message: u32,
    #[arg(long, value_parser = parse_source)]
    source: SourceCoder,
    #[arg(long, value_parser = parse_ecc)]
    ecc: EccCoder,
    #[arg(long, value_parser = parse_channel)]
    channel: ChannelCoder,
    /// Trial index (selects the noise realization).
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Print every intermediate bit stream.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct CodebookArgs {
    /// Check all codebook invariants and report the summary line.
    #[arg(long)]
    validate: bool,
    /// Codebook JSON file (defaults to the built-in table).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Write the codebook as JSON to this path.
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Sweep CSV produced by the sweep subcommand.
    #[arg(long = "in")]
    input: PathBuf,
    /// Also write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

fn parse_source(s: &str) -> Result<SourceCoder, String> {
    s.parse()
}

fn parse_ecc(s: &str) -> Result<EccCoder, String> {
    s.parse()
}

fn parse_channel(s: &str) -> Result<ChannelCoder, String> {
    s.parse()
}

/// Failure classes mapped onto exit codes 1/2/3.
enum CliError {
    Usage(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Validation(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> CliError {
        match e {
            SimError::InvalidConfig(_) | SimError::UnknownMessageId(_) => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn read_inputs(common: &CommonSimArgs) -> Result<(Codebook, Option<FrequencyTable>), CliError> {
    let codebook = match &common.codebook {
        None => Codebook::builtin(),
        Some(path) => Codebook::load_file(path).map_err(|e| match e {
            v2vlink::codebook::CodebookError::Io(_) => CliError::Runtime(e.to_string()),
            other => CliError::Validation(other.to_string()),
        })?,
    };
    let freq = match &common.freq {
        None => None,
        Some(path) => Some(
            FrequencyTable::load_file(path)
                .map_err(|e| CliError::Validation(e.to_string()))?,
        ),
    };
    Ok((codebook, freq))
}

fn sim_config(common: &CommonSimArgs, trials: u64, message_ids: Vec<u32>) -> SimConfig {
    SimConfig {
        ebn0_db: if common.no_noise {
            f64::INFINITY
        } else {
            common.ebn0_db
        },
        trials,
        master_seed: common.seed,
        message_ids,
        turbo_iterations: common.turbo_iters,
        ldpc_max_iterations: common.ldpc_iters,
        ebn0_per_info_bit: common.ebn0_per_info_bit,
    }
}

fn default_out_path(file_name: &str) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
    dir.join(file_name)
}

fn write_file(path: &Path, data: &str) -> Result<(), CliError> {
    std::fs::write(path, data)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let (codebook, freq) = read_inputs(&args.common)?;
    let message_ids = if args.all_messages {
        codebook.messages().iter().map(|m| m.id).collect()
    } else {
        args.messages.clone()
    };
    let config = sim_config(&args.common, args.trials, message_ids);
    let sim = Simulator::new(codebook, freq);
    let records = sim.sweep(&config)?;

    let (default_name, data) = match args.format {
        OutputFormat::Csv => ("sweep.csv", write_csv(&records)),
        OutputFormat::Json => ("sweep.json", write_json(&records)),
    };
    let path = args.out.unwrap_or_else(|| default_out_path(default_name));
    write_file(&path, &data)?;
    println!("wrote {} records to {}", records.len(), path.display());
    Ok(())
}

fn run_trial(args: TrialArgs) -> Result<(), CliError> {
    let (codebook, freq) = read_inputs(&args.common)?;
    let config = sim_config(&args.common, 1, vec![args.message]);
    let pipeline = PipelineSpec {
        source: args.source,
        ecc: args.ecc,
        channel: args.channel,
    };
    let sim = Simulator::new(codebook, freq);
    let trial_seed = v2vlink::rng::mix(&[
        config.master_seed,
        args.message as u64,
        pipeline.index(),
        args.trial,
    ]);
    let result = sim.run_trial(args.message, pipeline, &config, trial_seed)?;

    let message = sim.codebook().by_id(args.message).expect("validated id");
    println!("message {}: {:?}", message.id, message.text);
    println!("pipeline: {pipeline}");
    if args.trace {
        println!("source bits     ({:>4}): {}", result.source_bits.len(), result.source_bits);
        println!("after ecc       ({:>4}): {}", result.ecc_bits.len(), result.ecc_bits);
        println!(
            "transmitted     ({:>4}): {}",
            result.transmitted_bits.len(),
            result.transmitted_bits
        );
        println!(
            "symbols: {} (modulation pad: {} bits)",
            result.symbols, result.modulation_pad_bits
        );
        println!(
            "channel decoded ({:>4}): {}",
            result.channel_decoded_bits.len(),
            result.channel_decoded_bits
        );
        println!(
            "ecc decoded     ({:>4}): {}",
            result.ecc_decoded_bits.len(),
            result.ecc_decoded_bits
        );
        println!(
            "ecc blocks: {} clean, {} corrected, {} flagged",
            result.ecc_stats.clean, result.ecc_stats.corrected, result.ecc_stats.uncorrectable
        );
    }
    println!(
        "channel errors: {} / {} bits",
        result.channel_errors,
        result.ecc_bits.len()
    );
    println!(
        "ecc errors: {} / {} bits",
        result.ecc_errors,
        result.source_bits.len()
    );
    match &result.decoded_text {
        Some(text) => println!("decoded text: {text:?}"),
        None => println!("decoded text: <undecodable>"),
    }
    println!("success: {}", result.success);
    Ok(())
}

fn run_codebook(args: CodebookArgs) -> Result<(), CliError> {
    let codebook = match &args.file {
        None => Codebook::builtin(),
        Some(path) => Codebook::load_file(path).map_err(|e| match e {
            v2vlink::codebook::CodebookError::Io(_) => CliError::Runtime(e.to_string()),
            other => CliError::Validation(other.to_string()),
        })?,
    };
    if args.validate || args.export.is_none() {
        // Construction already enforced every invariant; summarize them.
        let (num, den) = codebook.kraft_sum();
        println!(
            "kraft={:.1}, prefix-free, {} messages",
            num as f64 / den as f64,
            codebook.messages().len()
        );
    }
    if let Some(path) = &args.export {
        write_file(path, &codebook.to_json())?;
        println!("exported codebook to {}", path.display());
    }
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<(), CliError> {
    let data = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", args.input.display())))?;
    let records = parse_csv(&data).map_err(|e| CliError::Validation(e.to_string()))?;
    let report = emit_report(&records).map_err(|e| CliError::Validation(e.to_string()))?;
    print!("{}", render_report(&report));
    if let Some(path) = &args.json {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        write_file(path, &json)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let code = if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
            let _ = e.print();
            return code;
        }
    };

    let result = match cli.command {
        Command::Sweep(args) => run_sweep(args),
        Command::Trial(args) => run_trial(args),
        Command::Codebook(args) => run_codebook(args),
        Command::Report(args) => run_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
