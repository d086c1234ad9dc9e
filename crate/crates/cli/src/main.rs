use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use zipfsurr::baselines::ShuffleLevel;
use zipfsurr::dfa::{DfaConfig, Segmentation, WindowSpec};
use zipfsurr::encoders::{FastaOptions, NonAcgtPolicy, PunctuationMode, TokenizerOptions};
use zipfsurr::surrogate::SurrogateEncoding;

mod jobs;
mod output;

use jobs::{
    AnalyzeJob, DfaJob, FgnJob, InputFormat, Job, Manifest, Outcome, SeriesFormat, ShuffleJob, SurrogateJob,
    SymbolInput, Target,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_IO: u8 = 4;

/// Zipf-preserving surrogates with tunable long-range correlations.
#[derive(Parser)]
#[command(name = "zipfsurr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank-frequency table and DFA curve of a text or FASTA file.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        dfa: DfaArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Surrogate with the input's symbol counts and a chosen DFA exponent.
    Surrogate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        target: TargetArgs,
        /// Tolerance on the achieved exponent.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial FGN exponent interval as LO:HI.
        #[arg(long, value_parser = parse_bracket, default_value = "0.5:0.99")]
        bracket: (f64, f64),
        #[arg(long, default_value_t = 40)]
        max_iters: usize,
        /// Iterations without improvement before the FGN seed is replaced.
        #[arg(long, default_value_t = 5)]
        reseed_after: usize,
        #[command(flatten)]
        dfa: DfaArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fractional Gaussian noise, standardised.
    Fgn {
        #[arg(long)]
        n: usize,
        /// Hurst exponent in (0, 1).
        #[arg(long)]
        alpha0: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write little-endian f64 instead of one value per line.
        #[arg(long)]
        binary: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// DFA of a numeric series (one value per line, or raw little-endian f64).
    Dfa {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SeriesFormatArg::Auto)]
        input_format: SeriesFormatArg,
        #[command(flatten)]
        dfa: DfaArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Shuffle a text at character, word or sentence level.
    Shuffle {
        input: PathBuf,
        #[arg(long, value_enum)]
        level: LevelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        keep_punctuation: bool,
        #[arg(long)]
        keep_case: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Re-run the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Output directory.
    #[arg(long, env = "ZIPFSURR_OUT_DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct InputArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Numerification for DFA; defaults to rank for text and ry for FASTA.
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
    /// Emit punctuation marks as tokens instead of stripping them.
    #[arg(long)]
    keep_punctuation: bool,
    #[arg(long)]
    keep_case: bool,
    /// FASTA record id to use; all records are concatenated otherwise.
    #[arg(long)]
    record: Option<String>,
    #[arg(long, value_enum, default_value_t = NonAcgtArg::Skip)]
    non_acgt: NonAcgtArg,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    #[arg(long)]
    target_alpha: Option<f64>,
    /// Use the DFA exponent measured on the input as target.
    #[arg(long)]
    match_input: bool,
}

#[derive(Args)]
struct DfaArgs {
    /// Detrending polynomial order.
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Number of log-spaced window sizes.
    #[arg(long, default_value_t = 20)]
    windows: usize,
    /// Window range for the exponent fit, LO:HI.
    #[arg(long, value_parser = parse_range)]
    fit_range: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value_t = SegmentationArg::BothEnds)]
    segmentation: SegmentationArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Fasta,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Rank,
    Ry,
}

#[derive(Clone, Copy, ValueEnum)]
enum NonAcgtArg {
    Skip,
    Fail,
}

#[derive(Clone, Copy, ValueEnum)]
enum SegmentationArg {
    BothEnds,
    ForwardOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesFormatArg {
    Auto,
    Text,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Chars,
    Words,
    Sentences,
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    Ok((lo, hi))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = parse_pair::<usize>(s)?;
    if lo > hi {
        return Err(format!("range {lo}:{hi} is reversed"));
    }
    Ok((lo, hi))
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    parse_pair::<f64>(s)
}

fn tokenizer(keep_punctuation: bool, keep_case: bool) -> TokenizerOptions {
    TokenizerOptions {
        lowercase: !keep_case,
        punctuation: if keep_punctuation {
            PunctuationMode::AsTokens
        } else {
            PunctuationMode::Strip
        },
    }
}

impl InputArgs {
    fn resolve(&self) -> (SymbolInput, SurrogateEncoding) {
        let format = match self.format {
            FormatArg::Text => InputFormat::Text,
            FormatArg::Fasta => InputFormat::Fasta,
        };
        let encoding = match (self.encoding, format) {
            (Some(EncodingArg::Rank), _) | (None, InputFormat::Text) => SurrogateEncoding::Rank,
            (Some(EncodingArg::Ry), _) | (None, InputFormat::Fasta) => SurrogateEncoding::PurinePyrimidine,
        };
        let input = SymbolInput {
            path: self.input.clone(),
            format,
            tokenizer: tokenizer(self.keep_punctuation, self.keep_case),
            fasta: FastaOptions {
                non_acgt: match self.non_acgt {
                    NonAcgtArg::Skip => NonAcgtPolicy::Skip,
                    NonAcgtArg::Fail => NonAcgtPolicy::Fail,
                },
                record: self.record.clone(),
            },
        };
        (input, encoding)
    }
}

impl DfaArgs {
    fn resolve(&self) -> DfaConfig {
        DfaConfig {
            order: self.order,
            windows: WindowSpec::Auto { count: self.windows },
            fit_range: self.fit_range,
            segmentation: match self.segmentation {
                SegmentationArg::BothEnds => Segmentation::BothEnds,
                SegmentationArg::ForwardOnly => Segmentation::ForwardOnly,
            },
        }
    }
}

fn build(command: Command) -> Result<(Job, PathBuf)> {
    Ok(match command {
        Command::Analyze { input, dfa, out } => {
            let (input, encoding) = input.resolve();
            (
                Job::Analyze(AnalyzeJob {
                    input,
                    encoding,
                    dfa: dfa.resolve(),
                }),
                out.out,
            )
        }
        Command::Surrogate {
            input,
            target,
            eps,
            seed,
            bracket,
            max_iters,
            reseed_after,
            dfa,
            out,
        } => {
            let (input, encoding) = input.resolve();
            let target = match target.target_alpha {
                Some(a) => Target::Alpha(a),
                None => Target::MatchInput,
            };
            (
                Job::Surrogate(SurrogateJob {
                    input,
                    encoding,
                    target,
                    epsilon: eps,
                    bracket,
                    max_iters,
                    reseed_after,
                    seed,
                    dfa: dfa.resolve(),
                }),
                out.out,
            )
        }
        Command::Fgn {
            n,
            alpha0,
            seed,
            binary,
            out,
        } => (Job::Fgn(FgnJob { n, alpha0, seed, binary }), out.out),
        Command::Dfa {
            input,
            input_format,
            dfa,
            out,
        } => (
            Job::Dfa(DfaJob {
                input,
                input_format: match input_format {
                    SeriesFormatArg::Auto => SeriesFormat::Auto,
                    SeriesFormatArg::Text => SeriesFormat::Text,
                    SeriesFormatArg::Binary => SeriesFormat::Binary,
                },
                dfa: dfa.resolve(),
            }),
            out.out,
        ),
        Command::Shuffle {
            input,
            level,
            seed,
            keep_punctuation,
            keep_case,
            out,
        } => (
            Job::Shuffle(ShuffleJob {
                input,
                level: match level {
                    LevelArg::Chars => ShuffleLevel::Characters,
                    LevelArg::Words => ShuffleLevel::Words,
                    LevelArg::Sentences => ShuffleLevel::Sentences,
                },
                seed,
                tokenizer: tokenizer(keep_punctuation, keep_case),
            }),
            out.out,
        ),
        Command::Replay { manifest, out } => {
            let text =
                std::fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let m: Manifest =
                serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", manifest.display()))?;
            if m.tool != jobs::TOOL {
                anyhow::bail!(zipfsurr::Error::InvalidParameter(format!(
                    "manifest was written by {:?}",
                    m.tool
                )));
            }
            if m.version != env!("CARGO_PKG_VERSION") {
                log::warn!("manifest written by version {}, replaying with {}", m.version, env!("CARGO_PKG_VERSION"));
            }
            m.verify_inputs()?;
            (m.job, out.out)
        }
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<zipfsurr::Error>() {
            return match e {
                zipfsurr::Error::Io(_) => EXIT_IO,
                zipfsurr::Error::TargetUnreachable { .. } => EXIT_NOT_CONVERGED,
                _ => EXIT_VALIDATION,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            return if e.is_io_error() { EXIT_IO } else { EXIT_VALIDATION };
        }
    }
    EXIT_VALIDATION
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = build(cli.command).and_then(|(job, out)| jobs::run(&job, &out));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => ExitCode::from(EXIT_NOT_CONVERGED),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
