//! Fully resolved command configurations and their execution.
//!
//! A [`Job`] holds every parameter a run depends on, including defaults, and
//! is what the manifest records. Replaying a manifest rebuilds the job and
//! runs it again.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use zipfsurr::baselines::{shuffle_characters, shuffle_sentences, shuffle_words, ShuffleLevel};
use zipfsurr::encoders::{parse_fasta, tokenize_bytes, FastaOptions, TokenizerOptions};
use zipfsurr::fgn::{generate_fgn_detailed, FgnConfig};
use zipfsurr::surrogate::{match_target_exponent, MatchConfig, SurrogateEncoding, SurrogateResult};
use zipfsurr::{build_frequency_table, dfa_exponent, DfaConfig, DfaResult, FrequencyTable, NumericSeries, SymbolSequence};

use crate::output::{read_input, InputDigest, OutDir};

pub const TOOL: &str = "zipfsurr";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Text,
    Fasta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolInput {
    pub path: PathBuf,
    pub format: InputFormat,
    pub tokenizer: TokenizerOptions,
    pub fasta: FastaOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesFormat {
    /// Text if every non-blank line parses as a number, else little-endian f64.
    Auto,
    Text,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Alpha(f64),
    /// The DFA exponent measured on the input itself.
    MatchInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeJob {
    pub input: SymbolInput,
    pub encoding: SurrogateEncoding,
    pub dfa: DfaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateJob {
    pub input: SymbolInput,
    pub encoding: SurrogateEncoding,
    pub target: Target,
    pub epsilon: f64,
    pub bracket: (f64, f64),
    pub max_iters: usize,
    pub reseed_after: usize,
    pub seed: u64,
    pub dfa: DfaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FgnJob {
    pub n: usize,
    pub alpha0: f64,
    pub seed: u64,
    pub binary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfaJob {
    pub input: PathBuf,
    pub input_format: SeriesFormat,
    pub dfa: DfaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffleJob {
    pub input: PathBuf,
    pub level: ShuffleLevel,
    pub seed: u64,
    pub tokenizer: TokenizerOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Job {
    Analyze(AnalyzeJob),
    Surrogate(SurrogateJob),
    Fgn(FgnJob),
    Dfa(DfaJob),
    Shuffle(ShuffleJob),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub job: Job,
    pub inputs: Vec<InputDigest>,
    pub seeds: Vec<u64>,
}

impl Manifest {
    fn new(job: &Job, inputs: Vec<InputDigest>) -> Self {
        let seeds = match job {
            Job::Surrogate(j) => vec![j.seed],
            Job::Fgn(j) => vec![j.seed],
            Job::Shuffle(j) => vec![j.seed],
            Job::Analyze(_) | Job::Dfa(_) => Vec::new(),
        };
        Manifest {
            tool: TOOL.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            job: job.clone(),
            inputs,
            seeds,
        }
    }

    /// Checks that every recorded input still has the recorded content.
    pub fn verify_inputs(&self) -> Result<()> {
        for recorded in &self.inputs {
            let (_, now) = read_input(&recorded.path)?;
            if now != *recorded {
                bail!(
                    "input {} changed since the manifest was written (sha256 {} -> {})",
                    recorded.path.display(),
                    recorded.sha256,
                    now.sha256
                );
            }
        }
        Ok(())
    }
}

/// How a finished run should be reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    NotConverged,
}

pub fn run(job: &Job, out: &Path) -> Result<Outcome> {
    let out = OutDir::create(out)?;
    match job {
        Job::Analyze(j) => run_analyze(job, j, &out),
        Job::Surrogate(j) => run_surrogate(job, j, &out),
        Job::Fgn(j) => run_fgn(job, j, &out),
        Job::Dfa(j) => run_dfa(job, j, &out),
        Job::Shuffle(j) => run_shuffle(job, j, &out),
    }
}

struct Loaded {
    seq: SymbolSequence,
    digest: InputDigest,
    fasta: Option<FastaInfo>,
}

#[derive(Serialize)]
struct FastaInfo {
    records: Vec<String>,
    skipped: u64,
}

fn load_symbols(input: &SymbolInput) -> Result<Loaded> {
    let (bytes, digest) = read_input(&input.path)?;
    let (seq, fasta) = match input.format {
        InputFormat::Text => (tokenize_bytes(&bytes, &input.tokenizer)?, None),
        InputFormat::Fasta => {
            let parsed = parse_fasta(&bytes[..], &input.fasta)?;
            let info = FastaInfo {
                records: parsed.records,
                skipped: parsed.skipped,
            };
            (parsed.sequence, Some(info))
        }
    };
    if seq.is_empty() {
        return Err(zipfsurr::Error::EmptyInput).with_context(|| format!("no tokens in {}", input.path.display()));
    }
    Ok(Loaded { seq, digest, fasta })
}

fn write_zipf(out: &OutDir, table: &FrequencyTable) -> Result<()> {
    let total = table.total() as f64;
    out.write_csv(
        "zipf.csv",
        &["rank", "symbol", "count", "freq"],
        table
            .alphabet()
            .symbols()
            .iter()
            .zip(table.counts())
            .enumerate()
            .map(|(i, (s, &c))| [(i + 1).to_string(), s.clone(), c.to_string(), (c as f64 / total).to_string()]),
    )
}

fn write_curve(out: &OutDir, name: &str, r: &DfaResult) -> Result<()> {
    out.write_csv(
        name,
        &["L", "F"],
        r.window_sizes
            .iter()
            .zip(&r.fluctuations)
            .map(|(l, f)| [l.to_string(), f.to_string()]),
    )
}

#[derive(Serialize)]
struct FitSummary {
    alpha: f64,
    stderr: f64,
    r2: f64,
    intercept: f64,
    fit_lo: usize,
    fit_hi: usize,
}

impl From<&DfaResult> for FitSummary {
    fn from(r: &DfaResult) -> Self {
        FitSummary {
            alpha: r.alpha,
            stderr: r.fit_stderr,
            r2: r.r_squared,
            intercept: r.intercept,
            fit_lo: r.fit_range.0,
            fit_hi: r.fit_range.1,
        }
    }
}

fn run_analyze(job: &Job, j: &AnalyzeJob, out: &OutDir) -> Result<Outcome> {
    let loaded = load_symbols(&j.input)?;
    let table = build_frequency_table(&loaded.seq)?;
    let x = j.encoding.numerify(&loaded.seq, &table)?;
    let dfa = dfa_exponent(&x, &j.dfa)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        n: usize,
        v: usize,
        #[serde(flatten)]
        fit: FitSummary,
        encoding: SurrogateEncoding,
        #[serde(skip_serializing_if = "Option::is_none")]
        fasta: Option<&'a FastaInfo>,
        manifest: &'a Manifest,
    }
    let manifest = Manifest::new(job, vec![loaded.digest.clone()]);
    write_zipf(out, &table)?;
    write_curve(out, "dfa.csv", &dfa)?;
    out.write_json(
        "summary.json",
        &Summary {
            n: loaded.seq.len(),
            v: table.vocab_size(),
            fit: (&dfa).into(),
            encoding: j.encoding,
            fasta: loaded.fasta.as_ref(),
            manifest: &manifest,
        },
    )?;
    out.write_json(MANIFEST, &manifest)?;
    Ok(Outcome::Done)
}

fn run_surrogate(job: &Job, j: &SurrogateJob, out: &OutDir) -> Result<Outcome> {
    let loaded = load_symbols(&j.input)?;
    let table = build_frequency_table(&loaded.seq)?;

    let (target, input_fit) = match j.target {
        Target::Alpha(a) => (a, None),
        Target::MatchInput => {
            let x = j.encoding.numerify(&loaded.seq, &table)?;
            let r = dfa_exponent(&x, &j.dfa)?;
            log::info!("input alpha = {:.4}", r.alpha);
            (r.alpha, Some(r))
        }
    };
    let cfg = MatchConfig {
        target_alpha: target,
        epsilon: j.epsilon,
        bracket: j.bracket,
        max_iters: j.max_iters,
        reseed_after: j.reseed_after,
        base_seed: j.seed,
        dfa_config: j.dfa.clone(),
        encoding: j.encoding,
    };
    let result = match_target_exponent(&table, &cfg)?;
    let surrogate_dfa = dfa_exponent(&j.encoding.numerify(&result.sequence, &table)?, &j.dfa)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        n: usize,
        v: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        input_fit: Option<FitSummary>,
        surrogate_fit: FitSummary,
        abs_error: f64,
        #[serde(flatten)]
        result: &'a SurrogateResult,
        manifest: &'a Manifest,
    }
    let manifest = Manifest::new(job, vec![loaded.digest.clone()]);
    let mut text = String::with_capacity(result.sequence.len() * 6);
    for label in result.sequence.labels() {
        text.push_str(label);
        text.push('\n');
    }
    out.write("surrogate.txt", text.as_bytes())?;
    write_curve(out, "dfa.csv", &surrogate_dfa)?;
    if let Some(r) = &input_fit {
        write_curve(out, "input_dfa.csv", r)?;
    }
    out.write_json(
        "summary.json",
        &Summary {
            n: result.sequence.len(),
            v: table.vocab_size(),
            input_fit: input_fit.as_ref().map(Into::into),
            surrogate_fit: (&surrogate_dfa).into(),
            abs_error: (result.achieved_alpha - target).abs(),
            result: &result,
            manifest: &manifest,
        },
    )?;
    out.write_json(MANIFEST, &manifest)?;
    if result.converged {
        Ok(Outcome::Done)
    } else {
        log::warn!(
            "no surrogate within {} of target {:.4} after {} iterations; best alpha {:.4}",
            j.epsilon,
            target,
            result.iterations,
            result.achieved_alpha
        );
        Ok(Outcome::NotConverged)
    }
}

fn run_fgn(job: &Job, j: &FgnJob, out: &OutDir) -> Result<Outcome> {
    let generated = generate_fgn_detailed(&FgnConfig::new(j.n, j.alpha0, j.seed))?;
    let values = generated.series.values();
    let file = if j.binary {
        let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
        out.write("series.f64", &bytes)?;
        "series.f64"
    } else {
        let mut text = String::with_capacity(values.len() * 22);
        for v in values {
            text.push_str(&v.to_string());
            text.push('\n');
        }
        out.write("series.txt", text.as_bytes())?;
        "series.txt"
    };
    #[derive(Serialize)]
    struct Summary<'a> {
        n: usize,
        alpha0: f64,
        seed: u64,
        exact: bool,
        file: &'a str,
    }
    out.write_json(
        "summary.json",
        &Summary {
            n: j.n,
            alpha0: j.alpha0,
            seed: j.seed,
            exact: generated.exact,
            file,
        },
    )?;
    out.write_json(MANIFEST, &Manifest::new(job, Vec::new()))?;
    Ok(Outcome::Done)
}

/// Parses one number per line; blank lines and `#` comments are skipped.
pub fn parse_series_text(bytes: &[u8]) -> Result<Vec<f64>> {
    let text = std::str::from_utf8(bytes).context("series is not UTF-8 text")?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| zipfsurr::Error::InvalidParameter(format!("line {}: {line:?} is not a number", i + 1)))?;
        values.push(v);
    }
    Ok(values)
}

pub fn parse_series_binary(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return Err(zipfsurr::Error::InvalidParameter(format!(
            "binary series length {} is not a multiple of 8",
            bytes.len()
        ))
        .into());
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn parse_series(bytes: &[u8], format: SeriesFormat) -> Result<(Vec<f64>, SeriesFormat)> {
    match format {
        SeriesFormat::Text => Ok((parse_series_text(bytes)?, SeriesFormat::Text)),
        SeriesFormat::Binary => Ok((parse_series_binary(bytes)?, SeriesFormat::Binary)),
        SeriesFormat::Auto => match parse_series_text(bytes) {
            Ok(v) => Ok((v, SeriesFormat::Text)),
            Err(_) => Ok((parse_series_binary(bytes)?, SeriesFormat::Binary)),
        },
    }
}

fn run_dfa(job: &Job, j: &DfaJob, out: &OutDir) -> Result<Outcome> {
    let (bytes, digest) = read_input(&j.input)?;
    let (values, detected) = parse_series(&bytes, j.input_format)?;
    if values.is_empty() {
        return Err(zipfsurr::Error::EmptyInput).with_context(|| format!("no values in {}", j.input.display()));
    }
    let x = NumericSeries::new(values)?;
    let r = dfa_exponent(&x, &j.dfa)?;
    out.write_csv(
        "dfa.csv",
        &["L", "F", "log10L", "log10F"],
        r.window_sizes.iter().zip(&r.fluctuations).map(|(&l, &f)| {
            [
                l.to_string(),
                f.to_string(),
                (l as f64).log10().to_string(),
                f.log10().to_string(),
            ]
        }),
    )?;
    #[derive(Serialize)]
    struct Summary<'a> {
        n: usize,
        input_format: SeriesFormat,
        #[serde(flatten)]
        fit: FitSummary,
        manifest: &'a Manifest,
    }
    let manifest = Manifest::new(job, vec![digest]);
    out.write_json(
        "summary.json",
        &Summary {
            n: x.len(),
            input_format: detected,
            fit: (&r).into(),
            manifest: &manifest,
        },
    )?;
    out.write_json(MANIFEST, &manifest)?;
    Ok(Outcome::Done)
}

fn run_shuffle(job: &Job, j: &ShuffleJob, out: &OutDir) -> Result<Outcome> {
    let (bytes, digest) = read_input(&j.input)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| zipfsurr::Error::InvalidUtf8 {
        offset: e.valid_up_to(),
    })?;
    let shuffled = match j.level {
        ShuffleLevel::Characters => shuffle_characters(text, j.seed),
        ShuffleLevel::Words => lines(&shuffle_words(&tokenize_bytes(&bytes, &j.tokenizer)?, j.seed)),
        ShuffleLevel::Sentences => lines(&shuffle_sentences(text, j.seed, &j.tokenizer)?),
    };
    out.write("shuffled.txt", shuffled.as_bytes())?;
    out.write_json(MANIFEST, &Manifest::new(job, vec![digest]))?;
    Ok(Outcome::Done)
}

fn lines(seq: &SymbolSequence) -> String {
    let mut s = String::new();
    for label in seq.labels() {
        s.push_str(label);
        s.push('\n');
    }
    s
}
