//! Zipf-preserving long-range correlated surrogates.
//!
//! An FGN realisation is sorted; the `f(a_1)` smallest values become the most
//! frequent symbol, the next `f(a_2)` the second most frequent, and so on. The
//! symbols are then read back in time order. Symbol counts are reproduced
//! exactly and the correlation structure is inherited from the FGN ordering.
//!
//! [`match_target_exponent`] wraps this in a bisection over the FGN exponent
//! so that the surrogate's measured DFA exponent hits a target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dfa::{dfa_exponent, DfaConfig};
use crate::encoders::ry_encode;
use crate::error::{invalid, Error, Result};
use crate::fgn::{generate_fgn, FgnConfig};
use crate::rng::derive_seed;
use crate::seqmodel::{zipf_rank_encode, FrequencyTable, NumericSeries, SymbolSequence};

/// Assigns symbols to `z` by rank: ascending `z` order is filled with the
/// table's symbols from most to least frequent. Ties in `z` go to the lower
/// index.
pub fn discretize_rank_based(z: &NumericSeries, table: &FrequencyTable) -> Result<SymbolSequence> {
    let n = z.len();
    if n as u64 != table.total() {
        return Err(Error::LengthMismatch {
            expected: table.total() as usize,
            found: n,
        });
    }
    if n > u32::MAX as usize {
        return Err(invalid(format!("series length {n} exceeds the supported maximum")));
    }
    if let Some(index) = z.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }

    let mut keyed: Vec<(u64, u32)> = z
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| (order_key(v), i as u32))
        .collect();
    // keys are unique once paired with the index, so the unstable sort is
    // deterministic
    keyed.par_sort_unstable();

    let mut ids = vec![0u32; n];
    let mut pos = 0usize;
    for (rank, &count) in table.counts().iter().enumerate() {
        for &(_, t) in &keyed[pos..pos + count as usize] {
            ids[t as usize] = rank as u32;
        }
        pos += count as usize;
    }
    Ok(SymbolSequence::new_unchecked(table.alphabet().clone(), ids))
}

/// Maps a finite float to a `u64` with the same ordering; `-0.0` and `0.0`
/// share a key.
fn order_key(v: f64) -> u64 {
    let bits = (v + 0.0).to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

/// FGN with exponent `alpha0` discretised onto `table`.
pub fn generate_surrogate(table: &FrequencyTable, alpha0: f64, seed: u64) -> Result<SymbolSequence> {
    let n = usize::try_from(table.total()).map_err(|_| invalid("table too large"))?;
    let z = generate_fgn(&FgnConfig::new(n, alpha0, seed))?;
    discretize_rank_based(&z, table)
}

/// How a surrogate is turned into numbers for DFA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateEncoding {
    /// Zipf rank of each symbol in the table.
    #[default]
    Rank,
    /// `A, G -> +1`, `C, T -> -1`.
    PurinePyrimidine,
}

impl SurrogateEncoding {
    pub fn numerify(&self, seq: &SymbolSequence, table: &FrequencyTable) -> Result<NumericSeries> {
        match self {
            SurrogateEncoding::Rank => zipf_rank_encode(seq, table),
            SurrogateEncoding::PurinePyrimidine => ry_encode(seq),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub target_alpha: f64,
    pub epsilon: f64,
    /// Initial `[lo, hi]` interval for the FGN exponent.
    pub bracket: (f64, f64),
    pub max_iters: usize,
    /// Iterations without improvement before the FGN seed is replaced.
    pub reseed_after: usize,
    pub base_seed: u64,
    pub dfa_config: DfaConfig,
    pub encoding: SurrogateEncoding,
}

impl MatchConfig {
    pub fn new(target_alpha: f64, base_seed: u64) -> Self {
        MatchConfig {
            target_alpha,
            epsilon: 0.01,
            bracket: (0.5, 0.99),
            max_iters: 40,
            reseed_after: 5,
            base_seed,
            dfa_config: DfaConfig::default(),
            encoding: SurrogateEncoding::Rank,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bracket;
        if !(0.5 <= lo && lo < hi && hi < 1.0) {
            return Err(invalid(format!("bracket [{lo}, {hi}] must satisfy 0.5 <= lo < hi < 1")));
        }
        if !(self.target_alpha >= 0.5 && self.target_alpha < 1.0) {
            return Err(invalid(format!(
                "target alpha {} must lie in [0.5, 1); anti-persistent targets are not supported",
                self.target_alpha
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid(format!("epsilon {} must be positive", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be positive"));
        }
        if self.reseed_after == 0 {
            return Err(invalid("reseed_after must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    LowerEdge,
    UpperEdge,
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub probe: Probe,
    pub alpha0: f64,
    pub alpha_s: f64,
    pub seed: u64,
    /// The measured exponent fell outside the values at the bracket edges
    /// under the same seed.
    pub non_monotone: bool,
    /// The seed was replaced after this step.
    pub reseeded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurrogateResult {
    #[serde(skip)]
    pub sequence: SymbolSequence,
    pub target_alpha: f64,
    pub epsilon: f64,
    pub achieved_alpha: f64,
    pub final_alpha0: f64,
    pub final_seed: u64,
    pub iterations: usize,
    pub seeds_used: Vec<u64>,
    pub converged: bool,
    pub trace: Vec<TraceStep>,
    pub dfa_config: DfaConfig,
    pub encoding: SurrogateEncoding,
}

struct Best {
    error: f64,
    alpha0: f64,
    alpha_s: f64,
    seed: u64,
    sequence: SymbolSequence,
}

/// Searches the FGN exponent `alpha0` for a surrogate of `table` whose DFA
/// exponent, measured with `cfg.dfa_config` under `cfg.encoding`, is within
/// `cfg.epsilon` of `cfg.target_alpha`.
///
/// The seed is held fixed while the bracket shrinks. It is replaced by the
/// next derived seed, and the bracket re-centred on the best exponent so far
/// (±0.05), when there has been no improvement for `reseed_after` steps, when
/// a step contradicts monotonicity, or when the lower edge already overshoots.
///
/// Returns the best iterate with `converged = false` if `max_iters` runs out.
pub fn match_target_exponent(table: &FrequencyTable, cfg: &MatchConfig) -> Result<SurrogateResult> {
    cfg.validate()?;
    let n = usize::try_from(table.total()).map_err(|_| invalid("table too large"))?;
    cfg.dfa_config.resolve_windows(n)?;
    if cfg.encoding == SurrogateEncoding::PurinePyrimidine {
        for s in table.alphabet().symbols() {
            if !matches!(s.as_str(), "A" | "C" | "G" | "T") {
                return Err(Error::NotNucleotide(s.clone()));
            }
        }
    }

    let target = cfg.target_alpha;
    let (outer_lo, outer_hi) = cfg.bracket;
    let measure = |alpha0: f64, seed: u64| -> Result<(SymbolSequence, f64)> {
        let seq = generate_surrogate(table, alpha0, seed)?;
        let x = cfg.encoding.numerify(&seq, table)?;
        let alpha = dfa_exponent(&x, &cfg.dfa_config)?.alpha;
        Ok((seq, alpha))
    };

    let mut seed_index = 0u64;
    let mut seed = cfg.base_seed;
    let mut seeds_used = vec![seed];
    let (mut lo, mut hi) = cfg.bracket;
    let mut at_lo: Option<f64> = None;
    let mut at_hi: Option<f64> = None;
    let mut stall = 0usize;
    let mut trace: Vec<TraceStep> = Vec::new();
    let mut best: Option<Best> = None;
    let mut converged = false;

    for iteration in 1..=cfg.max_iters {
        let (alpha0, probe) = match (at_lo, at_hi) {
            (None, _) => (lo, Probe::LowerEdge),
            (Some(_), None) => (hi, Probe::UpperEdge),
            (Some(_), Some(_)) => (0.5 * (lo + hi), Probe::Midpoint),
        };
        let (sequence, alpha_s) = measure(alpha0, seed)?;
        let error = (alpha_s - target).abs();
        log::debug!("iteration {iteration}: alpha0 = {alpha0:.5}, alpha_s = {alpha_s:.5}, seed = {seed}");

        let improved = best.as_ref().map_or(true, |b| error < b.error);
        if improved {
            best = Some(Best {
                error,
                alpha0,
                alpha_s,
                seed,
                sequence,
            });
            stall = 0;
        } else {
            stall += 1;
        }
        trace.push(TraceStep {
            iteration,
            probe,
            alpha0,
            alpha_s,
            seed,
            non_monotone: false,
            reseeded: false,
        });
        if error < cfg.epsilon {
            converged = true;
            break;
        }

        let mut reseed = false;
        match probe {
            Probe::LowerEdge => {
                if alpha_s > target {
                    if lo > outer_lo {
                        hi = lo;
                        at_hi = Some(alpha_s);
                        lo = outer_lo;
                    } else {
                        // cannot go lower; try another realisation
                        reseed = true;
                    }
                } else {
                    at_lo = Some(alpha_s);
                }
            }
            Probe::UpperEdge => {
                if alpha_s < target {
                    if hi < outer_hi {
                        lo = hi;
                        at_lo = Some(alpha_s);
                        hi = outer_hi;
                    } else {
                        return Err(Error::TargetUnreachable {
                            target,
                            alpha0,
                            achieved: alpha_s,
                        });
                    }
                } else {
                    at_hi = Some(alpha_s);
                }
            }
            Probe::Midpoint => {
                let (s_lo, s_hi) = (at_lo.unwrap(), at_hi.unwrap());
                if alpha_s < s_lo || alpha_s > s_hi {
                    trace.last_mut().unwrap().non_monotone = true;
                    reseed = true;
                }
                if alpha_s < target {
                    lo = alpha0;
                    at_lo = Some(alpha_s);
                } else {
                    hi = alpha0;
                    at_hi = Some(alpha_s);
                }
            }
        }

        if reseed || stall >= cfg.reseed_after {
            seed_index += 1;
            seed = derive_seed(cfg.base_seed, seed_index);
            seeds_used.push(seed);
            let centre = best.as_ref().unwrap().alpha0;
            lo = (centre - 0.05).max(outer_lo);
            hi = (centre + 0.05).min(outer_hi);
            at_lo = None;
            at_hi = None;
            stall = 0;
            trace.last_mut().unwrap().reseeded = true;
        }
    }

    let best = best.expect("at least one iteration runs");
    Ok(SurrogateResult {
        sequence: best.sequence,
        target_alpha: target,
        epsilon: cfg.epsilon,
        achieved_alpha: best.alpha_s,
        final_alpha0: best.alpha0,
        final_seed: best.seed,
        iterations: trace.len(),
        seeds_used,
        converged,
        trace,
        dfa_config: cfg.dfa_config.clone(),
        encoding: cfg.encoding,
    })
}
