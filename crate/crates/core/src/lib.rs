//! Zipf-preserving surrogates with tunable long-range correlations.
//!
//! Pipeline: tokenize text (or parse FASTA), build the rank-frequency table,
//! measure the DFA exponent of the rank-encoded series, then generate
//! fractional Gaussian noise and map it onto the table by rank so that the
//! surrogate keeps every symbol count while its correlation exponent is tuned
//! by bisection.

pub mod baselines;
pub mod dfa;
pub mod encoders;
pub mod error;
pub mod fgn;
pub mod rng;
pub mod seqmodel;
pub mod spectral;
pub mod surrogate;

pub use baselines::{shuffle_characters, shuffle_sentences, shuffle_words, ShuffleLevel};
pub use dfa::{
    alpha_from_zeta, beta_from_alpha, dfa_exponent, fluctuation, profile, DfaConfig, DfaResult, Segmentation,
    WindowSpec,
};
pub use encoders::{parse_fasta, ry_encode, tokenize, FastaOptions, NonAcgtPolicy, PunctuationMode, TokenizerOptions};
pub use error::{Error, Result};
pub use fgn::{generate_fgn, FgnConfig};
pub use seqmodel::{
    build_frequency_table, zipf_rank_encode, Alphabet, FrequencyTable, NumericSeries, SymbolSequence,
};
pub use surrogate::{
    discretize_rank_based, generate_surrogate, match_target_exponent, MatchConfig, SurrogateEncoding,
    SurrogateResult,
};
