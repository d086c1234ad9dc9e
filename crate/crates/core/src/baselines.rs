//! Shuffling null models at character, word and sentence level.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::encoders::{tokenize, TokenizerOptions};
use crate::error::{Error, Result};
use crate::rng::{seeded, Stream};
use crate::seqmodel::SymbolSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShuffleLevel {
    Characters,
    Words,
    Sentences,
}

/// Uniform random permutation of the tokens.
pub fn shuffle_words(seq: &SymbolSequence, seed: u64) -> SymbolSequence {
    let mut ids = seq.ids().to_vec();
    ids.shuffle(&mut seeded(seed, Stream::Shuffle));
    SymbolSequence::new_unchecked(seq.alphabet().clone(), ids)
}

/// Splits after `.`, `!` or `?` when followed by whitespace. Returned slices
/// are trimmed; empty pieces are dropped.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            if let Some(&(_, next)) = chars.peek() {
                if next.is_whitespace() {
                    let end = i + c.len_utf8();
                    out.push(&text[start..end]);
                    start = end;
                }
            }
        }
    }
    out.push(&text[start..]);
    out.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Permutes sentence order and tokenizes the result. Tokens keep their order
/// within each sentence.
pub fn shuffle_sentences(text: &str, seed: u64, opts: &TokenizerOptions) -> Result<SymbolSequence> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sentences = split_sentences(text);
    sentences.shuffle(&mut seeded(seed, Stream::Shuffle));
    // sentence boundaries fall on whitespace, so joining with a space
    // tokenizes each sentence exactly as before
    Ok(tokenize(&sentences.join(" "), opts))
}

/// Uniform random permutation of the Unicode scalar values of `text`.
pub fn shuffle_characters(text: &str, seed: u64) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    chars.shuffle(&mut seeded(seed, Stream::Shuffle));
    chars.into_iter().collect()
}
