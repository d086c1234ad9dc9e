//! Turning raw text and FASTA files into symbol sequences, and DNA into a
//! purine/pyrimidine walk.

use std::io::BufRead;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::error::{Error, Result};
use crate::seqmodel::{Alphabet, Interner, NumericSeries, SymbolSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PunctuationMode {
    /// Drop leading and trailing punctuation from every word.
    #[default]
    Strip,
    /// Emit every punctuation mark as a token of its own.
    AsTokens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerOptions {
    pub lowercase: bool,
    pub punctuation: PunctuationMode,
}

impl Default for TokenizerOptions {
    fn default() -> Self {
        TokenizerOptions {
            lowercase: true,
            punctuation: PunctuationMode::Strip,
        }
    }
}

/// Unicode general category P* (Pc, Pd, Ps, Pe, Pi, Pf, Po).
pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

// Hyphens join compounds; every other dash (en, em, bar, ...) separates words.
fn is_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}')
}

fn is_separator_dash(c: char) -> bool {
    !is_hyphen(c) && get_general_category(c) == GeneralCategory::DashPunctuation
}

/// Splits text into tokens.
///
/// Words are delimited by whitespace and by non-hyphen dashes (em/en dashes,
/// or two or more consecutive hyphen-minus characters). Punctuation inside a
/// word, as in `well-known` or `don't`, is kept.
pub fn tokenize(text: &str, opts: &TokenizerOptions) -> SymbolSequence {
    let mut interner = Interner::default();
    let mut buf = String::new();

    for chunk in text.split_whitespace() {
        for piece in split_separators(chunk) {
            match piece {
                Piece::Separator(sep) => {
                    if opts.punctuation == PunctuationMode::AsTokens {
                        for c in sep.chars() {
                            interner.push(c.encode_utf8(&mut [0u8; 4]));
                        }
                    }
                }
                Piece::Word(word) => {
                    let core_start = word
                        .char_indices()
                        .find(|&(_, c)| !is_punctuation(c))
                        .map(|(i, _)| i)
                        .unwrap_or(word.len());
                    let core_end = word
                        .char_indices()
                        .rev()
                        .find(|&(_, c)| !is_punctuation(c))
                        .map(|(i, c)| i + c.len_utf8())
                        .unwrap_or(core_start)
                        .max(core_start);
                    let as_tokens = opts.punctuation == PunctuationMode::AsTokens;
                    if as_tokens {
                        for c in word[..core_start].chars() {
                            interner.push(c.encode_utf8(&mut [0u8; 4]));
                        }
                    }
                    let core = &word[core_start..core_end];
                    if !core.is_empty() {
                        if opts.lowercase {
                            buf.clear();
                            buf.extend(core.chars().flat_map(char::to_lowercase));
                            interner.push(&buf);
                        } else {
                            interner.push(core);
                        }
                    }
                    if as_tokens {
                        for c in word[core_end..].chars() {
                            interner.push(c.encode_utf8(&mut [0u8; 4]));
                        }
                    }
                }
            }
        }
    }
    interner.finish()
}

/// [`tokenize`] over raw bytes, rejecting invalid UTF-8.
pub fn tokenize_bytes(bytes: &[u8], opts: &TokenizerOptions) -> Result<SymbolSequence> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::InvalidUtf8 {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize(text, opts))
}

enum Piece<'a> {
    Word(&'a str),
    Separator(&'a str),
}

fn split_separators(chunk: &str) -> Vec<Piece<'_>> {
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let is_sep = |k: usize| {
        let c = chars[k].1;
        is_separator_dash(c)
            || (c == '-'
                && ((k > 0 && chars[k - 1].1 == '-') || (k + 1 < chars.len() && chars[k + 1].1 == '-')))
    };
    let mut pieces = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let start = chars[k].0;
        let sep = is_sep(k);
        while k < chars.len() && is_sep(k) == sep {
            k += 1;
        }
        let end = chars.get(k).map_or(chunk.len(), |&(i, _)| i);
        let s = &chunk[start..end];
        pieces.push(if sep { Piece::Separator(s) } else { Piece::Word(s) });
    }
    pieces
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonAcgtPolicy {
    /// Drop the character and count it.
    #[default]
    Skip,
    /// Stop at the first one.
    Fail,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FastaOptions {
    pub non_acgt: NonAcgtPolicy,
    /// Keep only the record whose id (header text up to the first
    /// whitespace) matches.
    pub record: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FastaSequence {
    pub sequence: SymbolSequence,
    /// Non-whitespace sequence characters outside `ACGTacgt` that were dropped.
    pub skipped: u64,
    /// Ids of the records that contributed, in file order.
    pub records: Vec<String>,
}

/// Reads FASTA into a sequence over `{A, C, G, T}`.
///
/// Records are concatenated in file order unless `opts.record` selects one.
/// Bases are case-insensitive; LF and CRLF line endings are both accepted.
pub fn parse_fasta<R: BufRead>(mut reader: R, opts: &FastaOptions) -> Result<FastaSequence> {
    let alphabet = Arc::new(Alphabet::dna());
    let mut ids = Vec::new();
    let mut skipped = 0u64;
    let mut records = Vec::new();
    let mut active = opts.record.is_none();
    let mut saw_sequence = false;
    let mut line = Vec::new();
    let mut line_no = 0usize;
    let mut offset = 0u64;

    loop {
        line.clear();
        let n = reader.read_until(b'\n', &mut line)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let line_start = offset;
        offset += n as u64;

        if line.first() == Some(&b'>') {
            let header = String::from_utf8_lossy(&line[1..]);
            let id = header.split_whitespace().next().unwrap_or("").to_owned();
            active = opts.record.as_deref().map_or(true, |want| want == id);
            if active {
                records.push(id);
            }
            continue;
        }
        if !active {
            continue;
        }
        if opts.record.is_none() && records.is_empty() && line.iter().any(|b| !b.is_ascii_whitespace()) {
            // sequence data before any header
            records.push(String::new());
        }
        for (col, &b) in line.iter().enumerate() {
            if b.is_ascii_whitespace() {
                continue;
            }
            saw_sequence = true;
            let id = match b.to_ascii_uppercase() {
                b'A' => 0,
                b'C' => 1,
                b'G' => 2,
                b'T' => 3,
                _ => match opts.non_acgt {
                    NonAcgtPolicy::Skip => {
                        skipped += 1;
                        continue;
                    }
                    NonAcgtPolicy::Fail => {
                        return Err(Error::InvalidBase {
                            byte: b as char,
                            line: line_no,
                            column: col + 1,
                            offset: line_start + col as u64,
                        })
                    }
                },
            };
            ids.push(id);
        }
    }

    if let Some(want) = &opts.record {
        if records.is_empty() {
            return Err(Error::RecordNotFound(want.clone()));
        }
    }
    if !saw_sequence {
        return Err(Error::NoSequence);
    }
    Ok(FastaSequence {
        sequence: SymbolSequence::new_unchecked(alphabet, ids),
        skipped,
        records,
    })
}

/// Purine/pyrimidine walk steps: `A, G -> +1`, `C, T -> -1`.
pub fn ry_encode(dna: &SymbolSequence) -> Result<NumericSeries> {
    let steps = dna
        .alphabet()
        .symbols()
        .iter()
        .map(|s| match s.as_str() {
            "A" | "G" => Ok(1.0),
            "C" | "T" => Ok(-1.0),
            other => Err(Error::NotNucleotide(other.to_owned())),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NumericSeries::new_unchecked(
        dna.ids().iter().map(|&id| steps[id as usize]).collect(),
    ))
}
