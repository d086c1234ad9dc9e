//! Core domain types: alphabets, symbol sequences, frequency tables and
//! real-valued series.
//!
//! Symbols are interned once into `u32` ids; everything downstream of the
//! encoders works on ids and never touches labels.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered set of distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, u32>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        Self::from_labels(symbols)
    }

    /// The zero-symbol alphabet carried by an empty sequence.
    pub(crate) fn empty() -> Self {
        Alphabet {
            symbols: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub(crate) fn from_labels(symbols: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            let id = u32::try_from(i).map_err(|_| crate::error::invalid("alphabet exceeds u32 ids"))?;
            if index.insert(s.clone(), id).is_some() {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// `{A, C, G, T}` in that order.
    pub fn dna() -> Self {
        Alphabet::new(["A", "C", "G", "T"]).expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, id: u32) -> &str {
        &self.symbols[id as usize]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }
}

/// A sequence of symbol ids over a shared alphabet.
#[derive(Debug, Clone)]
pub struct SymbolSequence {
    alphabet: Arc<Alphabet>,
    ids: Vec<u32>,
}

impl PartialEq for SymbolSequence {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.labels().eq(other.labels())
    }
}

impl SymbolSequence {
    pub fn new(alphabet: Arc<Alphabet>, ids: Vec<u32>) -> Result<Self> {
        let size = alphabet.len();
        if let Some(&id) = ids.iter().find(|&&id| id as usize >= size) {
            return Err(Error::InvalidSymbolId { id, size });
        }
        Ok(SymbolSequence { alphabet, ids })
    }

    pub(crate) fn new_unchecked(alphabet: Arc<Alphabet>, ids: Vec<u32>) -> Self {
        debug_assert!(ids.iter().all(|&id| (id as usize) < alphabet.len()));
        SymbolSequence { alphabet, ids }
    }

    /// Interns `labels` in first-occurrence order.
    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut interner = Interner::default();
        for label in labels {
            interner.push(label.as_ref());
        }
        interner.finish()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn into_ids(self) -> Vec<u32> {
        self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.ids.iter().map(move |&id| self.alphabet.symbol(id))
    }

    /// Occurrence count of each alphabet entry, indexed by id.
    pub fn histogram(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.alphabet.len()];
        for &id in &self.ids {
            counts[id as usize] += 1;
        }
        counts
    }
}

/// Incremental label interner producing a [`SymbolSequence`].
#[derive(Debug, Default)]
pub(crate) struct Interner {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    ids: Vec<u32>,
}

impl Interner {
    pub(crate) fn push(&mut self, label: &str) {
        let id = match self.index.get(label) {
            Some(&id) => id,
            None => {
                let id = self.labels.len() as u32;
                self.labels.push(label.to_owned());
                self.index.insert(label.to_owned(), id);
                id
            }
        };
        self.ids.push(id);
    }

    pub(crate) fn finish(self) -> SymbolSequence {
        let alphabet = if self.labels.is_empty() {
            Alphabet::empty()
        } else {
            Alphabet {
                symbols: self.labels,
                index: self.index,
            }
        };
        SymbolSequence::new_unchecked(Arc::new(alphabet), self.ids)
    }
}

/// Empirical symbol counts in Zipf order: alphabet index `i` holds rank `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    alphabet: Arc<Alphabet>,
    counts: Vec<u64>,
    total: u64,
}

impl FrequencyTable {
    /// Builds a table from `(label, count)` pairs. Pairs are sorted by
    /// descending count; equal counts keep their input order. Zero counts are
    /// rejected.
    pub fn from_counts<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut pairs: Vec<(String, u64)> = pairs.into_iter().map(|(s, c)| (s.into(), c)).collect();
        if pairs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some((label, _)) = pairs.iter().find(|(_, c)| *c == 0) {
            return Err(crate::error::invalid(format!("symbol {label:?} has zero count")));
        }
        // stable: ties keep their given order
        pairs.sort_by_key(|p| std::cmp::Reverse(p.1));
        let total = pairs
            .iter()
            .try_fold(0u64, |acc, (_, c)| acc.checked_add(*c))
            .filter(|&t| t <= i64::MAX as u64)
            .ok_or_else(|| crate::error::invalid("total count overflows"))?;
        let (labels, counts): (Vec<String>, Vec<u64>) = pairs.into_iter().unzip();
        Ok(FrequencyTable {
            alphabet: Arc::new(Alphabet::from_labels(labels)?),
            counts,
            total,
        })
    }

    /// A synthetic table with `vocab` symbols `w1, w2, ...` whose counts follow
    /// `f(r) ∝ r^-gamma`, sum exactly to `total`, and are all at least 1.
    pub fn zipf(vocab: usize, total: u64, gamma: f64) -> Result<Self> {
        if vocab == 0 || total < vocab as u64 {
            return Err(crate::error::invalid(format!(
                "zipf table needs 1 <= vocab ({vocab}) <= total ({total})"
            )));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(crate::error::invalid(format!("zipf exponent {gamma} must be >= 0")));
        }
        let weights: Vec<f64> = (1..=vocab).map(|r| (r as f64).powf(-gamma)).collect();
        let norm: f64 = weights.iter().sum();
        // one guaranteed token per symbol, the rest split by largest remainder
        let spare = (total - vocab as u64) as f64;
        let raw: Vec<f64> = weights.iter().map(|w| spare * w / norm).collect();
        let mut counts: Vec<u64> = raw.iter().map(|x| x.floor() as u64 + 1).collect();
        let assigned: u64 = counts.iter().sum();
        let mut order: Vec<usize> = (0..vocab).collect();
        order.sort_by(|&a, &b| {
            let fa = raw[a] - raw[a].floor();
            let fb = raw[b] - raw[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &i in order.iter().take((total - assigned) as usize) {
            counts[i] += 1;
        }
        FrequencyTable::from_counts((1..=vocab).map(|r| format!("w{r}")).zip(counts))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total token count N.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Vocabulary size V.
    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    /// 1-based Zipf rank of `label`.
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.alphabet.index_of(label).map(|i| i as usize + 1)
    }

    pub fn symbol_at_rank(&self, rank: usize) -> Option<&str> {
        (rank >= 1 && rank <= self.counts.len()).then(|| self.alphabet.symbol((rank - 1) as u32))
    }

    /// Inverse of [`zipf_rank_encode`]: maps integer ranks back to symbols.
    pub fn decode_ranks(&self, ranks: &[f64]) -> Result<SymbolSequence> {
        let v = self.counts.len();
        let ids = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                if r.fract() != 0.0 || r < 1.0 || r > v as f64 {
                    Err(crate::error::invalid(format!("value {r} at index {i} is not a rank in [1, {v}]")))
                } else {
                    Ok(r as u32 - 1)
                }
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(SymbolSequence::new_unchecked(self.alphabet.clone(), ids))
    }

    /// Maps each id of `seq`'s alphabet to the table index holding the same
    /// label. Ids whose label is absent map to `None`.
    pub(crate) fn translation(&self, seq: &SymbolSequence) -> Vec<Option<u32>> {
        if Arc::ptr_eq(seq.alphabet(), &self.alphabet) {
            return (0..self.alphabet.len() as u32).map(Some).collect();
        }
        seq.alphabet()
            .symbols()
            .iter()
            .map(|s| self.alphabet.index_of(s))
            .collect()
    }
}

/// A finite real-valued series.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSeries(Vec<f64>);

impl NumericSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(NumericSeries(values))
    }

    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        NumericSeries(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[f64]> for NumericSeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Counts every symbol of `seq` and orders the vocabulary by descending
/// frequency. Ties go to the symbol that occurs first in `seq`; symbols of the
/// alphabet that never occur are dropped.
pub fn build_frequency_table(seq: &SymbolSequence) -> Result<FrequencyTable> {
    if seq.is_empty() {
        return Err(Error::EmptyInput);
    }
    let v = seq.alphabet().len();
    let mut counts = vec![0u64; v];
    let mut first = vec![usize::MAX; v];
    for (t, &id) in seq.ids().iter().enumerate() {
        let i = id as usize;
        if counts[i] == 0 {
            first[i] = t;
        }
        counts[i] += 1;
    }
    let mut present: Vec<usize> = (0..v).filter(|&i| counts[i] > 0).collect();
    present.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(first[a].cmp(&first[b])));
    let alphabet = seq.alphabet();
    let labels: Vec<String> = present.iter().map(|&i| alphabet.symbol(i as u32).to_owned()).collect();
    let sorted: Vec<u64> = present.iter().map(|&i| counts[i]).collect();
    Ok(FrequencyTable {
        alphabet: Arc::new(Alphabet::from_labels(labels)?),
        total: seq.len() as u64,
        counts: sorted,
    })
}

/// Replaces each token with its 1-based Zipf rank.
pub fn zipf_rank_encode(seq: &SymbolSequence, table: &FrequencyTable) -> Result<NumericSeries> {
    let map = table.translation(seq);
    let values = seq
        .ids()
        .iter()
        .map(|&id| match map[id as usize] {
            Some(idx) => Ok(idx as f64 + 1.0),
            None => Err(Error::OutOfVocabulary(seq.alphabet().symbol(id).to_owned())),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NumericSeries::new_unchecked(values))
}
