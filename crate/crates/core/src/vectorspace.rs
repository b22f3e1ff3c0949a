//! The trigram TF-IDF vector space.
//!
//! One vocabulary and one set of document frequencies are built over the
//! per-user profile documents (a user's trigrams pooled across their tweets)
//! and shared by stance, user and tweet vectors, so every cosine in the
//! system is taken in the same space.
//!
//! Weights are `tf * (ln((1 + N) / (1 + df)) + 1)` with raw counts for `tf`,
//! followed by L2 normalization.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::textproc::Trigram;

#[derive(Debug, Error)]
pub enum VectorSpaceError {
    #[error("cannot build a vocabulary from zero documents")]
    NoDocuments,
    #[error("sparse vector indices must be strictly increasing (at position {0})")]
    Unsorted(usize),
    #[error("sparse vector weight at index {index} is not finite and positive: {weight}")]
    BadWeight { index: u32, weight: f64 },
    #[error("vocabulary dump line {line}: {message}")]
    Dump { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sorted `(index, weight)` pairs with strictly increasing indices and
/// strictly positive finite weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn zero() -> Self {
        SparseVector::default()
    }

    pub fn from_sorted(entries: Vec<(u32, f64)>) -> Result<Self, VectorSpaceError> {
        for (i, &(index, weight)) in entries.iter().enumerate() {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(VectorSpaceError::BadWeight { index, weight });
            }
            if i > 0 && entries[i - 1].0 >= index {
                return Err(VectorSpaceError::Unsorted(i));
            }
        }
        Ok(SparseVector { entries })
    }

    /// Sums duplicate indices and drops non-positive weights.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for (i, w) in pairs {
            *acc.entry(i).or_default() += w;
        }
        SparseVector {
            entries: acc.into_iter().filter(|&(_, w)| w > 0.0 && w.is_finite()).collect(),
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|p| self.entries[p].1)
            .unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }

    /// Unit-length copy; the zero vector stays zero.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return SparseVector::zero();
        }
        SparseVector {
            entries: self.entries.iter().map(|&(i, w)| (i, w / n)).collect(),
        }
    }

    /// Merge-join dot product.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut sum) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    pub fn scale(&self, factor: f64) -> Self {
        SparseVector::from_pairs(self.entries.iter().map(|&(i, w)| (i, w * factor)))
    }
}

/// Cosine similarity clamped to `[0, 1]`; zero when either vector is zero.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 0.0;
    }
    (a.dot(b) / denom).clamp(0.0, 1.0)
}

/// Trigram to dense index; indices follow lexicographic trigram order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vocabulary {
    index: HashMap<Trigram, u32>,
    terms: Vec<Trigram>,
}

impl Vocabulary {
    fn from_sorted_terms(terms: Vec<Trigram>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Vocabulary { index, terms }
    }

    pub fn get(&self, trigram: &Trigram) -> Option<u32> {
        self.index.get(trigram).copied()
    }

    pub fn term(&self, index: u32) -> &Trigram {
        &self.terms[index as usize]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DfStats {
    df: Vec<u32>,
    n_docs: u32,
}

impl DfStats {
    pub fn df(&self, index: u32) -> u32 {
        self.df[index as usize]
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VectorSpace {
    vocab: Vocabulary,
    df: DfStats,
}

const DUMP_MAGIC: &str = "#stancerec-vocab";
const DUMP_VERSION: &str = "v1";

impl VectorSpace {
    /// Builds the vocabulary from profile documents (trigram multisets).
    /// Only trigrams present in at least `min_df` documents are kept.
    pub fn build<'a, D>(documents: impl IntoIterator<Item = D>, min_df: u32) -> Result<Self, VectorSpaceError>
    where
        D: IntoIterator<Item = &'a Trigram>,
    {
        let mut counts: HashMap<&'a Trigram, u32> = HashMap::new();
        let mut n_docs = 0u32;
        for doc in documents {
            n_docs += 1;
            let unique: HashSet<&Trigram> = doc.into_iter().collect();
            for t in unique {
                *counts.entry(t).or_default() += 1;
            }
        }
        if n_docs == 0 {
            return Err(VectorSpaceError::NoDocuments);
        }
        let mut kept: Vec<(&Trigram, u32)> = counts.into_iter().filter(|&(_, c)| c >= min_df.max(1)).collect();
        kept.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let df = kept.iter().map(|&(_, c)| c).collect();
        let terms = kept.into_iter().map(|(t, _)| t.clone()).collect();
        Ok(VectorSpace {
            vocab: Vocabulary::from_sorted_terms(terms),
            df: DfStats { df, n_docs },
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn df_stats(&self) -> &DfStats {
        &self.df
    }

    pub fn idf(&self, index: u32) -> f64 {
        let n = f64::from(self.df.n_docs);
        let df = f64::from(self.df.df(index));
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    /// Raw in-vocabulary counts of a trigram multiset, by index.
    pub fn term_counts<'a>(&self, doc: impl IntoIterator<Item = &'a Trigram>) -> BTreeMap<u32, u32> {
        let mut counts = BTreeMap::new();
        for t in doc {
            if let Some(i) = self.vocab.get(t) {
                *counts.entry(i).or_default() += 1;
            }
        }
        counts
    }

    /// Unweighted TF-IDF vector from precomputed counts.
    pub fn weigh(&self, counts: &BTreeMap<u32, u32>) -> SparseVector {
        SparseVector {
            entries: counts
                .iter()
                .filter(|&(_, &c)| c > 0)
                .map(|(&i, &c)| (i, f64::from(c) * self.idf(i)))
                .collect(),
        }
    }

    /// L2-normalized TF-IDF vector; out-of-vocabulary trigrams are ignored.
    pub fn tfidf_vector<'a>(&self, doc: impl IntoIterator<Item = &'a Trigram>) -> SparseVector {
        self.weigh(&self.term_counts(doc)).normalized()
    }

    /// Writes the vocabulary as a versioned tab-separated dump:
    /// a header `#stancerec-vocab\tv1\t<n_docs>`, then `trigram\tindex\tdf`.
    pub fn write_dump(&self, mut w: impl Write) -> Result<(), VectorSpaceError> {
        writeln!(w, "{DUMP_MAGIC}\t{DUMP_VERSION}\t{}", self.df.n_docs)?;
        for (i, t) in self.vocab.terms.iter().enumerate() {
            writeln!(w, "{}\t{}\t{}", t, i, self.df.df[i])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_dump(r: impl BufRead) -> Result<Self, VectorSpaceError> {
        let bad = |line: usize, message: &str| VectorSpaceError::Dump {
            line,
            message: message.to_string(),
        };
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad(1, "missing header"))??;
        let parts: Vec<&str> = header.split('\t').collect();
        if parts.len() != 3 || parts[0] != DUMP_MAGIC {
            return Err(bad(1, "not a vocabulary dump"));
        }
        if parts[1] != DUMP_VERSION {
            return Err(bad(1, &format!("unsupported version {}", parts[1])));
        }
        let n_docs: u32 = parts[2].parse().map_err(|_| bad(1, "bad document count"))?;
        if n_docs == 0 {
            return Err(bad(1, "document count must be positive"));
        }
        let (mut terms, mut df) = (Vec::new(), Vec::new());
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(bad(line_no, "expected 3 tab-separated fields"));
            }
            let term = Trigram::parse(fields[0]).ok_or_else(|| bad(line_no, "not a trigram"))?;
            let index: usize = fields[1].parse().map_err(|_| bad(line_no, "bad index"))?;
            let d: u32 = fields[2].parse().map_err(|_| bad(line_no, "bad df"))?;
            if index != terms.len() {
                return Err(bad(line_no, "indices must be contiguous from 0"));
            }
            if d == 0 || d > n_docs {
                return Err(bad(line_no, "df out of range"));
            }
            if terms.last().is_some_and(|prev: &Trigram| prev >= &term) {
                return Err(bad(line_no, "terms must be strictly increasing"));
            }
            terms.push(term);
            df.push(d);
        }
        Ok(VectorSpace {
            vocab: Vocabulary::from_sorted_terms(terms),
            df: DfStats { df, n_docs },
        })
    }
}
