//! Sparse text features for sentence classification.
//!
//! Sentences become TF-IDF weighted n-gram vectors. Inputs can be augmented
//! with the previous sentence as context; the first sentence of a document
//! gets the reserved `__START__` token instead.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::error::{Error, Result};

/// Reserved context token for the first sentence of a document. Never split
/// or case-folded by tokenization.
pub const START_TOKEN: &str = "__START__";

/// N-grams must occur at least this many times corpus-wide to enter the
/// vocabulary.
pub const MIN_TERM_COUNT: usize = 2;

const TFIDF_FORMAT_VERSION: u32 = 1;

/// Lowercases, splits on whitespace, and strips leading/trailing
/// non-alphanumeric characters from each token. [`START_TOKEN`] passes
/// through unchanged; tokens empty after stripping are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            if raw == START_TOKEN {
                return Some(raw.to_string());
            }
            let lowered = raw.to_lowercase();
            let core = lowered.trim_matches(|c: char| !c.is_alphanumeric());
            (!core.is_empty()).then(|| core.to_string())
        })
        .collect()
}

/// Builds the classifier input for sentence `i`: the sentence text alone, or
/// with the previous sentence prepended (separated by one space) when
/// `with_context` is set. The first sentence gets [`START_TOKEN`] as context.
pub fn make_input(sentences: &[Sentence], i: usize, with_context: bool) -> Result<String> {
    let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
    compose_input(&texts, i, with_context)
}

/// [`make_input`] over raw sentence texts.
pub fn compose_input(texts: &[&str], i: usize, with_context: bool) -> Result<String> {
    if i >= texts.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: texts.len(),
        });
    }
    if !with_context {
        return Ok(texts[i].to_string());
    }
    let context = if i == 0 { START_TOKEN } else { texts[i - 1] };
    Ok(format!("{} {}", context, texts[i]))
}

/// A fitted TF-IDF vocabulary: term -> column, with smoothed inverse document
/// frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    pub ngram_max: u8,
    pub vocab: BTreeMap<String, u32>,
    pub idf: Vec<f64>,
    pub doc_count: usize,
}

/// Sparse L2-normalized feature vector; entries are sorted by column and
/// never zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    /// Builds a vector from unsorted pairs, dropping zeros.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.retain(|&(_, w)| w != 0.0);
        pairs.sort_unstable_by_key(|&(i, _)| i);
        FeatureVector { entries: pairs }
    }

    pub fn empty() -> Self {
        FeatureVector { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, w)| w * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Dot product against a dense weight vector; columns beyond its length
    /// contribute nothing.
    pub fn dot_dense(&self, weights: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, w)| weights.get(i as usize).copied().unwrap_or(0.0) * w)
            .sum()
    }

    fn normalize(&mut self) {
        let norm = self.l2_norm();
        if norm > 0.0 {
            for (_, w) in &mut self.entries {
                *w /= norm;
            }
        }
    }
}

fn ngrams(tokens: &[String], ngram_max: u8) -> Vec<String> {
    let mut grams: Vec<String> = tokens.to_vec();
    if ngram_max >= 2 {
        for pair in tokens.windows(2) {
            grams.push(format!("{} {}", pair[0], pair[1]));
        }
    }
    grams
}

/// Fits a TF-IDF model on a corpus of input texts.
///
/// The vocabulary keeps n-grams (n <= `ngram_max`) occurring at least
/// [`MIN_TERM_COUNT`] times corpus-wide, with columns assigned in
/// lexicographic term order. `idf(t) = ln((1 + N) / (1 + df(t))) + 1`.
pub fn fit_tfidf(texts: &[String], ngram_max: u8) -> Result<TfidfModel> {
    if texts.is_empty() {
        return Err(Error::EmptyInput("training texts"));
    }
    if !(1..=2).contains(&ngram_max) {
        return Err(Error::Invalid(format!(
            "ngram_max must be 1 or 2, got {ngram_max}"
        )));
    }
    let mut total_counts: HashMap<String, usize> = HashMap::new();
    let mut doc_freq: HashMap<String, usize> = HashMap::new();
    for text in texts {
        let tokens = tokenize(text);
        let mut local: HashMap<String, usize> = HashMap::new();
        for gram in ngrams(&tokens, ngram_max) {
            *local.entry(gram).or_insert(0) += 1;
        }
        for (gram, count) in local {
            *doc_freq.entry(gram.clone()).or_insert(0) += 1;
            *total_counts.entry(gram).or_insert(0) += count;
        }
    }
    let mut terms: Vec<String> = total_counts
        .iter()
        .filter(|&(_, &count)| count >= MIN_TERM_COUNT)
        .map(|(term, _)| term.clone())
        .collect();
    terms.sort_unstable();
    let n = texts.len() as f64;
    let mut vocab = BTreeMap::new();
    let mut idf = Vec::with_capacity(terms.len());
    for (col, term) in terms.into_iter().enumerate() {
        let df = doc_freq[&term] as f64;
        idf.push(((1.0 + n) / (1.0 + df)).ln() + 1.0);
        vocab.insert(term, col as u32);
    }
    Ok(TfidfModel {
        ngram_max,
        vocab,
        idf,
        doc_count: texts.len(),
    })
}

impl TfidfModel {
    /// Transforms a text into an L2-normalized TF-IDF vector. Out-of-vocabulary
    /// terms are dropped; a text with no known terms maps to the empty vector.
    pub fn transform(&self, text: &str) -> FeatureVector {
        let tokens = tokenize(text);
        let mut counts: HashMap<u32, f64> = HashMap::new();
        for gram in ngrams(&tokens, self.ngram_max) {
            if let Some(&col) = self.vocab.get(&gram) {
                *counts.entry(col).or_insert(0.0) += 1.0;
            }
        }
        let pairs = counts
            .into_iter()
            .map(|(col, count)| (col, count * self.idf[col as usize]))
            .collect();
        let mut fv = FeatureVector::from_pairs(pairs);
        fv.normalize();
        fv
    }

    pub fn to_json(&self) -> String {
        let file = TfidfModelFile {
            version: TFIDF_FORMAT_VERSION,
            ngram_max: self.ngram_max,
            vocab: self.vocab.clone(),
            idf: self.idf.clone(),
            doc_count: self.doc_count,
        };
        serde_json::to_string(&file).expect("tfidf model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: TfidfModelFile = serde_json::from_str(json)
            .map_err(|e| Error::Invalid(format!("malformed tfidf model: {e}")))?;
        if file.version != TFIDF_FORMAT_VERSION {
            return Err(Error::ModelVersion {
                found: file.version,
            });
        }
        if file.vocab.len() != file.idf.len() {
            return Err(Error::Invalid(
                "tfidf model vocab and idf lengths differ".into(),
            ));
        }
        Ok(TfidfModel {
            ngram_max: file.ngram_max,
            vocab: file.vocab,
            idf: file.idf,
            doc_count: file.doc_count,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TfidfModelFile {
    version: u32,
    ngram_max: u8,
    vocab: BTreeMap<String, u32>,
    idf: Vec<f64>,
    doc_count: usize,
}
