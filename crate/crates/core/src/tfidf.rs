//! tf-idf weighting with cosine normalization.
//!
//! Weights use the raw term count and a smoothed inverse document
//! frequency, `tf * (ln((1 + N) / (1 + df)) + 1)`, where `N` is the number
//! of documents seen when fitting. The idf is never refitted on the
//! documents being transformed.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::data::SparseVector;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct VectorizerModel {
    vocabulary: BTreeMap<String, usize>,
    doc_freq: Vec<usize>,
    corpus_size: usize,
}

impl VectorizerModel {
    /// Reassembles a model from its stored parts; `terms` is indexed by
    /// feature id.
    pub fn from_parts(terms: Vec<(String, usize)>, corpus_size: usize) -> Result<Self> {
        let mut vocabulary = BTreeMap::new();
        let mut doc_freq = Vec::with_capacity(terms.len());
        for (id, (term, df)) in terms.into_iter().enumerate() {
            if df == 0 || df > corpus_size {
                return Err(Error::Incompatible(
                    "document frequency outside 1..=corpus size",
                ));
            }
            if vocabulary.insert(term, id).is_some() {
                return Err(Error::Incompatible("duplicate vocabulary term"));
            }
            doc_freq.push(df);
        }
        Ok(Self {
            vocabulary,
            doc_freq,
            corpus_size,
        })
    }

    pub fn len(&self) -> usize {
        self.doc_freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_freq.is_empty()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn feature_id(&self, token: &str) -> Option<usize> {
        self.vocabulary.get(token).copied()
    }

    pub fn doc_freq(&self, id: usize) -> usize {
        self.doc_freq[id]
    }

    pub fn idf(&self, id: usize) -> f64 {
        let n = self.corpus_size as f64;
        libm::log((1.0 + n) / (1.0 + self.doc_freq[id] as f64)) + 1.0
    }

    /// Terms ordered by feature id.
    pub fn terms(&self) -> Vec<(&str, usize)> {
        let mut out: Vec<(&str, usize)> = alloc::vec![("", 0); self.doc_freq.len()];
        for (term, &id) in &self.vocabulary {
            out[id] = (term.as_str(), self.doc_freq[id]);
        }
        out
    }

    /// Unit-norm tf-idf vector of `doc`. Unknown tokens are dropped; a
    /// document with no known token maps to the empty vector.
    pub fn transform<S: AsRef<str>>(&self, doc: &[S]) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for tok in doc {
            if let Some(id) = self.feature_id(tok.as_ref()) {
                *counts.entry(id).or_insert(0.0) += 1.0;
            }
        }
        let entries: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(id, tf)| (id, tf * self.idf(id)))
            .collect();
        // entries are sorted, in range and finite by construction
        let mut v = SparseVector::new(self.len(), entries).expect("valid tf-idf entries");
        let norm = v.norm();
        if norm > 0.0 {
            v.scale(1.0 / norm);
        }
        v
    }
}

/// Builds the vocabulary from pre-tokenized documents, keeping the
/// `max_features` tokens with the highest corpus term count (ties broken
/// alphabetically). Feature ids follow alphabetical order of the kept
/// tokens.
pub fn fit_tfidf<D, S>(docs: &[D], max_features: Option<usize>) -> Result<VectorizerModel>
where
    D: AsRef<[S]>,
    S: AsRef<str>,
{
    if docs.is_empty() {
        return Err(Error::NoDocuments);
    }
    // token -> (term count, document frequency, last doc seen)
    let mut stats: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for (d, doc) in docs.iter().enumerate() {
        for tok in doc.as_ref() {
            let e = stats.entry(tok.as_ref()).or_insert((0, 0, usize::MAX));
            e.0 += 1;
            if e.2 != d {
                e.1 += 1;
                e.2 = d;
            }
        }
    }
    let mut kept: Vec<(&str, usize, usize)> = stats
        .into_iter()
        .map(|(t, (tf, df, _))| (t, tf, df))
        .collect();
    if let Some(limit) = max_features {
        if kept.len() > limit {
            kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            kept.truncate(limit);
            kept.sort_by(|a, b| a.0.cmp(b.0));
        }
    }
    let terms = kept
        .into_iter()
        .map(|(t, _, df)| (t.to_string(), df))
        .collect();
    VectorizerModel::from_parts(terms, docs.len())
}
