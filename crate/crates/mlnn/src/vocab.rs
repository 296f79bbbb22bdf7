//! Tokenized documents and fitted vocabularies.
//!
//! Documents are one per line: comma-separated label names, a tab, then
//! whitespace-separated tokens. A vocabulary file stores the corpus size,
//! the label names and one `term<TAB>document-frequency` line per feature
//! in feature-id order:
//!
//! ```text
//! #corpus_size=3
//! #labels=earn,grain
//! profit<TAB>2
//! wheat<TAB>1
//! ```

use mlnn_core::data::{Dataset, Instance, LabelSet};
use mlnn_core::tfidf::{fit_tfidf, VectorizerModel};

use crate::FormatError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub line: usize,
    pub labels: Vec<String>,
    pub tokens: Vec<String>,
}

pub fn read_documents(text: &str) -> Result<Vec<Document>, FormatError> {
    let mut docs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let (labels, tokens) = raw
            .split_once('\t')
            .ok_or_else(|| FormatError::syntax(n + 1, "expected labels<TAB>tokens"))?;
        let labels: Vec<String> = labels
            .split(',')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        docs.push(Document {
            line: n + 1,
            labels,
            tokens: tokens.split_whitespace().map(String::from).collect(),
        });
    }
    Ok(docs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    pub tfidf: VectorizerModel,
    /// Label names; a label's id is its position.
    pub labels: Vec<String>,
}

impl Vocabulary {
    /// Fits tf-idf weights on `docs` and collects their label names in
    /// sorted order.
    pub fn fit(docs: &[Document], max_features: Option<usize>) -> Result<Self, FormatError> {
        let tokens: Vec<&[String]> = docs.iter().map(|d| d.tokens.as_slice()).collect();
        let tfidf = fit_tfidf(&tokens, max_features)?;
        let mut labels: Vec<String> = docs.iter().flat_map(|d| d.labels.iter().cloned()).collect();
        labels.sort();
        labels.dedup();
        Ok(Self { tfidf, labels })
    }

    pub fn label_id(&self, name: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(name)).ok()
    }

    /// Tokens outside the vocabulary are ignored; unknown label names are
    /// an error.
    pub fn vectorize(&self, docs: &[Document]) -> Result<Dataset, FormatError> {
        let mut instances = Vec::with_capacity(docs.len());
        for d in docs {
            let ids = d
                .labels
                .iter()
                .map(|l| {
                    self.label_id(l)
                        .ok_or_else(|| FormatError::syntax(d.line, format!("unknown label {l:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            instances.push(Instance::new(
                self.tfidf.transform(&d.tokens),
                LabelSet::new(self.labels.len(), ids)?,
            ));
        }
        Ok(Dataset::new(
            self.tfidf.len(),
            self.labels.len(),
            instances,
        )?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "#corpus_size={}\n#labels={}\n",
            self.tfidf.corpus_size(),
            self.labels.join(",")
        );
        for (term, df) in self.tfidf.terms() {
            out.push_str(&format!("{term}\t{df}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut corpus_size = None;
        let mut labels = None;
        let mut terms = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            if raw.is_empty() {
                continue;
            }
            if let Some(v) = raw.strip_prefix("#corpus_size=") {
                corpus_size = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| FormatError::syntax(line, "bad corpus size"))?,
                );
            } else if let Some(v) = raw.strip_prefix("#labels=") {
                labels = Some(
                    v.split(',')
                        .filter(|l| !l.is_empty())
                        .map(String::from)
                        .collect::<Vec<_>>(),
                );
            } else {
                let (term, df) = raw
                    .split_once('\t')
                    .ok_or_else(|| FormatError::syntax(line, "expected term<TAB>df"))?;
                let df = df
                    .trim()
                    .parse()
                    .map_err(|_| FormatError::syntax(line, "bad document frequency"))?;
                terms.push((term.to_string(), df));
            }
        }
        let corpus_size =
            corpus_size.ok_or_else(|| FormatError::Invalid("missing #corpus_size".into()))?;
        let labels = labels.ok_or_else(|| FormatError::Invalid("missing #labels".into()))?;
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FormatError::Invalid(
                "label names must be sorted and unique".into(),
            ));
        }
        Ok(Self {
            tfidf: VectorizerModel::from_parts(terms, corpus_size)?,
            labels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOCS: &str = "earn\tprofit rose profit\ngrain,earn\twheat profit\n\tnothing here\n";

    #[test]
    fn fit_and_vectorize() {
        let docs = read_documents(DOCS).unwrap();
        assert_eq!(docs.len(), 3);
        assert!(docs[2].labels.is_empty());
        let v = Vocabulary::fit(&docs, None).unwrap();
        assert_eq!(v.labels, vec!["earn", "grain"]);
        let ds = v.vectorize(&docs).unwrap();
        assert_eq!((ds.dim(), ds.label_count(), ds.len()), (5, 2, 3));
        assert_eq!(ds.instances()[1].labels.relevant(), &[0, 1]);
        for inst in &ds {
            assert!((inst.features.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vocabulary_file_round_trip() {
        let docs = read_documents(DOCS).unwrap();
        let v = Vocabulary::fit(&docs, Some(2)).unwrap();
        let text = v.to_text();
        assert_eq!(
            text,
            "#corpus_size=3\n#labels=earn,grain\nhere\t1\nprofit\t2\n"
        );
        let back = Vocabulary::from_text(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_documents("no tab here\n").is_err());
        let v = Vocabulary::fit(&read_documents(DOCS).unwrap(), None).unwrap();
        let unknown = read_documents("corn\twheat\n").unwrap();
        assert!(matches!(
            v.vectorize(&unknown),
            Err(FormatError::Syntax { line: 1, .. })
        ));
        assert!(Vocabulary::from_text("#labels=a\nx\t1\n").is_err());
        assert!(Vocabulary::from_text("#corpus_size=1\n#labels=b,a\n").is_err());
    }
}
