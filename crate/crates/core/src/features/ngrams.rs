//! Word n-gram vocabulary and TF-IDF sentence vectors.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn ngrams(tokens: &[String], max_n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for w in tokens.windows(n) {
            out.push(w.join("_"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramVocabulary {
    pub max_n: usize,
    pub min_df: usize,
    pub n_documents: usize,
    /// Split the document frequencies were computed on.
    pub fitted_on: String,
    /// Sorted n-grams; the position is the feature id.
    pub terms: Vec<String>,
    pub df: Vec<usize>,
    pub idf: Vec<f64>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl NgramVocabulary {
    /// Fits on training sentences only: every n-gram (orders 1..=max_n)
    /// with document frequency at least `min_df`, IDF = ln((1+D)/(1+df)) + 1.
    pub fn fit(sentences: &[&[String]], max_n: usize, min_df: usize) -> Result<Self> {
        if sentences.is_empty() {
            return Err(Error::Invalid("no training sentences for the n-gram vocabulary".into()));
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for s in sentences {
            let unique: HashSet<String> = ngrams(s, max_n).into_iter().collect();
            for g in unique {
                *df.entry(g).or_default() += 1;
            }
        }
        let d = sentences.len() as f64;
        let kept: Vec<(String, usize)> = df.into_iter().filter(|(_, c)| *c >= min_df.max(1)).collect();
        let mut vocab = NgramVocabulary {
            max_n,
            min_df,
            n_documents: sentences.len(),
            fitted_on: "train".into(),
            idf: kept.iter().map(|(_, c)| ((1.0 + d) / (1.0 + *c as f64)).ln() + 1.0).collect(),
            df: kept.iter().map(|(_, c)| *c).collect(),
            terms: kept.into_iter().map(|(t, _)| t).collect(),
            index: HashMap::new(),
        };
        vocab.rebuild_index();
        Ok(vocab)
    }

    /// Must be called after deserializing.
    pub fn rebuild_index(&mut self) {
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    /// Raw counts times IDF, L2-normalized; sorted by id. Unknown n-grams
    /// are dropped.
    pub fn tfidf(&self, tokens: &[String]) -> Vec<(u32, f64)> {
        let mut tf: BTreeMap<u32, f64> = BTreeMap::new();
        for g in ngrams(tokens, self.max_n) {
            if let Some(id) = self.id(&g) {
                *tf.entry(id).or_default() += 1.0;
            }
        }
        let mut out: Vec<(u32, f64)> = tf.into_iter().map(|(id, c)| (id, c * self.idf[id as usize])).collect();
        let norm = out.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut out {
                *w /= norm;
            }
        }
        out
    }
}
