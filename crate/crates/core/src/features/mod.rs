//! Per-sentence features: n-grams, proposition types, tone, plus slots for
//! knowledge scores, sentence topic and post domain.

mod lexicon;
mod ngrams;
mod propositions;
mod tone;

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use lexicon::{word_forms, LexMatch, Lexicon};
pub use ngrams::{ngrams, NgramVocabulary};
pub use propositions::{compile_patterns, PropositionLexicons, PROPOSITION_NAMES};
pub use tone::{
    tone_features, LexiconPaths, LexiconSentiment, PrecomputedSentiment, SentimentCategory, SentimentScorer,
    ToneLexicons, TONE_NAMES,
};

use crate::corpus::{SentenceRecord, SuccessLabel};
use crate::error::{Error, Result};

pub const KNOWLEDGE_NAMES: [&str; 3] = ["frequency", "attractiveness", "extremeness"];

/// Dense features of one sentence. Sparse n-gram weights are kept apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub key: String,
    pub post_id: String,
    pub index: usize,
    pub n_chars: usize,
    pub propositions: [bool; 13],
    pub tone: [f64; 8],
    pub knowledge: [f64; 3],
    pub topic: Option<usize>,
    pub domain: Option<usize>,
    pub attacked: bool,
    pub success: SuccessLabel,
}

pub struct FeatureExtractor {
    pub propositions: PropositionLexicons,
    pub tone: ToneLexicons,
    pub sentiment: Box<dyn SentimentScorer>,
}

impl FeatureExtractor {
    /// Polarity comes from `paths.polarity` when set.
    pub fn new(paths: &LexiconPaths) -> Result<Self> {
        let polarity = match &paths.polarity {
            Some(p) => Lexicon::load_tsv("polarity", p)?,
            None => Lexicon::new("polarity", []),
        };
        Ok(FeatureExtractor {
            propositions: PropositionLexicons::builtin()?,
            tone: ToneLexicons::load(paths)?,
            sentiment: Box::new(LexiconSentiment { polarity }),
        })
    }

    pub fn with_sentiment(mut self, scorer: Box<dyn SentimentScorer>) -> Self {
        self.sentiment = scorer;
        self
    }

    /// Lexical features; knowledge, topic and domain are left empty.
    pub fn extract(&self, s: &SentenceRecord) -> FeatureVector {
        let key = s.key();
        FeatureVector {
            propositions: self.propositions.flags(&s.tokens),
            tone: tone_features(&s.tokens, &key, &self.tone, self.sentiment.as_ref()),
            key,
            post_id: s.post_id.clone(),
            index: s.index,
            n_chars: s.text.chars().count(),
            knowledge: [0.0; 3],
            topic: None,
            domain: None,
            attacked: s.attacked,
            success: s.success,
        }
    }

    pub fn extract_all(&self, sentences: &[&SentenceRecord]) -> Vec<FeatureVector> {
        sentences.par_iter().map(|s| self.extract(s)).collect()
    }
}

fn header() -> Vec<String> {
    let mut h: Vec<String> = ["key", "post_id", "sentence_index", "n_chars"].iter().map(|s| s.to_string()).collect();
    h.extend(PROPOSITION_NAMES.iter().map(|s| s.to_string()));
    h.extend(TONE_NAMES.iter().map(|s| s.to_string()));
    h.extend(KNOWLEDGE_NAMES.iter().map(|s| s.to_string()));
    h.extend(["topic", "domain", "attacked", "success"].iter().map(|s| s.to_string()));
    h
}

fn opt(v: Option<usize>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn label_name(s: SuccessLabel) -> &'static str {
    match s {
        SuccessLabel::Successful => "successful",
        SuccessLabel::Unsuccessful => "unsuccessful",
        SuccessLabel::Unattacked => "unattacked",
    }
}

/// Wide CSV, one row per sentence.
pub fn write_features_csv<W: Write>(writer: W, rows: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header()).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.key.clone(), r.post_id.clone(), r.index.to_string(), r.n_chars.to_string()];
        rec.extend(r.propositions.iter().map(|&b| u8::from(b).to_string()));
        rec.extend(r.tone.iter().map(|x| (x + 0.0).to_string()));
        rec.extend(r.knowledge.iter().map(|x| (x + 0.0).to_string()));
        rec.extend([opt(r.topic), opt(r.domain), u8::from(r.attacked).to_string(), label_name(r.success).into()]);
        w.write_record(rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

pub fn read_features_csv<R: Read>(reader: R) -> Result<Vec<FeatureVector>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let expected = header();
    let got: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if got != expected {
        return Err(Error::Invalid("features.csv has unexpected columns".into()));
    }
    let mut out = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let line = n + 2;
        let rec = rec.map_err(|e| Error::Record { line, message: e.to_string() })?;
        let bad = |col: &str| Error::Record { line, message: format!("bad value in column `{col}`") };
        let num = |i: usize| -> Result<f64> { rec[i].parse::<f64>().map_err(|_| bad(&expected[i])) };
        let int = |i: usize| -> Result<usize> { rec[i].parse::<usize>().map_err(|_| bad(&expected[i])) };
        let optional = |i: usize| -> Result<Option<usize>> {
            if rec[i].is_empty() {
                Ok(None)
            } else {
                int(i).map(Some)
            }
        };
        let mut propositions = [false; 13];
        for (k, p) in propositions.iter_mut().enumerate() {
            *p = match &rec[4 + k] {
                "0" => false,
                "1" => true,
                _ => return Err(bad(&expected[4 + k])),
            };
        }
        let mut tone = [0.0; 8];
        for (k, t) in tone.iter_mut().enumerate() {
            *t = num(17 + k)?;
        }
        let mut knowledge = [0.0; 3];
        for (k, t) in knowledge.iter_mut().enumerate() {
            *t = num(25 + k)?;
        }
        let success = match &rec[31] {
            "successful" => SuccessLabel::Successful,
            "unsuccessful" => SuccessLabel::Unsuccessful,
            "unattacked" => SuccessLabel::Unattacked,
            _ => return Err(bad("success")),
        };
        out.push(FeatureVector {
            key: rec[0].to_string(),
            post_id: rec[1].to_string(),
            index: int(2)?,
            n_chars: int(3)?,
            propositions,
            tone,
            knowledge,
            topic: optional(28)?,
            domain: optional(29)?,
            attacked: &rec[30] == "1",
            success,
        });
    }
    Ok(out)
}

/// `(row, ngram_id, weight)` triplets, one per line.
pub fn write_ngram_triplets<W: Write>(writer: W, rows: &[Vec<(u32, f64)>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["row", "ngram_id", "weight"]).map_err(csv_err)?;
    for (i, row) in rows.iter().enumerate() {
        for (id, weight) in row {
            w.write_record([i.to_string(), id.to_string(), weight.to_string()]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_ngram_triplets<R: Read>(reader: R, n_rows: usize) -> Result<Vec<Vec<(u32, f64)>>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut rows = vec![Vec::new(); n_rows];
    for (n, rec) in rdr.records().enumerate() {
        let line = n + 2;
        let rec = rec.map_err(|e| Error::Record { line, message: e.to_string() })?;
        let bad = || Error::Record { line, message: "bad triplet".into() };
        let row: usize = rec[0].parse().map_err(|_| bad())?;
        let id: u32 = rec[1].parse().map_err(|_| bad())?;
        let w: f64 = rec[2].parse().map_err(|_| bad())?;
        rows.get_mut(row).ok_or_else(bad)?.push((id, w));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Post;

    #[test]
    fn csv_roundtrip_and_determinism() {
        let post = Post::new("p", "", "We must act now. Why should I care? The sky is blue.", "", 1);
        let fx = FeatureExtractor::new(&LexiconPaths::default()).unwrap();
        let refs: Vec<&SentenceRecord> = post.sentences.iter().collect();
        let mut rows = fx.extract_all(&refs);
        rows[0].knowledge = [1.5, 0.25, 0.5];
        rows[1].topic = Some(3);
        let mut a = Vec::new();
        write_features_csv(&mut a, &rows).unwrap();
        let mut b = Vec::new();
        write_features_csv(&mut b, &rows).unwrap();
        assert_eq!(a, b);
        assert_eq!(read_features_csv(a.as_slice()).unwrap(), rows);
    }

    #[test]
    fn triplets_roundtrip() {
        let rows = vec![vec![(0, 0.6), (4, 0.8)], vec![], vec![(2, 1.0)]];
        let mut buf = Vec::new();
        write_ngram_triplets(&mut buf, &rows).unwrap();
        assert_eq!(read_ngram_triplets(buf.as_slice(), 3).unwrap(), rows);
    }
}
