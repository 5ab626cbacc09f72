//! Collapsed Gibbs LDA over documents (one topic per token) or sentences
//! (one topic per sentence), plus domain assignment from topic proportions.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::stopwords;

pub const TOPIC_MODEL_VERSION: u32 = 1;
const FOLD_IN_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopicMode {
    Document,
    Sentence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    /// Defaults to 50 / K when absent.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    pub mode: TopicMode,
}

impl LdaConfig {
    pub fn new(k: usize, mode: TopicMode, seed: u64) -> Self {
        LdaConfig { k, alpha: None, beta: 0.01, iterations: 1000, seed, mode }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.k as f64)
    }
}

/// Tokens kept for topic modelling: alphabetic words that are not stopwords.
pub fn topic_tokens(tokens: &[String]) -> Vec<String> {
    let stop = stopwords();
    tokens
        .iter()
        .filter(|t| t.len() > 1 && t.chars().all(char::is_alphabetic) && !stop.contains(t.as_str()))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicModel {
    pub version: u32,
    pub mode: TopicMode,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Sorted vocabulary; word ids index into it.
    pub vocab: Vec<String>,
    /// K rows of V counts.
    pub topic_word_counts: Vec<Vec<u32>>,
    pub topic_totals: Vec<u64>,
    /// Sampling units (tokens or sentences) assigned to each topic.
    pub topic_units: Vec<u64>,
    #[serde(skip)]
    index: OnceLock<HashMap<String, u32>>,
}

impl TopicModel {
    fn index(&self) -> &HashMap<String, u32> {
        self.index.get_or_init(|| self.vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect())
    }

    pub fn word_id(&self, word: &str) -> Option<u32> {
        self.index().get(word).copied()
    }

    pub fn n_tokens(&self) -> u64 {
        self.topic_totals.iter().sum()
    }

    /// Smoothed topic-word probability.
    pub fn phi(&self, topic: usize, word: u32) -> f64 {
        let v = self.vocab.len() as f64;
        (self.topic_word_counts[topic][word as usize] as f64 + self.beta)
            / (self.topic_totals[topic] as f64 + v * self.beta)
    }

    pub fn top_words(&self, topic: usize, n: usize) -> Vec<&str> {
        let mut ids: Vec<usize> = (0..self.vocab.len()).collect();
        let row = &self.topic_word_counts[topic];
        ids.sort_by(|&a, &b| row[b].cmp(&row[a]).then(a.cmp(&b)));
        ids.into_iter().take(n).map(|i| self.vocab[i].as_str()).collect()
    }

    /// Topic proportions of a token list under fixed topic-word
    /// distributions, estimated by EM from a uniform start.
    pub fn fold_in(&self, tokens: &[String]) -> Vec<f64> {
        let ids: Vec<u32> = tokens.iter().filter_map(|t| self.word_id(t)).collect();
        self.fold_in_ids(&ids)
    }

    fn fold_in_ids(&self, ids: &[u32]) -> Vec<f64> {
        let k = self.k;
        let mut theta = vec![1.0 / k as f64; k];
        if ids.is_empty() {
            return theta;
        }
        let phi: Vec<Vec<f64>> = ids.iter().map(|&w| (0..k).map(|t| self.phi(t, w)).collect()).collect();
        let denom = ids.len() as f64 + k as f64 * self.alpha;
        for _ in 0..FOLD_IN_ITERATIONS {
            let mut acc = vec![self.alpha; k];
            for p in &phi {
                let z: f64 = (0..k).map(|t| theta[t] * p[t]).sum();
                for t in 0..k {
                    acc[t] += theta[t] * p[t] / z;
                }
            }
            for t in 0..k {
                theta[t] = acc[t] / denom;
            }
        }
        theta
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let model: TopicModel = serde_json::from_reader(reader)?;
        if model.version != TOPIC_MODEL_VERSION {
            return Err(Error::Unsupported(format!("topic model version {}", model.version)));
        }
        Ok(model)
    }
}

#[derive(Debug, Clone)]
struct Unit {
    /// Distinct word ids with their multiplicity.
    words: Vec<(u32, u32)>,
    len: u32,
}

/// Collapsed Gibbs sampler state. Exposed so callers can inspect counts
/// between sweeps.
pub struct GibbsSampler {
    config: LdaConfig,
    alpha: f64,
    vocab: Vec<String>,
    docs: Vec<Vec<Unit>>,
    z: Vec<Vec<usize>>,
    doc_topic: Vec<Vec<u32>>,
    topic_word: Vec<u32>,
    topic_totals: Vec<u64>,
    topic_units: Vec<u64>,
    total_tokens: u64,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl GibbsSampler {
    /// `docs[d][s]` holds the tokens of sentence `s` in document `d`.
    pub fn new(docs: &[Vec<Vec<String>>], config: &LdaConfig) -> Result<Self> {
        if config.k < 2 {
            return Err(Error::Invalid(format!("K must be at least 2, got {}", config.k)));
        }
        if docs.is_empty() {
            return Err(Error::Invalid("no documents".into()));
        }
        let mut vocab: Vec<String> = docs.iter().flatten().flatten().cloned().collect();
        vocab.sort_unstable();
        vocab.dedup();
        if vocab.is_empty() {
            return Err(Error::Invalid("empty vocabulary".into()));
        }
        let index: HashMap<&str, u32> = vocab.iter().enumerate().map(|(i, w)| (w.as_str(), i as u32)).collect();
        let k = config.k;
        let v = vocab.len();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

        let units_of = |sentences: &Vec<Vec<String>>| -> Vec<Unit> {
            let ids = |s: &Vec<String>| s.iter().map(|t| index[t.as_str()]).collect::<Vec<u32>>();
            match config.mode {
                TopicMode::Document => sentences
                    .iter()
                    .flat_map(ids)
                    .map(|w| Unit { words: vec![(w, 1)], len: 1 })
                    .collect(),
                TopicMode::Sentence => sentences
                    .iter()
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        let mut ws = ids(s);
                        ws.sort_unstable();
                        let mut words: Vec<(u32, u32)> = Vec::new();
                        for w in ws {
                            match words.last_mut() {
                                Some((last, c)) if *last == w => *c += 1,
                                _ => words.push((w, 1)),
                            }
                        }
                        Unit { words, len: s.len() as u32 }
                    })
                    .collect(),
            }
        };
        let units: Vec<Vec<Unit>> = docs.iter().map(units_of).collect();

        let mut sampler = GibbsSampler {
            config: *config,
            alpha: config.alpha(),
            vocab,
            doc_topic: vec![vec![0; k]; units.len()],
            z: Vec::with_capacity(units.len()),
            topic_word: vec![0; k * v],
            topic_totals: vec![0; k],
            topic_units: vec![0; k],
            total_tokens: 0,
            docs: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(0),
            weights: vec![0.0; k],
        };
        for (d, doc) in units.iter().enumerate() {
            let mut zs = Vec::with_capacity(doc.len());
            for unit in doc {
                let t = rng.random_range(0..k);
                sampler.add(d, unit, t);
                sampler.total_tokens += unit.len as u64;
                zs.push(t);
            }
            sampler.z.push(zs);
        }
        sampler.docs = units;
        sampler.rng = rng;
        Ok(sampler)
    }

    fn add(&mut self, d: usize, unit: &Unit, t: usize) {
        let v = self.vocab.len();
        self.doc_topic[d][t] += 1;
        self.topic_units[t] += 1;
        self.topic_totals[t] += unit.len as u64;
        for &(w, c) in &unit.words {
            self.topic_word[t * v + w as usize] += c;
        }
    }

    fn remove(&mut self, d: usize, unit: &Unit, t: usize) {
        let v = self.vocab.len();
        self.doc_topic[d][t] -= 1;
        self.topic_units[t] -= 1;
        self.topic_totals[t] -= unit.len as u64;
        for &(w, c) in &unit.words {
            self.topic_word[t * v + w as usize] -= c;
        }
    }

    /// One pass resampling every unit's topic.
    pub fn sweep(&mut self) {
        let k = self.config.k;
        let v = self.vocab.len();
        let beta = self.config.beta;
        let vbeta = v as f64 * beta;
        let docs = std::mem::take(&mut self.docs);
        for (d, doc) in docs.iter().enumerate() {
            for (u, unit) in doc.iter().enumerate() {
                let old = self.z[d][u];
                self.remove(d, unit, old);
                let mut weights = std::mem::take(&mut self.weights);
                if unit.len == 1 {
                    let w = unit.words[0].0 as usize;
                    for t in 0..k {
                        weights[t] = (self.doc_topic[d][t] as f64 + self.alpha)
                            * (self.topic_word[t * v + w] as f64 + beta)
                            / (self.topic_totals[t] as f64 + vbeta);
                    }
                } else {
                    for t in 0..k {
                        let mut lw = (self.doc_topic[d][t] as f64 + self.alpha).ln();
                        for &(w, c) in &unit.words {
                            let n = self.topic_word[t * v + w as usize] as f64 + beta;
                            for i in 0..c {
                                lw += (n + i as f64).ln();
                            }
                        }
                        let n = self.topic_totals[t] as f64 + vbeta;
                        for i in 0..unit.len {
                            lw -= (n + i as f64).ln();
                        }
                        weights[t] = lw;
                    }
                    let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    for x in weights.iter_mut() {
                        *x = (*x - max).exp();
                    }
                }
                let total: f64 = weights.iter().sum();
                let mut r = self.rng.random::<f64>() * total;
                let mut new = k - 1;
                for (t, &x) in weights.iter().enumerate() {
                    r -= x;
                    if r < 0.0 {
                        new = t;
                        break;
                    }
                }
                self.weights = weights;
                self.add(d, unit, new);
                self.z[d][u] = new;
            }
        }
        self.docs = docs;
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Sum of all topic-word counts.
    pub fn topic_word_total(&self) -> u64 {
        self.topic_word.iter().map(|&c| c as u64).sum()
    }

    /// Recounts every table from the current assignments and compares.
    pub fn counts_consistent(&self) -> bool {
        let k = self.config.k;
        let v = self.vocab.len();
        let mut tw = vec![0u32; k * v];
        let mut tt = vec![0u64; k];
        let mut tu = vec![0u64; k];
        for (d, doc) in self.docs.iter().enumerate() {
            let mut dt = vec![0u32; k];
            for (unit, &t) in doc.iter().zip(&self.z[d]) {
                dt[t] += 1;
                tu[t] += 1;
                tt[t] += unit.len as u64;
                for &(w, c) in &unit.words {
                    tw[t * v + w as usize] += c;
                }
            }
            if dt != self.doc_topic[d] {
                return false;
            }
        }
        tw == self.topic_word
            && tt == self.topic_totals
            && tu == self.topic_units
            && self.topic_word_total() == self.total_tokens
    }

    /// Smoothed per-document topic proportions from the current state.
    pub fn doc_topic_proportions(&self) -> Vec<Vec<f64>> {
        let k = self.config.k as f64;
        self.doc_topic
            .iter()
            .map(|row| {
                let n: u32 = row.iter().sum();
                row.iter().map(|&c| (c as f64 + self.alpha) / (n as f64 + k * self.alpha)).collect()
            })
            .collect()
    }

    pub fn to_model(&self) -> TopicModel {
        let k = self.config.k;
        let v = self.vocab.len();
        TopicModel {
            version: TOPIC_MODEL_VERSION,
            mode: self.config.mode,
            k,
            alpha: self.alpha,
            beta: self.config.beta,
            iterations: self.config.iterations,
            seed: self.config.seed,
            vocab: self.vocab.clone(),
            topic_word_counts: (0..k).map(|t| self.topic_word[t * v..(t + 1) * v].to_vec()).collect(),
            topic_totals: self.topic_totals.clone(),
            topic_units: self.topic_units.clone(),
            index: OnceLock::new(),
        }
    }
}

/// Runs the configured number of sweeps. Returns the model and the
/// training documents' topic proportions.
pub fn train_lda(docs: &[Vec<Vec<String>>], config: &LdaConfig) -> Result<(TopicModel, Vec<Vec<f64>>)> {
    let mut sampler = GibbsSampler::new(docs, config)?;
    for _ in 0..config.iterations {
        sampler.sweep();
    }
    Ok((sampler.to_model(), sampler.doc_topic_proportions()))
}

/// Held-out perplexity by document completion: topic proportions are
/// estimated from the even-position tokens of each document and the
/// odd-position tokens are scored. A single-token document is scored under
/// uniform proportions. Out-of-vocabulary tokens are skipped.
pub fn perplexity(model: &TopicModel, docs: &[Vec<String>]) -> Result<f64> {
    let mut log_lik = 0.0;
    let mut n = 0usize;
    for doc in docs {
        let ids: Vec<u32> = doc.iter().filter_map(|t| model.word_id(t)).collect();
        let (theta, eval): (Vec<f64>, Vec<u32>) = if ids.len() == 1 {
            (vec![1.0 / model.k as f64; model.k], ids)
        } else {
            let est: Vec<u32> = ids.iter().step_by(2).copied().collect();
            let eval: Vec<u32> = ids.iter().skip(1).step_by(2).copied().collect();
            (model.fold_in_ids(&est), eval)
        };
        for w in eval {
            let p: f64 = (0..model.k).map(|t| theta[t] * model.phi(t, w)).sum();
            log_lik += p.ln();
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::Invalid("held-out set has no in-vocabulary tokens".into()));
    }
    Ok((-log_lik / n as f64).exp())
}

/// Most probable topic for a sentence under fixed topic-word counts, with
/// the corpus-level share of sentences per topic as prior. `None` when no
/// token is in the vocabulary.
pub fn sentence_topic(model: &TopicModel, tokens: &[String]) -> Option<usize> {
    let ids: Vec<u32> = tokens.iter().filter_map(|t| model.word_id(t)).collect();
    if ids.is_empty() {
        return None;
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for t in 0..model.k {
        let mut score = (model.topic_units[t] as f64 + model.alpha).ln();
        for &w in &ids {
            score += model.phi(t, w).ln();
        }
        if score > best.0 {
            best = (score, t);
        }
    }
    Some(best.1)
}

/// Per-topic standard scores of topic proportions across posts.
pub fn standard_scores(proportions: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if proportions.is_empty() {
        return Vec::new();
    }
    let k = proportions[0].len();
    let n = proportions.len() as f64;
    let mut z = vec![vec![0.0; k]; proportions.len()];
    for t in 0..k {
        let mean = proportions.iter().map(|p| p[t]).sum::<f64>() / n;
        let var = proportions.iter().map(|p| (p[t] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for (row, p) in z.iter_mut().zip(proportions) {
            row[t] = if sd > 0.0 { (p[t] - mean) / sd } else { 0.0 };
        }
    }
    z
}

/// Domain of each post: the non-excluded topic with the highest standard
/// score, ties to the smaller topic id. `None` if every topic is excluded.
pub fn assign_domains(proportions: &[Vec<f64>], excluded: &[usize]) -> Vec<Option<usize>> {
    standard_scores(proportions)
        .into_iter()
        .map(|row| {
            let mut best: Option<(usize, f64)> = None;
            for (t, &z) in row.iter().enumerate() {
                if excluded.contains(&t) {
                    continue;
                }
                if best.is_none_or(|(_, b)| z > b) {
                    best = Some((t, z));
                }
            }
            best.map(|b| b.0)
        })
        .collect()
}
