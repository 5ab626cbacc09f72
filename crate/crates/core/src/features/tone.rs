//! Tone scores from lexicons, and pluggable sentence sentiment.

use std::collections::HashMap;
use std::io::Read;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::lexicon::Lexicon;
use crate::error::{Error, Result};

pub const TONE_NAMES: [&str; 8] = [
    "subjectivity",
    "concreteness",
    "qualification",
    "hedging",
    "sentiment_score",
    "sentiment_category",
    "arousal",
    "dominance",
];

const HEDGES: &str = include_str!("../../resources/lexicons/hedges.tsv");
const QUALIFICATION: &str = include_str!("../../resources/lexicons/qualification.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentimentCategory {
    Negative,
    Neutral,
    Positive,
}

impl SentimentCategory {
    pub fn code(self) -> f64 {
        match self {
            SentimentCategory::Negative => -1.0,
            SentimentCategory::Neutral => 0.0,
            SentimentCategory::Positive => 1.0,
        }
    }

    pub fn from_score(score: f64) -> Self {
        if score > 0.1 {
            SentimentCategory::Positive
        } else if score < -0.1 {
            SentimentCategory::Negative
        } else {
            SentimentCategory::Neutral
        }
    }
}

/// Sentence-level sentiment. Implementations receive the sentence key so
/// precomputed scores can be looked up.
pub trait SentimentScorer: Send + Sync {
    fn score(&self, key: &str, tokens: &[String]) -> (f64, SentimentCategory);
}

/// Signed word polarities summed and divided by the token count.
#[derive(Debug, Clone, Default)]
pub struct LexiconSentiment {
    pub polarity: Lexicon,
}

impl SentimentScorer for LexiconSentiment {
    fn score(&self, _key: &str, tokens: &[String]) -> (f64, SentimentCategory) {
        let sum: f64 = self.polarity.find(tokens).iter().map(|m| m.score).sum();
        let score = (sum / tokens.len().max(1) as f64).clamp(-1.0, 1.0);
        (score, SentimentCategory::from_score(score))
    }
}

/// Scores computed elsewhere, read from a `key,score[,category]` CSV.
/// Sentences missing from the file are neutral.
#[derive(Debug, Clone, Default)]
pub struct PrecomputedSentiment {
    scores: HashMap<String, (f64, SentimentCategory)>,
}

impl PrecomputedSentiment {
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
        let mut scores = HashMap::new();
        for (n, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| Error::Record { line: n + 2, message: e.to_string() })?;
            let bad = |m: &str| Error::Record { line: n + 2, message: m.to_string() };
            let key = row.get(0).ok_or_else(|| bad("missing key"))?.to_string();
            let score: f64 = row.get(1).and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("bad score"))?;
            let category = match row.get(2).map(str::trim) {
                None | Some("") => SentimentCategory::from_score(score),
                Some("positive") => SentimentCategory::Positive,
                Some("neutral") => SentimentCategory::Neutral,
                Some("negative") => SentimentCategory::Negative,
                Some(other) => return Err(bad(&format!("unknown category `{other}`"))),
            };
            scores.insert(key, (score.clamp(-1.0, 1.0), category));
        }
        Ok(PrecomputedSentiment { scores })
    }
}

impl SentimentScorer for PrecomputedSentiment {
    fn score(&self, key: &str, _tokens: &[String]) -> (f64, SentimentCategory) {
        self.scores.get(key).copied().unwrap_or((0.0, SentimentCategory::Neutral))
    }
}

/// Paths to third-party lexicons (`entry<TAB>score`). Unset lexicons
/// are empty and their features are 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LexiconPaths {
    pub subjectivity: Option<PathBuf>,
    pub concreteness: Option<PathBuf>,
    pub arousal: Option<PathBuf>,
    pub dominance: Option<PathBuf>,
    pub polarity: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ToneLexicons {
    pub subjectivity: Lexicon,
    pub concreteness: Lexicon,
    pub qualification: Lexicon,
    pub hedges: Lexicon,
    pub arousal: Lexicon,
    pub dominance: Lexicon,
}

fn optional(name: &str, path: &Option<PathBuf>) -> Result<Lexicon> {
    match path {
        Some(p) => Lexicon::load_tsv(name, p),
        None => Ok(Lexicon::new(name, [])),
    }
}

impl ToneLexicons {
    /// Shipped hedge and qualification lists plus the configured
    /// third-party lexicons. A configured path that cannot be read is an
    /// error. Concreteness, arousal and dominance are standardized.
    pub fn load(paths: &LexiconPaths) -> Result<Self> {
        Ok(ToneLexicons {
            subjectivity: optional("subjectivity", &paths.subjectivity)?,
            concreteness: optional("concreteness", &paths.concreteness)?.standardized(),
            qualification: Lexicon::parse_tsv("qualification", QUALIFICATION)?,
            hedges: Lexicon::parse_tsv("hedges", HEDGES)?,
            arousal: optional("arousal", &paths.arousal)?.standardized(),
            dominance: optional("dominance", &paths.dominance)?.standardized(),
        })
    }

    pub fn builtin() -> Self {
        ToneLexicons::load(&LexiconPaths::default()).expect("shipped lexicons parse")
    }
}

fn mean_score(lex: &Lexicon, tokens: &[String]) -> f64 {
    let m = lex.find(tokens);
    if m.is_empty() {
        0.0
    } else {
        m.iter().map(|x| x.score).sum::<f64>() / m.len() as f64
    }
}

fn sum_score(lex: &Lexicon, tokens: &[String]) -> f64 {
    lex.find(tokens).iter().map(|x| x.score).sum()
}

/// The eight tone slots in `TONE_NAMES` order; the category slot holds
/// −1, 0 or +1.
pub fn tone_features(tokens: &[String], key: &str, lex: &ToneLexicons, sentiment: &dyn SentimentScorer) -> [f64; 8] {
    let (score, category) = sentiment.score(key, tokens);
    [
        mean_score(&lex.subjectivity, tokens),
        sum_score(&lex.concreteness, tokens),
        mean_score(&lex.qualification, tokens),
        sum_score(&lex.hedges, tokens),
        score,
        category.code(),
        sum_score(&lex.arousal, tokens),
        sum_score(&lex.dominance, tokens),
    ]
}
