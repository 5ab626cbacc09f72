//! Pipeline configuration, read from a TOML file.

use std::path::{Path, PathBuf};

use attackability::corpus::SplitConfig;
use attackability::labeling::{LabelConfig, MatchThresholds};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Base seed for topic models.
    #[serde(default)]
    pub seed: u64,
    pub paths: Paths,
    pub splits: SplitConfig,
    #[serde(default)]
    pub topics: TopicSettings,
    #[serde(default)]
    pub labeling: LabelSettings,
    #[serde(default)]
    pub knowledge: KnowledgeSettings,
    #[serde(default)]
    pub features: FeatureSettings,
    #[serde(default)]
    pub ranker: RankerSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub posts: PathBuf,
    pub comments: PathBuf,
    /// Argument trees; knowledge features are zero without them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kialo: Option<PathBuf>,
    /// Directory holding any of subjectivity.tsv, concreteness.tsv,
    /// arousal.tsv, dominance.tsv and polarity.tsv.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopicSettings {
    pub domain_k: usize,
    pub sentence_k: usize,
    pub iterations: usize,
    /// Domain topics that may not be assigned (e.g. meta-discussion topics).
    pub excluded_domains: Vec<usize>,
}

impl Default for TopicSettings {
    fn default() -> Self {
        TopicSettings { domain_k: 40, sentence_k: 50, iterations: 1000, excluded_domains: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabelSettings {
    pub edit_budget: usize,
    pub min_coverage: f64,
    pub min_span_chars: usize,
    pub implicit_min_overlap: usize,
    pub max_quotes: usize,
}

impl Default for LabelSettings {
    fn default() -> Self {
        let d = LabelConfig::default();
        LabelSettings {
            edit_budget: d.thresholds.edit_budget,
            min_coverage: d.thresholds.min_coverage,
            min_span_chars: d.thresholds.min_span_chars,
            implicit_min_overlap: d.implicit_min_overlap,
            max_quotes: d.max_quotes,
        }
    }
}

impl LabelSettings {
    pub fn to_label_config(&self) -> LabelConfig {
        LabelConfig {
            thresholds: MatchThresholds {
                edit_budget: self.edit_budget,
                min_coverage: self.min_coverage,
                min_span_chars: self.min_span_chars,
            },
            implicit_min_overlap: self.implicit_min_overlap,
            max_quotes: self.max_quotes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KnowledgeSettings {
    pub min_common: usize,
}

impl Default for KnowledgeSettings {
    fn default() -> Self {
        KnowledgeSettings { min_common: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureSettings {
    pub ngram_max_n: usize,
    pub ngram_min_df: usize,
}

impl Default for FeatureSettings {
    fn default() -> Self {
        FeatureSettings { ngram_max_n: 3, ngram_min_df: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RankerSettings {
    /// Seeds of the repeated evaluation runs.
    pub run_seeds: Vec<u64>,
    /// Posts rendered as HTML reports (test split, highest ids dropped).
    pub max_reports: usize,
}

impl Default for RankerSettings {
    fn default() -> Self {
        RankerSettings { run_seeds: (0..10).collect(), max_reports: 50 }
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: PipelineConfig = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Relative paths are resolved against the config file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.paths.posts);
        resolve(&mut config.paths.comments);
        resolve(&mut config.paths.output_dir);
        if let Some(p) = config.paths.kialo.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.paths.lexicon_dir.as_mut() {
            resolve(p);
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Usage(format!("config: {m}")));
        self.splits.validate().map_err(|e| CliError::Usage(format!("config: {e}")))?;
        let t = &self.topics;
        if t.domain_k == 0 || t.sentence_k == 0 || t.iterations == 0 {
            return bad("topic counts and iterations must be positive");
        }
        let l = &self.labeling;
        if l.edit_budget == 0 || l.min_span_chars == 0 || l.implicit_min_overlap == 0 || l.max_quotes == 0 {
            return bad("labeling thresholds must be positive");
        }
        if !(l.min_coverage > 0.0 && l.min_coverage <= 1.0) {
            return bad("min_coverage must be in (0, 1]");
        }
        if self.knowledge.min_common == 0 {
            return bad("knowledge.min_common must be positive");
        }
        if self.features.ngram_max_n == 0 || self.features.ngram_min_df == 0 {
            return bad("n-gram settings must be positive");
        }
        if self.ranker.run_seeds.is_empty() {
            return bad("ranker.run_seeds must not be empty");
        }
        Ok(())
    }
}
