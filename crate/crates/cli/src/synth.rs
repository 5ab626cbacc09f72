//! Writes a synthetic corpus together with a matching config file.

use std::path::{Path, PathBuf};

use attackability::synthetic::{generate_cmv, CmvConfig};

use crate::config::{
    FeatureSettings, KnowledgeSettings, LabelSettings, Paths, PipelineConfig, RankerSettings, TopicSettings,
};
use crate::error::CliError;

/// Small topic models keep a full run on 1k posts within a few minutes.
pub fn synthetic_config(n_domains: usize, seed: u64, splits: attackability::corpus::SplitConfig) -> PipelineConfig {
    PipelineConfig {
        seed,
        paths: Paths {
            posts: PathBuf::from("posts.jsonl"),
            comments: PathBuf::from("comments.jsonl"),
            kialo: Some(PathBuf::from("kialo.json")),
            lexicon_dir: Some(PathBuf::from("lexicons")),
            output_dir: PathBuf::from("out"),
        },
        splits,
        topics: TopicSettings { domain_k: n_domains, sentence_k: 10, iterations: 200, excluded_domains: Vec::new() },
        labeling: LabelSettings::default(),
        knowledge: KnowledgeSettings::default(),
        features: FeatureSettings::default(),
        ranker: RankerSettings::default(),
    }
}

/// Generates `n_posts` posts under `dir` and writes `dir/config.toml`.
/// Returns the path of the config file.
pub fn write_synthetic(dir: &Path, n_posts: usize, seed: u64) -> Result<PathBuf, CliError> {
    if n_posts < 10 {
        return Err(CliError::Usage("synth needs at least 10 posts".into()));
    }
    let cfg = CmvConfig { n_posts, seed, ..CmvConfig::default() };
    let corpus = generate_cmv(&cfg);
    corpus.write_to(dir)?;
    let config = synthetic_config(cfg.n_domains, seed, corpus.splits);
    let path = dir.join("config.toml");
    std::fs::write(&path, config.to_toml())?;
    Ok(path)
}
