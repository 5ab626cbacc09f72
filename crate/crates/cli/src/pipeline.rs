//! Pipeline stages. Each stage reads flat artifacts from the output
//! directory, writes its own, and records a manifest; a stage whose inputs,
//! settings and outputs are unchanged is skipped unless forced.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use attackability::corpus::{build_corpus, ingest_comments, ingest_posts, split_corpus, Corpus, Split, Splits, SuccessLabel};
use attackability::eval::{compare_systems, evaluate_system, metrics_csv, summary_table, MetricReport, Ranking};
use attackability::features::{
    read_features_csv, read_ngram_triplets, write_features_csv, write_ngram_triplets, FeatureExtractor, FeatureVector,
    LexiconPaths, NgramVocabulary, KNOWLEDGE_NAMES, PROPOSITION_NAMES, TONE_NAMES,
};
use attackability::knowledge::{read_trees, KnowledgeIndex};
use attackability::labeling::{apply_labels, build_datasets, label_corpus, write_labels_jsonl, Datasets};
use attackability::linalg::CsrMatrix;
use attackability::ranker::{baseline_length, baseline_random, grid_search, Encoder, RankerModel, Scorer};
use attackability::report::{attribute, render_index_html, render_post_html, SentenceView};
use attackability::stats::{effects_report, EffectInput, EffectObservation};
use attackability::topics::{assign_domains, sentence_topic, standard_scores, topic_tokens, train_lda, LdaConfig, TopicModel, TopicMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::manifest::{sha256_bytes, sha256_file, Manifest, MANIFEST_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Label,
    Topics,
    Knowledge,
    Features,
    Effects,
    Train,
    Evaluate,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Ingest,
        Stage::Label,
        Stage::Topics,
        Stage::Knowledge,
        Stage::Features,
        Stage::Effects,
        Stage::Train,
        Stage::Evaluate,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Label => "label",
            Stage::Topics => "topics",
            Stage::Knowledge => "knowledge",
            Stage::Features => "features",
            Stage::Effects => "effects",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Report => "report",
        }
    }
}

pub const TASKS: [&str; 2] = ["attacked", "successful"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageOutcome {
    Ran,
    UpToDate,
}

pub struct Pipeline {
    pub config: PipelineConfig,
    pub force: bool,
    pub verbose: bool,
}

/// An input artifact and the stage that produces it (`None` for user data).
struct Input {
    path: PathBuf,
    producer: Option<Stage>,
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Data(format!("csv: {e}"))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub task: String,
    pub trained: bool,
    pub note: String,
    pub n_train_posts: usize,
    pub n_val_posts: usize,
    pub n_test_posts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub tasks: Vec<TaskSummary>,
}

/// Rows of `features.csv` with their n-gram weights.
struct FeatureTable {
    rows: Vec<FeatureVector>,
    ngrams: Vec<Vec<(u32, f64)>>,
}

impl FeatureTable {
    fn rows_of_posts(&self, posts: &HashSet<&str>) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| posts.contains(self.rows[i].post_id.as_str())).collect()
    }

    fn by_post(&self, rows: &[usize]) -> Vec<(String, Vec<usize>)> {
        let mut out: Vec<(String, Vec<usize>)> = Vec::new();
        for &i in rows {
            let pid = &self.rows[i].post_id;
            match out.last_mut() {
                Some((p, v)) if p == pid => v.push(i),
                _ => out.push((pid.clone(), vec![i])),
            }
        }
        out
    }

    fn design(&self, encoder: &Encoder, rows: &[usize]) -> Result<CsrMatrix, CliError> {
        let fvs: Vec<&FeatureVector> = rows.iter().map(|&i| &self.rows[i]).collect();
        let ngs: Vec<&[(u32, f64)]> = rows.iter().map(|&i| self.ngrams[i].as_slice()).collect();
        Ok(encoder.design(&fvs, &ngs)?)
    }
}

fn task_label(task: &str, fv: &FeatureVector) -> bool {
    match task {
        "attacked" => fv.attacked,
        _ => fv.success == SuccessLabel::Successful,
    }
}

fn task_posts<'a>(task: &str, datasets: &'a Datasets) -> &'a [String] {
    match task {
        "attacked" => &datasets.attacked,
        _ => &datasets.successful,
    }
}

impl Pipeline {
    pub fn new(config: PipelineConfig, force: bool) -> Self {
        Pipeline { config, force, verbose: true }
    }

    fn out(&self) -> &Path {
        &self.config.paths.output_dir
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.out().join(name)
    }

    fn note(&self, stage: Stage, msg: &str) {
        if self.verbose {
            eprintln!("[{}] {msg}", stage.name());
        }
    }

    fn internal(&self, name: &str, producer: Stage) -> Input {
        Input { path: self.artifact(name), producer: Some(producer) }
    }

    fn key_for(&self, path: &Path) -> String {
        path.strip_prefix(self.out()).unwrap_or(path).to_string_lossy().replace('\\', "/")
    }

    /// Checks inputs, skips the stage when its manifest is current, and
    /// otherwise runs `body`, which returns the outputs it wrote.
    fn run_stage<S: Serialize>(
        &self,
        stage: Stage,
        inputs: &[Input],
        settings: &S,
        body: impl FnOnce() -> Result<Vec<PathBuf>, CliError>,
    ) -> Result<StageOutcome, CliError> {
        let mut hashes = BTreeMap::new();
        for input in inputs {
            if !input.path.is_file() {
                return Err(match input.producer {
                    Some(p) => CliError::missing(&self.key_for(&input.path), p.name()),
                    None => CliError::Data(format!("input file {} not found", input.path.display())),
                });
            }
            hashes.insert(self.key_for(&input.path), sha256_file(&input.path)?);
        }
        let settings_sha256 = sha256_bytes(&serde_json::to_vec(settings)?);
        let manifest_path = self.artifact(&format!("manifests/{}.json", stage.name()));
        if !self.force {
            if let Some(m) = Manifest::read(&manifest_path) {
                if m.is_current(&hashes, &settings_sha256, self.config.seed, self.out()) {
                    self.note(stage, "up to date");
                    return Ok(StageOutcome::UpToDate);
                }
            }
        }
        fs::create_dir_all(self.out())?;
        let start = Instant::now();
        let outputs = body()?;
        let mut out_hashes = BTreeMap::new();
        for p in outputs {
            out_hashes.insert(self.key_for(&p), sha256_file(&p)?);
        }
        let elapsed_ms = start.elapsed().as_millis();
        Manifest {
            version: MANIFEST_VERSION,
            stage: stage.name().to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.config.seed,
            settings_sha256,
            inputs: hashes,
            outputs: out_hashes,
            elapsed_ms,
        }
        .write(&{
            fs::create_dir_all(self.artifact("manifests"))?;
            manifest_path
        })?;
        self.note(stage, &format!("done in {:.2} s", elapsed_ms as f64 / 1000.0));
        Ok(StageOutcome::Ran)
    }

    pub fn run(&self, stage: Stage) -> Result<StageOutcome, CliError> {
        match stage {
            Stage::Ingest => self.ingest(),
            Stage::Label => self.label(),
            Stage::Topics => self.topics(),
            Stage::Knowledge => self.knowledge(),
            Stage::Features => self.features(),
            Stage::Effects => self.effects(),
            Stage::Train => self.train(),
            Stage::Evaluate => self.evaluate(),
            Stage::Report => self.report(),
        }
    }

    pub fn run_all(&self) -> Result<(), CliError> {
        for stage in Stage::ALL {
            self.run(stage)?;
        }
        Ok(())
    }

    fn read_corpus(&self, name: &str) -> Result<Corpus, CliError> {
        Ok(Corpus::read_json(open(&self.artifact(name))?)?)
    }

    fn read_json<T: for<'de> Deserialize<'de>>(&self, name: &str) -> Result<T, CliError> {
        Ok(serde_json::from_reader(open(&self.artifact(name))?)?)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.artifact(name);
        let mut w = create(&path)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.flush()?;
        Ok(path)
    }

    fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.artifact(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, text)?;
        Ok(path)
    }

    fn ingest(&self) -> Result<StageOutcome, CliError> {
        let p = &self.config.paths;
        let inputs = [Input { path: p.posts.clone(), producer: None }, Input { path: p.comments.clone(), producer: None }];
        self.run_stage(Stage::Ingest, &inputs, &self.config.splits, || {
            let posts = ingest_posts(open(&p.posts)?)?;
            let comments = ingest_comments(open(&p.comments)?)?;
            let corpus = build_corpus(posts, comments)?;
            let splits = split_corpus(&corpus.posts, &self.config.splits)?;
            self.note(
                Stage::Ingest,
                &format!(
                    "{} posts, {} comments; train/val/test/dropped = {}/{}/{}/{}",
                    corpus.posts.len(),
                    corpus.comments.len(),
                    splits.train.len(),
                    splits.val.len(),
                    splits.test.len(),
                    splits.dropped.len()
                ),
            );
            let path = self.artifact("corpus.json");
            let mut w = create(&path)?;
            corpus.write_json(&mut w)?;
            w.flush()?;
            Ok(vec![path, self.write_json("splits.json", &splits)?])
        })
    }

    fn label(&self) -> Result<StageOutcome, CliError> {
        let inputs = [self.internal("corpus.json", Stage::Ingest), self.internal("splits.json", Stage::Ingest)];
        self.run_stage(Stage::Label, &inputs, &self.config.labeling, || {
            let mut corpus = self.read_corpus("corpus.json")?;
            let splits: Splits = self.read_json("splits.json")?;
            let labelings = label_corpus(&corpus, &self.config.labeling.to_label_config());
            let labels_path = self.artifact("labels.jsonl");
            let mut w = create(&labels_path)?;
            write_labels_jsonl(&mut w, &labelings)?;
            w.flush()?;
            apply_labels(&mut corpus.posts, &labelings);
            let datasets = build_datasets(&corpus.posts);
            let lookup = splits.lookup();
            for (task, ids) in [("attacked", &datasets.attacked), ("successful", &datasets.successful)] {
                let count = |s: Split| ids.iter().filter(|id| lookup.get(id.as_str()) == Some(&s)).count();
                self.note(
                    Stage::Label,
                    &format!(
                        "{task}: {} posts (train {}, val {}, test {})",
                        ids.len(),
                        count(Split::Train),
                        count(Split::Val),
                        count(Split::Test)
                    ),
                );
            }
            let corpus_path = self.artifact("labeled_corpus.json");
            let mut w = create(&corpus_path)?;
            corpus.write_json(&mut w)?;
            w.flush()?;
            Ok(vec![labels_path, corpus_path, self.write_json("datasets.json", &datasets)?])
        })
    }

    fn topics(&self) -> Result<StageOutcome, CliError> {
        let inputs = [self.internal("corpus.json", Stage::Ingest), self.internal("splits.json", Stage::Ingest)];
        let settings = (&self.config.topics, self.config.seed);
        self.run_stage(Stage::Topics, &inputs, &settings, || {
            let t = &self.config.topics;
            let corpus = self.read_corpus("corpus.json")?;
            let splits: Splits = self.read_json("splits.json")?;
            let train: HashSet<&str> = splits.train.iter().map(String::as_str).collect();
            let docs: Vec<Vec<Vec<String>>> = corpus
                .posts
                .iter()
                .map(|p| p.sentences.iter().map(|s| topic_tokens(&s.tokens)).collect())
                .collect();
            let train_docs: Vec<Vec<Vec<String>>> = corpus
                .posts
                .iter()
                .zip(&docs)
                .filter(|(p, _)| train.contains(p.id.as_str()))
                .map(|(_, d)| d.clone())
                .collect();
            let seed = self.config.seed;
            let domain_cfg = LdaConfig { iterations: t.iterations, ..LdaConfig::new(t.domain_k, TopicMode::Document, seed) };
            let sentence_cfg = LdaConfig {
                iterations: t.iterations,
                ..LdaConfig::new(t.sentence_k, TopicMode::Sentence, seed.wrapping_add(1))
            };
            let (domain_fit, sentence_fit) =
                rayon::join(|| train_lda(&train_docs, &domain_cfg), || train_lda(&train_docs, &sentence_cfg));
            let (domain_model, _) = domain_fit?;
            let (sentence_model, _) = sentence_fit?;
            let theta: Vec<Vec<f64>> =
                docs.par_iter().map(|d| domain_model.fold_in(&d.concat())).collect();
            let domains = assign_domains(&standard_scores(&theta), &t.excluded_domains);
            let mut domain_csv = String::from("post_id,domain\n");
            for (p, d) in corpus.posts.iter().zip(&domains) {
                domain_csv.push_str(&format!("{},{}\n", csv_field(&p.id), d.map_or(String::new(), |d| d.to_string())));
            }
            let mut sentence_csv = String::from("key,topic\n");
            for (p, d) in corpus.posts.iter().zip(&docs) {
                for (s, toks) in p.sentences.iter().zip(d) {
                    let topic = sentence_topic(&sentence_model, toks);
                    sentence_csv.push_str(&format!(
                        "{},{}\n",
                        csv_field(&s.key()),
                        topic.map_or(String::new(), |t| t.to_string())
                    ));
                }
            }
            let mut words = String::new();
            for (name, model) in [("domain", &domain_model), ("sentence", &sentence_model)] {
                for k in 0..model.k {
                    words.push_str(&format!("{name} {k}: {}\n", model.top_words(k, 10).join(" ")));
                }
            }
            let mut outputs = Vec::new();
            for (name, model) in [("domain_topics.json", &domain_model), ("sentence_topics.json", &sentence_model)] {
                let path = self.artifact(name);
                let mut w = create(&path)?;
                model.write_json(&mut w)?;
                w.flush()?;
                outputs.push(path);
            }
            let n_domains = domains.iter().flatten().collect::<HashSet<_>>().len();
            self.note(Stage::Topics, &format!("{n_domains} domains in use; top words:\n{}", words.trim_end()));
            outputs.push(self.write_text("domains.csv", &domain_csv)?);
            outputs.push(self.write_text("sentence_topics.csv", &sentence_csv)?);
            outputs.push(self.write_text("topic_words.txt", &words)?);
            Ok(outputs)
        })
    }

    fn knowledge(&self) -> Result<StageOutcome, CliError> {
        let mut inputs = vec![self.internal("corpus.json", Stage::Ingest)];
        if let Some(k) = &self.config.paths.kialo {
            inputs.push(Input { path: k.clone(), producer: None });
        }
        self.run_stage(Stage::Knowledge, &inputs, &self.config.knowledge, || {
            let corpus = self.read_corpus("corpus.json")?;
            let index = match &self.config.paths.kialo {
                Some(path) => KnowledgeIndex::build(&read_trees(open(path)?)?)?,
                None => {
                    self.note(Stage::Knowledge, "no argument trees configured; knowledge features are zero");
                    KnowledgeIndex::default()
                }
            };
            let sentences: Vec<_> = corpus.posts.iter().flat_map(|p| &p.sentences).collect();
            let feats: Vec<_> =
                sentences.par_iter().map(|s| index.features(&s.tokens, self.config.knowledge.min_common)).collect();
            let matched = feats.iter().filter(|f| f.n > 0).count();
            self.note(
                Stage::Knowledge,
                &format!("{} statements; {matched} of {} sentences matched", index.len(), sentences.len()),
            );
            let mut text = String::from("key,n,frequency,attractiveness,extremeness\n");
            for (s, f) in sentences.iter().zip(&feats) {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    csv_field(&s.key()),
                    f.n,
                    f.frequency,
                    f.attractiveness,
                    f.extremeness
                ));
            }
            Ok(vec![self.write_text("knowledge.csv", &text)?])
        })
    }

    fn lexicon_paths(&self) -> LexiconPaths {
        let Some(dir) = &self.config.paths.lexicon_dir else { return LexiconPaths::default() };
        let file = |name: &str| Some(dir.join(name)).filter(|p| p.is_file());
        LexiconPaths {
            subjectivity: file("subjectivity.tsv"),
            concreteness: file("concreteness.tsv"),
            arousal: file("arousal.tsv"),
            dominance: file("dominance.tsv"),
            polarity: file("polarity.tsv"),
        }
    }

    fn features(&self) -> Result<StageOutcome, CliError> {
        let lex = self.lexicon_paths();
        let mut inputs = vec![
            self.internal("labeled_corpus.json", Stage::Label),
            self.internal("splits.json", Stage::Ingest),
            self.internal("domains.csv", Stage::Topics),
            self.internal("sentence_topics.csv", Stage::Topics),
            self.internal("knowledge.csv", Stage::Knowledge),
        ];
        for p in [&lex.subjectivity, &lex.concreteness, &lex.arousal, &lex.dominance, &lex.polarity].into_iter().flatten()
        {
            inputs.push(Input { path: p.clone(), producer: None });
        }
        self.run_stage(Stage::Features, &inputs, &self.config.features, || {
            let corpus = self.read_corpus("labeled_corpus.json")?;
            let splits: Splits = self.read_json("splits.json")?;
            let lookup = splits.lookup();
            let domains = read_key_values(&self.artifact("domains.csv"))?;
            let topics = read_key_values(&self.artifact("sentence_topics.csv"))?;
            let knowledge = read_knowledge(&self.artifact("knowledge.csv"))?;
            let extractor = FeatureExtractor::new(&lex)?;
            let sentences: Vec<_> = corpus
                .posts
                .iter()
                .filter(|p| lookup.contains_key(p.id.as_str()))
                .flat_map(|p| &p.sentences)
                .collect();
            let mut rows = extractor.extract_all(&sentences);
            for r in &mut rows {
                r.knowledge = knowledge.get(&r.key).copied().unwrap_or([0.0; 3]);
                r.topic = topics.get(&r.key).copied().flatten();
                r.domain = domains.get(&r.post_id).copied().flatten();
            }
            let train_tokens: Vec<&[String]> = sentences
                .iter()
                .filter(|s| lookup.get(s.post_id.as_str()) == Some(&Split::Train))
                .map(|s| s.tokens.as_slice())
                .collect();
            let f = &self.config.features;
            let vocab = NgramVocabulary::fit(&train_tokens, f.ngram_max_n, f.ngram_min_df)?;
            let ngrams: Vec<Vec<(u32, f64)>> = sentences.par_iter().map(|s| vocab.tfidf(&s.tokens)).collect();
            self.note(Stage::Features, &format!("{} sentences, {} n-grams", rows.len(), vocab.len()));
            let features_path = self.artifact("features.csv");
            let mut w = create(&features_path)?;
            write_features_csv(&mut w, &rows)?;
            w.flush()?;
            let ngrams_path = self.artifact("ngrams.csv");
            let mut w = create(&ngrams_path)?;
            write_ngram_triplets(&mut w, &ngrams)?;
            w.flush()?;
            Ok(vec![features_path, ngrams_path, self.write_json("ngram_vocab.json", &vocab)?])
        })
    }

    fn read_features(&self) -> Result<FeatureTable, CliError> {
        let rows = read_features_csv(open(&self.artifact("features.csv"))?)?;
        let ngrams = read_ngram_triplets(open(&self.artifact("ngrams.csv"))?, rows.len())?;
        Ok(FeatureTable { rows, ngrams })
    }

    fn effects(&self) -> Result<StageOutcome, CliError> {
        let inputs = [self.internal("features.csv", Stage::Features), self.internal("datasets.json", Stage::Label)];
        self.run_stage(Stage::Effects, &inputs, &(), || {
            let rows = read_features_csv(open(&self.artifact("features.csv"))?)?;
            let datasets: Datasets = self.read_json("datasets.json")?;
            let attacked_posts: HashSet<&str> = datasets.attacked.iter().map(String::as_str).collect();
            let used: Vec<&FeatureVector> = rows
                .iter()
                .filter(|r| attacked_posts.contains(r.post_id.as_str()) && r.domain.is_some())
                .collect();
            let obs: Vec<EffectObservation> = used
                .iter()
                .map(|r| EffectObservation {
                    attacked: r.attacked,
                    successful: r.success == SuccessLabel::Successful,
                    domain: r.domain.expect("filtered"),
                })
                .collect();
            let mut inputs: Vec<EffectInput> = PROPOSITION_NAMES
                .iter()
                .enumerate()
                .map(|(k, name)| EffectInput {
                    name: name.to_string(),
                    values: used.iter().map(|r| if r.propositions[k] { 1.0 } else { 0.0 }).collect(),
                    standardize: false,
                })
                .collect();
            for (k, name) in TONE_NAMES.iter().enumerate() {
                if *name == "sentiment_category" {
                    for (label, code) in [("sentiment_negative", -1.0), ("sentiment_positive", 1.0)] {
                        inputs.push(EffectInput {
                            name: label.into(),
                            values: used.iter().map(|r| if r.tone[k] == code { 1.0 } else { 0.0 }).collect(),
                            standardize: false,
                        });
                    }
                } else {
                    inputs.push(EffectInput {
                        name: name.to_string(),
                        values: used.iter().map(|r| r.tone[k]).collect(),
                        standardize: true,
                    });
                }
            }
            for (k, name) in KNOWLEDGE_NAMES.iter().enumerate() {
                inputs.push(EffectInput {
                    name: format!("knowledge_{name}"),
                    values: used.iter().map(|r| r.knowledge[k]).collect(),
                    standardize: true,
                });
            }
            let table = effects_report(&inputs, &obs);
            let flagged = table.rows.iter().filter(|r| r.estimate.is_none()).count();
            self.note(
                Stage::Effects,
                &format!("{} sentences, {} fits ({flagged} without an estimate)", obs.len(), table.rows.len()),
            );
            Ok(vec![
                self.write_text("effects.csv", &table.to_csv())?,
                self.write_text("effects.html", &table.to_html())?,
                self.write_text("effects_table.html", &table.to_html_table())?,
            ])
        })
    }

    fn train(&self) -> Result<StageOutcome, CliError> {
        let inputs = [
            self.internal("features.csv", Stage::Features),
            self.internal("ngrams.csv", Stage::Features),
            self.internal("ngram_vocab.json", Stage::Features),
            self.internal("splits.json", Stage::Ingest),
            self.internal("datasets.json", Stage::Label),
        ];
        let settings = (&self.config.topics.sentence_k, self.config.seed);
        self.run_stage(Stage::Train, &inputs, &settings, || {
            let table = self.read_features()?;
            let vocab: NgramVocabulary = self.read_json("ngram_vocab.json")?;
            let splits: Splits = self.read_json("splits.json")?;
            let datasets: Datasets = self.read_json("datasets.json")?;
            let lookup = splits.lookup();
            let mut outputs = Vec::new();
            let mut summary = TrainSummary { tasks: Vec::new() };
            for task in TASKS {
                let posts = task_posts(task, &datasets);
                let in_split = |s: Split| -> HashSet<&str> {
                    posts.iter().map(String::as_str).filter(|id| lookup.get(id) == Some(&s)).collect()
                };
                let (tr, va, te) = (in_split(Split::Train), in_split(Split::Val), in_split(Split::Test));
                let mut entry = TaskSummary {
                    task: task.into(),
                    trained: false,
                    note: String::new(),
                    n_train_posts: tr.len(),
                    n_val_posts: va.len(),
                    n_test_posts: te.len(),
                };
                let train_rows = table.rows_of_posts(&tr);
                let val_rows = table.rows_of_posts(&va);
                let y_train: Vec<bool> = train_rows.iter().map(|&i| task_label(task, &table.rows[i])).collect();
                let y_val: Vec<bool> = val_rows.iter().map(|&i| task_label(task, &table.rows[i])).collect();
                let two_classes = |y: &[bool]| y.iter().any(|&l| l) && y.iter().any(|&l| !l);
                if !two_classes(&y_train) || !two_classes(&y_val) || te.is_empty() {
                    entry.note = "skipped: train, val or test split lacks positive or negative sentences".into();
                    self.note(Stage::Train, &format!("{task}: {}", entry.note));
                    summary.tasks.push(entry);
                    continue;
                }
                let train_fvs: Vec<FeatureVector> = train_rows.iter().map(|&i| table.rows[i].clone()).collect();
                let encoder = Encoder::fit(&train_fvs, self.config.topics.sentence_k, vocab.terms.clone())?;
                let x_train = table.design(&encoder, &train_rows)?;
                let x_val = table.design(&encoder, &val_rows)?;
                let outcome = grid_search(&encoder, &x_train, &y_train, &x_val, &y_val, self.config.seed, task)?;
                let chosen = &outcome.grid.entries[outcome.grid.chosen];
                entry.trained = true;
                entry.note = format!(
                    "chose {} reg_weight={:e} (validation AUC {:.2})",
                    chosen.norm.name(),
                    chosen.reg_weight,
                    chosen.val_auc
                );
                self.note(Stage::Train, &format!("{task}: {}", entry.note));
                let model_path = self.artifact(&format!("model_{task}.json"));
                let mut w = create(&model_path)?;
                outcome.model.write_json(&mut w)?;
                w.flush()?;
                outputs.push(model_path);
                outputs.push(self.write_text(&format!("grid_{task}.csv"), &outcome.grid.to_csv())?);
                summary.tasks.push(entry);
            }
            outputs.push(self.write_json("train_summary.json", &summary)?);
            Ok(outputs)
        })
    }

    fn trained_tasks(&self) -> Result<Vec<String>, CliError> {
        let summary: TrainSummary = self.read_json("train_summary.json")?;
        Ok(summary.tasks.into_iter().filter(|t| t.trained).map(|t| t.task).collect())
    }

    fn load_model(&self, task: &str) -> Result<RankerModel, CliError> {
        let name = format!("model_{task}.json");
        let path = self.artifact(&name);
        if !path.is_file() {
            return Err(CliError::missing(&name, "train"));
        }
        Ok(RankerModel::read_json(open(&path)?)?)
    }

    fn evaluate(&self) -> Result<StageOutcome, CliError> {
        let mut inputs = vec![
            self.internal("train_summary.json", Stage::Train),
            self.internal("features.csv", Stage::Features),
            self.internal("ngrams.csv", Stage::Features),
            self.internal("splits.json", Stage::Ingest),
            self.internal("datasets.json", Stage::Label),
        ];
        if self.artifact("train_summary.json").is_file() {
            for task in self.trained_tasks()? {
                inputs.push(self.internal(&format!("model_{task}.json"), Stage::Train));
            }
        }
        let seeds = self.config.ranker.run_seeds.clone();
        self.run_stage(Stage::Evaluate, &inputs, &seeds, || {
            let table = self.read_features()?;
            let corpus_text = self.sentence_texts(&table)?;
            let splits: Splits = self.read_json("splits.json")?;
            let datasets: Datasets = self.read_json("datasets.json")?;
            let lookup = splits.lookup();
            let mut csv = String::from("task,");
            csv.push_str(metrics_csv(&[]).trim_end());
            csv.push('\n');
            let mut text = String::new();
            let mut outputs = Vec::new();
            let tasks = self.trained_tasks()?;
            if tasks.is_empty() {
                self.note(Stage::Evaluate, "no trained models; nothing to evaluate");
            }
            for task in tasks {
                let model = self.load_model(&task)?;
                let test: HashSet<&str> = task_posts(&task, &datasets)
                    .iter()
                    .map(String::as_str)
                    .filter(|id| lookup.get(id) == Some(&Split::Test))
                    .collect();
                let rows = table.rows_of_posts(&test);
                let groups = table.by_post(&rows);
                let lr_scores = {
                    let x = table.design(&model.encoder, &rows)?;
                    attackability::ranker::score_sentences(&model, &x)?
                };
                let mut offset = 0;
                let mut per_post: Vec<(String, Vec<bool>, Vec<f64>, Vec<f64>)> = Vec::new();
                let mut scores_csv = String::from("post_id,sentence_index,score,rank\n");
                for (pid, idx) in &groups {
                    let labels: Vec<bool> = idx.iter().map(|&i| task_label(&task, &table.rows[i])).collect();
                    let lr = lr_scores[offset..offset + idx.len()].to_vec();
                    offset += idx.len();
                    let texts: Vec<&str> = idx.iter().map(|&i| corpus_text[i].as_str()).collect();
                    let len = baseline_length(&texts);
                    let order = attackability::ranker::ranking(&lr);
                    let mut rank = vec![0; lr.len()];
                    for (r, &i) in order.iter().enumerate() {
                        rank[i] = r + 1;
                    }
                    for (k, &i) in idx.iter().enumerate() {
                        scores_csv.push_str(&format!(
                            "{},{},{},{}\n",
                            csv_field(pid),
                            table.rows[i].index,
                            lr[k],
                            rank[k]
                        ));
                    }
                    per_post.push((pid.clone(), labels, lr, len));
                }
                let mut reports: Vec<MetricReport> = Vec::new();
                for &seed in &seeds {
                    let systems =
                        [Scorer::Logistic(Box::new(model.clone())), Scorer::Length, Scorer::Random { seed }];
                    for system in &systems {
                        let mut rankings = Vec::new();
                        let mut scores = Vec::new();
                        for (pid, labels, lr, len) in &per_post {
                            let s = match system {
                                Scorer::Logistic(_) => lr.clone(),
                                Scorer::Length => len.clone(),
                                Scorer::Random { seed } => baseline_random(pid, labels.len(), *seed),
                            };
                            rankings.push(Ranking::from_scores(pid, &s, labels)?);
                            scores.push(s);
                        }
                        reports.push(evaluate_system(system.name(), seed, &rankings, &scores)?);
                    }
                }
                for line in metrics_csv(&reports).lines().skip(1) {
                    csv.push_str(&format!("{task},{line}\n"));
                }
                let summaries = compare_systems(&reports)?;
                let block = summary_table(
                    &format!(
                        "Task: {task} ({} test posts, {} sentences, {} runs)",
                        per_post.len(),
                        rows.len(),
                        seeds.len()
                    ),
                    &summaries,
                );
                self.note(Stage::Evaluate, &format!("\n{block}"));
                text.push_str(&block);
                text.push('\n');
                outputs.push(self.write_text(&format!("scores_{task}.csv"), &scores_csv)?);
            }
            outputs.push(self.write_text("metrics.csv", &csv)?);
            outputs.push(self.write_text("metrics.txt", &text)?);
            Ok(outputs)
        })
    }

    /// Sentence texts aligned with the feature rows.
    fn sentence_texts(&self, table: &FeatureTable) -> Result<Vec<String>, CliError> {
        let path = self.artifact("labeled_corpus.json");
        if !path.is_file() {
            return Err(CliError::missing("labeled_corpus.json", "label"));
        }
        let corpus = self.read_corpus("labeled_corpus.json")?;
        let texts: HashMap<String, &str> =
            corpus.posts.iter().flat_map(|p| &p.sentences).map(|s| (s.key(), s.text.as_str())).collect();
        table
            .rows
            .iter()
            .map(|r| {
                texts
                    .get(&r.key)
                    .map(|t| t.to_string())
                    .ok_or_else(|| CliError::Data(format!("sentence `{}` is not in the corpus", r.key)))
            })
            .collect()
    }

    fn report(&self) -> Result<StageOutcome, CliError> {
        let mut inputs = vec![
            self.internal("train_summary.json", Stage::Train),
            self.internal("metrics.txt", Stage::Evaluate),
            self.internal("effects_table.html", Stage::Effects),
            self.internal("features.csv", Stage::Features),
            self.internal("ngrams.csv", Stage::Features),
            self.internal("labeled_corpus.json", Stage::Label),
            self.internal("splits.json", Stage::Ingest),
        ];
        if self.artifact("train_summary.json").is_file() {
            for task in self.trained_tasks()? {
                inputs.push(self.internal(&format!("model_{task}.json"), Stage::Train));
            }
        }
        self.run_stage(Stage::Report, &inputs, &self.config.ranker.max_reports, || {
            let metrics = fs::read_to_string(self.artifact("metrics.txt"))?;
            let effects = fs::read_to_string(self.artifact("effects_table.html"))?;
            let tasks = self.trained_tasks()?;
            let mut outputs = Vec::new();
            let mut links = Vec::new();
            if let Some(task) = tasks.first() {
                let model = self.load_model(task)?;
                let table = self.read_features()?;
                let corpus = self.read_corpus("labeled_corpus.json")?;
                let splits: Splits = self.read_json("splits.json")?;
                let titles: HashMap<&str, &str> =
                    corpus.posts.iter().map(|p| (p.id.as_str(), p.title.as_str())).collect();
                let texts = self.sentence_texts(&table)?;
                let test: HashSet<&str> =
                    splits.test.iter().take(self.config.ranker.max_reports).map(String::as_str).collect();
                let rows = table.rows_of_posts(&test);
                let scorer = Scorer::Logistic(Box::new(model.clone()));
                let pages: Vec<(String, String, String)> = table
                    .by_post(&rows)
                    .par_iter()
                    .map(|(pid, idx)| {
                        let attributions: Vec<_> = idx
                            .iter()
                            .map(|&i| {
                                let r = &table.rows[i];
                                let row = model.encoder.encode(r, &table.ngrams[i])?;
                                Ok(attribute(&scorer, &r.key, &row, r.attacked, r.success)?)
                            })
                            .collect::<Result<_, CliError>>()?;
                        let views: Vec<SentenceView> = idx
                            .iter()
                            .zip(&attributions)
                            .map(|(&i, a)| SentenceView {
                                text: &texts[i],
                                score: a.score,
                                attacked: table.rows[i].attacked,
                                successful: table.rows[i].success == SuccessLabel::Successful,
                                attribution: Some(a),
                            })
                            .collect();
                        let title = titles.get(pid.as_str()).copied().unwrap_or(pid.as_str());
                        let title = if title.is_empty() { pid.clone() } else { title.to_string() };
                        let file = format!("{}.html", sanitize(pid));
                        Ok((file, title.clone(), render_post_html(pid, &title, &views)))
                    })
                    .collect::<Result<_, CliError>>()?;
                for (file, title, html) in pages {
                    outputs.push(self.write_text(&format!("report/{file}"), &html)?);
                    links.push((file, title));
                }
                self.note(Stage::Report, &format!("{} post pages from the {task} model", links.len()));
            } else {
                self.note(Stage::Report, "no trained model; index page only");
            }
            let index = render_index_html(&links, Some(&metrics), Some(&effects));
            outputs.push(self.write_text("report/index.html", &index)?);
            Ok(outputs)
        })
    }
}

fn sanitize(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Two-column CSV (`key,value`) with an optional integer value.
fn read_key_values(path: &Path) -> Result<HashMap<String, Option<usize>>, CliError> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut out = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let value = match rec.get(1).unwrap_or("") {
            "" => None,
            v => Some(v.parse().map_err(|_| CliError::Data(format!("{}: bad value `{v}`", path.display())))?),
        };
        out.insert(rec[0].to_string(), value);
    }
    Ok(out)
}

fn read_knowledge(path: &Path) -> Result<HashMap<String, [f64; 3]>, CliError> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut out = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CliError::Data(format!("{}: bad row for `{}`", path.display(), &rec[0])))
        };
        out.insert(rec[0].to_string(), [num(2)?, num(3)?, num(4)?]);
    }
    Ok(out)
}

/// Loads a topic model artifact, e.g. for printing top words.
pub fn read_topic_model(path: &Path) -> Result<TopicModel, CliError> {
    Ok(TopicModel::read_json(open(path)?)?)
}
