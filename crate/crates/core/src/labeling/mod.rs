//! Sentence-level attack and success labels derived from comment threads.

mod quotes;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use quotes::{
    extract_direct_quotes, is_quote_line, match_direct_quote, strip_quote_lines, MatchThresholds, Quote, QuoteKind,
    QuoteMatch,
};
use quotes::{match_with, AlignedPost};

use crate::corpus::{Comment, Corpus, Post, SuccessLabel};
use crate::error::Result;
use crate::text::{content_types, segment_sentences, stopwords, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelConfig {
    pub thresholds: MatchThresholds,
    /// Shared content-word types needed for an implicit quote.
    pub implicit_min_overlap: usize,
    /// Top-level comments with more quotes than this do not yield successes.
    pub max_quotes: usize,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig { thresholds: MatchThresholds::default(), implicit_min_overlap: 4, max_quotes: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    NewSentenceAttack,
    TooManyQuotes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub comment_id: String,
    pub reason: ExclusionReason,
}

/// Why a sentence is labeled attacked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub comment_id: String,
    pub kind: QuoteKind,
    pub edit_distance: Option<usize>,
    pub coverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackLabeling {
    pub post_id: String,
    pub attacked: Vec<bool>,
    pub success: Vec<SuccessLabel>,
    pub evidence: Vec<Vec<Evidence>>,
    pub excluded: Vec<Exclusion>,
    /// Δ-winning top-level comments whose attacks count as successful.
    pub contributors: Vec<String>,
}

impl AttackLabeling {
    fn empty(post: &Post) -> Self {
        let n = post.sentences.len();
        AttackLabeling {
            post_id: post.id.clone(),
            attacked: vec![false; n],
            success: vec![SuccessLabel::Unattacked; n],
            evidence: vec![Vec::new(); n],
            excluded: Vec::new(),
            contributors: Vec::new(),
        }
    }

    pub fn n_attacked(&self) -> usize {
        self.attacked.iter().filter(|&&a| a).count()
    }

    pub fn n_successful(&self) -> usize {
        self.success.iter().filter(|&&s| s == SuccessLabel::Successful).count()
    }
}

/// Post sentences echoed by one comment sentence: those sharing at least
/// `min_overlap` distinct content-word types with it.
pub fn match_implicit(
    comment_tokens: &[String],
    post: &Post,
    stopwords: &HashSet<String>,
    min_overlap: usize,
) -> Vec<usize> {
    let comment: HashSet<&str> = content_types(comment_tokens, stopwords).into_iter().collect();
    if comment.len() < min_overlap {
        return Vec::new();
    }
    post.sentences
        .iter()
        .filter(|s| {
            content_types(&s.tokens, stopwords).into_iter().filter(|t| comment.contains(t)).count() >= min_overlap
        })
        .map(|s| s.index)
        .collect()
}

/// Everything a single comment attacks in a post.
#[derive(Debug, Clone, PartialEq)]
pub struct CommentAttacks {
    pub comment_id: String,
    pub direct: Vec<QuoteMatch>,
    /// `(sentence index, comment sentence number)` for each implicit hit.
    pub implicit: Vec<(usize, usize)>,
    pub sentences: BTreeSet<usize>,
    /// Accepted direct quotes plus comment sentences that implicitly quote
    /// a sentence not already covered by this comment's direct quotes.
    pub n_quotes: usize,
}

struct Detector<'a> {
    post: &'a Post,
    aligned: AlignedPost,
    stopwords: &'a HashSet<String>,
    config: &'a LabelConfig,
}

impl<'a> Detector<'a> {
    fn new(post: &'a Post, config: &'a LabelConfig) -> Self {
        Detector { post, aligned: AlignedPost::new(post), stopwords: stopwords(), config }
    }

    fn detect(&self, comment: &Comment) -> CommentAttacks {
        let direct: Vec<QuoteMatch> = extract_direct_quotes(&comment.id, &comment.body)
            .iter()
            .filter_map(|q| match_with(q, &self.aligned, &self.config.thresholds))
            .collect();
        let mut sentences: BTreeSet<usize> =
            direct.iter().flat_map(|m| m.sentence_indices.iter().copied()).collect();
        let direct_cover = sentences.clone();
        let mut implicit = Vec::new();
        let mut implicit_quotes = 0;
        let rest = strip_quote_lines(&comment.body);
        for (k, (text, _)) in segment_sentences(&rest).into_iter().enumerate() {
            let hits = match_implicit(&tokenize(&text), self.post, self.stopwords, self.config.implicit_min_overlap);
            if hits.iter().any(|i| !direct_cover.contains(i)) {
                implicit_quotes += 1;
            }
            for i in hits {
                sentences.insert(i);
                implicit.push((i, k));
            }
        }
        CommentAttacks {
            comment_id: comment.id.clone(),
            n_quotes: direct.len() + implicit_quotes,
            direct,
            implicit,
            sentences,
        }
    }
}

/// Attacks of one comment on a post.
pub fn detect_attacks(comment: &Comment, post: &Post, config: &LabelConfig) -> CommentAttacks {
    Detector::new(post, config).detect(comment)
}

fn label_attacked_with(detector: &Detector, top_level: &[&Comment]) -> (AttackLabeling, Vec<CommentAttacks>) {
    let mut labeling = AttackLabeling::empty(detector.post);
    let mut all = Vec::with_capacity(top_level.len());
    for comment in top_level {
        let attacks = detector.detect(comment);
        for m in &attacks.direct {
            for &i in &m.sentence_indices {
                labeling.attacked[i] = true;
                labeling.evidence[i].push(Evidence {
                    comment_id: comment.id.clone(),
                    kind: QuoteKind::Direct,
                    edit_distance: Some(m.edit_distance),
                    coverage: Some(m.coverage),
                });
            }
        }
        let mut seen = HashSet::new();
        for &(i, _) in &attacks.implicit {
            labeling.attacked[i] = true;
            if seen.insert(i) {
                labeling.evidence[i].push(Evidence {
                    comment_id: comment.id.clone(),
                    kind: QuoteKind::Implicit,
                    edit_distance: None,
                    coverage: None,
                });
            }
        }
        all.push(attacks);
    }
    for (i, attacked) in labeling.attacked.iter().enumerate() {
        if *attacked {
            labeling.success[i] = SuccessLabel::Unsuccessful;
        }
    }
    (labeling, all)
}

/// Marks every sentence quoted (directly or implicitly) by a top-level
/// comment as attacked. Non-top-level comments are ignored.
pub fn label_attacked(post: &Post, comments: &[&Comment], config: &LabelConfig) -> AttackLabeling {
    let detector = Detector::new(post, config);
    let top: Vec<&Comment> = comments.iter().copied().filter(|c| c.is_top_level()).collect();
    label_attacked_with(&detector, &top).0
}

/// Full labeling of a post from its whole comment tree.
///
/// A top-level comment whose subtree (itself included) holds a Δ makes its
/// attacked sentences successful, unless it has more than `max_quotes`
/// quotes or one of its descendants attacks a sentence it did not attack.
pub fn label_post(post: &Post, comments: &[&Comment], config: &LabelConfig) -> AttackLabeling {
    let detector = Detector::new(post, config);
    let top: Vec<&Comment> = comments.iter().copied().filter(|c| c.is_top_level()).collect();
    let (mut labeling, attacks) = label_attacked_with(&detector, &top);

    let mut children: HashMap<&str, Vec<&Comment>> = HashMap::new();
    for c in comments {
        if let Some(parent) = c.parent_id.as_deref() {
            if !c.is_top_level() {
                children.entry(parent).or_default().push(c);
            }
        }
    }
    let descendants = |root: &str| -> Vec<&Comment> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            for &child in children.get(id).map(Vec::as_slice).unwrap_or_default() {
                out.push(child);
                stack.push(&child.id);
            }
        }
        out
    };

    let mut successful = vec![false; post.sentences.len()];
    for (comment, own) in top.iter().zip(&attacks) {
        if own.sentences.is_empty() {
            continue;
        }
        let subtree = descendants(&comment.id);
        if !comment.delta_awarded && !subtree.iter().any(|c| c.delta_awarded) {
            continue;
        }
        if own.n_quotes > config.max_quotes {
            labeling.excluded.push(Exclusion { comment_id: comment.id.clone(), reason: ExclusionReason::TooManyQuotes });
            continue;
        }
        let strays = subtree.iter().any(|d| detector.detect(d).sentences.iter().any(|i| !own.sentences.contains(i)));
        if strays {
            labeling
                .excluded
                .push(Exclusion { comment_id: comment.id.clone(), reason: ExclusionReason::NewSentenceAttack });
            continue;
        }
        labeling.contributors.push(comment.id.clone());
        for &i in &own.sentences {
            successful[i] = true;
        }
    }
    for (i, s) in successful.into_iter().enumerate() {
        if s {
            labeling.success[i] = SuccessLabel::Successful;
        }
    }
    labeling
}

/// Labels every post of the corpus in parallel, in corpus order.
pub fn label_corpus(corpus: &Corpus, config: &LabelConfig) -> Vec<AttackLabeling> {
    let by_post = corpus.comments_by_post();
    corpus
        .posts
        .par_iter()
        .map(|post| {
            let comments = by_post.get(post.id.as_str()).map(Vec::as_slice).unwrap_or_default();
            label_post(post, comments, config)
        })
        .collect()
}

/// Copies labels onto the sentence records of the matching posts.
pub fn apply_labels(posts: &mut [Post], labelings: &[AttackLabeling]) {
    let by_id: HashMap<&str, &AttackLabeling> = labelings.iter().map(|l| (l.post_id.as_str(), l)).collect();
    for post in posts {
        if let Some(l) = by_id.get(post.id.as_str()) {
            for s in &mut post.sentences {
                s.attacked = l.attacked[s.index];
                s.success = l.success[s.index];
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Datasets {
    /// Posts with at least one attacked sentence.
    pub attacked: Vec<String>,
    /// Posts with at least one successfully attacked sentence.
    pub successful: Vec<String>,
}

pub fn build_datasets(posts: &[Post]) -> Datasets {
    let mut out = Datasets::default();
    for post in posts {
        if post.sentences.iter().any(|s| s.attacked) {
            out.attacked.push(post.id.clone());
        }
        if post.sentences.iter().any(|s| s.success == SuccessLabel::Successful) {
            out.successful.push(post.id.clone());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub post_id: String,
    pub sentence_index: usize,
    pub attacked: bool,
    pub success: SuccessLabel,
    pub evidence: Vec<Evidence>,
}

/// One JSON line per sentence.
pub fn write_labels_jsonl<W: Write>(mut writer: W, labelings: &[AttackLabeling]) -> Result<()> {
    for l in labelings {
        for i in 0..l.attacked.len() {
            let record = LabelRecord {
                post_id: l.post_id.clone(),
                sentence_index: i,
                attacked: l.attacked[i],
                success: l.success[i],
                evidence: l.evidence[i].clone(),
            };
            serde_json::to_writer(&mut writer, &record)?;
            writer.write_all(b"\n")?;
        }
    }
    Ok(())
}
